#pragma once

#include <optional>
#include <string>
#include <vector>

#include "emqs/fields.hpp"
#include "emqs/formulations.hpp"
#include "emqs/grid.hpp"
#include "emqs/materials.hpp"
#include "emqs/solvers.hpp"
#include "emqs/types.hpp"

namespace emqs {

struct TerminalSpec {
  Eigen::Vector3d lo, hi;  // node selection box on the domain boundary
  double potential = 0.0;  // V (ground terminal: 0)
};

struct FrequencyDrive {
  std::vector<double> frequencies_hz;
};

struct TimeDrive {
  double amplitude = 0.0;     // V, sinusoidal terminal drive
  double frequency_hz = 0.0;  // > 0; 0 selects a DC drive
  double dt = 0.0;            // s
  int n_steps = 0;
  bool fd_check = false;  // run the FD/TD consistency oracle
};

struct SolverSettings {
  std::string method = "direct";  // direct | iterative
  double tol = 1e-10;
  int max_iterations = 20000;
  std::string preconditioner = "jacobi";  // none | jacobi
};

struct Scenario {
  std::string name;
  GridSpec grid;
  MaterialBox background;
  std::vector<MaterialBox> boxes;
  MaterialOptions material_options;
  TerminalSpec source, ground;
  std::optional<FrequencyDrive> frequency_drive;
  std::optional<TimeDrive> time_drive;
  std::vector<std::string> formulations;
  SolverSettings solver;
  std::string output_dir = "out";
};

/// Strict JSON parsing: unknown keys are rejected with their path.
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario_file(const std::string& path);

/// Grid, materials, operators and excitation realized from a scenario.
struct ScenarioSetup {
  Grid grid;
  MaterialField materials;
  OperatorSet ops;
  Excitation excitation;
  std::vector<std::string> warnings;  // e.g. the wavelength validity check
};

ScenarioSetup build_setup(const Scenario& sc);

struct RunResult {
  int exit_code = 0;
  std::vector<std::string> lines;  // human-readable per-formulation summary
};

/// Assemble/solve/reconstruct/export for every formulation x frequency; when
/// `tsm` is requested every other formulation is compared against it.
RunResult run_scenario(const Scenario& sc);

}  // namespace emqs
