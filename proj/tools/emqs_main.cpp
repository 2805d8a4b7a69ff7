#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "emqs/errors.hpp"
#include "emqs/matrix_market.hpp"
#include "emqs/oracle.hpp"
#include "emqs/scenario.hpp"

namespace {

struct GlobalFlags {
  std::optional<std::string> solver;
  std::optional<double> tol;
  std::optional<double> kappa_hat;
  std::optional<std::string> out_dir;
};

emqs::Scenario load_with_overrides(const std::string& path, const GlobalFlags& g) {
  emqs::Scenario sc = emqs::load_scenario_file(path);
  if (g.solver) sc.solver.method = *g.solver;
  if (g.tol) sc.solver.tol = *g.tol;
  if (g.kappa_hat) sc.material_options.kappa_hat = *g.kappa_hat;
  if (g.out_dir) sc.output_dir = *g.out_dir;
  return sc;
}

double first_frequency(const emqs::Scenario& sc) {
  if (sc.frequency_drive && !sc.frequency_drive->frequencies_hz.empty())
    return sc.frequency_drive->frequencies_hz.front();
  if (sc.time_drive && sc.time_drive->frequency_hz > 0.0) return sc.time_drive->frequency_hz;
  throw std::invalid_argument("scenario has no usable drive frequency");
}

int cmd_run(const std::string& path, const GlobalFlags& g) {
  emqs::Scenario sc = load_with_overrides(path, g);
  emqs::RunResult rr = emqs::run_scenario(sc);
  for (const auto& l : rr.lines) std::cout << l << "\n";
  std::cout << "outputs written to " << sc.output_dir << "/" << sc.name << "\n";
  return rr.exit_code;
}

int cmd_verify(const std::string& path, const GlobalFlags& g, int max_dofs) {
  emqs::Scenario sc = load_with_overrides(path, g);
  emqs::ScenarioSetup setup = emqs::build_setup(sc);
  const double omega = 2.0 * M_PI * first_frequency(sc);
  emqs::DiagnosticsOptions opts;
  opts.max_dofs = max_dofs;

  std::printf("%-16s %6s %6s %7s %12s %12s %10s\n", "formulation", "dim", "rank", "nullity",
              "condition", "sym-defect", "verdict");
  int failures = 0;
  for (const std::string& id : sc.formulations) {
    try {
      emqs::AssembledSystem sys =
          emqs::assemble_fd(id, setup.grid, setup.ops, setup.excitation, omega);
      if (sys.dim() > max_dofs) {
        std::printf("%-16s %6d  skipped: exceeds --max-dofs %d\n", id.c_str(), sys.dim(),
                    max_dofs);
        continue;
      }
      emqs::DiagnosticsReport r = emqs::dense_diagnostics(sys, opts);
      const bool singular = r.nullity > 0;
      const bool ok = singular == sys.expected_singular;
      if (!ok) ++failures;
      std::printf("%-16s %6d %6d %7d %12.4g %12.4g %10s\n", id.c_str(), r.dim, r.rank,
                  r.nullity, r.condition, r.symmetry_defect,
                  ok ? (singular ? "singular*" : "regular") : "UNEXPECTED");
    } catch (const std::exception& e) {
      ++failures;
      std::printf("%-16s error: %s\n", id.c_str(), e.what());
    }
  }
  std::printf("(*: singular by construction)\n");
  return failures == 0 ? 0 : 1;
}

int cmd_sweep(const std::string& path, const GlobalFlags& g, const std::vector<double>& freqs,
              int max_dofs) {
  emqs::Scenario sc = load_with_overrides(path, g);
  emqs::ScenarioSetup setup = emqs::build_setup(sc);
  emqs::DiagnosticsOptions opts;
  opts.max_dofs = max_dofs;
  std::vector<double> omegas;
  for (double f : freqs) {
    if (f <= 0.0) {
      std::cerr << "sweep frequencies must be positive\n";
      return 2;
    }
    omegas.push_back(2.0 * M_PI * f);
  }
  std::printf("formulation,frequency_hz,condition\n");
  for (const std::string& id : sc.formulations) {
    try {
      auto pts = emqs::condition_sweep(id, setup.grid, setup.ops, setup.excitation, omegas, opts);
      for (size_t i = 0; i < pts.size(); ++i)
        std::printf("%s,%.17g,%.17g\n", id.c_str(), freqs[i], pts[i].condition);
    } catch (const std::exception& e) {
      std::cerr << id << ": " << e.what() << "\n";
      return 1;
    }
  }
  return 0;
}

int cmd_export_matrix(const std::string& path, const GlobalFlags& g, const std::string& id,
                      const std::string& out, std::optional<double> freq) {
  emqs::Scenario sc = load_with_overrides(path, g);
  emqs::ScenarioSetup setup = emqs::build_setup(sc);
  const double f_hz = freq ? *freq : first_frequency(sc);
  emqs::AssembledSystem sys =
      emqs::assemble_fd(id, setup.grid, setup.ops, setup.excitation, 2.0 * M_PI * f_hz);
  emqs::write_matrix_market(sys.matrix, out);
  std::cout << "wrote " << sys.dim() << "x" << sys.dim() << " system for '" << id << "' at "
            << f_hz << " Hz to " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structured-grid electromagnetic quasistatic solver suite"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  GlobalFlags g;
  app.add_option_function<std::string>(
         "--solver", [&](const std::string& v) { g.solver = v; }, "direct or iterative")
      ->check(CLI::IsMember({"direct", "iterative"}));
  app.add_option_function<double>(
      "--tol", [&](double v) { g.tol = v; }, "iterative solver tolerance");
  app.add_option_function<double>(
      "--kappa-hat", [&](double v) { g.kappa_hat = v; },
      "artificial conductivity override (S/m)");
  app.add_option_function<std::string>(
      "--out-dir", [&](const std::string& v) { g.out_dir = v; }, "output directory override");

  std::string scenario_path;
  int max_dofs = 3000;
  std::vector<double> freqs;
  std::string formulation, matrix_out;
  double export_freq = 0.0;

  CLI::App* run = app.add_subcommand("run", "solve a scenario and export fields");
  run->add_option("scenario", scenario_path, "scenario JSON file")->required();

  CLI::App* verify =
      app.add_subcommand("verify", "dense-algebra diagnostics of the assembled systems");
  verify->add_option("scenario", scenario_path, "scenario JSON file")->required();
  verify->add_option("--max-dofs", max_dofs, "densification limit");

  CLI::App* sweep = app.add_subcommand("sweep", "condition numbers over a frequency list");
  sweep->add_option("scenario", scenario_path, "scenario JSON file")->required();
  sweep->add_option("--freqs", freqs, "frequencies in Hz")->required()->delimiter(',');
  sweep->add_option("--max-dofs", max_dofs, "densification limit");

  CLI::App* expm = app.add_subcommand("export-matrix", "write one system in Matrix Market form");
  expm->add_option("scenario", scenario_path, "scenario JSON file")->required();
  expm->add_option("--formulation", formulation, "formulation id")->required();
  expm->add_option("--out", matrix_out, "output .mtx path")->required();
  CLI::Option* fopt = expm->add_option("--frequency", export_freq, "frequency in Hz");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(scenario_path, g);
    if (verify->parsed()) return cmd_verify(scenario_path, g, max_dofs);
    if (sweep->parsed()) return cmd_sweep(scenario_path, g, freqs, max_dofs);
    if (expm->parsed())
      return cmd_export_matrix(scenario_path, g, formulation, matrix_out,
                               fopt->count() ? std::optional<double>(export_freq)
                                             : std::nullopt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
