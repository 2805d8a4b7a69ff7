#pragma once

#include <string>
#include <vector>

#include "emqs/formulations.hpp"
#include "emqs/grid.hpp"
#include "emqs/operators.hpp"
#include "emqs/types.hpp"

namespace emqs {

/// Dense-algebra certification of one assembled system. Rank, nullity and
/// the condition number are computed from the row/column-equilibrated matrix
/// (Ruiz scaling): the raw blocks differ by many orders of magnitude and
/// would otherwise hide genuine null spaces below the SVD's resolution.
struct DiagnosticsReport {
  std::string id;
  int dim = 0;
  int rank = 0;
  int nullity = 0;
  double symmetry_defect = 0.0;  // max |M - M^T|, of the raw matrix
  double condition = 0.0;        // sigma_max / sigma_min after equilibration
  double sigma_min = 0.0;
  double sigma_max = 0.0;
};

struct DiagnosticsOptions {
  int max_dofs = 3000;
  // Entries span many orders of magnitude; the loose factor avoids false
  // full-rank verdicts. Overridable.
  double rank_threshold_factor = 64.0;
};

DiagnosticsReport dense_diagnostics(const AssembledSystem& system,
                                    const DiagnosticsOptions& opts = {});

struct ConditionPoint {
  double omega = 0.0;
  double condition = 0.0;
};

std::vector<ConditionPoint> condition_sweep(const std::string& formulation_id, const Grid& grid,
                                            const OperatorSet& ops, const Excitation& exc,
                                            const std::vector<double>& omegas,
                                            const DiagnosticsOptions& opts = {});

enum class GaugeKind { CoulombKappaHat, CoulombEps, MqsKappa };

/// Normalized implicit-gauge residual ||G^T M_alpha (j w a)|| /
/// (||G^T M_alpha|| ||j w a||), restricted to interior nodes (every adjacent
/// edge free), where both coupled equations hold and the gauge must emerge.
/// The MQS kind restricts further to conductor-adjacent nodes.
double gauge_residual(const VecC& a_full, const AssembledSystem& system, const Grid& grid,
                      const OperatorSet& ops, GaugeKind kind);

struct TdFdReport {
  // Amplitude errors normalized by the largest FD phasor magnitude of the
  // respective DOF block; phase errors evaluated on DOFs above 1% of that
  // magnitude.
  double max_amp_err_a = 0.0;
  double max_amp_err_phi = 0.0;
  double max_phase_err_deg = 0.0;
  double max_fit_residual = 0.0;  // relative LSQ fit residual over the last period
  bool transient_flagged = false;
  int n_steps = 0;
};

/// Runs the implicit-Euler time stepper against the FD phasor of the
/// symmetric formulation. The terminal drive is Re(phi_source e^{j w t});
/// steady-state phasors are extracted by a least-squares sinusoid fit over
/// the last period.
TdFdReport td_fd_consistency(const Grid& grid, const OperatorSet& ops, const Excitation& exc,
                             double omega, int steps_per_period, int n_periods);

/// Gauge nodes whose adjacent edges all carry zero weight (the dimension of
/// the interior non-conductive gradient kernel).
int interior_zero_weight_nodes(const Grid& grid, const OperatorSet& ops,
                               const DofPartition& part, const Vec& edge_weight);

}  // namespace emqs
