#pragma once

#include <optional>
#include <string>
#include <vector>

#include "emqs/grid.hpp"
#include "emqs/operators.hpp"
#include "emqs/types.hpp"

namespace emqs {

/// Sources and constraints: edge source currents, terminal Dirichlet node
/// sets, and an optional nodal charge source. The tangential boundary edges
/// (n x A = 0) are implied by the grid.
struct Excitation {
  VecC j_s;    // per edge; empty means zero
  VecC rho_s;  // per node; empty means zero
  std::vector<int> source_nodes;
  std::vector<int> ground_nodes;
  Complex phi_source{0.0, 0.0};
  Complex phi_ground{0.0, 0.0};
};

/// Free/constrained split of the edge and node degrees of freedom.
/// Gauge nodes are the interior free nodes (every adjacent edge free); they
/// carry Lagrange multipliers when a formulation uses them.
struct DofPartition {
  std::vector<int> free_edges;        // flat edge ids, ascending
  std::vector<int> free_nodes;        // flat node ids, ascending
  std::vector<int> gauge_nodes;       // subset of free_nodes, interior only
  std::vector<int> edge_to_free;      // -1 when constrained
  std::vector<int> node_to_free;
  std::vector<int> node_to_gauge;
  int n_a = 0, n_phi = 0, n_gamma = 0;
};

DofPartition make_partition(const Grid& grid, const Excitation& exc, bool with_multiplier);

/// One assembled block system: reduced matrix and right-hand side over
/// [a-free; phi-free (; gamma)], with structural flags and enough context to
/// expand solutions back to full entity vectors.
struct AssembledSystem {
  std::string formulation;
  SpMatC matrix;
  VecC rhs;
  DofPartition partition;
  VecC nodal_dirichlet;  // full node vector of the nodal unknown (phi or psi)
  bool uses_psi = false;
  bool is_symmetric = false;
  bool expected_singular = false;
  bool block_triangular = false;
  double omega = 0.0;  // rad/s; 0 for time-domain step matrices
  double dt = 0.0;

  int dim() const { return static_cast<int>(matrix.rows()); }
  // Expand a reduced solution into full (a, phi) entity vectors; psi-based
  // systems map the nodal unknown back through phi = j*omega*psi.
  void expand(const VecC& x, VecC& a_full, VecC& phi_full) const;
};

// --- Frequency-domain assemblies (omega in rad/s, omega > 0 required) ---

AssembledSystem fd_monolithic_darwin(const Grid& grid, const OperatorSet& ops,
                                     const Excitation& exc, double omega);

AssembledSystem fd_darwin_regularized(const Grid& grid, const OperatorSet& ops,
                                      const Excitation& exc, double omega,
                                      bool scaled_psi = false);

AssembledSystem fd_symmetric_full_continuity(const Grid& grid, const OperatorSet& ops,
                                             const Excitation& exc, double omega);

/// Diagonal gauge-weight matrix over the gauge nodes, scaled so the grad-div
/// augmentation's largest diagonal matches the curlcurl block's largest
/// diagonal.
Vec default_gauge_weight(const Grid& grid, const OperatorSet& ops, const DofPartition& part,
                         double omega);

AssembledSystem fd_lagrange_coulomb(const Grid& grid, const OperatorSet& ops,
                                    const Excitation& exc, double omega,
                                    const Vec& N_diag);  // empty: N = 0

AssembledSystem fd_graddiv_schur(const Grid& grid, const OperatorSet& ops,
                                 const Excitation& exc, double omega, const Vec& N_diag);

AssembledSystem fd_eqs_gauge(const Grid& grid, const OperatorSet& ops, const Excitation& exc,
                             double omega);

AssembledSystem fd_full_maxwell_two_step(const Grid& grid, const OperatorSet& ops,
                                         const Excitation& exc, double omega);

AssembledSystem fd_dd_combined_gauge(const Grid& grid, const OperatorSet& ops,
                                     const Excitation& exc, double omega, Complex beta);

// --- Time domain ---

/// Constant implicit-Euler step system (gamma = 1 by default): factor the
/// step matrix once, rebuild the right-hand side each step from the previous
/// full state and the current drive.
class TimeDomainSystem {
 public:
  TimeDomainSystem(const Grid& grid, const OperatorSet& ops, const Excitation& exc, double dt,
                   double gamma = 1.0);

  const AssembledSystem& step_system() const { return sys_; }
  double beta() const { return beta_; }
  double dt() const { return dt_; }

  /// Reduced rhs for the step to t^{n+1}. a/phi are full entity vectors of
  /// the previous step; dirichlet values are the terminal potentials at
  /// t^{n+1} (a = 0 on boundary edges always).
  VecC build_rhs(const VecC& a_full, const VecC& phi_full, const VecC& js_np1,
                 Complex phi_source_np1, Complex phi_ground_np1) const;

  /// Full state from a reduced solution and the Dirichlet data used in
  /// build_rhs.
  void expand(const VecC& x, Complex phi_source, Complex phi_ground, VecC& a_full,
              VecC& phi_full) const;

 private:
  AssembledSystem sys_;
  double dt_, beta_;
  const Grid* grid_;
  SpMatC h1_phi_;  // beta * M_eps * G           (edge rows)
  SpMatC gt_;      // G^T
  SpMatC h2_a_;    // G^T * M_{sigma,dt}         (node rows)
  SpMatC h2_phi_;  // G^T * M_eps * G
  Vec h1_a_;       // beta * m_kappa diagonal
  SpMatC fold_;    // free rows x constrained node columns of the step matrix
  std::vector<int> source_nodes_, ground_nodes_;
};

std::string formulation_ids();  // comma-separated list of known ids

/// Assemble by formulation id: `monolithic`, `regularized`, `regularized-psi`,
/// `symmetric`, `lagrange`, `graddiv`, `eqs-gauge`, `tsm`, `dd-combined`.
/// (`td-symmetric` is reached through TimeDomainSystem.)
AssembledSystem assemble_fd(const std::string& id, const Grid& grid, const OperatorSet& ops,
                            const Excitation& exc, double omega);

}  // namespace emqs
