#include "emqs/oracle.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/SVD>
#include <Eigen/SparseLU>

#include "emqs/errors.hpp"
#include "emqs/solvers.hpp"

namespace emqs {

DiagnosticsReport dense_diagnostics(const AssembledSystem& system,
                                    const DiagnosticsOptions& opts) {
  DiagnosticsReport r;
  r.id = system.formulation;
  r.dim = system.dim();
  if (r.dim > opts.max_dofs)
    throw std::invalid_argument("dense_diagnostics: system dimension " +
                                std::to_string(r.dim) + " exceeds max_dofs " +
                                std::to_string(opts.max_dofs));
  Eigen::MatrixXcd M(system.matrix);
  r.symmetry_defect = (M - M.transpose()).cwiseAbs().maxCoeff();
  // Row/column equilibration (Ruiz iterations) before the SVD: the blocks of
  // the assembled systems differ by many orders of magnitude, and without
  // rescaling the small block's singular values drown below the numerical
  // rank threshold of the large one. Rank and nullity are invariant under
  // nonsingular diagonal scaling; the reported condition number is that of
  // the equilibrated matrix, which makes it a scale-free measure.
  for (int it = 0; it < 3; ++it) {
    for (int i = 0; i < M.rows(); ++i) {
      const double s = M.row(i).cwiseAbs().maxCoeff();
      if (s > 0.0) M.row(i) /= std::sqrt(s);
    }
    for (int j = 0; j < M.cols(); ++j) {
      const double s = M.col(j).cwiseAbs().maxCoeff();
      if (s > 0.0) M.col(j) /= std::sqrt(s);
    }
  }
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(M);
  const auto& sv = svd.singularValues();
  r.sigma_max = sv.size() ? sv(0) : 0.0;
  r.sigma_min = sv.size() ? sv(sv.size() - 1) : 0.0;
  const double thresh = r.sigma_max * r.dim * std::numeric_limits<double>::epsilon() *
                        opts.rank_threshold_factor;
  r.rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > thresh) ++r.rank;
  r.nullity = r.dim - r.rank;
  r.condition = (r.sigma_min > 0.0) ? r.sigma_max / r.sigma_min
                                    : std::numeric_limits<double>::infinity();
  return r;
}

std::vector<ConditionPoint> condition_sweep(const std::string& formulation_id, const Grid& grid,
                                            const OperatorSet& ops, const Excitation& exc,
                                            const std::vector<double>& omegas,
                                            const DiagnosticsOptions& opts) {
  std::vector<ConditionPoint> out;
  out.reserve(omegas.size());
  for (double w : omegas) {
    auto sys = assemble_fd(formulation_id, grid, ops, exc, w);
    auto diag = dense_diagnostics(sys, opts);
    out.push_back({w, diag.condition});
  }
  return out;
}

double gauge_residual(const VecC& a_full, const AssembledSystem& system, const Grid& grid,
                      const OperatorSet& ops, GaugeKind kind) {
  const Vec* weight = nullptr;
  switch (kind) {
    case GaugeKind::CoulombKappaHat:
      weight = &ops.m_kappa_hat;
      break;
    case GaugeKind::CoulombEps:
      weight = &ops.m_eps;
      break;
    case GaugeKind::MqsKappa:
      weight = &ops.m_kappa;
      break;
  }
  const Complex jw(0.0, system.omega);
  const VecC wa = jw * a_full;
  const double na = wa.norm();
  if (na == 0.0) return 0.0;

  double num2 = 0.0, opnorm2 = 0.0;
  for (int gi : system.partition.gauge_nodes) {
    if (kind == GaugeKind::MqsKappa) {
      bool conductive_adjacent = false;
      for (SpMat::InnerIterator it(ops.G, gi); it; ++it)
        if (ops.m_kappa[it.row()] > 0.0) conductive_adjacent = true;
      if (!conductive_adjacent) continue;
    }
    Complex acc = 0.0;
    for (SpMat::InnerIterator it(ops.G, gi); it; ++it) {
      const double v = (*weight)[it.row()] * it.value();
      acc += v * wa[it.row()];
      opnorm2 += v * v;
    }
    num2 += std::norm(acc);
  }
  if (opnorm2 == 0.0) return 0.0;
  return std::sqrt(num2) / (std::sqrt(opnorm2) * na);
}

int interior_zero_weight_nodes(const Grid& grid, const OperatorSet& ops,
                               const DofPartition& part, const Vec& edge_weight) {
  int count = 0;
  for (int n : part.gauge_nodes) {
    bool all_zero = true;
    for (SpMat::InnerIterator it(ops.G, n); it && all_zero; ++it)
      if (edge_weight[it.row()] != 0.0) all_zero = false;
    if (all_zero) ++count;
  }
  return count;
}

TdFdReport td_fd_consistency(const Grid& grid, const OperatorSet& ops, const Excitation& exc,
                             double omega, int steps_per_period, int n_periods) {
  if (steps_per_period < 8 || n_periods < 2)
    throw std::invalid_argument("td_fd_consistency: too few steps or periods");
  TdFdReport rep;
  const double period = 2.0 * M_PI / omega;
  const double dt = period / steps_per_period;
  TimeDomainSystem td(grid, ops, exc, dt);

  Eigen::SparseLU<SpMatC, Eigen::COLAMDOrdering<int>> lu;
  SpMatC A = td.step_system().matrix;
  A.makeCompressed();
  lu.compute(A);
  if (lu.info() != Eigen::Success)
    throw SingularMatrixError("td_fd_consistency: step matrix factorization failed");

  const int n_steps = steps_per_period * n_periods;
  rep.n_steps = n_steps;
  VecC a_full = VecC::Zero(grid.n_edges());
  VecC phi_full = VecC::Zero(grid.n_nodes());
  const int ndof = td.step_system().dim();
  Eigen::MatrixXd samples(steps_per_period, ndof);
  Eigen::MatrixXd basis(steps_per_period, 3);

  auto drive = [&](double t) {
    return std::make_pair(Complex(std::real(exc.phi_source * std::exp(Complex(0.0, omega * t)))),
                          Complex(std::real(exc.phi_ground * std::exp(Complex(0.0, omega * t)))));
  };

  for (int n = 0; n < n_steps; ++n) {
    const double t_np1 = (n + 1) * dt;
    auto [ps, pg] = drive(t_np1);
    VecC rhs = td.build_rhs(a_full, phi_full, VecC(), ps, pg);
    VecC x = lu.solve(rhs);
    td.expand(x, ps, pg, a_full, phi_full);
    const int tail = n - (n_steps - steps_per_period);
    if (tail >= 0) {
      samples.row(tail) = x.real().transpose();
      basis(tail, 0) = std::cos(omega * t_np1);
      basis(tail, 1) = std::sin(omega * t_np1);
      basis(tail, 2) = 1.0;
    }
  }

  // Per-DOF least-squares sinusoid fit x(t) ~ c cos + s sin + const, robust
  // to non-integer samples per period; phasor X = c - j s.
  Eigen::MatrixXd coeff =
      basis.colPivHouseholderQr().solve(samples);  // 3 x ndof
  Eigen::MatrixXd fitres = samples - basis * coeff;

  AssembledSystem fd = fd_symmetric_full_continuity(grid, ops, exc, omega);
  SolveReport fdrep;
  VecC xfd = solve_direct(fd, fdrep);

  const int na = fd.partition.n_a;
  double max_a = 0.0, max_phi = 0.0;
  for (int i = 0; i < ndof; ++i) {
    const double m = std::abs(xfd[i]);
    if (i < na)
      max_a = std::max(max_a, m);
    else
      max_phi = std::max(max_phi, m);
  }

  for (int i = 0; i < ndof; ++i) {
    const Complex xtd(coeff(0, i), -coeff(1, i));
    const Complex ref = xfd[i];
    const double norm = (i < na) ? max_a : max_phi;
    if (norm == 0.0) continue;
    const double amp_err = std::abs(std::abs(xtd) - std::abs(ref)) / norm;
    if (i < na)
      rep.max_amp_err_a = std::max(rep.max_amp_err_a, amp_err);
    else
      rep.max_amp_err_phi = std::max(rep.max_amp_err_phi, amp_err);
    if (std::abs(ref) >= 0.01 * norm) {
      double dphase = std::arg(xtd / ref) * 180.0 / M_PI;
      rep.max_phase_err_deg = std::max(rep.max_phase_err_deg, std::abs(dphase));
    }
  }
  // Fit residuals are normalized by the largest signal of the DOF block, not
  // per-DOF, so noise-level DOFs cannot dominate the transient flag.
  double sig_a = 0.0, sig_phi = 0.0;
  for (int i = 0; i < ndof; ++i) {
    const double s = samples.col(i).norm();
    if (i < na)
      sig_a = std::max(sig_a, s);
    else
      sig_phi = std::max(sig_phi, s);
  }
  for (int i = 0; i < ndof; ++i) {
    const double sig = (i < na) ? sig_a : sig_phi;
    if (sig > 0.0)
      rep.max_fit_residual = std::max(rep.max_fit_residual, fitres.col(i).norm() / sig);
  }
  rep.transient_flagged = rep.max_fit_residual > 0.05;
  return rep;
}

}  // namespace emqs
