#include "emqs/solvers.hpp"

#include <chrono>

#include <Eigen/SparseLU>

namespace emqs {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

VecC jacobi_apply(const VecC& dinv, const VecC& r) { return dinv.cwiseProduct(r); }

VecC precond_diag_inverse(const SpMatC& A, Preconditioner p) {
  if (p == Preconditioner::None) return VecC::Ones(A.rows());
  VecC d(A.rows());
  for (int i = 0; i < A.rows(); ++i) {
    Complex v = A.coeff(i, i);
    d[i] = (std::abs(v) > 0.0) ? 1.0 / v : Complex(1.0, 0.0);
  }
  return d;
}

}  // namespace

double relative_residual(const SpMatC& A, const VecC& x, const VecC& b) {
  const double nb = b.norm();
  if (nb == 0.0) return (A * x).norm();
  return (b - A * x).norm() / nb;
}

VecC solve_direct(const AssembledSystem& system, SolveReport& report) {
  const auto t0 = Clock::now();
  report = {};
  report.method = "direct-sparselu";

  Eigen::SparseLU<SpMatC, Eigen::COLAMDOrdering<int>> lu;
  SpMatC A = system.matrix;
  A.makeCompressed();
  lu.analyzePattern(A);
  lu.factorize(A);
  if (lu.info() != Eigen::Success)
    throw SingularMatrixError("sparse LU factorization failed (matrix singular?) for '" +
                              system.formulation + "'");
  VecC x = lu.solve(system.rhs);
  report.factor_nonzeros = lu.nnzL() + lu.nnzU();
  report.relative_residual = relative_residual(system.matrix, x, system.rhs);
  report.wall_seconds = seconds_since(t0);
  if (!(report.relative_residual <= 1e-10))
    throw SingularMatrixError("direct solve residual " +
                              std::to_string(report.relative_residual) +
                              " exceeds 1e-10; system '" + system.formulation +
                              "' is singular or too ill-conditioned");
  return x;
}

VecC cocg(const SpMatC& A, const VecC& b, const IterativeOptions& opts, SolveReport& report) {
  // Conjugate-orthogonal CG for complex symmetric A: plain CG recursions with
  // the unconjugated bilinear form x^T y. Breakdown restarts once from the
  // best iterate, then fails.
  const auto t0 = Clock::now();
  report = {};
  report.method = "cocg";
  const double nb = b.norm();
  VecC x = VecC::Zero(b.size());
  if (nb == 0.0) {
    report.relative_residual = 0.0;
    report.wall_seconds = seconds_since(t0);
    return x;
  }
  const VecC dinv = precond_diag_inverse(A, opts.preconditioner);

  VecC best = x;
  double best_res = 1.0;
  int restarts = 0;
  VecC r = b - A * x;
  VecC z = jacobi_apply(dinv, r);
  VecC p = z;
  Complex rz = r.transpose() * z;  // unconjugated
  const double tiny = 1e-300;

  for (int it = 0; it < opts.max_iterations; ++it) {
    VecC q = A * p;
    Complex pq = p.transpose() * q;
    if (std::abs(pq) < tiny || std::abs(rz) < tiny) {
      if (restarts++ == 0) {
        r = b - A * x;
        z = jacobi_apply(dinv, r);
        p = z;
        rz = r.transpose() * z;
        continue;
      }
      report.breakdown = true;
      report.status = SolveStatus::Breakdown;
      break;
    }
    const Complex alpha = rz / pq;
    x += alpha * p;
    r -= alpha * q;
    ++report.iterations;
    const double res = r.norm() / nb;
    if (res < best_res) {
      best_res = res;
      best = x;
    }
    if (res <= opts.tol) break;
    z = jacobi_apply(dinv, r);
    const Complex rz_new = r.transpose() * z;
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  if (best_res > relative_residual(A, x, b)) best = x;
  report.relative_residual = relative_residual(A, best, b);
  if (report.status != SolveStatus::Breakdown && report.relative_residual > opts.tol)
    report.status = SolveStatus::MaxIterations;
  report.wall_seconds = seconds_since(t0);
  return best;
}

VecC bicgstab(const SpMatC& A, const VecC& b, const IterativeOptions& opts,
              SolveReport& report) {
  const auto t0 = Clock::now();
  report = {};
  report.method = "bicgstab";
  const double nb = b.norm();
  VecC x = VecC::Zero(b.size());
  if (nb == 0.0) {
    report.wall_seconds = seconds_since(t0);
    return x;
  }
  const VecC dinv = precond_diag_inverse(A, opts.preconditioner);

  VecC r = b - A * x;
  const VecC r0 = r;
  Complex rho = 1.0, alpha = 1.0, w = 1.0;
  VecC v = VecC::Zero(b.size()), p = VecC::Zero(b.size());
  VecC best = x;
  double best_res = r.norm() / nb;
  const double tiny = 1e-300;

  for (int it = 0; it < opts.max_iterations; ++it) {
    const Complex rho_new = r0.dot(r);  // conjugated
    if (std::abs(rho_new) < tiny || std::abs(w) < tiny) {
      report.breakdown = true;
      report.status = SolveStatus::Breakdown;
      break;
    }
    const Complex beta = (rho_new / rho) * (alpha / w);
    rho = rho_new;
    p = r + beta * (p - w * v);
    const VecC ph = jacobi_apply(dinv, p);
    v = A * ph;
    const Complex r0v = r0.dot(v);
    if (std::abs(r0v) < tiny) {
      report.breakdown = true;
      report.status = SolveStatus::Breakdown;
      break;
    }
    alpha = rho / r0v;
    const VecC s = r - alpha * v;
    const VecC sh = jacobi_apply(dinv, s);
    const VecC tvec = A * sh;
    const Complex tt = tvec.dot(tvec);
    w = (std::abs(tt) > tiny) ? tvec.dot(s) / tt : Complex(0.0, 0.0);
    x += alpha * ph + w * sh;
    r = s - w * tvec;
    ++report.iterations;
    const double res = r.norm() / nb;
    if (res < best_res) {
      best_res = res;
      best = x;
    }
    if (res <= opts.tol) break;
  }
  report.relative_residual = relative_residual(A, best, b);
  if (report.status == SolveStatus::Converged && report.relative_residual > opts.tol)
    report.status = SolveStatus::MaxIterations;
  report.wall_seconds = seconds_since(t0);
  return best;
}

VecC solve_iterative(const AssembledSystem& system, const IterativeOptions& opts,
                     SolveReport& report) {
  if (!(opts.tol > 0.0)) throw std::invalid_argument("tolerance must be > 0");
  if (system.is_symmetric) return cocg(system.matrix, system.rhs, opts, report);
  return bicgstab(system.matrix, system.rhs, opts, report);
}

VecC block_back_substitute(const AssembledSystem& system, SolveReport& report,
                           InnerSolver inner, const IterativeOptions& iter_opts) {
  if (!system.block_triangular)
    throw std::invalid_argument("block_back_substitute requires a block-triangular system");
  const auto t0 = Clock::now();
  const int na = system.partition.n_a;
  const int nphi = system.partition.n_phi;

  const SpMatC A11 = system.matrix.topLeftCorner(na, na);
  const SpMatC A12 = system.matrix.topRightCorner(na, nphi);
  const SpMatC A21 = system.matrix.bottomLeftCorner(nphi, na);
  if (A21.nonZeros() != 0)
    throw std::invalid_argument("lower-left block is not exactly zero");
  const SpMatC A22 = system.matrix.bottomRightCorner(nphi, nphi);

  auto solve_block = [&](const SpMatC& A, const VecC& b, bool symmetric) -> VecC {
    if (inner == InnerSolver::Direct) {
      Eigen::SparseLU<SpMatC, Eigen::COLAMDOrdering<int>> lu;
      SpMatC Ac = A;
      Ac.makeCompressed();
      lu.compute(Ac);
      if (lu.info() != Eigen::Success)
        throw SingularMatrixError("block back-substitution: inner factorization failed");
      return lu.solve(b);
    }
    SolveReport inner_rep;
    VecC x = symmetric ? cocg(A, b, iter_opts, inner_rep) : bicgstab(A, b, iter_opts, inner_rep);
    report.iterations += inner_rep.iterations;
    if (inner_rep.status == SolveStatus::Breakdown)
      throw SolverError("block back-substitution: inner Krylov breakdown");
    return x;
  };

  report = {};
  report.method = inner == InnerSolver::Direct ? "block-backsub-direct" : "block-backsub-cocg";
  const VecC phi = solve_block(A22, system.rhs.tail(nphi), true);
  const VecC a = solve_block(A11, VecC(system.rhs.head(na) - A12 * phi), true);
  VecC x(na + nphi);
  x << a, phi;
  report.relative_residual = relative_residual(system.matrix, x, system.rhs);
  report.wall_seconds = seconds_since(t0);
  return x;
}

}  // namespace emqs
