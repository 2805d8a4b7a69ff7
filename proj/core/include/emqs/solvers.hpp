#pragma once

#include <string>

#include "emqs/errors.hpp"
#include "emqs/formulations.hpp"
#include "emqs/types.hpp"

namespace emqs {

enum class SolveStatus { Converged, MaxIterations, Breakdown };
enum class Preconditioner { None, Jacobi };

struct SolveReport {
  std::string method;
  // Recomputed from the assembled system by one sparse matrix-vector
  // product, never taken from the solver's internal estimate.
  double relative_residual = 0.0;
  int iterations = 0;
  long long factor_nonzeros = 0;
  double wall_seconds = 0.0;
  SolveStatus status = SolveStatus::Converged;
  bool breakdown = false;
};

struct IterativeOptions {
  double tol = 1e-10;
  int max_iterations = 10000;
  Preconditioner preconditioner = Preconditioner::Jacobi;
};

/// Sparse LU with fill-reducing ordering. Throws SingularMatrixError when the
/// factorization breaks down or the recomputed residual exceeds 1e-10.
VecC solve_direct(const AssembledSystem& system, SolveReport& report);

/// Complex-symmetric systems use conjugate-orthogonal CG (unconjugated inner
/// products); general systems BiCGSTAB. Non-convergence returns the best
/// iterate with the status recorded instead of throwing.
VecC solve_iterative(const AssembledSystem& system, const IterativeOptions& opts,
                     SolveReport& report);

enum class InnerSolver { Direct, Iterative };

/// phi from the lower-right block first, then a from the upper-left with the
/// phi coupling moved to the rhs. Rejects systems not flagged
/// block_triangular.
VecC block_back_substitute(const AssembledSystem& system, SolveReport& report,
                           InnerSolver inner = InnerSolver::Direct,
                           const IterativeOptions& iter_opts = {});

// Raw-kernel entry points used by the oracle as well.
VecC cocg(const SpMatC& A, const VecC& b, const IterativeOptions& opts, SolveReport& report);
VecC bicgstab(const SpMatC& A, const VecC& b, const IterativeOptions& opts,
              SolveReport& report);

double relative_residual(const SpMatC& A, const VecC& x, const VecC& b);

}  // namespace emqs
