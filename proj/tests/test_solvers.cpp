#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "emqs/errors.hpp"
#include "emqs/solvers.hpp"
#include "test_helpers.hpp"

using namespace emqs;
using emqs::testing::make_bar_case;

namespace {

constexpr double kOmega = 2.0 * M_PI * 1e7;

// Well-conditioned complex-symmetric test matrix: diagonally dominant with
// symmetric off-diagonal noise.
SpMatC random_complex_symmetric(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Complex v(u(rng), u(rng));
      M(i, j) = v;
      M(j, i) = v;
    }
  for (int i = 0; i < n; ++i) M(i, i) += Complex(2.0 * n, n);
  return M.sparseView();
}

}  // namespace

TEST_CASE("direct solver matches a dense solve and reports honest residuals") {
  AssembledSystem sys;
  sys.formulation = "synthetic";
  sys.matrix = random_complex_symmetric(40, 3);
  VecC xref = VecC::Random(40);
  sys.rhs = sys.matrix * xref;
  SolveReport rep;
  VecC x = solve_direct(sys, rep);

  Eigen::MatrixXcd A(sys.matrix);
  VecC xd = A.fullPivLu().solve(sys.rhs);
  CHECK((x - xd).norm() / xd.norm() < 1e-12);
  CHECK((x - xref).norm() / xref.norm() < 1e-12);

  CHECK(rep.method == "direct-sparselu");
  CHECK(rep.status == SolveStatus::Converged);
  CHECK(rep.relative_residual < 1e-12);
  CHECK(rep.relative_residual ==
        doctest::Approx(relative_residual(sys.matrix, x, sys.rhs)));
  CHECK(rep.factor_nonzeros > 0);

  // An assembled physical system also solves with an honest tiny residual.
  auto c = make_bar_case(3, 10.0, 0.0, 1e-3);
  auto phys = assemble_fd("symmetric", c.grid, c.ops, c.exc, kOmega);
  SolveReport prep;
  VecC xp = solve_direct(phys, prep);
  CHECK(prep.relative_residual < 1e-10);
  CHECK(prep.relative_residual ==
        doctest::Approx(relative_residual(phys.matrix, xp, phys.rhs)));
}

TEST_CASE("direct solver throws on an exactly singular matrix") {
  AssembledSystem sys;
  sys.formulation = "synthetic-singular";
  Eigen::MatrixXcd M(3, 3);
  M << Complex(1, 0), Complex(2, 1), Complex(0, 0),  //
      Complex(1, 0), Complex(2, 1), Complex(0, 0),   // duplicate row
      Complex(0, 0), Complex(0, 0), Complex(1, 0);
  sys.matrix = M.sparseView();
  sys.rhs = VecC::Ones(3);
  SolveReport rep;
  CHECK_THROWS_AS(solve_direct(sys, rep), SingularMatrixError);
}

TEST_CASE("cocg solves complex-symmetric systems") {
  const int n = 60;
  SpMatC A = random_complex_symmetric(n, 7);
  VecC xref = VecC::Random(n);
  VecC b = A * xref;
  IterativeOptions opts;
  opts.tol = 1e-12;
  SolveReport rep;
  VecC x = cocg(A, b, opts, rep);
  CHECK(rep.status == SolveStatus::Converged);
  CHECK((x - xref).norm() / xref.norm() < 1e-8);
  CHECK(rep.iterations > 0);
}

TEST_CASE("bicgstab solves general systems") {
  const int n = 60;
  SpMatC A = random_complex_symmetric(n, 11);
  // Break the symmetry.
  Eigen::MatrixXcd D(A);
  D(0, n - 1) += Complex(3.0, 1.0);
  SpMatC A2 = D.sparseView();
  VecC xref = VecC::Random(n);
  VecC b = A2 * xref;
  IterativeOptions opts;
  opts.tol = 1e-12;
  SolveReport rep;
  VecC x = bicgstab(A2, b, opts, rep);
  CHECK(rep.status == SolveStatus::Converged);
  CHECK((x - xref).norm() / xref.norm() < 1e-7);
}

TEST_CASE("iterative front end converges on the regularized system") {
  auto c = make_bar_case(2, 10.0, 0.0, 1e-3);
  auto sys = assemble_fd("regularized", c.grid, c.ops, c.exc, kOmega);
  IterativeOptions opts;
  opts.tol = 1e-11;
  opts.max_iterations = 20000;
  SolveReport rep;
  VecC x = solve_iterative(sys, opts, rep);
  CHECK(rep.status == SolveStatus::Converged);
  CHECK(relative_residual(sys.matrix, x, sys.rhs) < 1e-9);
}

TEST_CASE("non-convergence is reported, not thrown") {
  auto c = make_bar_case(2, 10.0, 0.0, 1e-3);
  auto sys = assemble_fd("symmetric", c.grid, c.ops, c.exc, kOmega);
  IterativeOptions opts;
  opts.tol = 1e-15;
  opts.max_iterations = 2;
  SolveReport rep;
  CHECK_NOTHROW(solve_iterative(sys, opts, rep));
  CHECK(rep.status != SolveStatus::Converged);
}

TEST_CASE("block back-substitution equals a monolithic solve") {
  auto c = make_bar_case(3, 10.0, 0.0, 1e-3);
  auto sys = assemble_fd("tsm", c.grid, c.ops, c.exc, kOmega);
  REQUIRE(sys.block_triangular);

  SolveReport r1, r2;
  VecC xb = block_back_substitute(sys, r1);
  VecC xm = solve_direct(sys, r2);
  CHECK((xb - xm).norm() / xm.norm() <= 1e-12);

  auto sym = assemble_fd("symmetric", c.grid, c.ops, c.exc, kOmega);
  SolveReport r3;
  CHECK_THROWS_AS(block_back_substitute(sym, r3), std::invalid_argument);
}
