#include <doctest.h>

#include <Eigen/Dense>

#include "emqs/errors.hpp"
#include "emqs/formulations.hpp"
#include "emqs/solvers.hpp"
#include "test_helpers.hpp"

using namespace emqs;
using emqs::testing::make_bar_case;

namespace {

constexpr double kOmega = 2.0 * M_PI * 1e7;

double symmetry_defect(const SpMatC& M) {
  Eigen::MatrixXcd D(M);
  return (D - D.transpose()).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("partition on the 2x2x2 case") {
  auto c = make_bar_case(2, 10.0, 0.0, 1e-3);
  DofPartition p = make_partition(c.grid, c.exc, false);
  CHECK(p.n_a == 6);  // two interior edges per axis
  CHECK(p.n_phi == 27 - 8);  // all nodes minus the eight terminal nodes
  CHECK(p.gauge_nodes.size() == 1);
  CHECK(p.gauge_nodes[0] == c.grid.node_index(1, 1, 1));
  for (int e : p.free_edges) CHECK(!c.grid.is_boundary_edge(e));
  // Maps invert each other.
  for (size_t i = 0; i < p.free_edges.size(); ++i)
    CHECK(p.edge_to_free[p.free_edges[i]] == static_cast<int>(i));
  for (size_t i = 0; i < p.free_nodes.size(); ++i)
    CHECK(p.node_to_free[p.free_nodes[i]] == static_cast<int>(i));
}

TEST_CASE("static limit is rejected") {
  auto c = make_bar_case(2, 10.0, 0.0, 1e-3);
  for (const char* id : {"monolithic", "regularized", "regularized-psi", "symmetric",
                         "lagrange", "graddiv", "eqs-gauge", "tsm", "dd-combined"}) {
    CHECK_THROWS_AS(assemble_fd(id, c.grid, c.ops, c.exc, 0.0), StaticLimitError);
    CHECK_THROWS_AS(assemble_fd(id, c.grid, c.ops, c.exc, -1.0), StaticLimitError);
  }
  CHECK_THROWS_AS(assemble_fd("no-such-id", c.grid, c.ops, c.exc, kOmega),
                  std::invalid_argument);
}

TEST_CASE("symmetry flags match exact transposition") {
  auto c = make_bar_case(2, 10.0, 0.0, 1e-3);
  for (const char* id : {"symmetric", "lagrange", "graddiv", "dd-combined"}) {
    auto sys = assemble_fd(id, c.grid, c.ops, c.exc, kOmega);
    INFO(id);
    CHECK(sys.is_symmetric);
    CHECK(symmetry_defect(sys.matrix) == 0.0);
  }
  auto reg = assemble_fd("regularized", c.grid, c.ops, c.exc, kOmega);
  CHECK(!reg.is_symmetric);
  CHECK(symmetry_defect(reg.matrix) > 0.0);

  TimeDomainSystem td(c.grid, c.ops, c.exc, 1e-9);
  CHECK(td.step_system().is_symmetric);
  CHECK(symmetry_defect(td.step_system().matrix) == 0.0);
}

TEST_CASE("dd-combined at beta = j*omega reproduces the symmetric system") {
  auto c = make_bar_case(3, 10.0, 0.0, 1e-3);
  auto sym = fd_symmetric_full_continuity(c.grid, c.ops, c.exc, kOmega);
  auto dd = fd_dd_combined_gauge(c.grid, c.ops, c.exc, kOmega, Complex(0.0, kOmega));
  Eigen::MatrixXcd diff = Eigen::MatrixXcd(sym.matrix) - Eigen::MatrixXcd(dd.matrix);
  CHECK(diff.cwiseAbs().maxCoeff() == 0.0);
  CHECK((sym.rhs - dd.rhs).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("psi scaling is a pure change of variables") {
  // A not-too-small artificial conductivity keeps the non-symmetric system
  // well conditioned, so the two LU solves agree to the equivalence level.
  auto c = make_bar_case(3, 10.0, 0.0, 0.1);
  auto plain = fd_darwin_regularized(c.grid, c.ops, c.exc, kOmega, false);
  auto scaled = fd_darwin_regularized(c.grid, c.ops, c.exc, kOmega, true);
  CHECK(!plain.uses_psi);
  CHECK(scaled.uses_psi);

  SolveReport r1, r2;
  VecC x1 = solve_direct(plain, r1);
  VecC x2 = solve_direct(scaled, r2);
  VecC a1, p1, a2, p2;
  plain.expand(x1, a1, p1);
  scaled.expand(x2, a2, p2);
  CHECK((a1 - a2).norm() / a1.norm() <= 1e-10);
  CHECK((p1 - p2).norm() / p1.norm() <= 1e-10);
}

TEST_CASE("Lagrange multiplier and Schur grad-div agree with matching N") {
  auto c = make_bar_case(3, 10.0, 0.0, 1e-3);
  DofPartition part = make_partition(c.grid, c.exc, true);
  Vec N = default_gauge_weight(c.grid, c.ops, part, kOmega);
  REQUIRE(N.size() == part.n_gamma);
  CHECK(N.minCoeff() > 0.0);

  auto lag = fd_lagrange_coulomb(c.grid, c.ops, c.exc, kOmega, N);
  auto schur = fd_graddiv_schur(c.grid, c.ops, c.exc, kOmega, N);
  CHECK(lag.dim() == schur.dim() + part.n_gamma);

  SolveReport r1, r2;
  VecC xl = solve_direct(lag, r1);
  VecC xs = solve_direct(schur, r2);
  VecC al, pl, as_, ps;
  lag.expand(xl, al, pl);
  schur.expand(xs, as_, ps);
  CHECK((al - as_).norm() / as_.norm() <= 1e-10);
  CHECK((pl - ps).norm() / ps.norm() <= 1e-10);

  // The multiplier is numerically inactive.
  const double gamma_norm = xl.tail(part.n_gamma).norm();
  const double phi_norm = xl.segment(part.n_a, part.n_phi).norm();
  CHECK(gamma_norm / phi_norm <= 1e-8);

  // The Schur variant demands an SPD weight.
  Vec bad = N;
  bad[0] = 0.0;
  CHECK_THROWS_AS(fd_graddiv_schur(c.grid, c.ops, c.exc, kOmega, bad),
                  std::invalid_argument);
}

TEST_CASE("two-step systems are genuinely block triangular") {
  auto c = make_bar_case(3, 10.0, 0.0, 1e-3);
  for (const char* id : {"tsm", "eqs-gauge"}) {
    auto sys = assemble_fd(id, c.grid, c.ops, c.exc, kOmega);
    INFO(id);
    CHECK(sys.block_triangular);
    const int na = sys.partition.n_a;
    Eigen::MatrixXcd M(sys.matrix);
    CHECK(M.block(na, 0, sys.partition.n_phi, na).cwiseAbs().maxCoeff() == 0.0);
    // The upper-right coupling must be present, otherwise the scheme would
    // decouple entirely.
    CHECK(M.block(0, na, na, sys.partition.n_phi).cwiseAbs().maxCoeff() > 0.0);
  }
}

TEST_CASE("nodal charge source enters only its own continuity row") {
  auto c = make_bar_case(3, 10.0, 0.0, 1e-3);
  auto base = fd_dd_combined_gauge(c.grid, c.ops, c.exc, kOmega, Complex(0.0, kOmega));

  Excitation exc2 = c.exc;
  exc2.rho_s = VecC::Zero(c.grid.n_nodes());
  const int node = c.grid.node_index(1, 2, 2);
  exc2.rho_s[node] = Complex(1e-9, 0.0);
  auto withq = fd_dd_combined_gauge(c.grid, c.ops, exc2, kOmega, Complex(0.0, kOmega));

  VecC d = withq.rhs - base.rhs;
  const int row = base.partition.n_a + base.partition.node_to_free[node];
  for (int i = 0; i < d.size(); ++i) {
    if (i == row)
      CHECK(std::abs(d[i]) > 0.0);
    else
      CHECK(std::abs(d[i]) == 0.0);
  }
  // Scaling is beta * rho_S.
  const Complex expect = Complex(0.0, kOmega) * exc2.rho_s[node];
  CHECK(std::abs(d[row] - expect) <= 1e-12 * std::abs(expect));
}

TEST_CASE("expected_singular flags") {
  auto c = make_bar_case(2, 10.0, 0.0, 1e-3);
  CHECK(assemble_fd("monolithic", c.grid, c.ops, c.exc, kOmega).expected_singular);
  CHECK(!assemble_fd("regularized", c.grid, c.ops, c.exc, kOmega).expected_singular);
  CHECK(!assemble_fd("symmetric", c.grid, c.ops, c.exc, kOmega).expected_singular);
  CHECK(!assemble_fd("lagrange", c.grid, c.ops, c.exc, kOmega).expected_singular);

  // Without any regularization in the void, the regularized system loses
  // invertibility again.
  auto c0 = make_bar_case(4, 10.0, 0.0, 0.0);
  CHECK(assemble_fd("regularized", c0.grid, c0.ops, c0.exc, kOmega).expected_singular);
}

TEST_CASE("time stepper reproduces a resistive DC steady state") {
  // Conductive everywhere, DC drive: after many implicit steps phi must relax
  // to the resistive network solution and a to a stationary vector.
  auto c = make_bar_case(2, 10.0, 10.0, 0.0, 1.0);
  TimeDomainSystem td(c.grid, c.ops, c.exc, 1e-6);
  CHECK(td.dt() == 1e-6);
  CHECK(td.beta() == doctest::Approx(1e6));

  Eigen::SparseLU<SpMatC> lu;
  SpMatC A = td.step_system().matrix;
  A.makeCompressed();
  lu.compute(A);
  REQUIRE(lu.info() == Eigen::Success);

  VecC a = VecC::Zero(c.grid.n_edges());
  VecC phi = VecC::Zero(c.grid.n_nodes());
  for (int n = 0; n < 400; ++n) {
    VecC rhs = td.build_rhs(a, phi, VecC(), Complex(1.0, 0.0), Complex(0.0, 0.0));
    VecC x = lu.solve(rhs);
    td.expand(x, Complex(1.0, 0.0), Complex(0.0, 0.0), a, phi);
  }
  // Uniform conductivity between full end faces: the potential at the middle
  // plane sits at half the drive.
  const int mid = c.grid.node_index(1, 1, 1);
  CHECK(std::abs(phi[mid] - Complex(0.5, 0.0)) < 1e-6);
  // Stationarity: one more step changes nothing appreciable.
  VecC a_prev = a, phi_prev = phi;
  VecC rhs = td.build_rhs(a, phi, VecC(), Complex(1.0, 0.0), Complex(0.0, 0.0));
  VecC x = lu.solve(rhs);
  td.expand(x, Complex(1.0, 0.0), Complex(0.0, 0.0), a, phi);
  CHECK((phi - phi_prev).norm() < 1e-9);
}

TEST_CASE("formulation id list is complete") {
  std::string ids = formulation_ids();
  for (const char* id : {"monolithic", "regularized", "regularized-psi", "symmetric",
                         "lagrange", "graddiv", "eqs-gauge", "tsm", "dd-combined"})
    CHECK(ids.find(id) != std::string::npos);
}
