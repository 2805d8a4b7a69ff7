#include <doctest.h>

#include "emqs/operators.hpp"

using namespace emqs;

namespace {

Grid nonuniform_grid() {
  GridSpec spec;
  spec.nx = 2;
  spec.ny = 2;
  spec.nz = 2;
  spec.spacing[0] = {0.1, 0.3};
  spec.spacing[1] = {0.2, 0.2};
  spec.spacing[2] = {0.4, 0.1};
  return build_grid(spec);
}

}  // namespace

TEST_CASE("incidence matrices: structure and exact sequence identities") {
  Grid g = nonuniform_grid();
  SpMat G, C, D;
  build_incidence(g, G, C, D);

  CHECK(G.rows() == g.n_edges());
  CHECK(G.cols() == g.n_nodes());
  CHECK(C.rows() == g.n_faces());
  CHECK(C.cols() == g.n_edges());
  CHECK(D.rows() == g.n_cells());
  CHECK(D.cols() == g.n_faces());
  CHECK(G.nonZeros() == 2 * g.n_edges());
  CHECK(C.nonZeros() == 4 * g.n_faces());
  CHECK(D.nonZeros() == 6 * g.n_cells());

  for (int k = 0; k < G.outerSize(); ++k)
    for (SpMat::InnerIterator it(G, k); it; ++it)
      CHECK(std::abs(it.value()) == 1.0);

  SpMat CG = (C * G).pruned(0.0);
  SpMat DC = (D * C).pruned(0.0);
  CHECK(CG.nonZeros() == 0);
  CHECK(DC.nonZeros() == 0);
}

TEST_CASE("curl row orientation on a unit z face") {
  Grid g = build_grid(GridSpec::uniform(1, 1, 1, 1.0, 1.0, 1.0));
  SpMat G, C, D;
  build_incidence(g, G, C, D);
  // For the z-normal face at (0,0,0) the loop is +x(0,0,0), +y(1,0,0),
  // -x(0,1,0), -y(0,0,0).
  const int f = g.face_index(2, 0, 0, 0);
  Eigen::RowVectorXd row = Eigen::RowVectorXd(C.toDense().row(f));
  CHECK(row[g.edge_index(0, 0, 0, 0)] == 1.0);
  CHECK(row[g.edge_index(1, 1, 0, 0)] == 1.0);
  CHECK(row[g.edge_index(0, 0, 1, 0)] == -1.0);
  CHECK(row[g.edge_index(1, 0, 0, 0)] == -1.0);
}

TEST_CASE("edge Hodge: quarter-area weighted cell average over the dual face") {
  Grid g = nonuniform_grid();
  std::vector<double> vals(g.n_cells(), 0.0);
  vals[g.cell_index(0, 0, 0)] = 10.0;
  vals[g.cell_index(0, 1, 0)] = 20.0;
  vals[g.cell_index(0, 0, 1)] = 30.0;
  vals[g.cell_index(0, 1, 1)] = 40.0;
  Vec m = edge_hodge(g, vals);

  // Interior x edge at (0,1,1): all four adjacent cells present. Quarter
  // areas: 0.5*dy_{0|1} * 0.5*dz_{0|1} with dy={0.2,0.2}, dz={0.4,0.1}.
  const double q00 = 0.1 * 0.2, q10 = 0.1 * 0.2, q01 = 0.1 * 0.05, q11 = 0.1 * 0.05;
  const double expected =
      (q00 * 10.0 + q10 * 20.0 + q01 * 30.0 + q11 * 40.0) / 0.1;  // / edge length
  CHECK(m[g.edge_index(0, 0, 1, 1)] == doctest::Approx(expected));

  // Boundary x edge at (0,0,0): only cell (0,0,0) contributes one quarter.
  const double expected_b = (q00 * 10.0) / 0.1;
  CHECK(m[g.edge_index(0, 0, 0, 0)] == doctest::Approx(expected_b));
}

TEST_CASE("face Hodge: series reluctance average across the dual edge") {
  GridSpec spec = GridSpec::uniform(2, 1, 1, 0.1, 0.2, 0.2);
  Grid g = build_grid(spec);
  MaterialBox bg;
  bg.mu_r = 100.0;
  MaterialBox right;
  right.lo = {0.1, 0.0, 0.0};
  right.hi = {0.2, 0.2, 0.2};
  right.mu_r = 400.0;
  auto mat = build_material_field(g, bg, {right});
  Vec m_nu, m_k, m_e, m_kh;
  build_hodges(g, mat, m_nu, m_k, m_e, m_kh);

  const double nu1 = 1.0 / (100.0 * constants::mu0);
  const double nu2 = 1.0 / (400.0 * constants::mu0);
  const double A = 0.2 * 0.2;

  // Interior x face: half of each cell in series, mmf = (l1 nu1 + l2 nu2) B.
  const double expected = (0.05 * nu1 + 0.05 * nu2) / A;
  CHECK(m_nu[g.face_index(0, 1, 0, 0)] == doctest::Approx(expected));
  // Equivalent harmonic permeability across equal halves: 2 mu1 mu2/(mu1+mu2).
  const double mu_h = 2.0 * (100.0 * 400.0) / (100.0 + 400.0) * constants::mu0;
  CHECK(m_nu[g.face_index(0, 1, 0, 0)] == doctest::Approx(0.1 / mu_h / A));

  // Boundary x faces see only their single half cell.
  CHECK(m_nu[g.face_index(0, 0, 0, 0)] == doctest::Approx(0.05 * nu1 / A));
  CHECK(m_nu[g.face_index(0, 2, 0, 0)] == doctest::Approx(0.05 * nu2 / A));
}

TEST_CASE("build_operators wires conductivity, permittivity and kappa_hat") {
  Grid g = build_grid(GridSpec::uniform(2, 2, 2, 0.01, 0.01, 0.01));
  MaterialBox bg;
  MaterialBox cond;
  cond.lo = {0.0, 0.0, 0.0};
  cond.hi = {0.02, 0.01, 0.01};
  cond.kappa = 100.0;
  MaterialOptions opts;
  opts.kappa_hat = 0.01;
  auto mat = build_material_field(g, bg, {cond}, opts);
  OperatorSet ops = build_operators(g, mat);

  // An edge fully inside the conductor row sees kappa in all four quarters
  // weighted by their areas; here the edge at (0,0,0) touches one conductive
  // cell out of one -> full kappa.
  const int e = g.edge_index(0, 0, 0, 0);
  const double quarter = 0.005 * 0.005;
  CHECK(ops.m_kappa[e] == doctest::Approx(quarter * 100.0 / 0.01));
  // kappa_hat lives only in the non-conductive cells.
  CHECK(ops.m_kappa_hat[e] == doctest::Approx(0.0));
  const int e_air = g.edge_index(0, 0, 2, 2);
  CHECK(ops.m_kappa_hat[e_air] == doctest::Approx(quarter * 0.01 / 0.01));
  // Permittivity is everywhere vacuum here.
  const int e_int = g.edge_index(0, 0, 1, 1);
  CHECK(ops.m_eps[e_int] == doctest::Approx(4.0 * quarter * constants::eps0 / 0.01));
}
