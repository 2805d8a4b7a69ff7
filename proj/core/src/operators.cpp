#include "emqs/operators.hpp"

#include <stdexcept>
#include <vector>

namespace emqs {

void build_incidence(const Grid& grid, SpMat& G, SpMat& C, SpMat& D) {
  using T = Eigen::Triplet<double>;
  std::vector<T> tg, tc, td;
  tg.reserve(2 * grid.n_edges());
  tc.reserve(4 * grid.n_faces());
  td.reserve(6 * grid.n_cells());

  for (int e = 0; e < grid.n_edges(); ++e) {
    const auto [axis, i, j, k] = grid.edge_coords(e);
    const int di = axis == 0, dj = axis == 1, dk = axis == 2;
    tg.emplace_back(e, grid.node_index(i, j, k), -1.0);
    tg.emplace_back(e, grid.node_index(i + di, j + dj, k + dk), +1.0);
  }

  // Face of normal `axis` at (i,j,k): boundary loop with right-hand
  // orientation over the two transverse axes t1 = axis+1, t2 = axis+2.
  for (int f = 0; f < grid.n_faces(); ++f) {
    const auto [axis, i, j, k] = grid.face_coords(f);
    const int t1 = (axis + 1) % 3, t2 = (axis + 2) % 3;
    std::array<int, 3> p{i, j, k};
    auto shifted = [&](int ax, int by) {
      std::array<int, 3> q = p;
      q[ax] += by;
      return q;
    };
    const auto p2 = shifted(t2, 1);
    const auto p1 = shifted(t1, 1);
    tc.emplace_back(f, grid.edge_index(t1, p[0], p[1], p[2]), +1.0);
    tc.emplace_back(f, grid.edge_index(t2, p1[0], p1[1], p1[2]), +1.0);
    tc.emplace_back(f, grid.edge_index(t1, p2[0], p2[1], p2[2]), -1.0);
    tc.emplace_back(f, grid.edge_index(t2, p[0], p[1], p[2]), -1.0);
  }

  for (int c = 0; c < grid.n_cells(); ++c) {
    const auto [i, j, k] = grid.cell_coords(c);
    td.emplace_back(c, grid.face_index(0, i + 1, j, k), +1.0);
    td.emplace_back(c, grid.face_index(0, i, j, k), -1.0);
    td.emplace_back(c, grid.face_index(1, i, j + 1, k), +1.0);
    td.emplace_back(c, grid.face_index(1, i, j, k), -1.0);
    td.emplace_back(c, grid.face_index(2, i, j, k + 1), +1.0);
    td.emplace_back(c, grid.face_index(2, i, j, k), -1.0);
  }

  G.resize(grid.n_edges(), grid.n_nodes());
  C.resize(grid.n_faces(), grid.n_edges());
  D.resize(grid.n_cells(), grid.n_faces());
  G.setFromTriplets(tg.begin(), tg.end());
  C.setFromTriplets(tc.begin(), tc.end());
  D.setFromTriplets(td.begin(), td.end());
}

Vec edge_hodge(const Grid& grid, const std::vector<double>& cell_values) {
  if (static_cast<int>(cell_values.size()) != grid.n_cells())
    throw std::invalid_argument("edge_hodge: cell value array size mismatch");
  Vec m(grid.n_edges());
  const std::array<int, 3> n{grid.nx(), grid.ny(), grid.nz()};
  for (int e = 0; e < grid.n_edges(); ++e) {
    const auto [axis, i, j, k] = grid.edge_coords(e);
    const int t1 = (axis + 1) % 3, t2 = (axis + 2) % 3;
    std::array<int, 3> p{i, j, k};
    // Sum of quarter dual areas weighted by the cell parameter; dividing by
    // the edge length gives alpha_bar * A_tilde / L directly.
    double acc = 0.0;
    for (int s1 = -1; s1 <= 0; ++s1) {
      for (int s2 = -1; s2 <= 0; ++s2) {
        std::array<int, 3> q = p;
        q[t1] += s1;
        q[t2] += s2;
        if (q[t1] < 0 || q[t1] >= n[t1] || q[t2] < 0 || q[t2] >= n[t2]) continue;
        const double w = 0.5 * grid.spec().spacing[t1][q[t1]] * 0.5 * grid.spec().spacing[t2][q[t2]];
        acc += w * cell_values[grid.cell_index(q[0], q[1], q[2])];
      }
    }
    m[e] = acc / grid.edge_length(e);
  }
  return m;
}

void build_hodges(const Grid& grid, const MaterialField& mat, Vec& m_nu, Vec& m_kappa,
                  Vec& m_eps, Vec& m_kappa_hat) {
  if (mat.n_cells() != grid.n_cells())
    throw std::invalid_argument("build_hodges: grid/material size mismatch");

  const int nc = grid.n_cells();
  std::vector<double> kap(nc), eps(nc), khat(nc);
  for (int c = 0; c < nc; ++c) {
    kap[c] = mat.kappa(c);
    eps[c] = mat.eps_effective(c);
    khat[c] = mat.kappa_hat_cell(c);
  }
  m_kappa = edge_hodge(grid, kap);
  m_eps = edge_hodge(grid, eps);
  m_kappa_hat = edge_hodge(grid, khat);

  // Face reluctivity: series permeability average along the dual edge.
  m_nu.resize(grid.n_faces());
  const std::array<int, 3> n{grid.nx(), grid.ny(), grid.nz()};
  for (int f = 0; f < grid.n_faces(); ++f) {
    const auto [axis, i, j, k] = grid.face_coords(f);
    std::array<int, 3> p{i, j, k};
    // The normal flux density is continuous across the face, so the segment
    // mmf contributions add with their own reluctivities (series reluctance,
    // harmonic-in-mu average): mmf = sum(l_i nu_i) * Phi / A.
    double nu_len = 0.0;
    for (int s = -1; s <= 0; ++s) {
      std::array<int, 3> q = p;
      q[axis] += s;
      if (q[axis] < 0 || q[axis] >= n[axis]) continue;
      const double half = 0.5 * grid.spec().spacing[axis][q[axis]];
      nu_len += half * mat.nu(grid.cell_index(q[0], q[1], q[2]));
    }
    m_nu[f] = nu_len / grid.face_area(f);
  }
}

OperatorSet build_operators(const Grid& grid, const MaterialField& mat) {
  OperatorSet ops;
  build_incidence(grid, ops.G, ops.C, ops.D);
  build_hodges(grid, mat, ops.m_nu, ops.m_kappa, ops.m_eps, ops.m_kappa_hat);
  return ops;
}

}  // namespace emqs
