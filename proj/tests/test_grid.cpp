#include <doctest.h>

#include <stdexcept>

#include "emqs/grid.hpp"

using namespace emqs;

TEST_CASE("entity counts and Euler characteristic on 3x4x5") {
  Grid g = build_grid(GridSpec::uniform(3, 4, 5, 0.01, 0.02, 0.03));
  const int nx = 3, ny = 4, nz = 5;
  CHECK(g.n_nodes() == (nx + 1) * (ny + 1) * (nz + 1));
  const int ex = nx * (ny + 1) * (nz + 1);
  const int ey = (nx + 1) * ny * (nz + 1);
  const int ez = (nx + 1) * (ny + 1) * nz;
  CHECK(g.n_edges() == ex + ey + ez);
  const int fx = (nx + 1) * ny * nz;
  const int fy = nx * (ny + 1) * nz;
  const int fz = nx * ny * (nz + 1);
  CHECK(g.n_faces() == fx + fy + fz);
  CHECK(g.n_cells() == nx * ny * nz);
  CHECK(g.n_nodes() - g.n_edges() + g.n_faces() - g.n_cells() == 1);
}

TEST_CASE("index round trips cover every entity") {
  Grid g = build_grid(GridSpec::uniform(3, 4, 5, 0.01, 0.02, 0.03));
  for (int n = 0; n < g.n_nodes(); ++n) {
    auto [i, j, k] = g.node_coords(n);
    CHECK(g.node_index(i, j, k) == n);
  }
  for (int e = 0; e < g.n_edges(); ++e) {
    auto [a, i, j, k] = g.edge_coords(e);
    CHECK(g.edge_index(a, i, j, k) == e);
  }
  for (int f = 0; f < g.n_faces(); ++f) {
    auto [a, i, j, k] = g.face_coords(f);
    CHECK(g.face_index(a, i, j, k) == f);
  }
  for (int c = 0; c < g.n_cells(); ++c) {
    auto [i, j, k] = g.cell_coords(c);
    CHECK(g.cell_index(i, j, k) == c);
  }
}

TEST_CASE("canonical ordering is axis-major with i fastest") {
  Grid g = build_grid(GridSpec::uniform(2, 2, 2, 0.01, 0.01, 0.01));
  // First edge block is x-directed; within it the x index advances first.
  CHECK(g.edge_coords(0) == std::array<int, 4>{0, 0, 0, 0});
  CHECK(g.edge_coords(1) == std::array<int, 4>{0, 1, 0, 0});
  CHECK(g.edge_coords(2) == std::array<int, 4>{0, 0, 1, 0});
  // Node order: i fastest, then j, then k.
  CHECK(g.node_index(1, 0, 0) == 1);
  CHECK(g.node_index(0, 1, 0) == 3);
  CHECK(g.node_index(0, 0, 1) == 9);
}

TEST_CASE("non-uniform metrics") {
  GridSpec spec;
  spec.nx = 2;
  spec.ny = 1;
  spec.nz = 1;
  spec.spacing[0] = {0.1, 0.3};
  spec.spacing[1] = {0.2};
  spec.spacing[2] = {0.4};
  Grid g = build_grid(spec);

  CHECK(g.edge_length(g.edge_index(0, 0, 0, 0)) == doctest::Approx(0.1));
  CHECK(g.edge_length(g.edge_index(0, 1, 0, 0)) == doctest::Approx(0.3));
  CHECK(g.face_area(g.face_index(0, 1, 0, 0)) == doctest::Approx(0.2 * 0.4));
  CHECK(g.cell_volume(g.cell_index(1, 0, 0)) == doctest::Approx(0.3 * 0.2 * 0.4));

  // Dual spacing: interior position averages the two neighbors, the two
  // boundary positions take half a cell.
  CHECK(g.dual_spacing(0, 0) == doctest::Approx(0.05));
  CHECK(g.dual_spacing(0, 1) == doctest::Approx(0.5 * (0.1 + 0.3)));
  CHECK(g.dual_spacing(0, 2) == doctest::Approx(0.15));

  // Dual edge crossing the interior x face spans both half cells.
  CHECK(g.dual_edge_length(g.face_index(0, 1, 0, 0)) == doctest::Approx(0.2));
  // Dual edge at the domain boundary face is truncated to one half cell.
  CHECK(g.dual_edge_length(g.face_index(0, 0, 0, 0)) == doctest::Approx(0.05));

  // Dual face of an interior-facing x edge: product of transverse dual
  // spacings (both boundary positions here, so quarter face).
  CHECK(g.dual_face_area(g.edge_index(0, 0, 0, 0)) == doctest::Approx(0.1 * 0.2));

  // Node coordinates are prefix sums.
  CHECK(g.node_coord(0, 0) == doctest::Approx(0.0));
  CHECK(g.node_coord(0, 1) == doctest::Approx(0.1));
  CHECK(g.node_coord(0, 2) == doctest::Approx(0.4));
}

TEST_CASE("boundary classification") {
  Grid g = build_grid(GridSpec::uniform(2, 2, 2, 0.01, 0.01, 0.01));
  int interior_nodes = 0;
  for (int n = 0; n < g.n_nodes(); ++n)
    if (!g.is_boundary_node(n)) ++interior_nodes;
  CHECK(interior_nodes == 1);  // only (1,1,1)
  CHECK(!g.is_boundary_node(g.node_index(1, 1, 1)));

  int free_edges = 0;
  for (int e = 0; e < g.n_edges(); ++e)
    if (!g.is_boundary_edge(e)) ++free_edges;
  // Two interior edges per axis: those with both transverse indices at 1.
  CHECK(free_edges == 6);
  CHECK(!g.is_boundary_edge(g.edge_index(0, 0, 1, 1)));
  CHECK(g.is_boundary_edge(g.edge_index(0, 0, 0, 1)));
}

TEST_CASE("invalid specs are rejected") {
  CHECK_THROWS_AS(build_grid(GridSpec::uniform(0, 2, 2, 0.01, 0.01, 0.01)),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_grid(GridSpec::uniform(2, 2, 2, -0.01, 0.01, 0.01)),
                  std::invalid_argument);
  GridSpec bad;
  bad.nx = 2;
  bad.ny = 1;
  bad.nz = 1;
  bad.spacing[0] = {0.1};  // wrong length
  bad.spacing[1] = {0.1};
  bad.spacing[2] = {0.1};
  CHECK_THROWS_AS(build_grid(bad), std::invalid_argument);
}
