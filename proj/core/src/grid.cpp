#include "emqs/grid.hpp"

#include <numeric>
#include <stdexcept>

namespace emqs {

GridSpec GridSpec::uniform(int nx, int ny, int nz, double dx, double dy, double dz,
                           const Eigen::Vector3d& origin) {
  GridSpec s;
  s.nx = nx;
  s.ny = ny;
  s.nz = nz;
  s.spacing[0].assign(static_cast<size_t>(std::max(nx, 0)), dx);
  s.spacing[1].assign(static_cast<size_t>(std::max(ny, 0)), dy);
  s.spacing[2].assign(static_cast<size_t>(std::max(nz, 0)), dz);
  s.origin = origin;
  return s;
}

void GridSpec::validate() const {
  const std::array<int, 3> n{nx, ny, nz};
  for (int a = 0; a < 3; ++a) {
    if (n[a] < 1) throw std::invalid_argument("GridSpec: cell counts must be >= 1");
    if (static_cast<int>(spacing[a].size()) != n[a])
      throw std::invalid_argument("GridSpec: spacing array size must match cell count");
    for (double d : spacing[a])
      if (!(d > 0.0)) throw std::invalid_argument("GridSpec: spacings must be > 0");
  }
}

Grid::Grid(GridSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  const int nx = spec_.nx, ny = spec_.ny, nz = spec_.nz;
  n_nodes_ = (nx + 1) * (ny + 1) * (nz + 1);
  n_cells_ = nx * ny * nz;

  edge_dims_[0] = {nx, ny + 1, nz + 1};
  edge_dims_[1] = {nx + 1, ny, nz + 1};
  edge_dims_[2] = {nx + 1, ny + 1, nz};
  face_dims_[0] = {nx + 1, ny, nz};
  face_dims_[1] = {nx, ny + 1, nz};
  face_dims_[2] = {nx, ny, nz + 1};

  int eoff = 0, foff = 0;
  for (int a = 0; a < 3; ++a) {
    edge_offset_[a] = eoff;
    face_offset_[a] = foff;
    eoff += edge_dims_[a][0] * edge_dims_[a][1] * edge_dims_[a][2];
    foff += face_dims_[a][0] * face_dims_[a][1] * face_dims_[a][2];
  }
  n_edges_ = eoff;
  n_faces_ = foff;

  for (int a = 0; a < 3; ++a) {
    const auto& d = spec_.spacing[a];
    node_coord_[a].resize(d.size() + 1);
    node_coord_[a][0] = spec_.origin[a];
    for (size_t i = 0; i < d.size(); ++i) node_coord_[a][i + 1] = node_coord_[a][i] + d[i];
  }
  build_metrics();
}

int Grid::node_index(int i, int j, int k) const {
  return i + (spec_.nx + 1) * (j + (spec_.ny + 1) * k);
}

std::array<int, 3> Grid::node_coords(int n) const {
  const int sx = spec_.nx + 1, sy = spec_.ny + 1;
  return {n % sx, (n / sx) % sy, n / (sx * sy)};
}

int Grid::edge_index(int axis, int i, int j, int k) const {
  const auto& d = edge_dims_[axis];
  return edge_offset_[axis] + i + d[0] * (j + d[1] * k);
}

std::array<int, 4> Grid::edge_coords(int e) const {
  int axis = 2;
  while (axis > 0 && e < edge_offset_[axis]) --axis;
  int local = e - edge_offset_[axis];
  const auto& d = edge_dims_[axis];
  return {axis, local % d[0], (local / d[0]) % d[1], local / (d[0] * d[1])};
}

int Grid::face_index(int axis, int i, int j, int k) const {
  const auto& d = face_dims_[axis];
  return face_offset_[axis] + i + d[0] * (j + d[1] * k);
}

std::array<int, 4> Grid::face_coords(int f) const {
  int axis = 2;
  while (axis > 0 && f < face_offset_[axis]) --axis;
  int local = f - face_offset_[axis];
  const auto& d = face_dims_[axis];
  return {axis, local % d[0], (local / d[0]) % d[1], local / (d[0] * d[1])};
}

int Grid::cell_index(int i, int j, int k) const {
  return i + spec_.nx * (j + spec_.ny * k);
}

std::array<int, 3> Grid::cell_coords(int c) const {
  return {c % spec_.nx, (c / spec_.nx) % spec_.ny, c / (spec_.nx * spec_.ny)};
}

double Grid::dual_spacing(int axis, int i) const {
  const auto& d = spec_.spacing[axis];
  const int n = static_cast<int>(d.size());
  if (i == 0) return 0.5 * d[0];
  if (i == n) return 0.5 * d[n - 1];
  return 0.5 * (d[i - 1] + d[i]);
}

void Grid::build_metrics() {
  edge_length_.resize(n_edges_);
  dual_face_area_.resize(n_edges_);
  for (int e = 0; e < n_edges_; ++e) {
    const auto [axis, i, j, k] = edge_coords(e);
    const int t1 = (axis + 1) % 3, t2 = (axis + 2) % 3;
    const int along = (axis == 0) ? i : (axis == 1) ? j : k;
    edge_length_[e] = spec_.spacing[axis][along];
    const int p1 = (t1 == 0) ? i : (t1 == 1) ? j : k;
    const int p2 = (t2 == 0) ? i : (t2 == 1) ? j : k;
    dual_face_area_[e] = dual_spacing(t1, p1) * dual_spacing(t2, p2);
  }

  face_area_.resize(n_faces_);
  dual_edge_length_.resize(n_faces_);
  for (int f = 0; f < n_faces_; ++f) {
    const auto [axis, i, j, k] = face_coords(f);
    const int t1 = (axis + 1) % 3, t2 = (axis + 2) % 3;
    const int p1 = (t1 == 0) ? i : (t1 == 1) ? j : k;
    const int p2 = (t2 == 0) ? i : (t2 == 1) ? j : k;
    face_area_[f] = spec_.spacing[t1][p1] * spec_.spacing[t2][p2];
    const int along = (axis == 0) ? i : (axis == 1) ? j : k;
    dual_edge_length_[f] = dual_spacing(axis, along);
  }

  cell_volume_.resize(n_cells_);
  for (int c = 0; c < n_cells_; ++c) {
    const auto [i, j, k] = cell_coords(c);
    cell_volume_[c] = spec_.spacing[0][i] * spec_.spacing[1][j] * spec_.spacing[2][k];
  }
}

Eigen::Vector3d Grid::node_position(int n) const {
  const auto [i, j, k] = node_coords(n);
  return {node_coord_[0][i], node_coord_[1][j], node_coord_[2][k]};
}

Eigen::Vector3d Grid::cell_center(int c) const {
  const auto [i, j, k] = cell_coords(c);
  return {0.5 * (node_coord_[0][i] + node_coord_[0][i + 1]),
          0.5 * (node_coord_[1][j] + node_coord_[1][j + 1]),
          0.5 * (node_coord_[2][k] + node_coord_[2][k + 1])};
}

Eigen::Vector3d Grid::domain_extent() const {
  return {node_coord_[0].back() - node_coord_[0].front(),
          node_coord_[1].back() - node_coord_[1].front(),
          node_coord_[2].back() - node_coord_[2].front()};
}

bool Grid::is_boundary_node(int n) const {
  const auto [i, j, k] = node_coords(n);
  return i == 0 || i == spec_.nx || j == 0 || j == spec_.ny || k == 0 || k == spec_.nz;
}

bool Grid::is_boundary_edge(int e) const {
  const auto [axis, i, j, k] = edge_coords(e);
  const int t1 = (axis + 1) % 3, t2 = (axis + 2) % 3;
  const std::array<int, 3> n{spec_.nx, spec_.ny, spec_.nz};
  const int p1 = (t1 == 0) ? i : (t1 == 1) ? j : k;
  const int p2 = (t2 == 0) ? i : (t2 == 1) ? j : k;
  return p1 == 0 || p1 == n[t1] || p2 == 0 || p2 == n[t2];
}

Grid build_grid(const GridSpec& spec) { return Grid(spec); }

}  // namespace emqs
