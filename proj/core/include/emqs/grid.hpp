#pragma once

#include <array>
#include <vector>

#include "emqs/types.hpp"

namespace emqs {

/// Tensor-product hexahedral grid specification. Per-axis cell widths may be
/// non-uniform; the scalar-spacing case is the uniform special case.
struct GridSpec {
  int nx = 0, ny = 0, nz = 0;
  std::array<std::vector<double>, 3> spacing;  // cell widths per axis, sizes nx/ny/nz
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();

  static GridSpec uniform(int nx, int ny, int nz, double dx, double dy, double dz,
                          const Eigen::Vector3d& origin = Eigen::Vector3d::Zero());

  void validate() const;  // throws std::invalid_argument
};

/// Primal/dual grid with canonical entity indexing and metric quantities.
///
/// Entity ordering is axis-major (all x-directed edges, then y, then z) and
/// lexicographic within an axis with i running fastest, so that assembled
/// matrices are reproducible across runs. The dual grid is the orthogonal
/// dual with dual nodes at cell centers; boundary dual cells are truncated.
class Grid {
 public:
  explicit Grid(GridSpec spec);

  const GridSpec& spec() const { return spec_; }
  int nx() const { return spec_.nx; }
  int ny() const { return spec_.ny; }
  int nz() const { return spec_.nz; }

  int n_nodes() const { return n_nodes_; }
  int n_edges() const { return n_edges_; }
  int n_faces() const { return n_faces_; }
  int n_cells() const { return n_cells_; }

  // (axis, i, j, k) <-> flat index maps. Edges of axis a run along axis a;
  // faces of axis a have normal a.
  int node_index(int i, int j, int k) const;
  std::array<int, 3> node_coords(int n) const;
  int edge_index(int axis, int i, int j, int k) const;
  std::array<int, 4> edge_coords(int e) const;  // {axis, i, j, k}
  int face_index(int axis, int i, int j, int k) const;
  std::array<int, 4> face_coords(int f) const;
  int cell_index(int i, int j, int k) const;
  std::array<int, 3> cell_coords(int c) const;

  int edge_axis(int e) const { return edge_coords(e)[0]; }

  // Primal metrics.
  double edge_length(int e) const { return edge_length_[e]; }
  double face_area(int f) const { return face_area_[f]; }
  double cell_volume(int c) const { return cell_volume_[c]; }
  const Vec& edge_lengths() const { return edge_length_; }
  const Vec& face_areas() const { return face_area_; }
  const Vec& cell_volumes() const { return cell_volume_; }

  // Dual metrics: one dual face per primal edge, one dual edge per primal face.
  double dual_face_area(int e) const { return dual_face_area_[e]; }
  double dual_edge_length(int f) const { return dual_edge_length_[f]; }
  const Vec& dual_face_areas() const { return dual_face_area_; }
  const Vec& dual_edge_lengths() const { return dual_edge_length_; }

  Eigen::Vector3d node_position(int n) const;
  Eigen::Vector3d cell_center(int c) const;
  Eigen::Vector3d domain_extent() const;

  // A boundary edge lies tangentially in a face of the domain box (the set
  // constrained by n x A = 0). A boundary node lies on the domain boundary.
  bool is_boundary_node(int n) const;
  bool is_boundary_edge(int e) const;

  // Half-spacing sum transverse to the dual entity at lattice position i
  // along `axis` (halved at the two boundary positions).
  double dual_spacing(int axis, int i) const;

  // Node coordinate along an axis (prefix sums of spacings plus origin).
  double node_coord(int axis, int i) const { return node_coord_[axis][i]; }

 private:
  GridSpec spec_;
  int n_nodes_ = 0, n_edges_ = 0, n_faces_ = 0, n_cells_ = 0;
  std::array<int, 3> edge_offset_{};   // flat offset of each axis block
  std::array<int, 3> face_offset_{};
  std::array<std::array<int, 3>, 3> edge_dims_{};  // lattice dims per axis
  std::array<std::array<int, 3>, 3> face_dims_{};
  std::array<std::vector<double>, 3> node_coord_;
  Vec edge_length_, face_area_, cell_volume_;
  Vec dual_face_area_, dual_edge_length_;

  void build_metrics();
};

/// Builds the grid; rejects non-positive dimensions or spacings.
Grid build_grid(const GridSpec& spec);

}  // namespace emqs
