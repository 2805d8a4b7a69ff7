#include "emqs/materials.hpp"

#include <limits>
#include <stdexcept>

namespace emqs {

namespace {

// The background box carries only material values; its extent is ignored.
void check_box(const MaterialBox& b, bool with_extent) {
  if (b.kappa < 0.0) throw std::invalid_argument("MaterialBox: kappa must be >= 0");
  if (!(b.mu_r > 0.0)) throw std::invalid_argument("MaterialBox: mu_r must be > 0");
  if (b.eps_r < 0.0) throw std::invalid_argument("MaterialBox: eps_r must be >= 0");
  if (with_extent)
    for (int a = 0; a < 3; ++a)
      if (!(b.lo[a] < b.hi[a]))
        throw std::invalid_argument("MaterialBox: lo < hi must hold componentwise");
}

bool contains(const MaterialBox& b, const Eigen::Vector3d& p) {
  for (int a = 0; a < 3; ++a)
    if (p[a] < b.lo[a] || p[a] > b.hi[a]) return false;
  return true;
}

}  // namespace

MaterialField::MaterialField(const Grid& grid, const MaterialBox& background,
                             const std::vector<MaterialBox>& boxes,
                             const MaterialOptions& opts) {
  check_box(background, false);
  const int nc = grid.n_cells();
  kappa_.assign(nc, background.kappa);
  eps_.assign(nc, background.eps_r * constants::eps0);
  nu_.assign(nc, 1.0 / (background.mu_r * constants::mu0));
  tag_.assign(nc, background.tag);

  const Eigen::Vector3d dlo = grid.node_position(0);
  const Eigen::Vector3d dhi = dlo + grid.domain_extent();
  for (const auto& b : boxes) {
    check_box(b, true);
    for (int a = 0; a < 3; ++a)
      if (b.lo[a] < dlo[a] - 1e-12 || b.hi[a] > dhi[a] + 1e-12) {
        warnings_.push_back("material box '" + b.tag + "' exceeds domain bounds; clipped");
        break;
      }
    // Cell-in-box test uses the cell center; partial overlaps are not
    // volume-averaged.
    for (int c = 0; c < nc; ++c) {
      if (contains(b, grid.cell_center(c))) {
        kappa_[c] = b.kappa;
        eps_[c] = b.eps_r * constants::eps0;
        nu_[c] = 1.0 / (b.mu_r * constants::mu0);
        tag_[c] = b.tag;
      }
    }
  }

  min_kappa_c_ = 0.0;
  for (int c = 0; c < nc; ++c)
    if (kappa_[c] > 0.0 && (min_kappa_c_ == 0.0 || kappa_[c] < min_kappa_c_))
      min_kappa_c_ = kappa_[c];

  policy_ = opts.kappa_hat_policy;
  eps_restricted_ = opts.eps_restricted_to_nonconductive;
  if (opts.kappa_hat) {
    kappa_hat_ = *opts.kappa_hat;
    if (kappa_hat_ < 0.0) throw std::invalid_argument("kappa_hat must be >= 0");
  } else {
    kappa_hat_ = (min_kappa_c_ > 0.0) ? 1e-4 * min_kappa_c_ : 0.0;
  }
  if (kappa_hat_ > 0.0 && min_kappa_c_ > 0.0 && !(kappa_hat_ < min_kappa_c_))
    throw std::invalid_argument("kappa_hat must be smaller than every conductive kappa");
}

MaterialField build_material_field(const Grid& grid, const MaterialBox& background,
                                   const std::vector<MaterialBox>& boxes,
                                   const MaterialOptions& opts) {
  return MaterialField(grid, background, boxes, opts);
}

}  // namespace emqs
