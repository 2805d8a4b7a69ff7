#pragma once

#include <optional>
#include <string>
#include <vector>

#include "emqs/grid.hpp"
#include "emqs/types.hpp"

namespace emqs {

/// Axis-aligned material region; later boxes override earlier ones.
struct MaterialBox {
  Eigen::Vector3d lo = Eigen::Vector3d::Zero();
  Eigen::Vector3d hi = Eigen::Vector3d::Zero();
  double kappa = 0.0;  // S/m
  double eps_r = 1.0;
  double mu_r = 1.0;
  std::string tag;
};

enum class KappaHatPolicy { Everywhere, NonConductiveOnly };

struct MaterialOptions {
  std::optional<double> kappa_hat;  // unset: 1e-4 x (min nonzero kappa)
  KappaHatPolicy kappa_hat_policy = KappaHatPolicy::NonConductiveOnly;
  // When set, conductive cells contribute zero to the permittivity Hodge.
  bool eps_restricted_to_nonconductive = false;
};

/// Per-cell material parameters with the conductive/non-conductive partition
/// and the artificial-conductivity placement.
class MaterialField {
 public:
  MaterialField(const Grid& grid, const MaterialBox& background,
                const std::vector<MaterialBox>& boxes, const MaterialOptions& opts = {});

  double kappa(int c) const { return kappa_[c]; }
  double eps(int c) const { return eps_[c]; }
  double nu(int c) const { return nu_[c]; }
  bool is_conductive(int c) const { return kappa_[c] > 0.0; }
  const std::string& tag(int c) const { return tag_[c]; }

  // Permittivity seen by the Hodge builder (zero in conductors when the
  // restriction option is active).
  double eps_effective(int c) const {
    return (eps_restricted_ && is_conductive(c)) ? 0.0 : eps_[c];
  }

  double kappa_hat() const { return kappa_hat_; }
  KappaHatPolicy kappa_hat_policy() const { return policy_; }
  double kappa_hat_cell(int c) const {
    if (policy_ == KappaHatPolicy::NonConductiveOnly && is_conductive(c)) return 0.0;
    return kappa_hat_;
  }

  int n_cells() const { return static_cast<int>(kappa_.size()); }
  bool has_conductor() const { return min_kappa_c_ > 0.0; }
  double min_conductive_kappa() const { return min_kappa_c_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  std::vector<double> kappa_, eps_, nu_;
  std::vector<std::string> tag_;
  double kappa_hat_ = 0.0;
  double min_kappa_c_ = 0.0;
  KappaHatPolicy policy_ = KappaHatPolicy::NonConductiveOnly;
  bool eps_restricted_ = false;
  std::vector<std::string> warnings_;
};

MaterialField build_material_field(const Grid& grid, const MaterialBox& background,
                                   const std::vector<MaterialBox>& boxes,
                                   const MaterialOptions& opts = {});

}  // namespace emqs
