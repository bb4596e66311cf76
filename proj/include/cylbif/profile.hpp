#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "cylbif/cross_section.hpp"

namespace cylbif {

/// Height function v = t + w of a hypograph domain over omega, where the
/// deviation w = sum_{k=1..K} a_k xi_k has zero mean by construction and
/// satisfies d_eta w = 0 on the boundary of omega.
class Profile {
 public:
  Profile(const CrossSection& section, double height, Eigen::VectorXd coefficients);

  static Profile constant(const CrossSection& section, double height, int mode_count);

  const CrossSection& section() const noexcept { return section_; }
  double height() const noexcept { return height_; }
  int mode_count() const noexcept { return static_cast<int>(coefficients_.size()); }
  const std::vector<NeumannMode>& modes() const noexcept { return modes_; }
  const Eigen::VectorXd& coefficients() const noexcept { return coefficients_; }
  // 1-based coefficient access, matching mode indices.
  double coefficient(int k) const { return coefficients_(k - 1); }

  Profile with_height(double height) const;
  Profile with_coefficients(Eigen::VectorXd coefficients) const;

  double deviation(SectionPoint p) const;
  double value(SectionPoint p) const { return height_ + deviation(p); }
  std::array<double, 2> gradient(SectionPoint p) const;
  std::array<double, 2> second_derivatives(SectionPoint p) const;

  bool is_constant() const noexcept { return coefficients_.isZero(0.0); }
  // L2(omega) norm of w (exact, by orthonormality of the modes).
  double deviation_norm() const noexcept { return coefficients_.norm(); }

 private:
  CrossSection section_;
  double height_;
  Eigen::VectorXd coefficients_;
  std::vector<NeumannMode> modes_;
};

}  // namespace cylbif
