#include "cylbif/profile.hpp"

#include <cmath>
#include <sstream>

#include "cylbif/errors.hpp"

namespace cylbif {

Profile::Profile(const CrossSection& section, double height, Eigen::VectorXd coefficients)
    : section_(section), height_(height), coefficients_(std::move(coefficients)) {
  if (!(height > 0.0) || !std::isfinite(height)) {
    std::ostringstream os;
    os << "profile height must be positive, got " << height;
    throw InputError(os.str());
  }
  if (!coefficients_.allFinite()) throw InputError("profile coefficients must be finite");
  if (coefficients_.size() > 0) {
    modes_ = neumann_spectrum(section_, static_cast<int>(coefficients_.size()));
  }
}

Profile Profile::constant(const CrossSection& section, double height, int mode_count) {
  return Profile(section, height, Eigen::VectorXd::Zero(mode_count));
}

Profile Profile::with_height(double height) const {
  Profile copy = *this;
  if (!(height > 0.0)) throw InputError("profile height must be positive");
  copy.height_ = height;
  return copy;
}

Profile Profile::with_coefficients(Eigen::VectorXd coefficients) const {
  if (coefficients.size() == coefficients_.size()) {
    Profile copy = *this;
    copy.coefficients_ = std::move(coefficients);
    return copy;
  }
  return Profile(section_, height_, std::move(coefficients));
}

double Profile::deviation(SectionPoint p) const {
  double w = 0.0;
  for (std::size_t k = 0; k < modes_.size(); ++k) {
    const double a = coefficients_[static_cast<Eigen::Index>(k)];
    if (a != 0.0) w += a * evaluate_mode(section_, modes_[k], p);
  }
  return w;
}

std::array<double, 2> Profile::gradient(SectionPoint p) const {
  std::array<double, 2> g{0.0, 0.0};
  for (std::size_t k = 0; k < modes_.size(); ++k) {
    const double a = coefficients_[static_cast<Eigen::Index>(k)];
    if (a == 0.0) continue;
    const auto d = mode_gradient(section_, modes_[k], p);
    g[0] += a * d[0];
    g[1] += a * d[1];
  }
  return g;
}

std::array<double, 2> Profile::second_derivatives(SectionPoint p) const {
  std::array<double, 2> h{0.0, 0.0};
  for (std::size_t k = 0; k < modes_.size(); ++k) {
    const double a = coefficients_[static_cast<Eigen::Index>(k)];
    if (a == 0.0) continue;
    const auto d = mode_second_derivatives(section_, modes_[k], p);
    h[0] += a * d[0];
    h[1] += a * d[1];
  }
  return h;
}

}  // namespace cylbif
