#include "cylbif/cross_section.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <tuple>

#include "cylbif/errors.hpp"

namespace cylbif {

namespace {

constexpr double kPi = std::numbers::pi;

void require_positive_length(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    std::ostringstream os;
    os << "cross-section length " << name << " must be positive and finite, got " << value;
    throw InputError(os.str());
  }
}

// Normalized 1-D Neumann cosine on (0, L) and its first two derivatives.
double cosine_factor(int m, double length, double x) {
  const double scale = m == 0 ? std::sqrt(1.0 / length) : std::sqrt(2.0 / length);
  return scale * std::cos(m * kPi * x / length);
}

double cosine_factor_d1(int m, double length, double x) {
  if (m == 0) return 0.0;
  const double w = m * kPi / length;
  return -std::sqrt(2.0 / length) * w * std::sin(w * x);
}

double cosine_factor_d2(int m, double length, double x) {
  if (m == 0) return 0.0;
  const double w = m * kPi / length;
  return -std::sqrt(2.0 / length) * w * w * std::cos(w * x);
}

void require_inside(const CrossSection& section, SectionPoint p) {
  if (!section.contains(p)) {
    std::ostringstream os;
    os << "point (" << p.x << ", " << p.y << ") lies outside the cross-section";
    throw InputError(os.str());
  }
}

}  // namespace

std::string to_string(SectionKind kind) {
  return kind == SectionKind::Interval ? "interval" : "rectangle";
}

CrossSection CrossSection::interval(double length) {
  require_positive_length(length, "L");
  return CrossSection(SectionKind::Interval, {length, 1.0});
}

CrossSection CrossSection::rectangle(double a, double b) {
  require_positive_length(a, "a");
  require_positive_length(b, "b");
  return CrossSection(SectionKind::Rectangle, {a, b});
}

double CrossSection::measure() const noexcept {
  return kind_ == SectionKind::Interval ? lengths_[0] : lengths_[0] * lengths_[1];
}

double CrossSection::aspect_ratio() const noexcept {
  return kind_ == SectionKind::Interval ? 1.0 : lengths_[0] / lengths_[1];
}

bool CrossSection::has_rational_aspect(int max_denominator, double tol) const {
  if (kind_ == SectionKind::Interval) return false;
  const double r2 = aspect_ratio() * aspect_ratio();
  for (int q = 1; q <= max_denominator; ++q) {
    const double p = std::round(r2 * q);
    if (p >= 1.0 && std::abs(r2 * q - p) <= tol * q * std::max(1.0, r2)) return true;
  }
  return false;
}

bool CrossSection::contains(SectionPoint p, double tol) const noexcept {
  const auto inside = [tol](double x, double len) {
    return x >= -tol * len && x <= len * (1.0 + tol);
  };
  if (!inside(p.x, lengths_[0])) return false;
  return kind_ == SectionKind::Interval || inside(p.y, lengths_[1]);
}

std::vector<NeumannMode> neumann_spectrum(const CrossSection& section, int count) {
  if (count < 1) throw InputError("neumann_spectrum: mode count must be at least 1");

  std::vector<NeumannMode> modes;
  if (section.kind() == SectionKind::Interval) {
    const double w = kPi / section.length(0);
    for (int k = 1; k <= count; ++k) {
      modes.push_back({k, (k * w) * (k * w), {k, 0}});
    }
    return modes;
  }

  // Every one of the `count` smallest pairs has m <= count and n <= count, since
  // the (m, 0) modes alone already supply `count` candidates.
  const double wa = kPi / section.length(0);
  const double wb = kPi / section.length(1);
  for (int m = 0; m <= count; ++m) {
    for (int n = 0; n <= count; ++n) {
      if (m == 0 && n == 0) continue;
      modes.push_back({0, (m * wa) * (m * wa) + (n * wb) * (n * wb), {m, n}});
    }
  }
  // Eigenvalues equal up to rounding count as ties, broken on (m, n).
  std::sort(modes.begin(), modes.end(), [](const NeumannMode& l, const NeumannMode& r) {
    if (std::abs(l.sigma - r.sigma) > 1e-12 * std::max(l.sigma, r.sigma)) return l.sigma < r.sigma;
    return l.mode_numbers < r.mode_numbers;
  });
  modes.resize(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) modes[static_cast<std::size_t>(k)].index = k + 1;
  return modes;
}

double evaluate_mode(const CrossSection& section, const NeumannMode& mode, SectionPoint p) {
  require_inside(section, p);
  const auto [m, n] = mode.mode_numbers;
  const double fx = cosine_factor(m, section.length(0), p.x);
  if (section.kind() == SectionKind::Interval) return fx;
  return fx * cosine_factor(n, section.length(1), p.y);
}

std::vector<double> evaluate_mode(const CrossSection& section, const NeumannMode& mode,
                                  std::span<const SectionPoint> points) {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(evaluate_mode(section, mode, p));
  return out;
}

double mode_integral(const CrossSection& section, const NeumannMode& mode) {
  const auto factor_integral = [](int m, double length) {
    if (m == 0) return std::sqrt(length);
    const double w = m * kPi / length;
    return std::sqrt(2.0 / length) * std::sin(w * length) / w;
  };
  const auto [m, n] = mode.mode_numbers;
  const double ix = factor_integral(m, section.length(0));
  if (section.kind() == SectionKind::Interval) return ix;
  return ix * factor_integral(n, section.length(1));
}

std::array<double, 2> mode_gradient(const CrossSection& section, const NeumannMode& mode,
                                    SectionPoint p) {
  require_inside(section, p);
  const auto [m, n] = mode.mode_numbers;
  const double a = section.length(0);
  if (section.kind() == SectionKind::Interval) return {cosine_factor_d1(m, a, p.x), 0.0};
  const double b = section.length(1);
  return {cosine_factor_d1(m, a, p.x) * cosine_factor(n, b, p.y),
          cosine_factor(m, a, p.x) * cosine_factor_d1(n, b, p.y)};
}

std::array<double, 2> mode_second_derivatives(const CrossSection& section, const NeumannMode& mode,
                                              SectionPoint p) {
  require_inside(section, p);
  const auto [m, n] = mode.mode_numbers;
  const double a = section.length(0);
  if (section.kind() == SectionKind::Interval) return {cosine_factor_d2(m, a, p.x), 0.0};
  const double b = section.length(1);
  return {cosine_factor_d2(m, a, p.x) * cosine_factor(n, b, p.y),
          cosine_factor(m, a, p.x) * cosine_factor_d2(n, b, p.y)};
}

bool is_simple(std::span<const NeumannMode> spectrum, int j, double gap_tol) {
  if (j < 1 || j > static_cast<int>(spectrum.size())) {
    throw InputError("is_simple: mode index out of range");
  }
  if (!(gap_tol > 0.0)) throw InputError("is_simple: gap tolerance must be positive");
  const auto idx = static_cast<std::size_t>(j - 1);
  const double sigma = spectrum[idx].sigma;
  if (idx > 0 && sigma - spectrum[idx - 1].sigma <= gap_tol) return false;
  if (idx + 1 < spectrum.size() && spectrum[idx + 1].sigma - sigma <= gap_tol) return false;
  return true;
}

}  // namespace cylbif
