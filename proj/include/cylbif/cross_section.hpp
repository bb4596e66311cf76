#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

namespace cylbif {

enum class SectionKind { Interval, Rectangle };

std::string to_string(SectionKind kind);

// A point of the base domain. `y` is ignored for an interval.
struct SectionPoint {
  double x = 0.0;
  double y = 0.0;
};

/// One Neumann eigenpair of the base domain. `mode_numbers` = (m, n) for
/// cos(m pi x / a) cos(n pi y / b); n is always 0 on an interval.
/// The eigenfunction is normalized to unit L2 norm.
struct NeumannMode {
  int index = 0;
  double sigma = 0.0;
  std::array<int, 2> mode_numbers{0, 0};
};

/// Base domain of the half-cylinder: an interval (0, L) or a rectangle (0, a) x (0, b).
/// Both have closed-form Neumann spectra.
class CrossSection {
 public:
  static CrossSection interval(double length);
  static CrossSection rectangle(double a, double b);

  SectionKind kind() const noexcept { return kind_; }
  int dimension() const noexcept { return kind_ == SectionKind::Interval ? 1 : 2; }
  double length(int axis) const { return lengths_.at(static_cast<std::size_t>(axis)); }
  double measure() const noexcept;

  // a / b for a rectangle, 1 for an interval.
  double aspect_ratio() const noexcept;
  // True when (a/b)^2 is (numerically) p/q with q <= max_denominator. Only then can
  // distinct mode pairs share an eigenvalue.
  bool has_rational_aspect(int max_denominator = 64, double tol = 1e-12) const;

  bool contains(SectionPoint p, double tol = 1e-12) const noexcept;

 private:
  CrossSection(SectionKind kind, std::array<double, 2> lengths) : kind_(kind), lengths_(lengths) {}

  SectionKind kind_;
  std::array<double, 2> lengths_;
};

/// The `count` smallest positive Neumann eigenvalues, nondecreasing, with the
/// constant mode excluded. Ties are broken lexicographically on (m, n).
std::vector<NeumannMode> neumann_spectrum(const CrossSection& section, int count);

double evaluate_mode(const CrossSection& section, const NeumannMode& mode, SectionPoint p);
std::vector<double> evaluate_mode(const CrossSection& section, const NeumannMode& mode,
                                  std::span<const SectionPoint> points);

// Integral of the normalized mode over omega, from its antiderivative.
double mode_integral(const CrossSection& section, const NeumannMode& mode);

// (d/dx, d/dy) and (d2/dx2, d2/dy2) of the normalized mode.
std::array<double, 2> mode_gradient(const CrossSection& section, const NeumannMode& mode,
                                    SectionPoint p);
std::array<double, 2> mode_second_derivatives(const CrossSection& section, const NeumannMode& mode,
                                              SectionPoint p);

/// True iff sigma_j is separated from its neighbours in `spectrum` by more than
/// `gap_tol`. `j` is the 1-based mode index. At either end of the list only the
/// one-sided gap is available.
bool is_simple(std::span<const NeumannMode> spectrum, int j, double gap_tol = 1e-8);

}  // namespace cylbif
