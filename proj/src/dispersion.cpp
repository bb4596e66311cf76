#include "cylbif/dispersion.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "cylbif/errors.hpp"

namespace cylbif {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kResonanceTol = 1e-12;

void require_height(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    std::ostringstream os;
    os << "height must be positive, got " << t;
    throw InputError(os.str());
  }
}

void require_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    std::ostringstream os;
    os << "Neumann eigenvalue must be positive, got " << sigma;
    throw InputError(os.str());
  }
}

// beta = sqrt(1 - r^2) and tau = sqrt(r^2 - 1) with r = t / t_k, factored to
// avoid cancellation near the crossing.
double sub_factor(double r) { return std::sqrt((1.0 - r) * (1.0 + r)); }
double super_factor(double r) { return std::sqrt((r - 1.0) * (r + 1.0)); }

[[noreturn]] void throw_resonance(double t, double sigma, int k) {
  std::ostringstream os;
  os << "resonance pole: cos(sqrt(lambda_t - sigma) t) vanishes for mode " << k << " (t = " << t
     << ", sigma = " << sigma << ")";
  throw ResonanceError(os.str(), k);
}

}  // namespace

const char* to_string(Regime regime) {
  switch (regime) {
    case Regime::Subcritical:
      return "subcritical";
    case Regime::Critical:
      return "critical";
    case Regime::Supercritical:
      return "supercritical";
  }
  return "unknown";
}

double lambda_trivial(double t) {
  require_height(t);
  const double q = kPi / (2.0 * t);
  return q * q;
}

double bifurcation_point(double sigma) {
  require_sigma(sigma);
  return kPi / (2.0 * std::sqrt(sigma));
}

Regime regime_of(double t, double sigma) {
  const double r = t / bifurcation_point(sigma);
  if (r < 1.0) return Regime::Subcritical;
  if (r > 1.0) return Regime::Supercritical;
  return Regime::Critical;
}

ModalProfile::ModalProfile(double t, double sigma, int k)
    : t_(t), sigma_(sigma), k_(k), regime_(Regime::Critical), rate_(0.0), top_(0.0) {
  require_height(t);
  require_sigma(sigma);
  top_ = kPi / (2.0 * t * t);
  const double r = t / bifurcation_point(sigma);
  regime_ = regime_of(t, sigma);
  if (regime_ == Regime::Subcritical) {
    rate_ = kPi / (2.0 * t) * sub_factor(r);
    if (std::abs(std::cos(rate_ * t)) < kResonanceTol) throw_resonance(t, sigma, k);
  } else if (regime_ == Regime::Supercritical) {
    rate_ = kPi / (2.0 * t) * super_factor(r);
  }
}

void ModalProfile::check_range(double x) const {
  if (!(x >= 0.0 && x <= t_ * (1.0 + 1e-12))) {
    std::ostringstream os;
    os << "modal profile evaluated at x_N = " << x << " outside [0, " << t_ << "]";
    throw InputError(os.str());
  }
}

double ModalProfile::operator()(double x) const {
  check_range(x);
  switch (regime_) {
    case Regime::Critical:
      return top_;
    case Regime::Subcritical:
      return top_ * std::cos(rate_ * x) / std::cos(rate_ * t_);
    case Regime::Supercritical: {
      // cosh(kx) / cosh(kt) without overflow for large kt.
      const double num = 1.0 + std::exp(-2.0 * rate_ * x);
      const double den = 1.0 + std::exp(-2.0 * rate_ * t_);
      return top_ * std::exp(rate_ * (x - t_)) * num / den;
    }
  }
  return 0.0;
}

double ModalProfile::derivative(double x) const {
  check_range(x);
  switch (regime_) {
    case Regime::Critical:
      return 0.0;
    case Regime::Subcritical:
      return -top_ * rate_ * std::sin(rate_ * x) / std::cos(rate_ * t_);
    case Regime::Supercritical: {
      const double num = 1.0 - std::exp(-2.0 * rate_ * x);
      const double den = 1.0 + std::exp(-2.0 * rate_ * t_);
      return top_ * rate_ * std::exp(rate_ * (x - t_)) * num / den;
    }
  }
  return 0.0;
}

double g_profile(double t, double sigma, double x) { return ModalProfile(t, sigma)(x); }

double g_prime_at_top(double t, double sigma) {
  require_height(t);
  const double r = t / bifurcation_point(sigma);
  const double scale = kPi * kPi / (4.0 * t * t * t);
  if (r < 1.0) {
    const double beta = sub_factor(r);
    const double angle = 0.5 * kPi * beta;
    if (std::abs(std::cos(angle)) < kResonanceTol) throw_resonance(t, sigma, 0);
    return -scale * beta * std::tan(angle);
  }
  if (r > 1.0) {
    const double tau = super_factor(r);
    return scale * tau * (1.0 - 2.0 / (std::exp(kPi * tau) + 1.0));
  }
  return 0.0;
}

double mu(double t, double sigma) { return t * g_prime_at_top(t, sigma); }

double crossing_slope(double sigma) {
  const double tk = bifurcation_point(sigma);
  return kPi * kPi * kPi / (4.0 * tk * tk * tk);
}

DispersionSample dispersion_sample(double t, const NeumannMode& mode) {
  return {t, mode.index, mu(t, mode.sigma), regime_of(t, mode.sigma)};
}

std::vector<Crossing> find_crossings(const CrossSection& section, int count, double t_min,
                                     double t_max, double gap_tol) {
  if (!(t_min > 0.0) || !(t_max > t_min)) {
    throw InputError("find_crossings: window must satisfy 0 < t_min < t_max");
  }
  // One extra mode so the last requested eigenvalue has an upper neighbour.
  const auto spectrum = neumann_spectrum(section, count + 1);
  std::vector<Crossing> out;
  for (int k = 1; k <= count; ++k) {
    const auto& mode = spectrum[static_cast<std::size_t>(k - 1)];
    const double tk = bifurcation_point(mode.sigma);
    if (tk < t_min || tk > t_max) continue;
    out.push_back({k, mode.sigma, tk, is_simple(spectrum, k, gap_tol)});
  }
  return out;
}

}  // namespace cylbif
