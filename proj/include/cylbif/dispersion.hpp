#pragma once

#include <vector>

#include "cylbif/cross_section.hpp"

namespace cylbif {

// Position of a height t relative to the crossing t_k of one Neumann mode.
enum class Regime { Subcritical, Critical, Supercritical };

const char* to_string(Regime regime);

struct DispersionSample {
  double t = 0.0;
  int k = 0;
  double mu = 0.0;
  Regime regime = Regime::Critical;
};

/// Closed-form solution g_k of the modal problem on [0, t]
///   g'' - sigma g + lambda_t g = 0,  g'(0) = 0,  g(t) = pi / (2 t^2).
class ModalProfile {
 public:
  ModalProfile(double t, double sigma, int k = 0);

  double t() const noexcept { return t_; }
  double sigma() const noexcept { return sigma_; }
  int k() const noexcept { return k_; }
  Regime regime() const noexcept { return regime_; }

  double operator()(double x) const;
  double derivative(double x) const;

 private:
  void check_range(double x) const;

  double t_;
  double sigma_;
  int k_;
  Regime regime_;
  double rate_;  // sqrt(|lambda_t - sigma|)
  double top_;   // pi / (2 t^2)
};

// lambda_t = (pi / (2t))^2, first eigenvalue of the straight cylinder of height t.
double lambda_trivial(double t);

// t_k = pi / (2 sqrt(sigma_k)), where lambda_t crosses sigma_k.
double bifurcation_point(double sigma);

Regime regime_of(double t, double sigma);

double g_profile(double t, double sigma, double x);
double g_prime_at_top(double t, double sigma);

/// Eigenvalue mu_{t,k} = t g_k'(t) of the linearized normal-derivative operator
/// on the mode with Neumann eigenvalue sigma.
double mu(double t, double sigma);

// d mu / dt at t = t_k, i.e. pi^3 / (4 t_k^3).
double crossing_slope(double sigma);

DispersionSample dispersion_sample(double t, const NeumannMode& mode);

struct Crossing {
  int k = 0;
  double sigma = 0.0;
  double t = 0.0;
  bool simple = false;
};

/// Crossings t_k of the first `count` modes that fall inside [t_min, t_max],
/// ordered by mode index.
std::vector<Crossing> find_crossings(const CrossSection& section, int count, double t_min,
                                     double t_max, double gap_tol = 1e-8);

}  // namespace cylbif
