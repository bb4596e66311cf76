#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cylbif/continuation.hpp"
#include "cylbif/errors.hpp"

using namespace cylbif;
using std::numbers::pi;

namespace {

const CrossSection kInterval = CrossSection::interval(pi);

ContinuationSettings settings() { return ContinuationSettings{Grid(kInterval, 48, 64), 16, 1e-9, 15, 10, 1e-6, {}}; }

const Branch& branch() {
  static const Branch b = trace_branch(settings(), 1, 0.04, 0.01);
  return b;
}

const BranchPoint& at(double s) {
  const BranchPoint* p = branch().find(s, 1e-12);
  REQUIRE(p != nullptr);
  return *p;
}

double tangency_misfit(const BranchPoint& p) {
  Eigen::VectorXd e = p.profile.coefficients() / p.s;
  e[0] -= 1.0;
  return e.norm();
}

}  // namespace

TEST_CASE("bifurcation candidates") {
  const auto c = detect_bifurcations(kInterval, 2, 0.7, 1.7);
  REQUIRE(c.size() == 2);
  CHECK(c[0].k == 1);
  CHECK(c[0].t == doctest::Approx(pi / 2));
  CHECK(c[0].slope == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(c[0].eligible);
  CHECK(c[1].k == 2);
  CHECK(c[1].t == doctest::Approx(pi / 4));
  CHECK(c[1].slope == doctest::Approx(16.0).epsilon(1e-14));
  CHECK(c[1].eligible);

  const auto square = detect_bifurcations(CrossSection::rectangle(pi, pi), 3, 0.1, 5.0);
  REQUIRE(square.size() == 3);
  CHECK_FALSE(square[0].eligible);
  CHECK_FALSE(square[1].eligible);
  CHECK(square[2].eligible);

  for (const auto& cand : detect_bifurcations(CrossSection::rectangle(1.0, 2.7), 30, 0.01, 10.0)) {
    CHECK(cand.slope > 0.0);
    CHECK(cand.slope == doctest::Approx(std::pow(pi, 3) / (4 * std::pow(cand.t, 3))).epsilon(1e-13));
  }
  CHECK(detect_bifurcations(kInterval, 1, 2.0, 3.0).empty());
}

TEST_CASE("trivial line is a solution for every height") {
  const auto st = settings();
  const auto p = newton_solve(st, 1, 0.0, Profile::constant(kInterval, pi / 2, 16));
  CHECK(p.newton_iterations == 0);
  CHECK(p.t() == pi / 2);
  CHECK(p.profile.is_constant());

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> height(pi / 4, pi);
  for (int i = 0; i < 20; ++i) {
    const double t = height(rng);
    const auto q = newton_solve(st, 1, 0.0, Profile::constant(kInterval, t, 16));
    CHECK(q.t() == t);
    CHECK(q.profile.is_constant());
    CHECK(q.newton_iterations <= 1);
  }
}

TEST_CASE("Newton converges off the trivial line") {
  const auto st = settings();
  Eigen::VectorXd a = Eigen::VectorXd::Zero(16);
  a[0] = 0.02;
  const auto p = newton_solve(st, 1, 0.02, Profile(kInterval, pi / 2, a));
  CHECK(p.newton_iterations >= 1);
  CHECK(p.residual_norm <= 1e-9 * std::abs(p.c));
  CHECK(std::abs(p.profile.coefficient(1) - 0.02) <= 1e-12);
  CHECK(tangency_misfit(p) <= 0.1);
  CHECK(p.t() > 0.0);
}

TEST_CASE("Newton failures carry diagnostics") {
  auto st = settings();
  st.max_newton_iterations = 0;
  Eigen::VectorXd a = Eigen::VectorXd::Zero(16);
  a[0] = 0.02;
  try {
    newton_solve(st, 1, 0.03, Profile(kInterval, pi / 2, a));
    FAIL("expected a convergence error");
  } catch (const ConvergenceError& e) {
    CHECK(e.iterations() == 0);
    CHECK(e.last_residual() > 0.0);
  }
  CHECK_THROWS_AS(newton_solve(settings(), 17, 0.01, Profile::constant(kInterval, 1.0, 16)), InputError);
  // Initial domain touching the base.
  Eigen::VectorXd big = Eigen::VectorXd::Zero(16);
  big[0] = 3.0;
  CHECK_THROWS_AS(newton_solve(settings(), 1, 3.0, Profile(kInterval, 1.0, big)), InputError);

  ContinuationSettings square{Grid(CrossSection::rectangle(pi, pi), 12, 12), 4, 1e-9, 15, 10, 1e-6, {}};
  CHECK_THROWS_AS(trace_branch(square, 1, 0.02, 0.01), InputError);
  CHECK_THROWS_AS(trace_branch(settings(), 1, 0.0, 0.01), InputError);
}

TEST_CASE("branch of mode 1") {
  const Branch& b = branch();
  CHECK(b.j == 1);
  CHECK(b.t_star == doctest::Approx(pi / 2).epsilon(1e-15));
  CHECK(b.warnings.empty());
  REQUIRE(b.points.size() == 9);
  for (std::size_t i = 1; i < b.points.size(); ++i) CHECK(b.points[i].s > b.points[i - 1].s);

  const auto& origin = at(0.0);
  CHECK(origin.t() == pi / 2);
  CHECK(origin.profile.is_constant());
  CHECK(origin.newton_iterations == 0);

  for (const auto& p : b.points) {
    CAPTURE(p.s);
    CHECK(p.residual_norm <= 1e-9 * std::abs(p.c));
    CHECK(std::abs(p.profile.coefficient(1) - p.s) <= 1e-12);
    CHECK(std::abs(p.t() - pi / 2) <= 0.05);
    const auto f = evaluate_F(p.profile, settings().grid);
    CHECK(f.normal_derivative.stddev() / std::abs(f.c) <= 1e-5);
    if (p.s != 0.0) {
      double lo = 1e300, hi = -1e300;
      for (int i = 0; i <= 400; ++i) {
        const double v = p.profile.value({pi * i / 400, 0});
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      CHECK(hi - lo >= 0.5 * std::abs(p.s) * std::sqrt(2.0 / pi));
      CHECK(p.profile.deviation_norm() >= 0.5 * std::abs(p.s));
    }
  }
}

TEST_CASE("pitchfork symmetry and reflection") {
  for (double s : {0.01, 0.02, 0.03, 0.04}) {
    const auto& plus = at(s);
    const auto& minus = at(-s);
    CHECK(std::abs(plus.t() - minus.t()) <= 1e-3);
    CHECK(std::abs(plus.t() - minus.t()) <= 1e-9);
    // x -> pi - x maps xi_k to (-1)^k xi_k.
    for (int k = 1; k <= 16; ++k) {
      CHECK(std::abs(minus.profile.coefficient(k) - (k % 2 ? -1.0 : 1.0) * plus.profile.coefficient(k)) <= 1e-9);
    }
  }
}

TEST_CASE("tangency and mode-1 dominance near onset") {
  const double m4 = tangency_misfit(at(0.04));
  const double m2 = tangency_misfit(at(0.02));
  const double m1 = tangency_misfit(at(0.01));
  CHECK(m4 > m2);
  CHECK(m2 > m1);
  CHECK(m1 <= 0.1);
  for (double s : {-0.02, -0.01, 0.01, 0.02}) {
    const auto& p = at(s);
    for (int k = 2; k <= 16; ++k) CHECK(std::abs(p.profile.coefficient(k)) <= 0.2 * std::abs(p.profile.coefficient(1)));
  }
}

TEST_CASE("quadratic pitchfork about the discrete bifurcation point") {
  const double t_h = discrete_bifurcation_point(settings(), 1);
  CHECK(std::abs(t_h - pi / 2) <= 1e-3);
  const double r_plus = (at(0.02).t() - t_h) / (at(0.01).t() - t_h);
  const double r_minus = (at(-0.02).t() - t_h) / (at(-0.01).t() - t_h);
  CHECK(r_plus >= 3.0);
  CHECK(r_plus <= 5.0);
  CHECK(r_minus >= 3.0);
  CHECK(r_minus <= 5.0);
  const double r_outer = (at(0.04).t() - t_h) / (at(0.02).t() - t_h);
  CHECK(r_outer >= 3.0);
  CHECK(r_outer <= 5.0);
}

TEST_CASE("eigenvalue along the branch stays within O(s^2) of the trivial one") {
  const auto st = settings();
  const auto offset = [&](double s) {
    const auto& p = at(s);
    return p.lambda - first_eigenpair(Profile::constant(kInterval, p.t(), 1), st.grid).lambda;
  };
  const double ratio = offset(0.02) / offset(0.01);
  CHECK(ratio >= 3.0);
  CHECK(ratio <= 5.0);
  CHECK(std::abs(offset(0.04)) <= 0.04 * 0.04);
}

TEST_CASE("branch point verification") {
  const auto st = settings();
  for (const auto& p : branch().points) {
    CAPTURE(p.s);
    const auto r = verify_branch_point(st, 1, p);
    CHECK(r.passed());
    CHECK(r.min_v > 0.0);
    CHECK(r.phi_positive);
  }
  const auto trivial = verify_branch_point(st, 1, at(0.0));
  CHECK(trivial.constancy <= 1e-6);
  CHECK(trivial.orthogonality == 0.0);

  // Negative control: perturb w by 0.01 xi_2 without re-solving.
  const auto& p = at(0.02);
  Eigen::VectorXd a = p.profile.coefficients();
  a[1] += 0.01;
  BranchPoint corrupted{p.s, p.profile.with_coefficients(a), p.lambda, p.c, p.residual_norm, p.newton_iterations};
  const auto bad = verify_branch_point(st, 1, corrupted);
  CHECK(bad.constancy >= 1e-3);
  CHECK_FALSE(bad.constancy_ok);
  CHECK_FALSE(bad.passed());
}

TEST_CASE("orthogonality measure vanishes under refinement") {
  const auto& p = at(0.04);
  const auto coarse = verify_branch_point(settings(), 1, p);
  ContinuationSettings fine{Grid(kInterval, 95, 32), 16, 1e-9, 15, 10, 1e-6, {}};
  const auto refined = verify_branch_point(fine, 1, p);
  CHECK(coarse.orthogonality / refined.orthogonality >= 3.0);
}
