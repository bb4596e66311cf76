#include "cylbif/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cylbif/errors.hpp"

namespace cylbif {

namespace {

constexpr double kDegenerateFraction = 1e-6;

struct Residual {
  Eigen::VectorXd r;
  FEvaluation f;
};

double min_height(const Profile& v, const Grid& grid) {
  double m = v.value(grid.section_point(0));
  for (int s = 1; s < grid.section_nodes(); ++s) m = std::min(m, v.value(grid.section_point(s)));
  return m;
}

bool admissible(double t, const Eigen::VectorXd& a, const ContinuationSettings& settings) {
  if (!(t > 0.0) || !a.allFinite()) return false;
  return min_height(Profile(settings.section(), t, a), settings.grid) > kDegenerateFraction * t;
}

Residual residual(const ContinuationSettings& settings, int j, double s, double t,
                  const Eigen::VectorXd& a) {
  FEvaluation f = evaluate_F(Profile(settings.section(), t, a), settings.grid, settings.eigen);
  const int k = static_cast<int>(a.size());
  Eigen::VectorXd r(k + 1);
  r.head(k) = f.value.coefficients;
  r[k] = a[j - 1] - s;
  return Residual{std::move(r), std::move(f)};
}

BranchPoint make_point(double s, const ContinuationSettings& settings, double t,
                       const Eigen::VectorXd& a, const Residual& res, int iterations) {
  return BranchPoint{s, Profile(settings.section(), t, a), res.f.pair.lambda, res.f.c,
                     res.r.norm(), iterations};
}

void require_mode(const ContinuationSettings& settings, int j) {
  if (j < 1 || j > settings.mode_count) {
    std::ostringstream os;
    os << "branch mode " << j << " outside 1.." << settings.mode_count;
    throw InputError(os.str());
  }
}

// One-sided second-order derivative of samples f0, f1, f2 spaced h away from a face.
double one_sided(double f0, double f1, double f2, double h) {
  return (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h);
}

}  // namespace

std::vector<BifurcationCandidate> detect_bifurcations(const CrossSection& section, int count,
                                                      double t_min, double t_max,
                                                      double gap_tol) {
  std::vector<BifurcationCandidate> out;
  for (const auto& crossing : find_crossings(section, count, t_min, t_max, gap_tol)) {
    const double slope = crossing_slope(crossing.sigma);
    out.push_back({crossing.k, crossing.sigma, crossing.t, crossing.simple, slope,
                   crossing.simple && slope != 0.0});
  }
  return out;
}

BranchPoint newton_solve(const ContinuationSettings& settings, int j, double s,
                         const Profile& initial) {
  require_mode(settings, j);
  const int k = settings.mode_count;
  double t = initial.height();
  Eigen::VectorXd a = Eigen::VectorXd::Zero(k);
  const int copy = std::min(k, initial.mode_count());
  a.head(copy) = initial.coefficients().head(copy);
  if (!admissible(t, a, settings)) throw InputError("newton_solve: initial domain is not admissible");

  Residual res = residual(settings, j, s, t, a);
  double norm = res.r.norm();
  int iteration = 0;
  while (norm > settings.newton_tol * std::abs(res.f.c)) {
    if (iteration == settings.max_newton_iterations) {
      std::ostringstream os;
      os << "newton_solve: no convergence after " << iteration << " iterations (mode " << j
         << ", s = " << s << ", residual " << norm << ")";
      throw ConvergenceError(os.str(), iteration, norm);
    }
    ++iteration;

    // Forward-difference Jacobian; column 0 is d/dt.
    Eigen::MatrixXd jac(k + 1, k + 1);
    const double dt = settings.jacobian_step * std::max(1.0, t);
    jac.col(0) = (residual(settings, j, s, t + dt, a).r - res.r) / dt;
    for (int m = 0; m < k; ++m) {
      Eigen::VectorXd shifted = a;
      shifted[m] += settings.jacobian_step;
      jac.col(m + 1) = (residual(settings, j, s, t, shifted).r - res.r) / settings.jacobian_step;
    }
    const Eigen::VectorXd step = jac.fullPivLu().solve(-res.r);

    double scale = 1.0;
    bool accepted = false;
    for (int halving = 0; halving <= settings.max_step_halvings; ++halving, scale *= 0.5) {
      const double t_try = t + scale * step[0];
      const Eigen::VectorXd a_try = a + scale * step.tail(k);
      if (!admissible(t_try, a_try, settings)) continue;
      Residual trial = residual(settings, j, s, t_try, a_try);
      if (trial.r.norm() < norm) {
        t = t_try;
        a = a_try;
        res = std::move(trial);
        norm = res.r.norm();
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      std::ostringstream os;
      os << "newton_solve: step rejected after " << settings.max_step_halvings
         << " halvings (mode " << j << ", s = " << s << ", residual " << norm << ")";
      throw ConvergenceError(os.str(), iteration, norm);
    }
  }
  return make_point(s, settings, t, a, res, iteration);
}

const BranchPoint* Branch::find(double s, double tol) const {
  for (const auto& p : points) {
    if (std::abs(p.s - s) <= tol) return &p;
  }
  return nullptr;
}

Branch trace_branch(const ContinuationSettings& settings, int j, double s_max, double ds) {
  require_mode(settings, j);
  if (!(ds > 0.0) || !(s_max >= ds)) throw InputError("trace_branch: need 0 < ds <= s_max");
  const auto spectrum = neumann_spectrum(settings.section(), settings.mode_count + 1);
  if (!is_simple(spectrum, j)) {
    std::ostringstream os;
    os << "trace_branch: sigma_" << j << " is not simple; no branch is traced";
    throw InputError(os.str());
  }

  Branch branch;
  branch.j = j;
  branch.t_star = bifurcation_point(spectrum[static_cast<std::size_t>(j - 1)].sigma);

  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(settings.mode_count);
  const Residual origin = residual(settings, j, 0.0, branch.t_star, zero);
  branch.points.push_back(make_point(0.0, settings, branch.t_star, zero, origin, 0));

  const int steps = static_cast<int>(std::round(s_max / ds));
  for (const double direction : {1.0, -1.0}) {
    double t = branch.t_star;
    Eigen::VectorXd a = zero;
    for (int n = 1; n <= steps; ++n) {
      const double s = direction * n * ds;
      a[j - 1] = s;  // tangent predictor s xi_j on the first step
      try {
        BranchPoint p = newton_solve(settings, j, s, Profile(settings.section(), t, a));
        t = p.t();
        a = p.profile.coefficients();
        branch.points.push_back(std::move(p));
      } catch (const NumericalError& e) {
        branch.warnings.push_back(e.what());
        break;
      } catch (const InputError& e) {
        branch.warnings.push_back(e.what());
        break;
      }
    }
  }
  std::sort(branch.points.begin(), branch.points.end(),
            [](const BranchPoint& l, const BranchPoint& r) { return l.s < r.s; });
  return branch;
}

double discrete_bifurcation_point(const ContinuationSettings& settings, int j, double eps,
                                  double tol) {
  require_mode(settings, j);
  const NeumannMode mode = neumann_spectrum(settings.section(), j).back();
  Eigen::VectorXd e = Eigen::VectorXd::Zero(j);
  e[j - 1] = 1.0;
  const auto f = [&](double t) {
    return frechet_fd(Profile(settings.section(), t, e), eps, settings.grid, settings.eigen)
        .coefficients[j - 1];
  };
  double t0 = bifurcation_point(mode.sigma);
  double t1 = t0 * (1.0 + 1e-3);
  double f0 = f(t0);
  double f1 = f(t1);
  for (int it = 0; it < 40; ++it) {
    if (f1 == f0) break;
    const double t2 = t1 - f1 * (t1 - t0) / (f1 - f0);
    t0 = t1;
    f0 = f1;
    t1 = t2;
    if (std::abs(t1 - t0) <= tol * std::abs(t1)) return t1;
    f1 = f(t1);
  }
  std::ostringstream os;
  os << "discrete_bifurcation_point: secant iteration did not settle for mode " << j;
  throw ConvergenceError(os.str(), 40, std::abs(t1 - t0));
}

BranchPointReport verify_branch_point(const ContinuationSettings& settings, int j,
                                      const BranchPoint& point,
                                      const BranchPointTolerances& tol) {
  const Grid& grid = settings.grid;
  const Profile& v = point.profile;
  BranchPointReport rep;

  rep.min_v = min_height(v, grid);
  if (!(rep.min_v > kDegenerateFraction * v.height())) return rep;

  const FEvaluation f = evaluate_F(v, grid, settings.eigen);
  rep.c = f.c;
  Eigen::VectorXd r(v.mode_count() + 1);
  r.head(v.mode_count()) = f.value.coefficients;
  r[v.mode_count()] = (j >= 1 && j <= v.mode_count() ? v.coefficient(j) : 0.0) - point.s;
  rep.residual_norm = r.norm();
  rep.constancy = f.normal_derivative.stddev() / std::abs(f.c);

  // d_eta v on the boundary of omega from one-sided differences of v.
  const int d = grid.section().dimension();
  for (int s = 0; s < grid.section_nodes(); ++s) {
    const auto coords = grid.section_coords(s);
    for (int axis = 0; axis < d; ++axis) {
      const int n = grid.axis_nodes(axis);
      const int stride = axis == 0 ? 1 : grid.n_section();
      const int inward = coords[axis] == 0 ? 1 : (coords[axis] == n - 1 ? -1 : 0);
      if (inward == 0) continue;
      const double h = grid.spacing(axis);
      const double deriv = one_sided(v.value(grid.section_point(s)),
                                     v.value(grid.section_point(s + inward * stride)),
                                     v.value(grid.section_point(s + 2 * inward * stride)), h);
      rep.orthogonality = std::max(rep.orthogonality, std::abs(deriv));
    }
  }

  // Positivity, eigen-equation residual and Neumann residuals of phi.
  const DiscreteField& phi = f.pair.phi;
  const int nz = grid.n_axial();
  rep.phi_positive = true;
  double phi_max = 0.0;
  for (int s = 0; s < grid.section_nodes(); ++s) {
    for (int iz = 0; iz < nz - 1; ++iz) {
      rep.phi_positive = rep.phi_positive && phi.at(s, iz) > 0.0;
      phi_max = std::max(phi_max, std::abs(phi.at(s, iz)));
    }
  }
  const PulledBackOperator op = assemble_operator(v, grid);
  const Eigen::VectorXd lphi = op.apply(phi.values);
  double num = 0.0;
  double den = 0.0;
  for (int p = 0; p < grid.node_count(); ++p) {
    if (p % nz == nz - 1) continue;
    const double e = lphi[p] + f.pair.lambda * phi.values[p];
    num += op.volume_weights()[p] * e * e;
    den += op.volume_weights()[p] * phi.values[p] * phi.values[p];
  }
  rep.eigen_residual = std::sqrt(num / den) / f.pair.lambda;

  double neumann = 0.0;
  const double hz = grid.axial_spacing();
  for (int s = 0; s < grid.section_nodes(); ++s) {
    neumann = std::max(neumann, std::abs(one_sided(phi.at(s, 0), phi.at(s, 1), phi.at(s, 2), hz)));
    const auto coords = grid.section_coords(s);
    for (int axis = 0; axis < d; ++axis) {
      const int n = grid.axis_nodes(axis);
      const int stride = axis == 0 ? 1 : grid.n_section();
      const int inward = coords[axis] == 0 ? 1 : (coords[axis] == n - 1 ? -1 : 0);
      if (inward == 0) continue;
      for (int iz = 0; iz < nz - 1; ++iz) {
        const double deriv = one_sided(phi.at(s, iz), phi.at(s + inward * stride, iz),
                                       phi.at(s + 2 * inward * stride, iz), grid.spacing(axis));
        neumann = std::max(neumann, std::abs(deriv));
      }
    }
  }
  rep.neumann_residual = neumann / phi_max;

  rep.nonconstancy = point.s == 0.0 ? 0.0 : v.deviation_norm() / std::abs(point.s);

  rep.residual_ok = rep.residual_norm <= tol.residual * std::abs(rep.c);
  rep.constancy_ok = rep.constancy <= tol.constancy;
  rep.orthogonality_ok = rep.orthogonality <= tol.orthogonality;
  rep.positivity_ok = rep.phi_positive && rep.min_v > 0.0;
  rep.nonconstancy_ok = point.s == 0.0 || rep.nonconstancy >= tol.nonconstancy;
  rep.eigen_ok = rep.eigen_residual <= tol.eigen_residual;
  rep.neumann_ok = rep.neumann_residual <= tol.neumann_residual;
  return rep;
}

}  // namespace cylbif
