#include "cylbif/overdetermined.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/SparseLU>

#include "cylbif/errors.hpp"

namespace cylbif {

namespace {

constexpr double kPi = std::numbers::pi;

// Third-order backward difference of d/dy_N at the top node of column s.
double top_axial_derivative(const DiscreteField& f, int s) {
  const Grid& g = f.grid;
  const int top = g.n_axial() - 1;
  return (11.0 * f.at(s, top) - 18.0 * f.at(s, top - 1) + 9.0 * f.at(s, top - 2) -
          2.0 * f.at(s, top - 3)) /
         (6.0 * g.axial_spacing());
}

// Centred difference along a section axis on the top row; zero on Neumann faces.
double top_tangential_derivative(const DiscreteField& f, int s, int axis) {
  const Grid& g = f.grid;
  const auto c = g.section_coords(s);
  const int n = g.axis_nodes(axis);
  if (c[axis] == 0 || c[axis] == n - 1) return 0.0;
  const int stride = axis == 0 ? 1 : g.n_section();
  const int top = g.n_axial() - 1;
  return (f.at(s + stride, top) - f.at(s - stride, top)) / (2.0 * g.spacing(axis));
}

}  // namespace

double BoundaryField::max_abs() const {
  double m = 0.0;
  for (double x : values) m = std::max(m, std::abs(x));
  return m;
}

double BoundaryField::l2_norm() const { return section_l2_norm(grid, values); }

double BoundaryField::stddev() const {
  std::vector<double> dev(values);
  for (auto& x : dev) x = (x - mean) * (x - mean);
  return std::sqrt(section_mean(grid, dev));
}

BoundaryField make_boundary_field(const Grid& grid, std::vector<double> values,
                                  std::vector<NeumannMode> modes) {
  if (static_cast<int>(values.size()) != grid.section_nodes()) {
    throw InputError("boundary field: sample count does not match the grid");
  }
  const double mean = section_mean(grid, values);
  Eigen::VectorXd coeffs = project_onto_modes(grid, values, modes);
  return BoundaryField{grid, std::move(values), mean, std::move(modes), std::move(coeffs)};
}

BoundaryField boundary_normal_derivative(const Profile& v, const EigenPair& pair) {
  const DiscreteField& phi = pair.phi;
  const Grid& grid = phi.grid;
  const int d = grid.section().dimension();
  std::vector<double> values(static_cast<std::size_t>(grid.section_nodes()));
  Eigen::VectorXd grad(d + 1);
  for (int s = 0; s < grid.section_nodes(); ++s) {
    const MetricSample m = metric_at(v, grid.section_point(s), 1.0);
    for (int i = 0; i < d; ++i) grad[i] = top_tangential_derivative(phi, s, i);
    grad[d] = top_axial_derivative(phi, s);
    values[s] = -std::sqrt(grad.dot(m.g_inv * grad));
  }
  return make_boundary_field(grid, std::move(values), v.modes());
}

FEvaluation evaluate_F(const Profile& v, const Grid& grid, const EigenSolverOptions& options) {
  EigenPair pair = first_eigenpair(v, grid, options);
  BoundaryField normal = boundary_normal_derivative(v, pair);
  const double c = normal.mean;
  std::vector<double> f(normal.values);
  for (auto& x : f) x -= c;
  BoundaryField value = make_boundary_field(grid, std::move(f), v.modes());

  std::vector<std::string> warnings;
  const double scale = std::max(normal.max_abs(), 1.0);
  if (std::abs(value.mean) > 1e-12 * scale) {
    std::ostringstream os;
    os << "F retains a constant component " << value.mean << " after mean removal";
    warnings.push_back(os.str());
  }
  return FEvaluation{std::move(value), std::move(normal), c, std::move(pair), std::move(warnings)};
}

LinearizedSolution::LinearizedSolution(const CrossSection& section, double t,
                                       Eigen::VectorXd coefficients)
    : section_(section), t_(t), coefficients_(std::move(coefficients)) {
  if (coefficients_.size() > 0) {
    modes_ = neumann_spectrum(section_, static_cast<int>(coefficients_.size()));
  }
  profiles_.reserve(modes_.size());
  for (const auto& mode : modes_) profiles_.emplace_back(t_, mode.sigma, mode.index);
}

double LinearizedSolution::operator()(SectionPoint x, double x_axial) const {
  double sum = 0.0;
  for (std::size_t k = 0; k < modes_.size(); ++k) {
    sum += coefficients_[static_cast<Eigen::Index>(k)] * profiles_[k](x_axial) *
           evaluate_mode(section_, modes_[k], x);
  }
  return sum;
}

double LinearizedSolution::axial_derivative(SectionPoint x, double x_axial) const {
  double sum = 0.0;
  for (std::size_t k = 0; k < modes_.size(); ++k) {
    sum += coefficients_[static_cast<Eigen::Index>(k)] * profiles_[k].derivative(x_axial) *
           evaluate_mode(section_, modes_[k], x);
  }
  return sum;
}

Eigen::VectorXd LinearizedSolution::top_flux_coefficients() const {
  Eigen::VectorXd out(coefficients_.size());
  for (std::size_t k = 0; k < modes_.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    out[i] = coefficients_[i] * profiles_[k].derivative(t_);
  }
  return out;
}

double LinearizedSolution::top_flux_integral() const {
  const Eigen::VectorXd flux = top_flux_coefficients();
  double sum = 0.0;
  for (std::size_t k = 0; k < modes_.size(); ++k) {
    sum += flux[static_cast<Eigen::Index>(k)] * mode_integral(section_, modes_[k]);
  }
  return sum;
}

LinearizedSolution hat_psi_solve(const Profile& w) {
  return LinearizedSolution(w.section(), w.height(), w.coefficients());
}

DiscreteField hat_psi_fd(const Profile& w, const Grid& grid) {
  const double t = w.height();
  const PulledBackOperator op = assemble_operator(Profile::constant(w.section(), t, 0), grid);
  const int nz = grid.n_axial();
  const double lambda = lambda_trivial(t);

  Eigen::SparseMatrix<double> shift(grid.node_count(), grid.node_count());
  std::vector<Eigen::Triplet<double>> diag;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(grid.node_count());
  const double top_scale = kPi / (2.0 * t * t);
  for (int s = 0; s < grid.section_nodes(); ++s) {
    for (int iz = 0; iz < nz - 1; ++iz) diag.emplace_back(grid.index(s, iz), grid.index(s, iz), lambda);
    rhs[grid.index(s, nz - 1)] = top_scale * w.deviation(grid.section_point(s));
  }
  shift.setFromTriplets(diag.begin(), diag.end());
  Eigen::SparseMatrix<double> a = op.matrix() + shift;
  a.makeCompressed();

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(a);
  if (lu.info() != Eigen::Success) throw NumericalError("hat_psi_fd: factorization failed");
  Eigen::VectorXd psi = lu.solve(rhs);
  if (lu.info() != Eigen::Success) throw NumericalError("hat_psi_fd: solve failed");

  // lambda_t sits next to the first discrete eigenvalue, so roundoff in the
  // solve is amplified along u_t. The discrete solution is orthogonal to it.
  const Eigen::VectorXd u = trivial_eigenpair(t, grid).phi.values;
  const Eigen::VectorXd& weights = op.volume_weights();
  psi -= (weights.cwiseProduct(u).dot(psi) / weights.cwiseProduct(u).dot(u)) * u;
  return DiscreteField{grid, std::move(psi)};
}

double top_flux_integral_fd(const DiscreteField& psi, double t) {
  std::vector<double> flux(static_cast<std::size_t>(psi.grid.section_nodes()));
  for (int s = 0; s < psi.grid.section_nodes(); ++s) flux[s] = top_axial_derivative(psi, s) / t;
  return integrate_section(psi.grid, flux);
}

Eigen::VectorXd H_coefficients(const Profile& w) {
  Eigen::VectorXd out(w.mode_count());
  for (int k = 0; k < w.mode_count(); ++k) {
    out[k] = mu(w.height(), w.modes()[static_cast<std::size_t>(k)].sigma) * w.coefficients()[k];
  }
  return out;
}

BoundaryField H_apply(const Profile& w, const Grid& grid) {
  return make_boundary_field(grid, synthesize_modes(grid, H_coefficients(w), w.modes()),
                             w.modes());
}

BoundaryField frechet_fd(const Profile& direction, double eps, const Grid& grid,
                         const EigenSolverOptions& options) {
  if (!(eps > 0.0)) throw InputError("frechet_fd: step must be positive");
  const Eigen::VectorXd a = direction.coefficients();
  const FEvaluation plus = evaluate_F(direction.with_coefficients(eps * a), grid, options);
  const FEvaluation minus = evaluate_F(direction.with_coefficients(-eps * a), grid, options);
  std::vector<double> values(plus.value.values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = (plus.value.values[i] - minus.value.values[i]) / (2.0 * eps);
  }
  return make_boundary_field(grid, std::move(values), direction.modes());
}

Eigen::MatrixXd frechet_matrix_fd(const CrossSection& section, double t, int mode_count,
                                  double eps, const Grid& grid,
                                  const EigenSolverOptions& options) {
  Eigen::MatrixXd h(mode_count, mode_count);
  for (int m = 0; m < mode_count; ++m) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(mode_count);
    e[m] = 1.0;
    h.col(m) = frechet_fd(Profile(section, t, e), eps, grid, options).coefficients;
  }
  return h;
}

}  // namespace cylbif
