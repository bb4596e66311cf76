#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cylbif/dispersion.hpp"
#include "cylbif/pulled_back_solver.hpp"

namespace cylbif {

/// Samples of a function on omega (identified with the free boundary through
/// the graph of v), with its quadrature mean and its projections on the modes.
struct BoundaryField {
  Grid grid;
  std::vector<double> values;  // one per section node
  double mean = 0.0;
  std::vector<NeumannMode> modes;
  Eigen::VectorXd coefficients;  // <f, xi_k> for each entry of `modes`

  double max_abs() const;
  double l2_norm() const;
  // Root-mean-square deviation from the mean.
  double stddev() const;
};

BoundaryField make_boundary_field(const Grid& grid, std::vector<double> values,
                                  std::vector<NeumannMode> modes);

/// Signed normal derivative of u_v on the free boundary,
///   d_nu u = -sqrt(g^{ab} phi_a phi_b) at y_N = 1,
/// with a third-order one-sided axial difference and centred tangential ones.
BoundaryField boundary_normal_derivative(const Profile& v, const EigenPair& pair);

struct FEvaluation {
  BoundaryField value;  // F(t, w): normal derivative minus its mean
  BoundaryField normal_derivative;
  double c = 0.0;  // mean normal derivative
  EigenPair pair;
  std::vector<std::string> warnings;
};

/// F(t, w) for v = t + w. Projections use the modes of `v`.
FEvaluation evaluate_F(const Profile& v, const Grid& grid, const EigenSolverOptions& options = {});

/// psi_hat = sum_k a_k g_k(x_N) xi_k(x'), the solution of the linearized
/// problem on Omega_t with top data (pi / 2t^2) w, orthogonal to u_t.
class LinearizedSolution {
 public:
  LinearizedSolution(const CrossSection& section, double t, Eigen::VectorXd coefficients);

  double t() const noexcept { return t_; }
  const Eigen::VectorXd& coefficients() const noexcept { return coefficients_; }
  const std::vector<NeumannMode>& modes() const noexcept { return modes_; }

  // Physical coordinates: x' in omega, x_N in [0, t].
  double operator()(SectionPoint x, double x_axial) const;
  double axial_derivative(SectionPoint x, double x_axial) const;

  // Coefficients of psi_hat_N(., t), i.e. a_k g_k'(t).
  Eigen::VectorXd top_flux_coefficients() const;
  // int_omega psi_hat_N(x', t) dx', evaluated mode by mode in closed form.
  double top_flux_integral() const;

 private:
  CrossSection section_;
  double t_;
  Eigen::VectorXd coefficients_;
  std::vector<NeumannMode> modes_;
  std::vector<ModalProfile> profiles_;
};

// `w` supplies the cross-section, the height t and the coefficients a_k.
LinearizedSolution hat_psi_solve(const Profile& w);

/// Finite-difference solution of the same linearized problem on the grid
/// (reference coordinates, x_N = t y_N); independent of the modal formulas.
DiscreteField hat_psi_fd(const Profile& w, const Grid& grid);

// int_omega d_{x_N} psi(x', t) for a field from hat_psi_fd.
double top_flux_integral_fd(const DiscreteField& psi, double t);

// mu_{t,k} a_k for each mode of w.
Eigen::VectorXd H_coefficients(const Profile& w);

/// H_t(w) = t sum a_k g_k'(t) xi_k sampled on the grid.
BoundaryField H_apply(const Profile& w, const Grid& grid);

/// (F(t, eps dir) - F(t, -eps dir)) / (2 eps).
BoundaryField frechet_fd(const Profile& direction, double eps, const Grid& grid,
                         const EigenSolverOptions& options = {});

/// Matrix of the finite-difference Frechet derivative in the xi basis:
/// column m holds the projections of frechet_fd(t, xi_m).
Eigen::MatrixXd frechet_matrix_fd(const CrossSection& section, double t, int mode_count,
                                  double eps, const Grid& grid,
                                  const EigenSolverOptions& options = {});

}  // namespace cylbif
