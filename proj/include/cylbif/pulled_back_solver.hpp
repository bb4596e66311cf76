#pragma once

#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "cylbif/grid.hpp"
#include "cylbif/profile.hpp"

namespace cylbif {

/// Pullback of the Euclidean metric by Y_v(y', y_N) = (y', v(y') y_N) at one
/// point of the reference cylinder. Indices 0..d-1 are section directions,
/// index d is axial.
struct MetricSample {
  Eigen::MatrixXd g;
  Eigen::MatrixXd g_inv;
  double det = 0.0;

  // h = 1/v and its section derivatives.
  double h = 0.0;
  Eigen::VectorXd grad_h;
  Eigen::VectorXd hess_h;  // pure second derivatives d2h/dy_i^2

  // Laplace-Beltrami operator written as
  //   sum_i phi_ii + sum_i cross[i] phi_iN + first * phi_N + second * phi_NN.
  Eigen::VectorXd cross;
  double first = 0.0;
  double second = 0.0;
};

MetricSample metric_at(const Profile& v, SectionPoint y_section, double y_axial);

/// Second-order finite-difference discretization of the Laplace-Beltrami
/// operator on the reference cylinder, written in conservative form
///   (1/v) d_a (v g^{ab} d_b phi)
/// so that it is symmetric with respect to sqrt(det g) dy. Neumann rows on
/// the sides and the bottom use mirrored ghost points; rows of the top nodes
/// are identity rows carrying Dirichlet data.
class PulledBackOperator {
 public:
  PulledBackOperator(Grid grid, Eigen::SparseMatrix<double> full, Eigen::SparseMatrix<double> free,
                     Eigen::VectorXd volume_weights);

  const Grid& grid() const noexcept { return grid_; }

  // Acts on a full nodal field (top nodes included).
  const Eigen::SparseMatrix<double>& matrix() const noexcept { return full_; }
  Eigen::VectorXd apply(const Eigen::VectorXd& field) const { return full_ * field; }

  // Block on the free (non-top) nodes with phi = 0 on the top.
  const Eigen::SparseMatrix<double>& free_block() const noexcept { return free_; }
  int free_count() const noexcept { return static_cast<int>(free_.rows()); }
  int free_index(int node) const noexcept;
  Eigen::VectorXd restrict_to_free(const Eigen::VectorXd& field) const;
  Eigen::VectorXd extend_from_free(const Eigen::VectorXd& free_values) const;

  // Quadrature weight times sqrt(det g) = v at every node.
  const Eigen::VectorXd& volume_weights() const noexcept { return weights_; }

 private:
  Grid grid_;
  Eigen::SparseMatrix<double> full_;
  Eigen::SparseMatrix<double> free_;
  Eigen::VectorXd weights_;
};

// Rejects v with min v <= 1e-6 t on the grid (the metric inverse degenerates).
void require_positive_profile(const Profile& v, const Grid& grid);

PulledBackOperator assemble_operator(const Profile& v, const Grid& grid);

struct EigenPair {
  double lambda = 0.0;
  DiscreteField phi;
  int iterations = 0;
  double residual = 0.0;  // ||(-L - lambda) phi|| / (lambda ||phi||), weighted
};

struct EigenSolverOptions {
  int max_iterations = 200;
  double tolerance = 1e-12;
};

/// First eigenpair of -Delta_g with phi = 0 on the top and Neumann data on the
/// sides and bottom. phi is made positive at the centre of the bottom face and
/// scaled to ||phi||_{L2(Omega_1)} = sqrt(|omega| / 2) (flat measure).
EigenPair first_eigenpair(const Profile& v, const Grid& grid,
                          const EigenSolverOptions& options = {});

/// Same, reusing an assembled operator.
EigenPair first_eigenpair(const PulledBackOperator& op, const EigenSolverOptions& options = {});

/// Closed-form pair of the straight cylinder: lambda_t and cos(pi y_N / 2).
EigenPair trivial_eigenpair(double t, const Grid& grid);

// Scales to the reference norm and fixes the sign at the bottom centre.
void normalize_eigenfunction(DiscreteField& phi);

}  // namespace cylbif
