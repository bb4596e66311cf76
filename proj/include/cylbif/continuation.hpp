#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cylbif/overdetermined.hpp"

namespace cylbif {

struct BifurcationCandidate {
  int k = 0;
  double sigma = 0.0;
  double t = 0.0;
  bool simple = false;
  double slope = 0.0;  // d mu_{t,k} / dt at t_k
  // Simple kernel and nonzero crossing slope: a branch can be traced.
  bool eligible = false;
};

std::vector<BifurcationCandidate> detect_bifurcations(const CrossSection& section, int count,
                                                      double t_min, double t_max,
                                                      double gap_tol = 1e-8);

/// Discretization and solver settings shared by every solve along a branch.
struct ContinuationSettings {
  Grid grid;
  int mode_count = 16;
  double newton_tol = 1e-9;  // on ||residual|| / |c|
  int max_newton_iterations = 15;
  int max_step_halvings = 10;
  double jacobian_step = 1e-6;
  EigenSolverOptions eigen;

  const CrossSection& section() const noexcept { return grid.section(); }
};

/// One solution (t, w) of F = 0 on the branch of mode j with <w, xi_j> = s.
struct BranchPoint {
  double s = 0.0;
  Profile profile;  // v = t + w
  double lambda = 0.0;
  double c = 0.0;  // the overdetermined constant d_nu u on the free boundary
  double residual_norm = 0.0;
  int newton_iterations = 0;

  double t() const noexcept { return profile.height(); }
};

/// Solves, in the unknowns (t, a_1..a_K),
///   <F(t, sum a_k xi_k), xi_k> = 0 for k = 1..K   and   a_j = s,
/// by Newton's method with a forward-difference Jacobian. Steps that leave the
/// admissible domain or do not reduce the residual are halved.
BranchPoint newton_solve(const ContinuationSettings& settings, int j, double s,
                         const Profile& initial);

struct Branch {
  int j = 0;
  double t_star = 0.0;
  std::vector<BranchPoint> points;  // ordered by s
  std::vector<std::string> warnings;

  const BranchPoint* find(double s, double tol = 1e-12) const;
};

/// Marches s = 0, +-ds, ..., +-s_max from the trivial point (t_j, 0). The first
/// step in each direction is predicted by s xi_j, later ones by the previous
/// point. A Newton failure ends the march in that direction with a warning.
Branch trace_branch(const ContinuationSettings& settings, int j, double s_max, double ds);

/// Zero of the finite-difference Frechet eigenvalue of mode j near t_j, i.e.
/// where the discrete branch actually leaves the trivial line.
double discrete_bifurcation_point(const ContinuationSettings& settings, int j,
                                  double eps = 1e-4, double tol = 1e-10);

struct BranchPointTolerances {
  double residual = 1e-9;   // relative to |c|
  double constancy = 1e-5;  // stddev / |mean| of d_nu u
  double orthogonality = 1e-4;
  double nonconstancy = 0.5;       // ||w|| / |s|
  double eigen_residual = 1e-9;
  double neumann_residual = 1e-2;  // relative to max |phi|
};

struct BranchPointReport {
  double residual_norm = 0.0;
  double c = 0.0;
  double constancy = 0.0;
  double orthogonality = 0.0;  // max |d_eta v| on the boundary of omega
  double min_v = 0.0;
  bool phi_positive = false;
  double nonconstancy = 0.0;  // ||w|| / |s|; 0 at s = 0
  double eigen_residual = 0.0;
  double neumann_residual = 0.0;

  bool residual_ok = false;
  bool constancy_ok = false;
  bool orthogonality_ok = false;
  bool positivity_ok = false;
  bool nonconstancy_ok = false;
  bool eigen_ok = false;
  bool neumann_ok = false;

  bool passed() const noexcept {
    return residual_ok && constancy_ok && orthogonality_ok && positivity_ok && nonconstancy_ok &&
           eigen_ok && neumann_ok;
  }
};

/// Re-solves the eigenproblem for the point's domain and checks every defining
/// condition of the overdetermined problem independently of how the point
/// was obtained.
BranchPointReport verify_branch_point(const ContinuationSettings& settings, int j,
                                      const BranchPoint& point,
                                      const BranchPointTolerances& tolerances = {});

}  // namespace cylbif
