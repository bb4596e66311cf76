#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cylbif/cross_section.hpp"

namespace cylbif {

/// Uniform tensor grid on the reference cylinder omega x [0, 1].
///
/// Section nodes include the boundary of omega (ghost-point Neumann rows);
/// axial nodes run from the Neumann bottom y_N = 0 to the Dirichlet top y_N = 1.
/// A node is addressed by (section index s, axial index iz) and stored at
/// s * n_axial + iz, so axial columns are contiguous.
class Grid {
 public:
  Grid(const CrossSection& section, int n_section, int n_axial);

  const CrossSection& section() const noexcept { return section_; }
  int n_section() const noexcept { return n_section_; }
  int n_axial() const noexcept { return n_axial_; }

  // Nodes along section axis 0 or 1 (1 along axis 1 for an interval).
  int axis_nodes(int axis) const noexcept { return axis == 0 || section_.dimension() == 2 ? n_section_ : 1; }
  int section_nodes() const noexcept { return axis_nodes(0) * axis_nodes(1); }
  int node_count() const noexcept { return section_nodes() * n_axial_; }

  double spacing(int axis) const;
  double axial_spacing() const noexcept { return 1.0 / (n_axial_ - 1); }

  int index(int s, int iz) const noexcept { return s * n_axial_ + iz; }
  int section_index(int ix, int iy) const noexcept { return iy * n_section_ + ix; }
  // (ix, iy) of a section node.
  std::array<int, 2> section_coords(int s) const noexcept { return {s % n_section_, s / n_section_}; }

  SectionPoint section_point(int s) const;
  std::vector<SectionPoint> section_points() const;
  double axial_coordinate(int iz) const noexcept { return iz * axial_spacing(); }

  // Trapezoid weights; they sum to |omega| and 1 respectively.
  double section_weight(int s) const;
  double axial_weight(int iz) const noexcept;
  double weight(int node) const { return section_weight(node / n_axial_) * axial_weight(node % n_axial_); }

  // Section node closest to the centre of omega.
  int center_section_node() const noexcept;

 private:
  CrossSection section_;
  int n_section_;
  int n_axial_;
};

/// Samples of a function on the reference cylinder, in Grid node order.
struct DiscreteField {
  Grid grid;
  Eigen::VectorXd values;

  double at(int s, int iz) const { return values[grid.index(s, iz)]; }
  // Trapezoid L2 norm with the flat measure dy.
  double l2_norm() const;
};

// Quadrature over omega of samples given at the section nodes.
double integrate_section(const Grid& grid, std::span<const double> values);
double section_mean(const Grid& grid, std::span<const double> values);
double section_l2_norm(const Grid& grid, std::span<const double> values);

/// Trapezoid projections <f, xi_k> for each mode. On the node grid this is the
/// discrete cosine transform, exact for modes resolved by the grid.
Eigen::VectorXd project_onto_modes(const Grid& grid, std::span<const double> values,
                                   std::span<const NeumannMode> modes);

// Samples of sum_k coefficients[k] xi_k at the section nodes.
std::vector<double> synthesize_modes(const Grid& grid, const Eigen::VectorXd& coefficients,
                                     std::span<const NeumannMode> modes);

}  // namespace cylbif
