#include "cylbif/grid.hpp"

#include <cmath>
#include <sstream>

#include "cylbif/errors.hpp"

namespace cylbif {

namespace {

constexpr int kMinNodes = 8;

double trapezoid_weight(int i, int n, double h) { return (i == 0 || i == n - 1) ? 0.5 * h : h; }

}  // namespace

Grid::Grid(const CrossSection& section, int n_section, int n_axial)
    : section_(section), n_section_(n_section), n_axial_(n_axial) {
  if (n_section < kMinNodes || n_axial < kMinNodes) {
    std::ostringstream os;
    os << "grid too coarse: need at least " << kMinNodes << " points per direction, got "
       << n_section << " x " << n_axial;
    throw InputError(os.str());
  }
}

double Grid::spacing(int axis) const {
  if (axis >= section_.dimension()) throw InputError("grid spacing: axis out of range");
  return section_.length(axis) / (n_section_ - 1);
}

SectionPoint Grid::section_point(int s) const {
  const auto [ix, iy] = section_coords(s);
  SectionPoint p{ix * spacing(0), 0.0};
  if (section_.dimension() == 2) p.y = iy * spacing(1);
  return p;
}

std::vector<SectionPoint> Grid::section_points() const {
  std::vector<SectionPoint> pts;
  pts.reserve(static_cast<std::size_t>(section_nodes()));
  for (int s = 0; s < section_nodes(); ++s) pts.push_back(section_point(s));
  return pts;
}

double Grid::section_weight(int s) const {
  const auto [ix, iy] = section_coords(s);
  double w = trapezoid_weight(ix, n_section_, spacing(0));
  if (section_.dimension() == 2) w *= trapezoid_weight(iy, n_section_, spacing(1));
  return w;
}

double Grid::axial_weight(int iz) const noexcept {
  return trapezoid_weight(iz, n_axial_, axial_spacing());
}

int Grid::center_section_node() const noexcept {
  const int mid = n_section_ / 2;
  return section_.dimension() == 2 ? section_index(mid, mid) : mid;
}

double DiscreteField::l2_norm() const {
  double sum = 0.0;
  for (int p = 0; p < grid.node_count(); ++p) sum += grid.weight(p) * values[p] * values[p];
  return std::sqrt(sum);
}

double integrate_section(const Grid& grid, std::span<const double> values) {
  if (static_cast<int>(values.size()) != grid.section_nodes()) {
    throw InputError("integrate_section: sample count does not match the grid");
  }
  double sum = 0.0;
  for (int s = 0; s < grid.section_nodes(); ++s) sum += grid.section_weight(s) * values[s];
  return sum;
}

double section_mean(const Grid& grid, std::span<const double> values) {
  return integrate_section(grid, values) / grid.section().measure();
}

double section_l2_norm(const Grid& grid, std::span<const double> values) {
  std::vector<double> sq(values.begin(), values.end());
  for (auto& x : sq) x *= x;
  return std::sqrt(integrate_section(grid, sq));
}

Eigen::VectorXd project_onto_modes(const Grid& grid, std::span<const double> values,
                                   std::span<const NeumannMode> modes) {
  Eigen::VectorXd coeffs(static_cast<Eigen::Index>(modes.size()));
  std::vector<double> prod(values.size());
  for (std::size_t k = 0; k < modes.size(); ++k) {
    for (int s = 0; s < grid.section_nodes(); ++s) {
      prod[s] = values[s] * evaluate_mode(grid.section(), modes[k], grid.section_point(s));
    }
    coeffs[static_cast<Eigen::Index>(k)] = integrate_section(grid, prod);
  }
  return coeffs;
}

std::vector<double> synthesize_modes(const Grid& grid, const Eigen::VectorXd& coefficients,
                                     std::span<const NeumannMode> modes) {
  if (coefficients.size() != static_cast<Eigen::Index>(modes.size())) {
    throw InputError("synthesize_modes: coefficient count does not match the mode count");
  }
  std::vector<double> out(static_cast<std::size_t>(grid.section_nodes()), 0.0);
  for (std::size_t k = 0; k < modes.size(); ++k) {
    const double a = coefficients[static_cast<Eigen::Index>(k)];
    if (a == 0.0) continue;
    for (int s = 0; s < grid.section_nodes(); ++s) {
      out[s] += a * evaluate_mode(grid.section(), modes[k], grid.section_point(s));
    }
  }
  return out;
}

}  // namespace cylbif
