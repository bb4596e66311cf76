#include "cylbif/pulled_back_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/SparseLU>

#include "cylbif/dispersion.hpp"
#include "cylbif/errors.hpp"

namespace cylbif {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDegenerateFraction = 1e-6;

}  // namespace

MetricSample metric_at(const Profile& v, SectionPoint y_section, double y_axial) {
  const int d = v.section().dimension();
  const double value = v.value(y_section);
  if (!(value > 0.0)) {
    std::ostringstream os;
    os << "metric_at: nonpositive height v = " << value;
    throw InputError(os.str());
  }
  const auto grad = v.gradient(y_section);
  const auto hess = v.second_derivatives(y_section);
  const double y = y_axial;

  MetricSample m;
  m.g = Eigen::MatrixXd::Zero(d + 1, d + 1);
  m.g_inv = Eigen::MatrixXd::Zero(d + 1, d + 1);
  double grad_sq = 0.0;
  for (int i = 0; i < d; ++i) {
    grad_sq += grad[i] * grad[i];
    for (int j = 0; j < d; ++j) {
      m.g(i, j) = (i == j ? 1.0 : 0.0) + grad[i] * grad[j] * y * y;
      m.g_inv(i, j) = i == j ? 1.0 : 0.0;
    }
    m.g(i, d) = m.g(d, i) = value * grad[i] * y;
    m.g_inv(i, d) = m.g_inv(d, i) = -grad[i] * y / value;
  }
  m.g(d, d) = value * value;
  m.g_inv(d, d) = (1.0 + grad_sq * y * y) / (value * value);
  m.det = value * value;

  m.h = 1.0 / value;
  m.grad_h = Eigen::VectorXd(d);
  m.hess_h = Eigen::VectorXd(d);
  m.cross = Eigen::VectorXd(d);
  double lap_h = 0.0;
  double grad_h_sq = 0.0;
  for (int i = 0; i < d; ++i) {
    m.grad_h[i] = -grad[i] / (value * value);
    m.hess_h[i] = -hess[i] / (value * value) + 2.0 * grad[i] * grad[i] / (value * value * value);
    m.cross[i] = 2.0 * y * m.grad_h[i] / m.h;
    lap_h += m.hess_h[i];
    grad_h_sq += m.grad_h[i] * m.grad_h[i];
  }
  m.first = y * lap_h / m.h;
  m.second = m.h * m.h + y * y * grad_h_sq / (m.h * m.h);
  return m;
}

PulledBackOperator::PulledBackOperator(Grid grid, Eigen::SparseMatrix<double> full,
                                       Eigen::SparseMatrix<double> free,
                                       Eigen::VectorXd volume_weights)
    : grid_(std::move(grid)),
      full_(std::move(full)),
      free_(std::move(free)),
      weights_(std::move(volume_weights)) {}

int PulledBackOperator::free_index(int node) const noexcept {
  const int nz = grid_.n_axial();
  const int iz = node % nz;
  if (iz == nz - 1) return -1;
  return (node / nz) * (nz - 1) + iz;
}

Eigen::VectorXd PulledBackOperator::restrict_to_free(const Eigen::VectorXd& field) const {
  Eigen::VectorXd out(free_count());
  for (int p = 0; p < grid_.node_count(); ++p) {
    const int f = free_index(p);
    if (f >= 0) out[f] = field[p];
  }
  return out;
}

Eigen::VectorXd PulledBackOperator::extend_from_free(const Eigen::VectorXd& free_values) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(grid_.node_count());
  for (int p = 0; p < grid_.node_count(); ++p) {
    const int f = free_index(p);
    if (f >= 0) out[p] = free_values[f];
  }
  return out;
}

void require_positive_profile(const Profile& v, const Grid& grid) {
  double min_v = v.value(grid.section_point(0));
  for (int s = 0; s < grid.section_nodes(); ++s) {
    min_v = std::min(min_v, v.value(grid.section_point(s)));
  }
  if (!(min_v > kDegenerateFraction * v.height())) {
    std::ostringstream os;
    os << "profile degenerates: min v = " << min_v << " <= " << kDegenerateFraction
       << " * t on the grid";
    throw InputError(os.str());
  }
}

PulledBackOperator assemble_operator(const Profile& v, const Grid& grid) {
  if (v.section().kind() != grid.section().kind() ||
      v.section().length(0) != grid.section().length(0) ||
      v.section().length(1) != grid.section().length(1)) {
    throw InputError("assemble_operator: profile and grid live on different cross-sections");
  }
  require_positive_profile(v, grid);

  const int d = grid.section().dimension();
  const int nz = grid.n_axial();
  const int ns = grid.section_nodes();
  const double hz = grid.axial_spacing();

  // Section data at the nodes: v, grad v.
  std::vector<double> v_node(static_cast<std::size_t>(ns));
  std::vector<std::array<double, 2>> grad_node(static_cast<std::size_t>(ns));
  for (int s = 0; s < ns; ++s) {
    const auto p = grid.section_point(s);
    v_node[s] = v.value(p);
    grad_node[s] = v.gradient(p);
  }
  // v at the midpoint between s and its + neighbour along each axis.
  std::array<std::vector<double>, 2> v_mid;
  for (int axis = 0; axis < d; ++axis) {
    v_mid[axis].assign(static_cast<std::size_t>(ns), 0.0);
    const double h = grid.spacing(axis);
    for (int s = 0; s < ns; ++s) {
      const auto c = grid.section_coords(s);
      if (c[axis] == grid.axis_nodes(axis) - 1) continue;
      auto p = grid.section_point(s);
      (axis == 0 ? p.x : p.y) += 0.5 * h;
      v_mid[axis][s] = v.value(p);
    }
  }

  const int free_n = ns * (nz - 1);
  std::vector<Eigen::Triplet<double>> full_t;
  std::vector<Eigen::Triplet<double>> free_t;
  full_t.reserve(static_cast<std::size_t>(ns * nz * (5 + 8 * d)));
  free_t.reserve(full_t.capacity());

  const auto free_of = [nz](int s, int iz) { return iz == nz - 1 ? -1 : s * (nz - 1) + iz; };

  for (int s = 0; s < ns; ++s) {
    const auto coords = grid.section_coords(s);
    const double inv_v = 1.0 / v_node[s];
    double grad_sq = 0.0;
    for (int i = 0; i < d; ++i) grad_sq += grad_node[s][i] * grad_node[s][i];

    for (int iz = 0; iz < nz - 1; ++iz) {
      const int row = grid.index(s, iz);
      const int frow = free_of(s, iz);
      const double z = grid.axial_coordinate(iz);
      const auto add = [&](int s_col, int iz_col, double value) {
        const double scaled = value * inv_v;
        full_t.emplace_back(row, grid.index(s_col, iz_col), scaled);
        const int fcol = free_of(s_col, iz_col);
        if (fcol >= 0) free_t.emplace_back(frow, fcol, scaled);
      };

      // Section directions: d_i (v d_i phi), mirrored at the ends.
      for (int axis = 0; axis < d; ++axis) {
        const int n = grid.axis_nodes(axis);
        const int stride = axis == 0 ? 1 : grid.n_section();
        const double h2 = grid.spacing(axis) * grid.spacing(axis);
        const int c = coords[axis];
        if (c == 0) {
          const double ap = v_mid[axis][s];
          add(s + stride, iz, 2.0 * ap / h2);
          add(s, iz, -2.0 * ap / h2);
        } else if (c == n - 1) {
          const double am = v_mid[axis][s - stride];
          add(s - stride, iz, 2.0 * am / h2);
          add(s, iz, -2.0 * am / h2);
        } else {
          const double ap = v_mid[axis][s];
          const double am = v_mid[axis][s - stride];
          add(s + stride, iz, ap / h2);
          add(s - stride, iz, am / h2);
          add(s, iz, -(ap + am) / h2);
        }
      }

      // Axial direction: d_N (b d_N phi) with b = (1 + |Dv|^2 y_N^2) / v.
      {
        const auto b_at = [&](double y) { return (1.0 + grad_sq * y * y) / v_node[s]; };
        const double h2 = hz * hz;
        const double bp = b_at(z + 0.5 * hz);
        if (iz == 0) {
          add(s, iz + 1, 2.0 * bp / h2);
          add(s, iz, -2.0 * bp / h2);
        } else {
          const double bm = b_at(z - 0.5 * hz);
          add(s, iz + 1, bp / h2);
          add(s, iz - 1, bm / h2);
          add(s, iz, -(bp + bm) / h2);
        }
      }

      // Mixed terms d_i (c d_N phi) + d_N (c d_i phi) with c = -v_i y_N, centred.
      // Under the mirror about a Neumann face c is odd and phi even.
      for (int axis = 0; axis < d; ++axis) {
        const int n = grid.axis_nodes(axis);
        const int stride = axis == 0 ? 1 : grid.n_section();
        const double hi = grid.spacing(axis);
        const int ci = coords[axis];
        const auto coef = [&](int s2, int iz2) {
          return -grad_node[s2][axis] * grid.axial_coordinate(iz2);
        };

        // d_i (c d_N phi); d_N phi vanishes on the bottom row.
        if (iz > 0) {
          const auto add_dz = [&](int s2, double weight) {
            const double f = weight * coef(s2, iz) / (2.0 * hi * 2.0 * hz);
            add(s2, iz + 1, f);
            add(s2, iz - 1, -f);
          };
          if (ci == 0) {
            add_dz(s + stride, 2.0);
          } else if (ci == n - 1) {
            add_dz(s - stride, -2.0);
          } else {
            add_dz(s + stride, 1.0);
            add_dz(s - stride, -1.0);
          }
        }

        // d_N (c d_i phi); d_i phi vanishes on the section boundary.
        if (ci > 0 && ci < n - 1) {
          const auto add_di = [&](int iz2, double weight) {
            const double f = weight * coef(s, iz2) / (2.0 * hz * 2.0 * hi);
            add(s + stride, iz2, f);
            add(s - stride, iz2, -f);
          };
          if (iz == 0) {
            add_di(iz + 1, 2.0);
          } else {
            add_di(iz + 1, 1.0);
            add_di(iz - 1, -1.0);
          }
        }
      }
    }
    // Dirichlet row on the top.
    full_t.emplace_back(grid.index(s, nz - 1), grid.index(s, nz - 1), 1.0);
  }

  Eigen::SparseMatrix<double> full(grid.node_count(), grid.node_count());
  full.setFromTriplets(full_t.begin(), full_t.end());
  Eigen::SparseMatrix<double> free(free_n, free_n);
  free.setFromTriplets(free_t.begin(), free_t.end());

  Eigen::VectorXd weights(grid.node_count());
  for (int p = 0; p < grid.node_count(); ++p) {
    weights[p] = grid.weight(p) * v_node[p / nz];
  }
  return PulledBackOperator(grid, std::move(full), std::move(free), std::move(weights));
}

void normalize_eigenfunction(DiscreteField& phi) {
  const double target = std::sqrt(phi.grid.section().measure() / 2.0);
  const double norm = phi.l2_norm();
  if (!(norm > 0.0)) throw NumericalError("cannot normalize a zero eigenfunction");
  const double sign = phi.at(phi.grid.center_section_node(), 0) < 0.0 ? -1.0 : 1.0;
  phi.values *= sign * target / norm;
}

EigenPair first_eigenpair(const Profile& v, const Grid& grid, const EigenSolverOptions& options) {
  return first_eigenpair(assemble_operator(v, grid), options);
}

EigenPair first_eigenpair(const PulledBackOperator& op, const EigenSolverOptions& options) {
  const Grid& grid = op.grid();
  const int nz = grid.n_axial();
  const int n = op.free_count();

  // W-weighted inner product on free nodes; -L is self-adjoint in it.
  Eigen::VectorXd w(n);
  for (int p = 0; p < grid.node_count(); ++p) {
    const int f = op.free_index(p);
    if (f >= 0) w[f] = op.volume_weights()[p];
  }
  const auto dot = [&w](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return (a.array() * w.array() * b.array()).sum();
  };

  Eigen::SparseMatrix<double> stiff = -op.free_block();
  stiff.makeCompressed();

  // Start from the straight-cylinder eigenfunction.
  Eigen::VectorXd x(n);
  for (int s = 0; s < grid.section_nodes(); ++s) {
    for (int iz = 0; iz < nz - 1; ++iz) {
      x[s * (nz - 1) + iz] = std::cos(0.5 * kPi * grid.axial_coordinate(iz));
    }
  }
  x /= std::sqrt(dot(x, x));

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  const auto factor = [&](double shift) {
    Eigen::SparseMatrix<double> a = stiff;
    if (shift != 0.0) {
      Eigen::SparseMatrix<double> id(n, n);
      id.setIdentity();
      a -= shift * id;
    }
    lu.compute(a);
    if (lu.info() != Eigen::Success) {
      throw NumericalError("first_eigenpair: sparse LU factorization failed: " +
                           lu.lastErrorMessage());
    }
  };

  // Plain inverse iteration (shift 0) until the Rayleigh quotient settles, then a
  // fixed shift just below it to finish the eigenvector to working precision.
  constexpr double kSwitchTol = 1e-8;
  constexpr double kShiftOffset = 1e-5;
  double shift = 0.0;
  factor(shift);
  double lambda = dot(x, stiff * x);
  double dlambda = 0.0;
  double dx = 0.0;
  bool shifted = false;
  for (int it = 1; it <= options.max_iterations; ++it) {
    Eigen::VectorXd y = lu.solve(x);
    if (lu.info() != Eigen::Success) throw NumericalError("first_eigenpair: LU solve failed");
    y /= std::sqrt(dot(y, y));
    if (dot(y, x) < 0.0) y = -y;
    const double next = dot(y, stiff * y);
    dlambda = std::abs(next - lambda);
    dx = std::sqrt(dot(y - x, y - x));
    lambda = next;
    x = std::move(y);

    if (!shifted && dlambda <= kSwitchTol * std::abs(lambda)) {
      shift = lambda * (1.0 - kShiftOffset);
      factor(shift);
      shifted = true;
      continue;
    }
    if (shifted && dlambda <= options.tolerance * std::abs(lambda) && dx <= options.tolerance) {
      const Eigen::VectorXd r = stiff * x - lambda * x;
      EigenPair pair{lambda, DiscreteField{grid, op.extend_from_free(x)}, it,
                     std::sqrt(dot(r, r)) / std::abs(lambda)};
      normalize_eigenfunction(pair.phi);
      return pair;
    }
  }
  std::ostringstream os;
  os << "first_eigenpair: no convergence after " << options.max_iterations
     << " iterations (last eigenvalue increment " << dlambda << ", vector increment " << dx
     << ", lambda " << lambda << ")";
  throw ConvergenceError(os.str(), options.max_iterations, dlambda);
}

EigenPair trivial_eigenpair(double t, const Grid& grid) {
  Eigen::VectorXd values(grid.node_count());
  for (int p = 0; p < grid.node_count(); ++p) {
    values[p] = std::cos(0.5 * kPi * grid.axial_coordinate(p % grid.n_axial()));
  }
  return EigenPair{lambda_trivial(t), DiscreteField{grid, std::move(values)}, 0, 0.0};
}

}  // namespace cylbif
