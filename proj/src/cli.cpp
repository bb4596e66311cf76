#include "cylbif/cli.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include <json.hpp>

#include "cylbif/errors.hpp"

namespace cylbif {

namespace {

using nlohmann::json;

constexpr double kPi = 3.141592653589793;

class CsvFile {
 public:
  CsvFile(const std::filesystem::path& path, const std::string& command, const RunConfig& config,
          const std::vector<std::string>& columns)
      : out_(path) {
    if (!out_) throw InputError("cannot write " + path.string());
    out_ << std::setprecision(17);
    out_ << "# cylbif " << version() << "\n# command: " << command << "\n";
    std::istringstream yaml(to_yaml(config));
    for (std::string line; std::getline(yaml, line);) out_ << "# " << line << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
    out_ << "\n";
  }

  template <class... Ts>
  void row(const Ts&... fields) {
    std::size_t i = 0;
    ((out_ << (i++ ? "," : "") << fields), ...);
    out_ << "\n";
  }

  std::ostream& stream() { return out_; }

 private:
  std::ofstream out_;
};

json header(const std::string& command, const RunConfig& config) {
  return json{{"version", version()}, {"command", command}, {"config", to_yaml(config)}};
}

void write_json(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << std::setw(2) << doc << "\n";
}

std::vector<std::string> point_columns(const CrossSection& section) {
  return section.dimension() == 1 ? std::vector<std::string>{"x"}
                                  : std::vector<std::string>{"x", "y"};
}

void write_point(std::ostream& out, const CrossSection& section, SectionPoint p) {
  out << p.x;
  if (section.dimension() == 2) out << "," << p.y;
}

Profile config_profile(const RunConfig& config) {
  Eigen::VectorXd a = Eigen::VectorXd::Zero(config.modes);
  for (std::size_t i = 0; i < config.coefficients.size(); ++i) a[static_cast<Eigen::Index>(i)] = config.coefficients[i];
  return Profile(config.cross_section(), config.height, a);
}

ExitCode run_modes(const RunConfig& config, std::ostream& log) {
  const auto section = config.cross_section();
  const auto spectrum = neumann_spectrum(section, config.modes + 1);
  CsvFile csv(std::filesystem::path(config.output) / "modes.csv", "modes", config,
              {"k", "m", "n", "sigma", "t_k", "simple"});
  for (int k = 1; k <= config.modes; ++k) {
    const auto& mode = spectrum[static_cast<std::size_t>(k - 1)];
    csv.row(k, mode.mode_numbers[0], mode.mode_numbers[1], mode.sigma,
            bifurcation_point(mode.sigma), is_simple(spectrum, k) ? 1 : 0);
  }
  log << "wrote " << config.modes << " modes\n";
  return ExitCode::Ok;
}

ExitCode run_dispersion(const RunConfig& config, std::ostream& log) {
  const auto spectrum = neumann_spectrum(config.cross_section(), config.modes);
  CsvFile csv(std::filesystem::path(config.output) / "dispersion.csv", "dispersion", config,
              {"k", "sigma", "t", "mu", "regime"});
  const auto& r = config.t_range;
  for (const auto& mode : spectrum) {
    for (int i = 0; i < r.samples; ++i) {
      const double t = r.t_min + (r.t_max - r.t_min) * i / (r.samples - 1);
      const auto sample = dispersion_sample(t, mode);
      csv.row(mode.index, mode.sigma, t, sample.mu, to_string(sample.regime));
    }
  }
  log << "wrote " << spectrum.size() * static_cast<std::size_t>(r.samples) << " samples\n";
  return ExitCode::Ok;
}

ExitCode run_bifurcations(const RunConfig& config, std::ostream& log) {
  const auto candidates = detect_bifurcations(config.cross_section(), config.modes,
                                              config.t_range.t_min, config.t_range.t_max);
  CsvFile csv(std::filesystem::path(config.output) / "bifurcations.csv", "bifurcations", config,
              {"k", "sigma", "t", "simple", "slope", "eligible"});
  for (const auto& c : candidates) {
    csv.row(c.k, c.sigma, c.t, c.simple ? 1 : 0, c.slope, c.eligible ? 1 : 0);
    log << "k=" << c.k << " t=" << c.t << (c.eligible ? "" : " (ineligible)") << "\n";
  }
  return ExitCode::Ok;
}

ExitCode run_eig(const RunConfig& config, std::ostream& log) {
  const Profile v = config_profile(config);
  const Grid grid = config.make_grid();
  const EigenSolverOptions options = config.eigen_options();
  const FEvaluation f = evaluate_F(v, grid, options);
  const double t = v.height();
  const std::filesystem::path dir(config.output);
  {
    CsvFile csv(dir / "eig.csv", "eig", config,
                {"t", "w_norm", "lambda", "lambda_trivial", "c", "c_trivial", "constancy",
                 "iterations", "residual"});
    csv.row(t, v.deviation_norm(), f.pair.lambda, lambda_trivial(t), f.c, -kPi / (2.0 * t),
            f.normal_derivative.stddev() / std::abs(f.c), f.pair.iterations, f.pair.residual);
  }
  auto columns = point_columns(grid.section());
  columns.insert(columns.end(), {"x_N", "phi"});
  CsvFile field(dir / "eigenfunction.csv", "eig", config, columns);
  for (int s = 0; s < grid.section_nodes(); ++s) {
    const SectionPoint p = grid.section_point(s);
    const double height = v.value(p);
    for (int iz = 0; iz < grid.n_axial(); ++iz) {
      write_point(field.stream(), grid.section(), p);
      field.stream() << "," << height * grid.axial_coordinate(iz) << "," << f.pair.phi.at(s, iz)
                     << "\n";
    }
  }
  log << "lambda=" << std::setprecision(12) << f.pair.lambda << " c=" << f.c << "\n";
  for (const auto& w : f.warnings) log << "warning: " << w << "\n";
  return ExitCode::Ok;
}

ExitCode run_verify(const RunConfig& config, std::ostream& log) {
  const auto section = config.cross_section();
  const Grid grid = config.make_grid();
  const EigenSolverOptions options = config.eigen_options();
  const auto spectrum = neumann_spectrum(section, std::min(config.verify.modes, config.modes));
  bool ok = true;

  json rows = json::array();
  CsvFile csv(std::filesystem::path(config.output) / "verify.csv", "verify", config,
              {"k", "factor", "t", "mu", "mu_fd", "gap", "gap_refined", "pass"});
  const Grid fine(section, 2 * config.grid.n_section - 1, 2 * config.grid.n_axial - 1);
  log << std::setprecision(8) << "k  t           mu           mu_fd        gap\n";
  for (const auto& mode : spectrum) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(mode.index);
    e[mode.index - 1] = 1.0;
    for (double factor : config.verify.factors) {
      const double t = factor * bifurcation_point(mode.sigma);
      const double exact = mu(t, mode.sigma);
      const Profile direction(section, t, e);
      // Relative to |mu|, or to lambda_t near the zero crossing.
      const auto gap_on = [&](const Grid& g, double& fd) {
        fd = frechet_fd(direction, config.verify.eps, g, options).coefficients[mode.index - 1];
        return std::abs(fd - exact) / std::max(std::abs(exact), lambda_trivial(t));
      };
      double fd = 0.0;
      const double gap = gap_on(grid, fd);
      bool pass = gap <= config.tolerances.mu_gap;
      std::string refined;
      if (!pass) {
        // Accept a grid-limited gap that shrinks at second order under refinement.
        double fd_fine = 0.0;
        const double gap_fine = gap_on(fine, fd_fine);
        pass = gap_fine <= config.tolerances.mu_gap && gap >= 3.0 * gap_fine;
        std::ostringstream os;
        os << std::setprecision(17) << gap_fine;
        refined = os.str();
      }
      ok = ok && pass;
      csv.row(mode.index, factor, t, exact, fd, gap, refined, pass ? 1 : 0);
      json row{{"k", mode.index}, {"t", t}, {"mu", exact}, {"mu_fd", fd}, {"gap", gap},
               {"pass", pass}};
      if (!refined.empty()) row["gap_refined"] = std::stod(refined);
      rows.push_back(row);
      log << mode.index << "  " << t << "  " << exact << "  " << fd << "  " << gap
          << (refined.empty() ? "" : "  refined " + refined) << (pass ? "" : "  FAIL") << "\n";
    }
  }

  // Mean-zero flux of the linearized solution for random deviations.
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> height(config.t_range.t_min, config.t_range.t_max);
  const int k_flux = std::min(8, config.modes);
  json flux = json::array();
  for (int i = 0; i < config.verify.random_profiles; ++i) {
    const double t = height(rng);
    Eigen::VectorXd a(k_flux);
    for (int k = 0; k < k_flux; ++k) a[k] = normal(rng);
    const Profile w(section, t, a);
    const double modal = hat_psi_solve(w).top_flux_integral();
    const double fd = top_flux_integral_fd(hat_psi_fd(w, grid), t);
    const bool pass = std::abs(modal) <= config.tolerances.flux &&
                      std::abs(fd) <= config.tolerances.flux_fd;
    ok = ok && pass;
    flux.push_back({{"t", t}, {"modal", modal}, {"fd", fd}, {"pass", pass}});
  }
  json doc = header("verify", config);
  doc["mu_table"] = rows;
  doc["flux_mean_zero"] = flux;
  doc["passed"] = ok;
  write_json(std::filesystem::path(config.output) / "verify.json", doc);
  log << (ok ? "all checks within tolerance\n" : "verification FAILED\n");
  return ok ? ExitCode::Ok : ExitCode::Verification;
}

json report_json(const BranchPoint& p, const BranchPointReport& r) {
  return json{{"s", p.s},
              {"t", p.t()},
              {"lambda", p.lambda},
              {"c", r.c},
              {"residual_norm", r.residual_norm},
              {"constancy", r.constancy},
              {"orthogonality", r.orthogonality},
              {"min_v", r.min_v},
              {"phi_positive", r.phi_positive},
              {"nonconstancy", r.nonconstancy},
              {"eigen_residual", r.eigen_residual},
              {"neumann_residual", r.neumann_residual},
              {"passed", r.passed()}};
}

Branch traced_branch(const RunConfig& config, std::ostream& log) {
  Branch branch = trace_branch(config.continuation(), config.branch.mode, config.branch.s_max,
                               config.branch.ds);
  log << "branch " << branch.j << " from t=" << std::setprecision(12) << branch.t_star << ": "
      << branch.points.size() << " points\n";
  for (const auto& w : branch.warnings) log << "warning: " << w << "\n";
  return branch;
}

ExitCode run_branch(const RunConfig& config, std::ostream& log) {
  const ContinuationSettings settings = config.continuation();
  const Branch branch = traced_branch(config, log);
  const std::filesystem::path dir(config.output);

  std::vector<std::string> columns{"s", "t", "lambda", "c", "residual", "w_norm", "newton_iterations"};
  for (int k = 1; k <= config.modes; ++k) columns.push_back("a" + std::to_string(k));
  {
    CsvFile csv(dir / "branch.csv", "branch", config, columns);
    for (const auto& p : branch.points) {
      csv.stream() << p.s << "," << p.t() << "," << p.lambda << "," << p.c << ","
                   << p.residual_norm << "," << p.profile.deviation_norm() << ","
                   << p.newton_iterations;
      for (int k = 1; k <= config.modes; ++k) csv.stream() << "," << p.profile.coefficient(k);
      csv.stream() << "\n";
    }
  }
  {
    auto pcols = point_columns(settings.section());
    pcols.insert(pcols.begin(), "s");
    pcols.push_back("v");
    CsvFile csv(dir / "profiles.csv", "branch", config, pcols);
    for (const auto& p : branch.points) {
      const ReflectedProfile r = reflect_profile(p, config.profile_samples);
      for (std::size_t i = 0; i < r.points.size(); ++i) {
        csv.stream() << p.s << ",";
        write_point(csv.stream(), settings.section(), r.points[i]);
        csv.stream() << "," << r.upper[i] << "\n";
      }
    }
  }

  BranchPointTolerances tol;
  tol.residual = config.tolerances.newton;
  tol.constancy = config.tolerances.constancy;
  bool ok = true;
  json points = json::array();
  for (const auto& p : branch.points) {
    const BranchPointReport r = verify_branch_point(settings, branch.j, p, tol);
    ok = ok && r.passed();
    points.push_back(report_json(p, r));
    log << "s=" << std::setw(6) << p.s << " t=" << std::setprecision(12) << p.t()
        << " constancy=" << std::setprecision(3) << r.constancy << (r.passed() ? "" : "  FAIL")
        << "\n";
  }
  json doc = header("branch", config);
  doc["mode"] = branch.j;
  doc["t_star"] = branch.t_star;
  doc["warnings"] = branch.warnings;
  doc["points"] = points;
  doc["passed"] = ok && branch.warnings.empty();
  write_json(dir / "branch_report.json", doc);

  if (!branch.warnings.empty()) return ExitCode::Numerical;
  return ok ? ExitCode::Ok : ExitCode::Verification;
}

ExitCode run_reflect(const RunConfig& config, std::ostream& log) {
  const Branch branch = traced_branch(config, log);
  const CrossSection section = config.cross_section();
  auto columns = point_columns(section);
  columns.insert(columns.begin(), "s");
  columns.insert(columns.end(), {"lower", "upper"});
  CsvFile csv(std::filesystem::path(config.output) / "reflected.csv", "reflect", config, columns);
  for (const auto& p : branch.points) {
    const ReflectedProfile r = reflect_profile(p, config.profile_samples);
    for (std::size_t i = 0; i < r.points.size(); ++i) {
      csv.stream() << p.s << ",";
      write_point(csv.stream(), section, r.points[i]);
      csv.stream() << "," << r.lower[i] << "," << r.upper[i] << "\n";
    }
  }
  return branch.warnings.empty() ? ExitCode::Ok : ExitCode::Numerical;
}

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{"modes", "dispersion", "bifurcations", "eig",
                                              "verify", "branch", "reflect"};
  return names;
}

ExitCode run(const std::string& command, const RunConfig& config, std::ostream& log) {
  using Runner = ExitCode (*)(const RunConfig&, std::ostream&);
  static const std::map<std::string, Runner> runners{
      {"modes", run_modes},     {"dispersion", run_dispersion}, {"bifurcations", run_bifurcations},
      {"eig", run_eig},         {"verify", run_verify},         {"branch", run_branch},
      {"reflect", run_reflect}};
  try {
    const auto it = runners.find(command);
    if (it == runners.end()) throw InputError("unknown command '" + command + "'");
    validate(config);
    std::filesystem::create_directories(config.output);
    return it->second(config, log);
  } catch (const InputError& e) {
    log << "config error: " << e.what() << "\n";
    return ExitCode::Config;
  } catch (const std::filesystem::filesystem_error& e) {
    log << "config error: " << e.what() << "\n";
    return ExitCode::Config;
  } catch (const std::exception& e) {
    log << "numerical failure: " << e.what() << "\n";
    return ExitCode::Numerical;
  }
}

ReflectedProfile reflect_profile(const Profile& v, int samples) {
  const Grid grid(v.section(), samples, 8);
  ReflectedProfile out;
  out.points = grid.section_points();
  for (const auto& p : out.points) {
    out.upper.push_back(v.value(p));
    out.lower.push_back(-out.upper.back());
  }
  return out;
}

ReflectedProfile reflect_profile(const BranchPoint& point, int samples) {
  return reflect_profile(point.profile, samples);
}

std::vector<ProfileSamples> read_profile_dump(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path.string());
  std::vector<ProfileSamples> out;
  bool header_seen = false;
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::vector<double> fields;
    std::istringstream row(line);
    for (std::string cell; std::getline(row, cell, ',');) fields.push_back(std::stod(cell));
    if (fields.size() < 3) throw InputError("malformed profile dump row: " + line);
    if (out.empty() || out.back().s != fields.front()) out.push_back({fields.front(), {}});
    out.back().values.push_back(fields.back());
  }
  return out;
}

Profile reproject_profile(const Grid& grid, const std::vector<double>& values, int mode_count) {
  if (static_cast<int>(values.size()) != grid.section_nodes()) {
    throw InputError("reproject_profile: sample count does not match the grid");
  }
  const auto modes = neumann_spectrum(grid.section(), mode_count);
  return Profile(grid.section(), section_mean(grid, values),
                 project_onto_modes(grid, values, modes));
}

}  // namespace cylbif
