#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "cylbif/cli.hpp"
#include "cylbif/errors.hpp"

namespace cylbif {

const char* version() { return CYLBIF_VERSION; }

CrossSection RunConfig::cross_section() const {
  return section.kind == SectionKind::Interval ? CrossSection::interval(section.length)
                                               : CrossSection::rectangle(section.a, section.b);
}

Grid RunConfig::make_grid() const { return Grid(cross_section(), grid.n_section, grid.n_axial); }

EigenSolverOptions RunConfig::eigen_options() const {
  return EigenSolverOptions{tolerances.eigen_iterations, tolerances.eigen};
}

ContinuationSettings RunConfig::continuation() const {
  return ContinuationSettings{make_grid(), modes, tolerances.newton, 15, 10, 1e-6, eigen_options()};
}

namespace {

void check_keys(const YAML::Node& node, const std::set<std::string>& allowed,
                const std::string& where) {
  if (!node.IsMap()) throw InputError("config: '" + where + "' must be a mapping");
  for (const auto& entry : node) {
    const auto key = entry.first.as<std::string>();
    if (!allowed.count(key)) throw InputError("config: unknown key '" + key + "' in " + where);
  }
}

template <class T>
void read(const YAML::Node& node, const char* key, T& out, const std::string& where) {
  const YAML::Node value = node[key];
  if (!value) return;
  try {
    out = value.as<T>();
  } catch (const YAML::Exception&) {
    throw InputError("config: bad value for " + where + "." + key);
  }
}

SectionKind parse_kind(const std::string& name) {
  if (name == "interval") return SectionKind::Interval;
  if (name == "rectangle") return SectionKind::Rectangle;
  throw InputError("config: section.kind must be 'interval' or 'rectangle', got '" + name + "'");
}

void require(bool ok, const std::string& message) {
  if (!ok) throw InputError("config: " + message);
}

bool positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

void validate(const RunConfig& c) {
  if (c.section.kind == SectionKind::Interval) {
    require(positive(c.section.length), "section.length must be positive");
  } else {
    require(positive(c.section.a) && positive(c.section.b), "section.a and section.b must be positive");
  }
  require(c.modes >= 1 && c.modes <= 256, "modes must be in 1..256");
  require(c.grid.n_section >= 8 && c.grid.n_axial >= 8, "grid sizes must be at least 8");
  require(positive(c.height), "height must be positive");
  require(static_cast<int>(c.coefficients.size()) <= c.modes, "more coefficients than modes");
  for (double a : c.coefficients) require(std::isfinite(a), "coefficients must be finite");
  require(positive(c.t_range.t_min) && c.t_range.t_max > c.t_range.t_min &&
              std::isfinite(c.t_range.t_max),
          "t_range needs 0 < min < max");
  require(c.t_range.samples >= 2, "t_range.samples must be at least 2");
  require(c.branch.mode >= 1 && c.branch.mode <= c.modes, "branch.mode must be in 1..modes");
  require(positive(c.branch.ds) && c.branch.s_max >= c.branch.ds, "branch needs 0 < ds <= s_max");
  require(positive(c.tolerances.newton) && positive(c.tolerances.constancy) &&
              positive(c.tolerances.mu_gap) && positive(c.tolerances.eigen) &&
              positive(c.tolerances.flux) && positive(c.tolerances.flux_fd),
          "tolerances must be positive");
  require(c.tolerances.eigen_iterations >= 1, "tolerances.eigen_iterations must be at least 1");
  require(c.verify.modes >= 1, "verify.modes must be positive");
  require(!c.verify.factors.empty(), "verify.factors must not be empty");
  for (double f : c.verify.factors) require(positive(f), "verify.factors must be positive");
  require(positive(c.verify.eps), "verify.eps must be positive");
  require(c.verify.random_profiles >= 0, "verify.random_profiles must be nonnegative");
  require(!c.output.empty(), "output.dir must not be empty");
  require(c.profile_samples >= 8 && c.profile_samples >= c.modes + 2,
          "output.profile_samples must be at least max(8, modes + 2)");
}

RunConfig parse_config(const std::string& yaml) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml);
  } catch (const YAML::Exception& e) {
    throw InputError(std::string("config: ") + e.what());
  }
  RunConfig c;
  if (root.IsNull()) {
    validate(c);
    return c;
  }
  check_keys(root, {"section", "modes", "grid", "height", "coefficients", "t_range", "branch",
                    "tolerances", "verify", "output", "seed"},
             "top level");
  if (const auto n = root["section"]) {
    check_keys(n, {"kind", "length", "a", "b"}, "section");
    std::string kind = "interval";
    read(n, "kind", kind, "section");
    c.section.kind = parse_kind(kind);
    read(n, "length", c.section.length, "section");
    read(n, "a", c.section.a, "section");
    read(n, "b", c.section.b, "section");
  }
  read(root, "modes", c.modes, "top");
  if (const auto n = root["grid"]) {
    check_keys(n, {"n_section", "n_axial"}, "grid");
    read(n, "n_section", c.grid.n_section, "grid");
    read(n, "n_axial", c.grid.n_axial, "grid");
  }
  read(root, "height", c.height, "top");
  read(root, "coefficients", c.coefficients, "top");
  if (const auto n = root["t_range"]) {
    check_keys(n, {"min", "max", "samples"}, "t_range");
    read(n, "min", c.t_range.t_min, "t_range");
    read(n, "max", c.t_range.t_max, "t_range");
    read(n, "samples", c.t_range.samples, "t_range");
  }
  if (const auto n = root["branch"]) {
    check_keys(n, {"mode", "s_max", "ds"}, "branch");
    read(n, "mode", c.branch.mode, "branch");
    read(n, "s_max", c.branch.s_max, "branch");
    read(n, "ds", c.branch.ds, "branch");
  }
  if (const auto n = root["tolerances"]) {
    check_keys(n, {"newton", "constancy", "mu_gap", "eigen", "eigen_iterations", "flux",
                    "flux_fd"}, "tolerances");
    read(n, "newton", c.tolerances.newton, "tolerances");
    read(n, "constancy", c.tolerances.constancy, "tolerances");
    read(n, "mu_gap", c.tolerances.mu_gap, "tolerances");
    read(n, "eigen", c.tolerances.eigen, "tolerances");
    read(n, "eigen_iterations", c.tolerances.eigen_iterations, "tolerances");
    read(n, "flux", c.tolerances.flux, "tolerances");
    read(n, "flux_fd", c.tolerances.flux_fd, "tolerances");
  }
  if (const auto n = root["verify"]) {
    check_keys(n, {"modes", "factors", "eps", "random_profiles"}, "verify");
    read(n, "modes", c.verify.modes, "verify");
    read(n, "factors", c.verify.factors, "verify");
    read(n, "eps", c.verify.eps, "verify");
    read(n, "random_profiles", c.verify.random_profiles, "verify");
  }
  if (const auto n = root["output"]) {
    check_keys(n, {"dir", "profile_samples"}, "output");
    read(n, "dir", c.output, "output");
    read(n, "profile_samples", c.profile_samples, "output");
  }
  read(root, "seed", c.seed, "top");
  validate(c);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("config: cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string to_yaml(const RunConfig& c) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "section" << YAML::Value << YAML::Flow << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << to_string(c.section.kind);
  if (c.section.kind == SectionKind::Interval) {
    out << YAML::Key << "length" << YAML::Value << c.section.length;
  } else {
    out << YAML::Key << "a" << YAML::Value << c.section.a;
    out << YAML::Key << "b" << YAML::Value << c.section.b;
  }
  out << YAML::EndMap;
  out << YAML::Key << "modes" << YAML::Value << c.modes;
  out << YAML::Key << "grid" << YAML::Value << YAML::Flow << YAML::BeginMap;
  out << YAML::Key << "n_section" << YAML::Value << c.grid.n_section;
  out << YAML::Key << "n_axial" << YAML::Value << c.grid.n_axial << YAML::EndMap;
  out << YAML::Key << "height" << YAML::Value << c.height;
  out << YAML::Key << "coefficients" << YAML::Value << YAML::Flow << c.coefficients;
  out << YAML::Key << "t_range" << YAML::Value << YAML::Flow << YAML::BeginMap;
  out << YAML::Key << "min" << YAML::Value << c.t_range.t_min;
  out << YAML::Key << "max" << YAML::Value << c.t_range.t_max;
  out << YAML::Key << "samples" << YAML::Value << c.t_range.samples << YAML::EndMap;
  out << YAML::Key << "branch" << YAML::Value << YAML::Flow << YAML::BeginMap;
  out << YAML::Key << "mode" << YAML::Value << c.branch.mode;
  out << YAML::Key << "s_max" << YAML::Value << c.branch.s_max;
  out << YAML::Key << "ds" << YAML::Value << c.branch.ds << YAML::EndMap;
  out << YAML::Key << "tolerances" << YAML::Value << YAML::Flow << YAML::BeginMap;
  out << YAML::Key << "newton" << YAML::Value << c.tolerances.newton;
  out << YAML::Key << "constancy" << YAML::Value << c.tolerances.constancy;
  out << YAML::Key << "mu_gap" << YAML::Value << c.tolerances.mu_gap;
  out << YAML::Key << "eigen" << YAML::Value << c.tolerances.eigen;
  out << YAML::Key << "eigen_iterations" << YAML::Value << c.tolerances.eigen_iterations;
  out << YAML::Key << "flux" << YAML::Value << c.tolerances.flux;
  out << YAML::Key << "flux_fd" << YAML::Value << c.tolerances.flux_fd << YAML::EndMap;
  out << YAML::Key << "verify" << YAML::Value << YAML::Flow << YAML::BeginMap;
  out << YAML::Key << "modes" << YAML::Value << c.verify.modes;
  out << YAML::Key << "factors" << YAML::Value << YAML::Flow << c.verify.factors;
  out << YAML::Key << "eps" << YAML::Value << c.verify.eps;
  out << YAML::Key << "random_profiles" << YAML::Value << c.verify.random_profiles << YAML::EndMap;
  out << YAML::Key << "output" << YAML::Value << YAML::Flow << YAML::BeginMap;
  out << YAML::Key << "dir" << YAML::Value << c.output;
  out << YAML::Key << "profile_samples" << YAML::Value << c.profile_samples << YAML::EndMap;
  out << YAML::Key << "seed" << YAML::Value << c.seed;
  out << YAML::EndMap;
  return out.c_str();
}

}  // namespace cylbif
