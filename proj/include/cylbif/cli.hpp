#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "cylbif/continuation.hpp"

namespace cylbif {

const char* version();

struct SectionConfig {
  SectionKind kind = SectionKind::Interval;
  double length = 3.141592653589793;  // interval
  double a = 3.141592653589793;       // rectangle sides
  double b = 2.221441469079183;
};

struct GridConfig {
  int n_section = 48;
  int n_axial = 64;
};

struct RangeConfig {
  double t_min = 0.5;
  double t_max = 2.0;
  int samples = 61;
};

struct BranchConfig {
  int mode = 1;
  double s_max = 0.04;
  double ds = 0.01;
};

struct ToleranceConfig {
  double newton = 1e-9;
  double constancy = 1e-5;
  double mu_gap = 0.02;
  double eigen = 1e-12;
  int eigen_iterations = 200;
  double flux = 1e-12;
  double flux_fd = 1e-8;
};

// Settings of the `verify` subcommand: FD Frechet against closed-form mu.
struct VerifyConfig {
  int modes = 5;  // capped at RunConfig::modes
  std::vector<double> factors{0.6, 1.0, 1.4};  // t = factor * t_k
  double eps = 1e-3;
  int random_profiles = 10;
};

struct RunConfig {
  SectionConfig section;
  int modes = 16;
  GridConfig grid;
  double height = 1.5707963267948966;
  std::vector<double> coefficients;  // deviation of the `eig` profile
  RangeConfig t_range;
  BranchConfig branch;
  ToleranceConfig tolerances;
  VerifyConfig verify;
  std::string output = "out";
  int profile_samples = 65;
  unsigned long seed = 12345;

  CrossSection cross_section() const;
  Grid make_grid() const;
  EigenSolverOptions eigen_options() const;
  ContinuationSettings continuation() const;
};

/// Strict loaders: unknown keys and out-of-range values raise InputError.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& yaml);
void validate(const RunConfig& config);
std::string to_yaml(const RunConfig& config);

enum class ExitCode : int { Ok = 0, Config = 1, Numerical = 2, Verification = 3 };

/// Runs one subcommand, writing its files under config.output. Messages go to `log`.
ExitCode run(const std::string& command, const RunConfig& config, std::ostream& log);

const std::vector<std::string>& commands();

struct ReflectedProfile {
  std::vector<SectionPoint> points;
  std::vector<double> upper;
  std::vector<double> lower;
};

/// Boundary of the doubled domain {-v < x_N < v}, sampled on a uniform mesh of omega.
ReflectedProfile reflect_profile(const Profile& v, int samples);
ReflectedProfile reflect_profile(const BranchPoint& point, int samples);

/// A profile sampled on the nodes of a section grid, as written to profile dumps.
struct ProfileSamples {
  double s = 0.0;
  std::vector<double> values;
};

std::vector<ProfileSamples> read_profile_dump(const std::filesystem::path& path);

// Recovers (t, a_1..a_K) from grid samples by trapezoid projection on the modes.
Profile reproject_profile(const Grid& grid, const std::vector<double>& values, int mode_count);

}  // namespace cylbif
