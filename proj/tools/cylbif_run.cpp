#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cylbif/cli.hpp"
#include "cylbif/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Bifurcating domains for the overdetermined eigenvalue problem in a cylinder"};
  std::string command;
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<unsigned long> seed;
  app.add_option("command", command, "Subcommand")
      ->required()
      ->check(CLI::IsMember(cylbif::commands()));
  app.add_option("--config", config_path, "YAML run configuration");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--seed", seed, "Seed for randomized checks");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : static_cast<int>(cylbif::ExitCode::Config);
  }

  cylbif::RunConfig config;
  try {
    if (!config_path.empty()) config = cylbif::load_config(config_path);
  } catch (const cylbif::InputError& e) {
    std::cerr << e.what() << "\n";
    return static_cast<int>(cylbif::ExitCode::Config);
  }
  if (out_dir) config.output = *out_dir;
  if (seed) config.seed = *seed;
  return static_cast<int>(cylbif::run(command, config, std::cout));
}
