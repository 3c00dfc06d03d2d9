#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gadkit/config.hpp"
#include "gadkit/experiments.hpp"

int main(int argc, char** argv) {
  namespace ex = gadkit::experiments;
  CLI::App app{"gadkit: aliasing decomposition sweeps for linear models"};
  app.set_version_flag("--version", std::string(ex::tool_version()));

  std::string config_path;
  ex::RunOverrides overrides;
  app.add_option("--config", config_path, "Run configuration file")->required();
  app.add_option("--out", overrides.output_dir, "Output directory (overrides run.output_dir)");
  app.add_option("--seed", overrides.seed, "Master seed (overrides run.seed and GADKIT_SEED)");
  app.add_option("--threads", overrides.threads, "Parallel sweep width")
      ->check(CLI::Range(1, 1024));
  app.add_flag("--full-scale", overrides.full_scale, "Paper-size sweep dimensions");
  CLI11_PARSE(app, argc, argv);

  ex::RunConfig config;
  try {
    config = ex::parse_config(config_path);
  } catch (const ex::ConfigError& e) {
    std::cerr << config_path << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    return ex::run(config, overrides);
  } catch (const ex::ConfigError& e) {
    std::cerr << config_path << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
