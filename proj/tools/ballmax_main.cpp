#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "ballmax/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"deficit/distance verification for the bathtub maximizer"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int workers = 0;
  double tol_scale = 0.0;

  CLI::App* run_cmd = app.add_subcommand("run", "run the configured experiment");
  run_cmd->add_option("config", config_path, "experiment config file")->required();
  run_cmd->add_option("--out", out_dir, "output directory (overrides config)");
  run_cmd->add_option("--workers", workers, "worker thread count (overrides config)");
  run_cmd->add_option("--tol-scale", tol_scale, "chain tolerance multiplier");

  CLI::App* validate_cmd =
      app.add_subcommand("validate", "print config diagnostics without running");
  validate_cmd->add_option("config", config_path, "experiment config file")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    ballmax::Config cfg = ballmax::parse_config_file(config_path);

    if (validate_cmd->parsed()) {
      const std::vector<std::string> problems = ballmax::validate(cfg);
      for (const std::string& p : problems) std::cout << p << '\n';
      return problems.empty() ? 0 : 2;
    }

    if (workers > 0) cfg.run.workers = workers;
    if (tol_scale > 0.0) cfg.run.tol_scale = tol_scale;
    std::string out = out_dir;
    if (out.empty()) out = cfg.run.out;
    if (out.empty()) {
      const char* env = std::getenv("BALLMAX_OUT");
      out = env ? env : "out";
    }

    const ballmax::ExperimentResult result = ballmax::run_experiment(cfg, out);
    if (result.status == 2) {
      std::cerr << result.summary;
      return 2;
    }
    std::cout << result.summary;
    return result.status;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
