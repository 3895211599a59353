// fracstick command line: run, validate, crossval.
#include "fracstick/errors.hpp"
#include "fracstick/experiment.hpp"
#include "fracstick/parallel.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <iostream>

using namespace fracstick;

namespace {

int workers_from_env(int flag) {
  if (const char* env = std::getenv("FRACSTICK_WORKERS")) {
    try {
      const int w = std::stoi(env);
      if (w > 0) return w;
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring FRACSTICK_WORKERS='" << env << "'\n";
  }
  return flag;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlocal minimal graphs: solver, barriers and stickiness experiments"};
  app.require_subcommand(1);
  int workers = 0;
  app.add_option("--workers", workers, "Cap on worker threads (FRACSTICK_WORKERS overrides)")->check(CLI::NonNegativeNumber);

  std::string run_path, validate_path;
  auto* run_cmd = app.add_subcommand("run", "Run the experiment described by a config file");
  run_cmd->add_option("config", run_path, "Config file")->required();
  std::string output;
  run_cmd->add_option("--output", output, "Override the output directory");
  bool override_hyp = false;
  run_cmd->add_flag("--override-hypotheses", override_hyp, "Run even when a hypothesis gate fails");

  auto* val_cmd = app.add_subcommand("validate", "List config violations");
  val_cmd->add_option("config", validate_path, "Config file")->required();

  int seed = 1;
  std::string cv_output = "out/crossval";
  auto* cv_cmd = app.add_subcommand("crossval", "Compare graph and set curvature on random graphs (n = 1)");
  cv_cmd->add_option("--seed", seed, "Random seed")->required();
  cv_cmd->add_option("--output", cv_output, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  try {
    if (run_cmd->parsed() || cv_cmd->parsed()) {
      ExperimentConfig cfg;
      if (run_cmd->parsed()) {
        cfg = load_config(run_path);
        if (!output.empty()) cfg.output = output;
        if (override_hyp) cfg.override_hypotheses = true;
      } else {
        cfg.kind = "oracle-crossval";
        cfg.params.n = 1;
        cfg.seed = seed;
        cfg.output = cv_output;
      }
      const int w = workers_from_env(workers > 0 ? workers : cfg.workers);
      cfg.workers = w;
      if (w > 0) set_worker_count(w);
      const int code = run(cfg, std::cerr);
      if (code == kExitOk && cv_cmd->parsed()) {
        std::cout << "crossval written to " << cfg.output << '\n';
      }
      return code;
    }
    const ExperimentConfig cfg = load_config(validate_path);
    const auto violations = validate(cfg);
    for (const auto& v : violations) std::cout << v.field << ": " << v.message << " [" << v.hypothesis << "]\n";
    if (violations.empty()) std::cout << "ok\n";
    return violations.empty() ? kExitOk : kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}
