// coevo: challenger-solver co-evolution loop driver.
//
// Subcommands: loop, challenger-phase, curate, solver-phase, inspect,
// validate-config. Exit codes: 0 success, 1 runtime failure, 2 usage or
// configuration error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "coevo/orchestrator.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::optional<std::string> backend;
  std::optional<std::string> out_dir;
  std::string resume_dir;
};

void add_common(CLI::App* cmd, CommonOptions& opts, bool config_required = true) {
  auto* config = cmd->add_option("--config", opts.config_path, "config file (JSON)");
  if (config_required) config->required();
  cmd->add_option("--seed", opts.seed, "override the config seed");
  cmd->add_option("--backend", opts.backend, "override the backend")
      ->check(CLI::IsMember({"toy", "endpoint"}));
  cmd->add_option("--out", opts.out_dir, "override the output directory");
  cmd->add_option("--resume", opts.resume_dir, "checkpoint directory to resume from");
}

coevo::LoopConfig load_config(const CommonOptions& opts) {
  coevo::LoopConfig config = coevo::LoopConfig::load(opts.config_path);
  if (opts.seed) config.seed = *opts.seed;
  if (opts.backend) config.backend = *opts.backend;
  if (opts.out_dir) config.output_dir = *opts.out_dir;
  config.validate();
  return config;
}

coevo::LoopRunner make_runner(const CommonOptions& opts) {
  coevo::LoopConfig config = load_config(opts);
  if (!opts.resume_dir.empty()) return coevo::LoopRunner::resume(opts.resume_dir, config);
  return coevo::LoopRunner(std::move(config));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"challenger-solver co-evolution engine"};
  app.require_subcommand(1);

  CommonOptions loop_opts;
  int stop_after = 0;
  auto* loop_cmd = app.add_subcommand("loop", "run the full co-evolution loop");
  add_common(loop_cmd, loop_opts);
  loop_cmd->add_option("--stop-after", stop_after,
                       "stop once this iteration completes (0 = run all)");

  CommonOptions challenger_opts;
  auto* challenger_cmd =
      app.add_subcommand("challenger-phase", "run a single challenger GRPO phase");
  add_common(challenger_cmd, challenger_opts);

  CommonOptions curate_opts;
  auto* curate_cmd = app.add_subcommand("curate", "sample a pool, vote, filter, write a dataset");
  add_common(curate_cmd, curate_opts);

  CommonOptions solver_opts;
  std::string dataset_path;
  auto* solver_cmd = app.add_subcommand("solver-phase", "run a single solver GRPO phase");
  add_common(solver_cmd, solver_opts);
  solver_cmd->add_option("--dataset", dataset_path,
                         "dataset file (defaults to the checkpoint's dataset)");

  std::string inspect_path;
  auto* inspect_cmd = app.add_subcommand("inspect", "summarize a dataset or metrics file");
  inspect_cmd->add_option("file", inspect_path, "dataset or metrics JSONL file")->required();

  CommonOptions validate_opts;
  auto* validate_cmd = app.add_subcommand("validate-config", "check a config file and exit");
  add_common(validate_cmd, validate_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // CLI11 prints its own message; force usage errors onto exit code 2
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (loop_cmd->parsed()) {
      auto runner = make_runner(loop_opts);
      auto state = runner.run(stop_after);
      std::cout << "loop finished at iteration " << state.iteration << " ("
                << coevo::to_string(state.phase) << ")\n"
                << "metrics: " << state.metrics_path << "\n";
      if (!state.dataset_path.empty()) std::cout << "dataset: " << state.dataset_path << "\n";
      return 0;
    }
    if (challenger_cmd->parsed()) {
      auto runner = make_runner(challenger_opts);
      int iteration = runner.next_iteration();
      runner.run_challenger_phase(iteration);
      runner.write_checkpoint(iteration, coevo::Phase::challenger);
      std::cout << "challenger phase " << iteration << " done\n";
      return 0;
    }
    if (curate_cmd->parsed()) {
      auto runner = make_runner(curate_opts);
      int iteration = runner.next_iteration();
      auto dataset = runner.run_curation_phase(iteration);
      runner.write_checkpoint(iteration, coevo::Phase::curation);
      std::cout << "curated " << dataset.size() << " questions\n"
                << "dataset: " << runner.dataset_path(iteration).string() << "\n";
      return 0;
    }
    if (solver_cmd->parsed()) {
      auto runner = make_runner(solver_opts);
      int iteration = runner.next_iteration();
      std::vector<coevo::CurationRecord> dataset;
      std::string source =
          !dataset_path.empty() ? dataset_path : runner.state().dataset_path;
      if (source.empty())
        throw coevo::ConfigError("solver-phase needs --dataset or a checkpoint with one");
      for (auto& record : coevo::read_dataset(source))
        if (record.kept) dataset.push_back(std::move(record));
      runner.run_solver_phase(iteration, dataset);
      runner.write_checkpoint(iteration, coevo::Phase::solver);
      std::cout << "solver phase " << iteration << " done\n";
      return 0;
    }
    if (inspect_cmd->parsed()) {
      std::cout << coevo::inspect_file(inspect_path);
      return 0;
    }
    if (validate_cmd->parsed()) {
      load_config(validate_opts);
      std::cout << "config ok\n";
      return 0;
    }
  } catch (const coevo::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const coevo::EmptyCurriculumError& e) {
    std::cerr << "empty curriculum: " << e.what() << "\n";
    return 1;
  } catch (const coevo::TransportError& e) {
    std::cerr << "transport error: " << e.what() << "\n";
    return 1;
  } catch (const coevo::InvalidInputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
