#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "coevo/backends.hpp"
#include "coevo/challenger_reward.hpp"
#include "coevo/curation.hpp"
#include "coevo/grpo.hpp"
#include "coevo/loop_config.hpp"
#include "coevo/toy_world.hpp"

namespace coevo {

enum class Phase { init, challenger, curation, solver };

std::string to_string(Phase phase);
Phase phase_from_string(std::string_view s);

// Snapshot of the loop after a phase completes.
struct IterationState {
  int iteration = 0;
  Phase phase = Phase::init;
  CategoricalPolicy challenger_policy;
  CategoricalPolicy solver_policy;  // same object as challenger_policy when shared
  std::string dataset_path;
  std::string metrics_path;
};

inline constexpr int kCheckpointFormatVersion = 1;

// Append-only JSONL metrics stream, one record per (iteration, phase).
class MetricsWriter {
 public:
  MetricsWriter(std::filesystem::path path, bool truncate);
  void append(const nlohmann::json& record);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

std::vector<nlohmann::json> read_metrics(const std::filesystem::path& path);

// The co-evolution loop: challenger phase -> curation -> solver phase,
// iterated, with a checkpoint after every phase. All randomness derives from
// (seed, iteration, phase), so a resumed run replays exactly.
class LoopRunner {
 public:
  explicit LoopRunner(LoopConfig config);

  // Restores policies and loop position from a checkpoint whose config hash
  // matches the supplied config.
  static LoopRunner resume(const std::filesystem::path& checkpoint_dir, LoopConfig config);

  // Runs up to config.iterations, optionally stopping after an earlier
  // iteration completes (0 = run all). Returns the final state.
  IterationState run(int stop_after_iteration = 0);

  // Single-phase entry points (used by the CLI subcommands). These do not
  // write checkpoints; call write_checkpoint afterwards if wanted.
  void run_challenger_phase(int iteration);
  std::vector<CurationRecord> run_curation_phase(int iteration);
  void run_solver_phase(int iteration, const std::vector<CurationRecord>& dataset);

  void write_checkpoint(int iteration, Phase phase);

  IterationState state() const;
  const LoopConfig& config() const { return config_; }
  const ToyWorld& world() const { return world_; }
  int next_iteration() const { return next_iteration_; }
  Phase next_phase() const { return next_phase_; }

  CategoricalPolicy challenger_policy_snapshot() const { return challenger_policy(); }
  CategoricalPolicy solver_policy_snapshot() const { return solver_policy(); }
  // Replace a policy (experiment setups, e.g. a frozen solver with chosen
  // per-level accuracies).
  void set_challenger_policy(CategoricalPolicy policy);
  void set_solver_policy(CategoricalPolicy policy);

  std::filesystem::path checkpoint_dir(int iteration, Phase phase) const;
  std::filesystem::path dataset_path(int iteration) const;
  std::filesystem::path rollout_path(int iteration) const;

 private:
  LoopRunner(LoopConfig config, bool fresh);

  CategoricalPolicy& challenger_policy();
  CategoricalPolicy& solver_policy();
  const CategoricalPolicy& challenger_policy() const;
  const CategoricalPolicy& solver_policy() const;

  Rng phase_rng(int iteration, Phase phase) const;
  void write_init_record();

  std::unique_ptr<GeneratorBackend> make_generator();
  std::unique_ptr<SolverBackend> make_solver();

  // Empirical accuracy from m solver samples, for each format-valid question.
  std::vector<std::optional<double>> probe_accuracies(
      const std::vector<FormatCheckResult>& formats, SolverBackend& solver, const Rng& rng);

  LoopConfig config_;
  ToyWorld world_;
  CategoricalPolicy challenger_policy_;
  CategoricalPolicy solver_policy_;
  CategoricalPolicy shared_policy_;  // the single policy when shared_policy is set
  std::filesystem::path out_dir_;
  std::unique_ptr<MetricsWriter> metrics_;
  int next_iteration_ = 1;
  Phase next_phase_ = Phase::challenger;
  int last_iteration_ = 0;
  Phase last_phase_ = Phase::init;
  std::string last_dataset_path_;
};

// Human-readable summary of a dataset or metrics file.
std::string inspect_file(const std::filesystem::path& path);

}  // namespace coevo
