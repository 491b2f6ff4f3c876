#include "coevo/orchestrator.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "coevo/endpoint_client.hpp"

namespace coevo {

namespace fs = std::filesystem;

std::string to_string(Phase phase) {
  switch (phase) {
    case Phase::init: return "init";
    case Phase::challenger: return "challenger";
    case Phase::curation: return "curation";
    case Phase::solver: return "solver";
  }
  return "init";
}

Phase phase_from_string(std::string_view s) {
  if (s == "init") return Phase::init;
  if (s == "challenger") return Phase::challenger;
  if (s == "curation") return Phase::curation;
  if (s == "solver") return Phase::solver;
  throw ConfigError("unknown phase: " + std::string(s));
}

MetricsWriter::MetricsWriter(fs::path path, bool truncate) : path_(std::move(path)) {
  if (truncate) {
    std::ofstream out(path_, std::ios::trunc);
    if (!out) throw ConfigError("cannot open metrics file: " + path_.string());
  }
}

void MetricsWriter::append(const nlohmann::json& record) {
  std::ofstream out(path_, std::ios::app);
  if (!out) throw ConfigError("cannot append to metrics file: " + path_.string());
  out << record.dump() << '\n';
}

std::vector<nlohmann::json> read_metrics(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open metrics file: " + path.string());
  std::vector<nlohmann::json> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(nlohmann::json::parse(line));
  }
  return out;
}

namespace {

std::string hash_hex(uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_json_atomic(const fs::path& path, const nlohmann::json& j) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << j.dump(2) << '\n';
  }
  fs::rename(tmp, path);
}

std::string iter_tag(int iteration) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%03d", iteration);
  return buf;
}

}  // namespace

LoopRunner::LoopRunner(LoopConfig config) : LoopRunner(std::move(config), /*fresh=*/true) {}

LoopRunner::LoopRunner(LoopConfig config, bool fresh)
    : config_(std::move(config)), world_(config_.toy) {
  config_.validate();
  out_dir_ = config_.output_dir;
  fs::create_directories(out_dir_ / "checkpoints");
  metrics_ = std::make_unique<MetricsWriter>(out_dir_ / "metrics.jsonl", /*truncate=*/fresh);

  if (config_.backend == "toy") {
    if (config_.shared_policy) {
      // one policy object holding the challenger state and every level state
      shared_policy_ = world_.initial_challenger_policy();
      for (const auto& [state, logits] : world_.initial_solver_policy().states())
        shared_policy_.add_state(state, logits);
    } else {
      challenger_policy_ = world_.initial_challenger_policy();
      solver_policy_ = world_.initial_solver_policy();
    }
  }
  if (fresh) write_init_record();
}

LoopRunner LoopRunner::resume(const fs::path& checkpoint_dir, LoopConfig config) {
  std::ifstream in(checkpoint_dir / "state.json");
  if (!in) throw ConfigError("cannot open checkpoint: " + (checkpoint_dir / "state.json").string());
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("checkpoint is not valid JSON");
  if (!j.contains("format_version") || j["format_version"] != kCheckpointFormatVersion)
    throw ConfigError("unsupported checkpoint format_version");
  if (j.at("config_hash").get<std::string>() != config.hash())
    throw ConfigError("checkpoint was written under a different config");

  LoopRunner runner(std::move(config), /*fresh=*/false);
  if (runner.config_.shared_policy) {
    runner.shared_policy_ = CategoricalPolicy::from_json(j.at("policy"));
  } else {
    runner.challenger_policy_ = CategoricalPolicy::from_json(j.at("challenger_policy"));
    runner.solver_policy_ = CategoricalPolicy::from_json(j.at("solver_policy"));
  }
  runner.last_dataset_path_ = j.value("dataset_path", std::string());

  int iteration = j.at("iteration").get<int>();
  Phase phase = phase_from_string(j.at("phase").get<std::string>());
  runner.last_iteration_ = iteration;
  runner.last_phase_ = phase;
  switch (phase) {
    case Phase::challenger:
      runner.next_iteration_ = iteration;
      runner.next_phase_ = Phase::curation;
      break;
    case Phase::curation:
      runner.next_iteration_ = iteration;
      runner.next_phase_ = Phase::solver;
      break;
    default:
      runner.next_iteration_ = iteration + 1;
      runner.next_phase_ = Phase::challenger;
      break;
  }
  return runner;
}

CategoricalPolicy& LoopRunner::challenger_policy() {
  return config_.shared_policy ? shared_policy_ : challenger_policy_;
}
CategoricalPolicy& LoopRunner::solver_policy() {
  return config_.shared_policy ? shared_policy_ : solver_policy_;
}
const CategoricalPolicy& LoopRunner::challenger_policy() const {
  return config_.shared_policy ? shared_policy_ : challenger_policy_;
}
const CategoricalPolicy& LoopRunner::solver_policy() const {
  return config_.shared_policy ? shared_policy_ : solver_policy_;
}

void LoopRunner::set_challenger_policy(CategoricalPolicy policy) {
  if (config_.shared_policy)
    for (const auto& [state, logits] : policy.states()) shared_policy_.add_state(state, logits);
  else
    challenger_policy_ = std::move(policy);
}

void LoopRunner::set_solver_policy(CategoricalPolicy policy) {
  if (config_.shared_policy)
    for (const auto& [state, logits] : policy.states()) shared_policy_.add_state(state, logits);
  else
    solver_policy_ = std::move(policy);
}

Rng LoopRunner::phase_rng(int iteration, Phase phase) const {
  return Rng(config_.seed)
      .derive("iteration")
      .derive(static_cast<uint64_t>(iteration))
      .derive(to_string(phase));
}

fs::path LoopRunner::checkpoint_dir(int iteration, Phase phase) const {
  return out_dir_ / "checkpoints" / ("iter_" + iter_tag(iteration) + "_" + to_string(phase));
}

fs::path LoopRunner::dataset_path(int iteration) const {
  return out_dir_ / ("dataset_iter_" + iter_tag(iteration) + ".jsonl");
}

fs::path LoopRunner::rollout_path(int iteration) const {
  return out_dir_ / ("rollouts_iter_" + iter_tag(iteration) + ".jsonl");
}

std::unique_ptr<GeneratorBackend> LoopRunner::make_generator() {
  if (config_.backend == "toy")
    return std::make_unique<ToyGeneratorBackend>(world_, &challenger_policy());
  return std::make_unique<EndpointGeneratorBackend>(config_.endpoint);
}

std::unique_ptr<SolverBackend> LoopRunner::make_solver() {
  if (config_.backend == "toy")
    return std::make_unique<ToySolverBackend>(world_, &solver_policy());
  return std::make_unique<EndpointSolverBackend>(config_.endpoint);
}

void LoopRunner::write_init_record() {
  nlohmann::json rec{{"iteration", 0},
                     {"phase", "init"},
                     {"challenger_hash", hash_hex(challenger_policy().hash())},
                     {"solver_hash", hash_hex(solver_policy().hash())}};
  if (config_.backend == "toy") {
    rec["solver_accuracy_per_level"] = world_.solver_accuracy_per_level(solver_policy());
    rec["challenger_level_probs"] = world_.challenger_level_distribution(challenger_policy());
  }
  metrics_->append(rec);
}

std::vector<std::optional<double>> LoopRunner::probe_accuracies(
    const std::vector<FormatCheckResult>& formats, SolverBackend& solver, const Rng& rng) {
  std::vector<std::optional<double>> out(formats.size());
  for (size_t i = 0; i < formats.size(); ++i) {
    if (!formats[i].ok) continue;
    auto answers = solver.sample_answers(formats[i].question_text, config_.vote_samples,
                                         rng.derive(static_cast<uint64_t>(i)));
    std::vector<std::string> texts;
    texts.reserve(answers.size());
    for (auto& a : answers) texts.push_back(std::move(a.text));
    out[i] = majority_vote(texts, config_.vote_samples).p_hat;
  }
  return out;
}

void LoopRunner::run_challenger_phase(int iteration) {
  Rng rng = phase_rng(iteration, Phase::challenger);
  nlohmann::json rec{{"iteration", iteration},
                     {"phase", "challenger"},
                     {"challenger_hash_before", hash_hex(challenger_policy().hash())},
                     {"solver_hash_before", hash_hex(solver_policy().hash())}};

  auto generator = make_generator();
  auto solver = make_solver();
  if (!config_.ablations.train_challenger || !generator->trainable()) {
    rec["skipped"] = true;
    rec["challenger_hash_after"] = hash_hex(challenger_policy().hash());
    rec["solver_hash_after"] = hash_hex(solver_policy().hash());
    metrics_->append(rec);
    last_iteration_ = iteration;
    last_phase_ = Phase::challenger;
    return;
  }

  GrpoConfig gcfg{.eps_norm = config_.challenger.eps_norm,
                  .clip_eps = config_.challenger.clip_eps,
                  .kl_coeff = config_.challenger.kl,
                  .learning_rate = config_.challenger.lr,
                  .group_size = config_.challenger.group_size};
  double lambda = config_.ablations.rep_penalty_enabled ? config_.rep_lambda : 0.0;

  nlohmann::json steps = nlohmann::json::array();
  std::vector<int64_t> level_counts(config_.backend == "toy" ? world_.levels() : 0, 0);
  int format_failures = 0;
  double sum_composite = 0.0, sum_uncertainty = 0.0, sum_rep = 0.0;
  int64_t scored = 0, valid = 0;

  for (int step = 0; step < config_.challenger.steps; ++step) {
    Rng step_rng = rng.derive("step").derive(static_cast<uint64_t>(step));
    auto generations =
        generator->sample_questions(config_.challenger.batch, step_rng.derive("generate"));

    std::vector<std::string> raws;
    std::vector<FormatCheckResult> formats;
    raws.reserve(generations.size());
    for (const auto& g : generations) {
      raws.push_back(g.raw);
      formats.push_back(check_format(g.raw));
    }
    const char* probe_label = config_.reuse_uncertainty_samples ? "vote" : "probe";
    auto accuracies = probe_accuracies(formats, *solver, step_rng.derive(probe_label));
    auto breakdowns = score_batch(raws, accuracies, lambda, config_.bleu_threshold);

    std::vector<RolloutGroup> groups;
    int n_groups = config_.challenger.batch / config_.challenger.group_size;
    groups.reserve(n_groups);
    double step_composite = 0.0;
    for (int g = 0; g < n_groups; ++g) {
      RolloutGroup group;
      group.prompt_id = "iter" + std::to_string(iteration) + "-step" + std::to_string(step) +
                        "-slot" + std::to_string(g);
      for (int k = 0; k < config_.challenger.group_size; ++k) {
        size_t i = static_cast<size_t>(g) * config_.challenger.group_size + k;
        group.responses.push_back(
            {generations[i].raw, generations[i].action_path, generations[i].logprob});
        group.rewards.push_back(breakdowns[i].composite);
        step_composite += breakdowns[i].composite;
      }
      groups.push_back(std::move(group));
    }

    auto [updated, report] = grpo_step(challenger_policy(), groups, gcfg);
    challenger_policy() = std::move(updated);

    for (size_t i = 0; i < generations.size(); ++i) {
      if (!level_counts.empty() && !generations[i].action_path.empty())
        ++level_counts[generations[i].action_path.front().action];
      if (!formats[i].ok) {
        ++format_failures;
      } else {
        sum_uncertainty += breakdowns[i].r_uncertainty;
        sum_rep += breakdowns[i].r_rep;
        ++valid;
      }
      sum_composite += breakdowns[i].composite;
      ++scored;
    }
    steps.push_back({{"step", step},
                     {"mean_composite", step_composite / config_.challenger.batch},
                     {"loss", report.to_json()}});
  }

  rec["steps"] = steps;
  rec["format_failures"] = format_failures;
  rec["mean_composite"] = scored ? sum_composite / static_cast<double>(scored) : 0.0;
  rec["mean_uncertainty"] = valid ? sum_uncertainty / static_cast<double>(valid) : 0.0;
  rec["mean_r_rep"] = valid ? sum_rep / static_cast<double>(valid) : 0.0;
  if (!level_counts.empty()) {
    rec["difficulty_distribution"] = level_counts;
    rec["challenger_level_probs"] = world_.challenger_level_distribution(challenger_policy());
  }
  rec["challenger_hash_after"] = hash_hex(challenger_policy().hash());
  rec["solver_hash_after"] = hash_hex(solver_policy().hash());
  metrics_->append(rec);
  last_iteration_ = iteration;
  last_phase_ = Phase::challenger;
}

std::vector<CurationRecord> LoopRunner::run_curation_phase(int iteration) {
  Rng rng = phase_rng(iteration, Phase::curation);
  nlohmann::json rec{{"iteration", iteration},
                     {"phase", "curation"},
                     {"challenger_hash_before", hash_hex(challenger_policy().hash())},
                     {"solver_hash_before", hash_hex(solver_policy().hash())}};

  auto generator = make_generator();
  auto solver = make_solver();

  auto generations = generator->sample_questions(config_.pool_size, rng.derive("pool"));
  int format_failures = 0;
  std::vector<PoolEntry> pool;
  std::vector<int64_t> level_counts(config_.backend == "toy" ? world_.levels() : 0, 0);
  const char* vote_label = config_.reuse_uncertainty_samples ? "probe" : "vote";
  Rng vote_rng = rng.derive(vote_label);

  for (size_t i = 0; i < generations.size(); ++i) {
    auto format = check_format(generations[i].raw);
    if (!format.ok) {
      ++format_failures;
      continue;
    }
    PoolEntry entry;
    entry.question_id = "iter" + std::to_string(iteration) + "-q" + std::to_string(pool.size());
    entry.question_text = format.question_text;
    auto answers = solver.get()->sample_answers(entry.question_text, config_.vote_samples,
                                                vote_rng.derive(pool.size()));
    entry.solver_answers.reserve(answers.size());
    for (auto& a : answers) entry.solver_answers.push_back(std::move(a.text));
    if (!level_counts.empty() && !generations[i].action_path.empty())
      ++level_counts[generations[i].action_path.front().action];
    pool.push_back(std::move(entry));
  }

  auto result = build_dataset(pool, config_.band_delta, iteration,
                              config_.ablations.filter_enabled);

  fs::path path = dataset_path(iteration);
  write_dataset(path, result.records);
  // stored relative to the run directory so runs are relocatable and
  // byte-comparable across output directories
  last_dataset_path_ = path.filename().string();

  rec["pool_size"] = config_.pool_size;
  rec["format_failures"] = format_failures;
  rec["valid_questions"] = static_cast<int>(pool.size());
  rec["kept"] = result.stats.kept;
  rec["too_easy"] = result.stats.too_easy;
  rec["too_hard"] = result.stats.too_hard;
  rec["p_hat_histogram"] = result.stats.to_json()["p_hat_histogram"];
  rec["dataset_path"] = last_dataset_path_;
  if (!level_counts.empty()) rec["difficulty_distribution"] = level_counts;

  if (config_.backend == "toy" && !result.dataset.empty()) {
    int correct = 0;
    for (const auto& record : result.dataset) {
      auto q = world_.parse_question(record.question_text);
      if (q && record.pseudo_label.canonical == world_.oracle_answer(*q)) ++correct;
    }
    rec["pseudo_label_true_accuracy"] =
        static_cast<double>(correct) / static_cast<double>(result.dataset.size());
  }

  rec["challenger_hash_after"] = hash_hex(challenger_policy().hash());
  rec["solver_hash_after"] = hash_hex(solver_policy().hash());
  metrics_->append(rec);
  last_iteration_ = iteration;
  last_phase_ = Phase::curation;

  if (result.dataset.empty())
    throw EmptyCurriculumError("curation kept no questions at iteration " +
                               std::to_string(iteration) + "; the challenger is degenerate");
  return result.dataset;
}

void LoopRunner::run_solver_phase(int iteration, const std::vector<CurationRecord>& dataset) {
  if (dataset.empty())
    throw EmptyCurriculumError("solver phase requires a non-empty dataset");
  Rng rng = phase_rng(iteration, Phase::solver);
  nlohmann::json rec{{"iteration", iteration},
                     {"phase", "solver"},
                     {"challenger_hash_before", hash_hex(challenger_policy().hash())},
                     {"solver_hash_before", hash_hex(solver_policy().hash())}};

  auto solver = make_solver();
  if (!solver->trainable()) {
    // Generation-only backend: export reward-annotated rollouts for an
    // external trainer instead of updating weights.
    fs::path path = rollout_path(iteration);
    fs::path tmp = path;
    tmp += ".tmp";
    {
      std::ofstream out(tmp);
      if (!out) throw ConfigError("cannot write rollout file: " + path.string());
      out << nlohmann::json{{"format_version", 1}}.dump() << '\n';
      Rng step_rng = rng.derive("step").derive(0ull).derive("answers");
      for (size_t s = 0; s < dataset.size(); ++s) {
        auto answers = solver->sample_answers(dataset[s].question_text,
                                              config_.solver.group_size, step_rng.derive(s));
        for (const auto& a : answers) {
          out << nlohmann::json{{"question_id", dataset[s].question_id},
                                {"answer", a.text},
                                {"reward", solver_reward(a.text, dataset[s].pseudo_label)}}
                     .dump()
              << '\n';
        }
      }
    }
    fs::rename(tmp, path);
    rec["training_skipped"] = true;
    rec["rollout_path"] = path.filename().string();
    rec["challenger_hash_after"] = hash_hex(challenger_policy().hash());
    rec["solver_hash_after"] = hash_hex(solver_policy().hash());
    metrics_->append(rec);
    last_iteration_ = iteration;
    last_phase_ = Phase::solver;
    return;
  }

  GrpoConfig gcfg{.eps_norm = config_.solver.eps_norm,
                  .clip_eps = config_.solver.clip_eps,
                  .kl_coeff = config_.solver.kl,
                  .learning_rate = config_.solver.lr,
                  .group_size = config_.solver.group_size};
  int slots = config_.solver.batch / config_.solver.group_size;

  nlohmann::json steps = nlohmann::json::array();
  double sum_reward = 0.0;
  int64_t n_rewards = 0;

  for (int step = 0; step < config_.solver.steps; ++step) {
    Rng step_rng = rng.derive("step").derive(static_cast<uint64_t>(step));
    Rng draw_rng = step_rng.derive("draw");
    Rng answer_rng = step_rng.derive("answers");

    std::vector<RolloutGroup> groups;
    groups.reserve(slots);
    double step_reward = 0.0;
    for (int s = 0; s < slots; ++s) {
      size_t qi = static_cast<size_t>(
          draw_rng.derive(static_cast<uint64_t>(s))
              .next_int(0, static_cast<int64_t>(dataset.size()) - 1));
      const auto& record = dataset[qi];
      auto answers = solver->sample_answers(record.question_text, config_.solver.group_size,
                                            answer_rng.derive(static_cast<uint64_t>(s)));
      RolloutGroup group;
      group.prompt_id = record.question_id;
      for (auto& a : answers) {
        int reward = solver_reward(a.text, record.pseudo_label);
        group.responses.push_back({std::move(a.text), a.action_path, a.logprob});
        group.rewards.push_back(static_cast<double>(reward));
        step_reward += reward;
        sum_reward += reward;
        ++n_rewards;
      }
      groups.push_back(std::move(group));
    }

    auto [updated, report] = grpo_step(solver_policy(), groups, gcfg);
    solver_policy() = std::move(updated);
    steps.push_back({{"step", step},
                     {"mean_reward", step_reward / (slots * config_.solver.group_size)},
                     {"loss", report.to_json()}});
  }

  rec["steps"] = steps;
  rec["mean_reward"] = n_rewards ? sum_reward / static_cast<double>(n_rewards) : 0.0;
  if (config_.backend == "toy")
    rec["solver_accuracy_per_level"] = world_.solver_accuracy_per_level(solver_policy());
  rec["challenger_hash_after"] = hash_hex(challenger_policy().hash());
  rec["solver_hash_after"] = hash_hex(solver_policy().hash());
  metrics_->append(rec);
  last_iteration_ = iteration;
  last_phase_ = Phase::solver;
}

void LoopRunner::write_checkpoint(int iteration, Phase phase) {
  fs::path dir = checkpoint_dir(iteration, phase);
  fs::create_directories(dir);
  nlohmann::json j{{"format_version", kCheckpointFormatVersion},
                   {"config_hash", config_.hash()},
                   {"seed", config_.seed},
                   {"iteration", iteration},
                   {"phase", to_string(phase)},
                   {"shared_policy", config_.shared_policy},
                   {"dataset_path", last_dataset_path_}};
  if (config_.shared_policy) {
    j["policy"] = shared_policy_.to_json();
  } else {
    j["challenger_policy"] = challenger_policy_.to_json();
    j["solver_policy"] = solver_policy_.to_json();
  }
  write_json_atomic(dir / "state.json", j);
}

IterationState LoopRunner::run(int stop_after_iteration) {
  for (int t = next_iteration_; t <= config_.iterations; ++t) {
    std::vector<CurationRecord> dataset;
    bool have_dataset = false;

    if (next_phase_ == Phase::challenger) {
      run_challenger_phase(t);
      write_checkpoint(t, Phase::challenger);
      next_phase_ = Phase::curation;
    }
    if (next_phase_ == Phase::curation) {
      dataset = run_curation_phase(t);
      write_checkpoint(t, Phase::curation);
      next_phase_ = Phase::solver;
      have_dataset = true;
    }
    if (!have_dataset) {
      if (last_dataset_path_.empty())
        throw ConfigError("resume: checkpoint carries no dataset for the solver phase");
      for (auto& record : read_dataset(out_dir_ / last_dataset_path_))
        if (record.kept) dataset.push_back(std::move(record));
    }
    run_solver_phase(t, dataset);
    write_checkpoint(t, Phase::solver);
    next_phase_ = Phase::challenger;
    next_iteration_ = t + 1;

    if (stop_after_iteration > 0 && t >= stop_after_iteration) break;
  }
  return state();
}

IterationState LoopRunner::state() const {
  IterationState s;
  s.iteration = last_iteration_;
  s.phase = last_phase_;
  s.challenger_policy = challenger_policy();
  s.solver_policy = solver_policy();
  s.dataset_path = last_dataset_path_;
  s.metrics_path = metrics_->path().string();
  return s;
}

std::string inspect_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path.string());
  std::string first_line;
  if (!std::getline(in, first_line)) throw ConfigError("file is empty: " + path.string());
  auto header = nlohmann::json::parse(first_line, nullptr, false);
  if (header.is_discarded()) throw ConfigError("not a JSONL file: " + path.string());
  std::ostringstream out;

  if (header.contains("format_version") && !header.contains("phase")) {
    auto records = read_dataset(path);
    int kept = 0, too_easy = 0, too_hard = 0;
    std::map<std::string, int> p_hat_histogram;
    for (const auto& r : records) {
      if (r.kept)
        ++kept;
      else if (r.reject_reason == RejectReason::too_easy)
        ++too_easy;
      else
        ++too_hard;
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%g", r.p_hat);
      ++p_hat_histogram[buf];
    }
    out << "dataset: " << path.string() << "\n";
    out << "records: " << records.size() << "\n";
    out << "kept: " << kept << "\n";
    out << "too_easy: " << too_easy << "\n";
    out << "too_hard: " << too_hard << "\n";
    out << "p_hat histogram:";
    for (const auto& [k, v] : p_hat_histogram) out << " " << k << "=" << v;
    out << "\n";
    return out.str();
  }

  auto records = read_metrics(path);
  out << "metrics: " << path.string() << "\n";
  out << "records: " << records.size() << "\n";
  for (const auto& r : records) {
    out << "iteration " << r.value("iteration", -1) << " " << r.value("phase", "?");
    if (r.contains("kept"))
      out << " kept=" << r["kept"].get<int>() << " too_easy=" << r["too_easy"].get<int>()
          << " too_hard=" << r["too_hard"].get<int>();
    if (r.contains("mean_composite")) out << " mean_composite=" << r["mean_composite"].get<double>();
    if (r.contains("mean_reward")) out << " mean_reward=" << r["mean_reward"].get<double>();
    if (r.contains("pseudo_label_true_accuracy"))
      out << " label_acc=" << r["pseudo_label_true_accuracy"].get<double>();
    if (r.contains("skipped") || r.contains("training_skipped")) out << " skipped";
    out << "\n";
  }
  return out.str();
}

}  // namespace coevo
