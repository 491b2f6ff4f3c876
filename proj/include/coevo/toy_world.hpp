#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "coevo/backends.hpp"
#include "coevo/grpo.hpp"
#include "coevo/rng.hpp"

namespace coevo {

// Desk-scale trainable world. Each difficulty level owns an integer-arithmetic
// question template and a set of answering procedures: procedure 0 computes
// the true answer, the rest are systematic mistakes. Higher levels have more
// procedures, so an untrained solver's accuracy falls with level and the
// generator has a real frontier to find.
//
// Distractors come in two kinds. "Shared" distractors all land on the same
// plausible wrong answer (the same mistake made consistently), which lets a
// majority vote become confidently wrong; the rest produce wrong answers
// unique to the procedure. Levels below shared_from_level have no shared
// distractors.
struct ToyWorldConfig {
  int difficulty_levels = 6;
  int base_procedures = 2;      // level l has base_procedures + l procedures
  int shared_from_level = 99;   // first level with shared distractors
  double sharing_fraction = 0.0;  // fraction of a level's distractors that share
  int64_t operand_min = 10;
  int64_t operand_max = 99;
  double solver_correct_bias = 1.3862943611198906;  // ln 4

  void validate() const;
  nlohmann::json to_json() const;
  static ToyWorldConfig from_json(const nlohmann::json& j);
};

class ToyWorld {
 public:
  static constexpr const char* kChallengerState = "difficulty";

  explicit ToyWorld(ToyWorldConfig config);

  const ToyWorldConfig& config() const { return config_; }
  int levels() const { return config_.difficulty_levels; }
  int procedure_count(int level) const;
  int shared_distractors(int level) const;
  std::string level_state(int level) const;

  struct Question {
    int level = 0;
    int64_t a = 0;
    int64_t b = 0;
    std::string text;
  };

  Question make_question(int level, Rng rng) const;
  // Recovers (level, operands) from rendered question text.
  std::optional<Question> parse_question(std::string_view text) const;

  std::string oracle_answer(const Question& q) const;
  // procedure 0 is the oracle; k >= 1 are distractors, never equal to it.
  std::string procedure_answer(const Question& q, int procedure) const;

  // Full generator output: <question> block plus the boxed self-answer.
  std::string render_generation(const Question& q) const;

  // Uniform logits over difficulty levels.
  CategoricalPolicy initial_challenger_policy() const;
  // Correct procedure gets solver_correct_bias extra logit at every level.
  CategoricalPolicy initial_solver_policy() const;
  // Per-level policy with softmax(correct) == accuracies[l] and the wrong
  // mass concentrated on the first distractor.
  CategoricalPolicy solver_policy_with_accuracies(std::span<const double> accuracies) const;

  // Exact per-level probability of choosing the oracle procedure.
  std::vector<double> solver_accuracy_per_level(const CategoricalPolicy& solver) const;
  // Exact distribution over levels under the challenger policy.
  std::vector<double> challenger_level_distribution(const CategoricalPolicy& challenger) const;

 private:
  ToyWorldConfig config_;
};

// Samples one difficulty level per question from the challenger softmax and
// instantiates that level's template with seeded operands. Deterministic in
// (policy, rng).
std::vector<GeneratedQuestion> toy_sample_questions(const ToyWorld& world,
                                                    const CategoricalPolicy& challenger,
                                                    int n, const Rng& rng);

// Samples one procedure per answer from the question's level softmax.
// The question text must parse as a toy question of a known level.
std::vector<SampledAnswer> toy_sample_answers(const ToyWorld& world,
                                              const CategoricalPolicy& solver,
                                              const std::string& question_text,
                                              int m, const Rng& rng);

class ToyGeneratorBackend : public GeneratorBackend {
 public:
  ToyGeneratorBackend(const ToyWorld& world, const CategoricalPolicy* policy)
      : world_(&world), policy_(policy) {}
  bool trainable() const override { return true; }
  std::vector<GeneratedQuestion> sample_questions(int n, const Rng& rng) override {
    return toy_sample_questions(*world_, *policy_, n, rng);
  }

 private:
  const ToyWorld* world_;
  const CategoricalPolicy* policy_;  // live view of the evolving policy
};

class ToySolverBackend : public SolverBackend {
 public:
  ToySolverBackend(const ToyWorld& world, const CategoricalPolicy* policy)
      : world_(&world), policy_(policy) {}
  bool trainable() const override { return true; }
  std::vector<SampledAnswer> sample_answers(const std::string& question, int m,
                                            const Rng& rng) override {
    return toy_sample_answers(*world_, *policy_, question, m, rng);
  }

 private:
  const ToyWorld* world_;
  const CategoricalPolicy* policy_;
};

}  // namespace coevo
