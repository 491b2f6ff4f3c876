#include "coevo/toy_world.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace coevo {

namespace {

constexpr const char* kOpWords[] = {"plus", "minus", "times"};

int op_index(int level) { return level % 3; }

int64_t apply_op(int level, int64_t a, int64_t b) {
  switch (op_index(level)) {
    case 0: return a + b;
    case 1: return a - b;
    default: return a * b;
  }
}

}  // namespace

void ToyWorldConfig::validate() const {
  if (difficulty_levels < 1) throw ConfigError("toy: difficulty_levels must be >= 1");
  if (base_procedures < 2) throw ConfigError("toy: base_procedures must be >= 2");
  if (shared_from_level < 0) throw ConfigError("toy: shared_from_level must be >= 0");
  if (!(sharing_fraction >= 0.0 && sharing_fraction <= 1.0))
    throw ConfigError("toy: sharing_fraction must be in [0,1]");
  if (operand_min > operand_max) throw ConfigError("toy: operand range is empty");
  if (!std::isfinite(solver_correct_bias)) throw ConfigError("toy: bias must be finite");
}

nlohmann::json ToyWorldConfig::to_json() const {
  return {{"difficulty_levels", difficulty_levels},
          {"base_procedures", base_procedures},
          {"shared_from_level", shared_from_level},
          {"sharing_fraction", sharing_fraction},
          {"operand_min", operand_min},
          {"operand_max", operand_max},
          {"solver_correct_bias", solver_correct_bias}};
}

ToyWorldConfig ToyWorldConfig::from_json(const nlohmann::json& j) {
  ToyWorldConfig c;
  if (j.contains("difficulty_levels")) c.difficulty_levels = j["difficulty_levels"].get<int>();
  if (j.contains("base_procedures")) c.base_procedures = j["base_procedures"].get<int>();
  if (j.contains("shared_from_level")) c.shared_from_level = j["shared_from_level"].get<int>();
  if (j.contains("sharing_fraction")) c.sharing_fraction = j["sharing_fraction"].get<double>();
  if (j.contains("operand_min")) c.operand_min = j["operand_min"].get<int64_t>();
  if (j.contains("operand_max")) c.operand_max = j["operand_max"].get<int64_t>();
  if (j.contains("solver_correct_bias"))
    c.solver_correct_bias = j["solver_correct_bias"].get<double>();
  return c;
}

ToyWorld::ToyWorld(ToyWorldConfig config) : config_(config) { config_.validate(); }

int ToyWorld::procedure_count(int level) const {
  if (level < 0 || level >= config_.difficulty_levels)
    throw InvalidInputError("toy: unknown difficulty level " + std::to_string(level));
  return config_.base_procedures + level;
}

int ToyWorld::shared_distractors(int level) const {
  int distractors = procedure_count(level) - 1;
  if (level < config_.shared_from_level) return 0;
  return std::min(distractors,
                  static_cast<int>(std::lround(config_.sharing_fraction * distractors)));
}

std::string ToyWorld::level_state(int level) const {
  procedure_count(level);  // range check
  return "level-" + std::to_string(level);
}

ToyWorld::Question ToyWorld::make_question(int level, Rng rng) const {
  procedure_count(level);  // range check
  Question q;
  q.level = level;
  q.a = rng.next_int(config_.operand_min, config_.operand_max);
  q.b = rng.next_int(config_.operand_min, config_.operand_max);
  q.text = "Level " + std::to_string(level) + ": what is " + std::to_string(q.a) + " " +
           kOpWords[op_index(level)] + " " + std::to_string(q.b) + "?";
  return q;
}

std::optional<ToyWorld::Question> ToyWorld::parse_question(std::string_view text) const {
  auto eat = [&text](std::string_view prefix) {
    if (text.substr(0, prefix.size()) != prefix) return false;
    text.remove_prefix(prefix.size());
    return true;
  };
  auto read_int = [&text](int64_t& out) {
    size_t len = 0;
    if (len < text.size() && text[len] == '-') ++len;
    while (len < text.size() && std::isdigit(static_cast<unsigned char>(text[len]))) ++len;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + len, out);
    if (ec != std::errc() || ptr != text.data() + len || len == 0) return false;
    text.remove_prefix(len);
    return true;
  };

  Question q;
  int64_t level = 0;
  if (!eat("Level ") || !read_int(level) || !eat(": what is ")) return std::nullopt;
  if (level < 0 || level >= config_.difficulty_levels) return std::nullopt;
  q.level = static_cast<int>(level);
  if (!read_int(q.a) || !eat(" ") || !eat(kOpWords[op_index(q.level)]) || !eat(" ") ||
      !read_int(q.b) || !eat("?") || !text.empty())
    return std::nullopt;
  q.text = "Level " + std::to_string(q.level) + ": what is " + std::to_string(q.a) + " " +
           kOpWords[op_index(q.level)] + " " + std::to_string(q.b) + "?";
  return q;
}

std::string ToyWorld::oracle_answer(const Question& q) const {
  return std::to_string(apply_op(q.level, q.a, q.b));
}

std::string ToyWorld::procedure_answer(const Question& q, int procedure) const {
  int total = procedure_count(q.level);
  if (procedure < 0 || procedure >= total)
    throw InvalidInputError("toy: procedure index out of range");
  int64_t truth = apply_op(q.level, q.a, q.b);
  if (procedure == 0) return std::to_string(truth);
  // Shared distractors all make the same systematic mistake; the rest are
  // off by a procedure-specific amount. Every distractor differs from the
  // oracle, and the shared answer differs from every idiosyncratic one.
  int shared = shared_distractors(q.level);
  if (procedure <= shared) return std::to_string(truth + 10);
  return std::to_string(truth - (procedure - shared));
}

std::string ToyWorld::render_generation(const Question& q) const {
  return "<question>" + q.text + "</question>\n\\boxed{" + oracle_answer(q) + "}";
}

CategoricalPolicy ToyWorld::initial_challenger_policy() const {
  CategoricalPolicy p;
  p.add_state(kChallengerState, std::vector<double>(config_.difficulty_levels, 0.0));
  return p;
}

CategoricalPolicy ToyWorld::initial_solver_policy() const {
  CategoricalPolicy p;
  for (int level = 0; level < config_.difficulty_levels; ++level) {
    std::vector<double> logits(procedure_count(level), 0.0);
    logits[0] = config_.solver_correct_bias;
    p.add_state(level_state(level), std::move(logits));
  }
  return p;
}

CategoricalPolicy ToyWorld::solver_policy_with_accuracies(
    std::span<const double> accuracies) const {
  if (static_cast<int>(accuracies.size()) != config_.difficulty_levels)
    throw InvalidInputError("toy: need one accuracy per difficulty level");
  CategoricalPolicy p;
  for (int level = 0; level < config_.difficulty_levels; ++level) {
    double acc = accuracies[level];
    if (!(acc > 0.0 && acc < 1.0))
      throw InvalidInputError("toy: accuracies must lie strictly inside (0,1)");
    int total = procedure_count(level);
    // Wrong mass concentrates on the first distractor so the majority answer
    // share tracks max(acc, 1-acc) and the uncertainty signal peaks at 1/2.
    constexpr double kTrace = 1e-9;
    double residual = 1.0 - acc - kTrace * std::max(0, total - 2);
    std::vector<double> logits(total);
    logits[0] = std::log(acc);
    if (total > 1) logits[1] = std::log(std::max(residual, kTrace));
    for (int k = 2; k < total; ++k) logits[k] = std::log(kTrace);
    p.add_state(level_state(level), std::move(logits));
  }
  return p;
}

std::vector<double> ToyWorld::solver_accuracy_per_level(const CategoricalPolicy& solver) const {
  std::vector<double> out;
  out.reserve(config_.difficulty_levels);
  for (int level = 0; level < config_.difficulty_levels; ++level)
    out.push_back(solver.probabilities(level_state(level))[0]);
  return out;
}

std::vector<double> ToyWorld::challenger_level_distribution(
    const CategoricalPolicy& challenger) const {
  return challenger.probabilities(kChallengerState);
}

std::vector<GeneratedQuestion> toy_sample_questions(const ToyWorld& world,
                                                    const CategoricalPolicy& challenger,
                                                    int n, const Rng& rng) {
  if (n < 0) throw InvalidInputError("toy_sample_questions: n must be >= 0");
  auto probs = challenger.probabilities(ToyWorld::kChallengerState);
  auto logps = challenger.log_probabilities(ToyWorld::kChallengerState);
  if (static_cast<int>(probs.size()) != world.levels())
    throw InvalidInputError("toy_sample_questions: policy width != difficulty levels");

  std::vector<GeneratedQuestion> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    Rng item = rng.derive(static_cast<uint64_t>(i));
    int level = static_cast<int>(item.categorical(probs));
    auto q = world.make_question(level, item.derive("operands"));
    GeneratedQuestion g;
    g.raw = world.render_generation(q);
    g.action_path = {{ToyWorld::kChallengerState, level}};
    g.logprob = logps[level];
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<SampledAnswer> toy_sample_answers(const ToyWorld& world,
                                              const CategoricalPolicy& solver,
                                              const std::string& question_text, int m,
                                              const Rng& rng) {
  if (m < 0) throw InvalidInputError("toy_sample_answers: m must be >= 0");
  auto parsed = world.parse_question(question_text);
  if (!parsed)
    throw InvalidInputError("toy_sample_answers: not a toy question of a known level: " +
                            question_text);
  std::string state = world.level_state(parsed->level);
  auto probs = solver.probabilities(state);
  auto logps = solver.log_probabilities(state);
  if (static_cast<int>(probs.size()) != world.procedure_count(parsed->level))
    throw InvalidInputError("toy_sample_answers: policy width != procedure count");

  std::vector<SampledAnswer> out;
  out.reserve(m);
  for (int j = 0; j < m; ++j) {
    Rng item = rng.derive(static_cast<uint64_t>(j));
    int procedure = static_cast<int>(item.categorical(probs));
    SampledAnswer a;
    a.text = "\\boxed{" + world.procedure_answer(*parsed, procedure) + "}";
    a.action_path = {{state, procedure}};
    a.logprob = logps[procedure];
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace coevo
