#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "coevo/errors.hpp"

namespace coevo {

// One decision taken while generating a response: which action was sampled
// in which policy state. Trainable categorical backends record these so the
// optimizer can recompute path probabilities; generation-only backends leave
// paths empty.
struct ActionStep {
  std::string state;
  int action = 0;

  bool operator==(const ActionStep&) const = default;
};

struct ResponseSample {
  std::string text;
  std::vector<ActionStep> action_path;
  double logprob_old = 0.0;  // log-probability under the sampling policy
};

// A prompt's G sampled responses with their scalar rewards: the unit of
// credit assignment for group-relative advantages.
struct RolloutGroup {
  std::string prompt_id;
  std::vector<ResponseSample> responses;
  std::vector<double> rewards;

  void validate() const;
};

struct AdvantageVector {
  std::vector<double> values;
};

struct GrpoConfig {
  double eps_norm = 1e-6;    // z-score stabilizer
  double clip_eps = 0.2;     // PPO clip width
  double kl_coeff = 0.0;     // beta
  double learning_rate = 1e-6;
  int group_size = 4;

  void validate() const;
};

struct LossReport {
  double surrogate = 0.0;
  double kl = 0.0;
  double total = 0.0;
  int group_count = 0;

  nlohmann::json to_json() const;
};

// Tabular softmax policy: a logit vector per named state.
class CategoricalPolicy {
 public:
  CategoricalPolicy() = default;

  void add_state(const std::string& id, std::vector<double> logits);
  bool has_state(const std::string& id) const;
  const std::vector<double>& state_logits(const std::string& id) const;
  const std::map<std::string, std::vector<double>>& states() const { return states_; }

  std::vector<double> probabilities(const std::string& id) const;
  std::vector<double> log_probabilities(const std::string& id) const;
  double path_logprob(std::span<const ActionStep> path) const;

  // In-place gradient-descent update: logits -= lr * grad.
  void apply_gradient(const std::map<std::string, std::vector<double>>& grad, double lr);

  // Stable content hash of the serialized logits (phase-isolation checks).
  uint64_t hash() const;

  nlohmann::json to_json() const;
  static CategoricalPolicy from_json(const nlohmann::json& j);

 private:
  std::map<std::string, std::vector<double>> states_;
};

using GradientMap = std::map<std::string, std::vector<double>>;

// Z-score advantages with population (1/G) standard deviation. A group with
// identical rewards yields all zeros rather than noise divided by eps_norm.
AdvantageVector compute_advantages(std::span<const double> rewards, double eps_norm);

// -(1/G) * sum_i min(ratio_i * A_i, clip(ratio_i, 1-eps, 1+eps) * A_i).
// The KL penalty is NOT part of this term.
double clipped_surrogate_loss(std::span<const double> ratios,
                              std::span<const double> advantages, double clip_eps);

// sum_i p_i * ln(p_i / q_i), with 0 * ln(0/q) == 0. Throws
// DivergenceUndefinedError when q is zero somewhere p is positive.
double kl_categorical(std::span<const double> p, std::span<const double> q);

// Evaluates L = mean-over-groups clipped surrogate + beta * KL(policy || reference),
// where the KL is the closed-form sum over states visited by any action path.
LossReport grpo_loss(const CategoricalPolicy& policy, const CategoricalPolicy& reference,
                     std::span<const RolloutGroup> groups, const GrpoConfig& config);

// Analytic gradient of grpo_loss with respect to every visited logit.
GradientMap grpo_gradient(const CategoricalPolicy& policy, const CategoricalPolicy& reference,
                          std::span<const RolloutGroup> groups, const GrpoConfig& config);

// One gradient-descent step. The KL reference defaults to the pre-update
// policy itself (the penalty as written penalizes drift from the sampling
// snapshot); pass an explicit snapshot to penalize against a frozen policy.
std::pair<CategoricalPolicy, LossReport> grpo_step(
    const CategoricalPolicy& policy, std::span<const RolloutGroup> groups,
    const GrpoConfig& config,
    const std::optional<CategoricalPolicy>& reference = std::nullopt);

}  // namespace coevo
