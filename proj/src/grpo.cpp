#include "coevo/grpo.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace coevo {

namespace {

bool all_finite(std::span<const double> xs) {
  return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

void RolloutGroup::validate() const {
  if (responses.size() != rewards.size())
    throw InvalidInputError("rollout group: responses and rewards differ in length");
  if (responses.size() < 2)
    throw InvalidInputError("rollout group: need at least 2 responses");
  if (!all_finite(rewards))
    throw InvalidInputError("rollout group: non-finite reward");
  for (const auto& r : responses) {
    if (!std::isfinite(r.logprob_old) || r.logprob_old > 0.0)
      throw InvalidInputError("rollout group: logprob_old must be finite and <= 0");
  }
}

void GrpoConfig::validate() const {
  if (!(eps_norm > 0.0)) throw InvalidInputError("grpo config: eps_norm must be > 0");
  if (!(clip_eps > 0.0 && clip_eps < 1.0))
    throw InvalidInputError("grpo config: clip_eps must be in (0,1)");
  if (!(kl_coeff >= 0.0)) throw InvalidInputError("grpo config: kl_coeff must be >= 0");
  if (!(learning_rate > 0.0)) throw InvalidInputError("grpo config: learning_rate must be > 0");
  if (group_size < 2) throw InvalidInputError("grpo config: group_size must be >= 2");
}

nlohmann::json LossReport::to_json() const {
  return {{"surrogate", surrogate}, {"kl", kl}, {"total", total}, {"group_count", group_count}};
}

void CategoricalPolicy::add_state(const std::string& id, std::vector<double> logits) {
  if (logits.empty()) throw InvalidInputError("policy state needs at least one action");
  if (!all_finite(logits)) throw InvalidInputError("policy logits must be finite");
  states_[id] = std::move(logits);
}

bool CategoricalPolicy::has_state(const std::string& id) const { return states_.count(id) > 0; }

const std::vector<double>& CategoricalPolicy::state_logits(const std::string& id) const {
  auto it = states_.find(id);
  if (it == states_.end()) throw InvalidInputError("unknown policy state: " + id);
  return it->second;
}

std::vector<double> CategoricalPolicy::log_probabilities(const std::string& id) const {
  const auto& z = state_logits(id);
  double zmax = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double v : z) sum += std::exp(v - zmax);
  double lse = zmax + std::log(sum);
  std::vector<double> out(z.size());
  for (size_t i = 0; i < z.size(); ++i) out[i] = z[i] - lse;
  return out;
}

std::vector<double> CategoricalPolicy::probabilities(const std::string& id) const {
  auto lp = log_probabilities(id);
  std::vector<double> out(lp.size());
  for (size_t i = 0; i < lp.size(); ++i) out[i] = std::exp(lp[i]);
  return out;
}

double CategoricalPolicy::path_logprob(std::span<const ActionStep> path) const {
  double total = 0.0;
  for (const auto& step : path) {
    auto lp = log_probabilities(step.state);
    if (step.action < 0 || static_cast<size_t>(step.action) >= lp.size())
      throw InvalidInputError("action index out of range for state " + step.state);
    total += lp[step.action];
  }
  return total;
}

void CategoricalPolicy::apply_gradient(const std::map<std::string, std::vector<double>>& grad,
                                       double lr) {
  for (const auto& [state, g] : grad) {
    auto it = states_.find(state);
    if (it == states_.end()) throw InvalidInputError("gradient for unknown state: " + state);
    if (g.size() != it->second.size())
      throw InvalidInputError("gradient width mismatch for state: " + state);
    for (size_t i = 0; i < g.size(); ++i) it->second[i] -= lr * g[i];
  }
}

uint64_t CategoricalPolicy::hash() const {
  std::string repr = to_json().dump();
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : repr) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

nlohmann::json CategoricalPolicy::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [state, logits] : states_) j[state] = logits;
  return j;
}

CategoricalPolicy CategoricalPolicy::from_json(const nlohmann::json& j) {
  CategoricalPolicy p;
  for (auto it = j.begin(); it != j.end(); ++it)
    p.add_state(it.key(), it.value().get<std::vector<double>>());
  return p;
}

AdvantageVector compute_advantages(std::span<const double> rewards, double eps_norm) {
  if (rewards.empty()) throw InvalidInputError("compute_advantages: empty reward list");
  if (!all_finite(rewards)) throw InvalidInputError("compute_advantages: non-finite reward");
  if (!(eps_norm > 0.0)) throw InvalidInputError("compute_advantages: eps_norm must be > 0");

  size_t g = rewards.size();
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= static_cast<double>(g);

  auto [lo, hi] = std::minmax_element(rewards.begin(), rewards.end());
  AdvantageVector out;
  out.values.assign(g, 0.0);
  if (*lo == *hi) return out;  // constant group: no signal, no noise

  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  var /= static_cast<double>(g);  // population variance
  double denom = std::sqrt(var) + eps_norm;
  for (size_t i = 0; i < g; ++i) out.values[i] = (rewards[i] - mean) / denom;
  return out;
}

double clipped_surrogate_loss(std::span<const double> ratios,
                              std::span<const double> advantages, double clip_eps) {
  if (ratios.size() != advantages.size() || ratios.empty())
    throw InvalidInputError("clipped_surrogate_loss: need equal-length non-empty inputs");
  if (!(clip_eps > 0.0 && clip_eps < 1.0))
    throw InvalidInputError("clipped_surrogate_loss: clip_eps must be in (0,1)");
  double sum = 0.0;
  for (size_t i = 0; i < ratios.size(); ++i) {
    double r = ratios[i];
    if (!(r > 0.0) || !std::isfinite(r))
      throw InvalidInputError("clipped_surrogate_loss: ratios must be positive");
    double clipped = std::clamp(r, 1.0 - clip_eps, 1.0 + clip_eps);
    sum += std::min(r * advantages[i], clipped * advantages[i]);
  }
  return -sum / static_cast<double>(ratios.size());
}

double kl_categorical(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size() || p.empty())
    throw InvalidInputError("kl_categorical: need equal-length non-empty distributions");
  double psum = 0.0, qsum = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i] < 0.0 || q[i] < 0.0)
      throw InvalidInputError("kl_categorical: negative probability");
    psum += p[i];
    qsum += q[i];
  }
  if (std::abs(psum - 1.0) > 1e-9 || std::abs(qsum - 1.0) > 1e-9)
    throw InvalidInputError("kl_categorical: inputs must sum to 1");
  double kl = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0)
      throw DivergenceUndefinedError("kl_categorical: q has zero mass on p's support");
    kl += p[i] * std::log(p[i] / q[i]);
  }
  return std::max(kl, 0.0);
}

namespace {

std::set<std::string> visited_states(std::span<const RolloutGroup> groups) {
  std::set<std::string> out;
  for (const auto& g : groups)
    for (const auto& r : g.responses)
      for (const auto& step : r.action_path) out.insert(step.state);
  return out;
}

}  // namespace

LossReport grpo_loss(const CategoricalPolicy& policy, const CategoricalPolicy& reference,
                     std::span<const RolloutGroup> groups, const GrpoConfig& config) {
  config.validate();
  LossReport report;
  report.group_count = static_cast<int>(groups.size());
  if (groups.empty()) return report;

  double surrogate = 0.0;
  for (const auto& group : groups) {
    group.validate();
    auto advantages = compute_advantages(group.rewards, config.eps_norm);
    std::vector<double> ratios(group.responses.size());
    for (size_t i = 0; i < group.responses.size(); ++i) {
      double lp = policy.path_logprob(group.responses[i].action_path);
      ratios[i] = std::exp(lp - group.responses[i].logprob_old);
    }
    surrogate += clipped_surrogate_loss(ratios, advantages.values, config.clip_eps);
  }
  report.surrogate = surrogate / static_cast<double>(groups.size());

  // Exact KL over every state any path visits; states factorize, so the sum
  // is the divergence of the product policy over those states.
  double kl = 0.0;
  for (const auto& state : visited_states(groups))
    kl += kl_categorical(policy.probabilities(state), reference.probabilities(state));
  report.kl = kl;
  report.total = report.surrogate + config.kl_coeff * report.kl;
  return report;
}

GradientMap grpo_gradient(const CategoricalPolicy& policy, const CategoricalPolicy& reference,
                          std::span<const RolloutGroup> groups, const GrpoConfig& config) {
  config.validate();
  GradientMap grad;
  auto slot = [&grad, &policy](const std::string& state) -> std::vector<double>& {
    auto [it, inserted] = grad.try_emplace(state);
    if (inserted) it->second.assign(policy.state_logits(state).size(), 0.0);
    return it->second;
  };

  double group_norm = groups.empty() ? 1.0 : 1.0 / static_cast<double>(groups.size());
  for (const auto& group : groups) {
    group.validate();
    auto advantages = compute_advantages(group.rewards, config.eps_norm);
    double g_size = static_cast<double>(group.responses.size());
    for (size_t i = 0; i < group.responses.size(); ++i) {
      const auto& sample = group.responses[i];
      double adv = advantages.values[i];
      double ratio = std::exp(policy.path_logprob(sample.action_path) - sample.logprob_old);
      double clipped = std::clamp(ratio, 1.0 - config.clip_eps, 1.0 + config.clip_eps);
      // Gradient flows through the selected min branch; a selected clipped
      // branch outside the clip range is constant in theta.
      bool unclipped_active = ratio * adv <= clipped * adv;
      if (!unclipped_active && (ratio < 1.0 - config.clip_eps || ratio > 1.0 + config.clip_eps))
        continue;
      double w = -group_norm / g_size * adv * ratio;  // d surrogate / d logprob
      for (const auto& step : sample.action_path) {
        auto& g = slot(step.state);
        auto probs = policy.probabilities(step.state);
        for (size_t b = 0; b < g.size(); ++b) g[b] -= w * probs[b];
        g[static_cast<size_t>(step.action)] += w;
      }
    }
  }

  if (config.kl_coeff > 0.0) {
    for (const auto& state : visited_states(groups)) {
      auto p = policy.probabilities(state);
      auto q = reference.probabilities(state);
      double kl = kl_categorical(p, q);
      auto& g = slot(state);
      for (size_t b = 0; b < g.size(); ++b)
        g[b] += config.kl_coeff * p[b] * (std::log(p[b] / q[b]) - kl);
    }
  }
  return grad;
}

std::pair<CategoricalPolicy, LossReport> grpo_step(
    const CategoricalPolicy& policy, std::span<const RolloutGroup> groups,
    const GrpoConfig& config, const std::optional<CategoricalPolicy>& reference) {
  const CategoricalPolicy& ref = reference ? *reference : policy;
  LossReport report = grpo_loss(policy, ref, groups, config);
  GradientMap grad = grpo_gradient(policy, ref, groups, config);
  CategoricalPolicy updated = policy;
  updated.apply_gradient(grad, config.learning_rate);
  return {std::move(updated), report};
}

}  // namespace coevo
