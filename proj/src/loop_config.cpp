#include "coevo/loop_config.hpp"

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <string_view>

namespace coevo {

namespace {

void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<std::string_view> allowed,
                         const std::string& scope) {
  if (!j.is_object()) throw ConfigError("config: " + scope + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (auto k : allowed)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known) throw ConfigError("config: unknown key \"" + it.key() + "\" in " + scope);
  }
}

}  // namespace

void GrpoPhaseConfig::validate(const std::string& scope) const {
  if (steps < 0) throw ConfigError(scope + ".steps must be >= 0");
  if (group_size < 2) throw ConfigError(scope + ".group_size must be >= 2");
  if (batch < group_size) throw ConfigError(scope + ".batch must be >= group_size");
  if (batch % group_size != 0)
    throw ConfigError(scope + ".batch must be a multiple of group_size");
  if (!(lr > 0.0)) throw ConfigError(scope + ".lr must be > 0");
  if (!(kl >= 0.0)) throw ConfigError(scope + ".kl must be >= 0");
  if (!(clip_eps > 0.0 && clip_eps < 1.0)) throw ConfigError(scope + ".clip_eps must be in (0,1)");
  if (!(eps_norm > 0.0)) throw ConfigError(scope + ".eps_norm must be > 0");
}

nlohmann::json GrpoPhaseConfig::to_json() const {
  return {{"steps", steps},       {"group_size", group_size}, {"batch", batch},
          {"lr", lr},             {"kl", kl},                 {"clip_eps", clip_eps},
          {"eps_norm", eps_norm}};
}

GrpoPhaseConfig GrpoPhaseConfig::from_json(const nlohmann::json& j,
                                           const GrpoPhaseConfig& defaults,
                                           const std::string& scope) {
  reject_unknown_keys(j, {"steps", "group_size", "batch", "lr", "kl", "clip_eps", "eps_norm"},
                      scope);
  GrpoPhaseConfig c = defaults;
  if (j.contains("steps")) c.steps = j["steps"].get<int>();
  if (j.contains("group_size")) c.group_size = j["group_size"].get<int>();
  if (j.contains("batch")) c.batch = j["batch"].get<int>();
  if (j.contains("lr")) c.lr = j["lr"].get<double>();
  if (j.contains("kl")) c.kl = j["kl"].get<double>();
  if (j.contains("clip_eps")) c.clip_eps = j["clip_eps"].get<double>();
  if (j.contains("eps_norm")) c.eps_norm = j["eps_norm"].get<double>();
  return c;
}

nlohmann::json AblationConfig::to_json() const {
  return {{"train_challenger", train_challenger},
          {"filter_enabled", filter_enabled},
          {"rep_penalty_enabled", rep_penalty_enabled}};
}

AblationConfig AblationConfig::from_json(const nlohmann::json& j) {
  reject_unknown_keys(j, {"train_challenger", "filter_enabled", "rep_penalty_enabled"},
                      "ablations");
  AblationConfig c;
  if (j.contains("train_challenger")) c.train_challenger = j["train_challenger"].get<bool>();
  if (j.contains("filter_enabled")) c.filter_enabled = j["filter_enabled"].get<bool>();
  if (j.contains("rep_penalty_enabled"))
    c.rep_penalty_enabled = j["rep_penalty_enabled"].get<bool>();
  return c;
}

void LoopConfig::validate() const {
  if (iterations < 0) throw ConfigError("config: iterations must be >= 0");
  if (pool_size < 1) throw ConfigError("config: pool_size must be >= 1");
  if (vote_samples < 1) throw ConfigError("config: vote_samples must be >= 1");
  if (!(band_delta >= 0.0 && band_delta <= 0.5))
    throw ConfigError("config: band_delta must be in [0, 0.5]");
  if (!(rep_lambda >= 0.0)) throw ConfigError("config: rep_lambda must be >= 0");
  if (!(bleu_threshold >= 0.0 && bleu_threshold <= 1.0))
    throw ConfigError("config: bleu_threshold must be in [0,1]");
  challenger.validate("challenger");
  solver.validate("solver");
  if (backend != "toy" && backend != "endpoint")
    throw ConfigError("config: backend must be \"toy\" or \"endpoint\"");
  if (backend == "toy") toy.validate();
  if (backend == "endpoint") {
    endpoint.validate();
    // The remote backend is generation-only; GRPO cannot train it.
    if (ablations.train_challenger)
      throw ConfigError(
          "config: endpoint backend is generation-only; set ablations.train_challenger=false");
    if (shared_policy)
      throw ConfigError("config: shared_policy requires trainable backends");
  }
  if (output_dir.empty()) throw ConfigError("config: output_dir must not be empty");
}

nlohmann::json LoopConfig::to_json() const {
  return {{"iterations", iterations},
          {"pool_size", pool_size},
          {"vote_samples", vote_samples},
          {"band_delta", band_delta},
          {"rep_lambda", rep_lambda},
          {"bleu_threshold", bleu_threshold},
          {"challenger", challenger.to_json()},
          {"solver", solver.to_json()},
          {"ablations", ablations.to_json()},
          {"shared_policy", shared_policy},
          {"seed", seed},
          {"backend", backend},
          {"toy", toy.to_json()},
          {"endpoint", endpoint.to_json()},
          {"reuse_uncertainty_samples", reuse_uncertainty_samples},
          {"output_dir", output_dir}};
}

LoopConfig LoopConfig::from_json(const nlohmann::json& j) {
  reject_unknown_keys(j,
                      {"iterations", "pool_size", "vote_samples", "band_delta", "rep_lambda",
                       "bleu_threshold", "challenger", "solver", "ablations", "shared_policy",
                       "seed", "backend", "toy", "endpoint", "reuse_uncertainty_samples",
                       "output_dir"},
                      "top level");
  LoopConfig c;
  if (j.contains("iterations")) c.iterations = j["iterations"].get<int>();
  if (j.contains("pool_size")) c.pool_size = j["pool_size"].get<int>();
  if (j.contains("vote_samples")) c.vote_samples = j["vote_samples"].get<int>();
  if (j.contains("band_delta")) c.band_delta = j["band_delta"].get<double>();
  if (j.contains("rep_lambda")) c.rep_lambda = j["rep_lambda"].get<double>();
  if (j.contains("bleu_threshold")) c.bleu_threshold = j["bleu_threshold"].get<double>();
  if (j.contains("challenger"))
    c.challenger = GrpoPhaseConfig::from_json(j["challenger"], c.challenger, "challenger");
  if (j.contains("solver"))
    c.solver = GrpoPhaseConfig::from_json(j["solver"], c.solver, "solver");
  if (j.contains("ablations")) c.ablations = AblationConfig::from_json(j["ablations"]);
  if (j.contains("shared_policy")) c.shared_policy = j["shared_policy"].get<bool>();
  if (j.contains("seed")) c.seed = j["seed"].get<uint64_t>();
  if (j.contains("backend")) c.backend = j["backend"].get<std::string>();
  if (j.contains("toy")) {
    reject_unknown_keys(j["toy"],
                        {"difficulty_levels", "base_procedures", "shared_from_level",
                         "sharing_fraction", "operand_min", "operand_max",
                         "solver_correct_bias"},
                        "toy");
    c.toy = ToyWorldConfig::from_json(j["toy"]);
  }
  if (j.contains("endpoint")) {
    reject_unknown_keys(j["endpoint"],
                        {"base_url", "model_name", "api_key_source", "temperature", "top_p",
                         "max_in_flight", "timeout_ms", "retry"},
                        "endpoint");
    if (j["endpoint"].contains("retry"))
      reject_unknown_keys(j["endpoint"]["retry"], {"max_attempts", "backoff_ms"},
                          "endpoint.retry");
    c.endpoint = EndpointConfig::from_json(j["endpoint"]);
  }
  if (j.contains("reuse_uncertainty_samples"))
    c.reuse_uncertainty_samples = j["reuse_uncertainty_samples"].get<bool>();
  if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
  c.validate();
  return c;
}

LoopConfig LoopConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("config file is not valid JSON: " + path.string());
  return from_json(j);
}

LoopConfig LoopConfig::smoke() {
  LoopConfig c;
  c.iterations = 3;
  c.pool_size = 200;
  c.vote_samples = 10;
  c.challenger = {.steps = 5, .group_size = 4, .batch = 64, .lr = 0.4, .kl = 1e-2};
  c.solver = {.steps = 15, .group_size = 5, .batch = 40, .lr = 0.4, .kl = 1e-2};
  c.toy = {};
  c.output_dir = "coevo-out";
  return c;
}

std::string LoopConfig::hash() const {
  std::string repr = to_json().dump();
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : repr) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace coevo
