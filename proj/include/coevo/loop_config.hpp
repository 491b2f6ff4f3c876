#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "coevo/endpoint_client.hpp"
#include "coevo/errors.hpp"
#include "coevo/toy_world.hpp"

namespace coevo {

// GRPO schedule for one role.
struct GrpoPhaseConfig {
  int steps = 5;
  int group_size = 4;
  int batch = 128;  // generations (or question slots) scored per step
  double lr = 1e-6;
  double kl = 1e-2;
  double clip_eps = 0.2;
  double eps_norm = 1e-6;

  void validate(const std::string& scope) const;
  nlohmann::json to_json() const;
  static GrpoPhaseConfig from_json(const nlohmann::json& j, const GrpoPhaseConfig& defaults,
                                   const std::string& scope);
};

struct AblationConfig {
  bool train_challenger = true;
  bool filter_enabled = true;
  bool rep_penalty_enabled = true;

  nlohmann::json to_json() const;
  static AblationConfig from_json(const nlohmann::json& j);
};

// Every knob of the co-evolution loop. Field names mirror the config file
// schema exactly; unknown keys in a file are rejected.
struct LoopConfig {
  int iterations = 3;
  int pool_size = 8000;
  int vote_samples = 10;
  double band_delta = 0.25;
  double rep_lambda = 1.0;
  double bleu_threshold = 0.5;
  GrpoPhaseConfig challenger{.steps = 5, .group_size = 4, .batch = 128, .lr = 1e-6, .kl = 1e-2};
  GrpoPhaseConfig solver{.steps = 15, .group_size = 5, .batch = 128, .lr = 1e-6, .kl = 1e-2};
  AblationConfig ablations;
  bool shared_policy = false;
  uint64_t seed = 0;
  std::string backend = "toy";  // "toy" | "endpoint"
  ToyWorldConfig toy;
  EndpointConfig endpoint;
  bool reuse_uncertainty_samples = false;
  std::string output_dir = "coevo-out";

  void validate() const;
  nlohmann::json to_json() const;
  static LoopConfig from_json(const nlohmann::json& j);
  static LoopConfig load(const std::filesystem::path& path);

  // Paper-scale schedule shrunk to desk scale: small pool, fast toy learning
  // rates, the same band and penalty settings.
  static LoopConfig smoke();

  // Stable hash of the full config (checkpoint compatibility checks).
  std::string hash() const;
};

}  // namespace coevo
