#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "coevo/backends.hpp"
#include "coevo/errors.hpp"
#include "coevo/prompts.hpp"

namespace coevo {

struct RetryPolicy {
  int max_attempts = 3;
  int backoff_ms = 200;  // doubled after each failed attempt

  void validate() const;
};

// Remote chat-completions endpoint. The API key is read from the environment
// variable named in api_key_source and sent as a bearer credential; an empty
// name means anonymous access (local mocks).
struct EndpointConfig {
  std::string base_url;  // e.g. http://127.0.0.1:8080
  std::string model_name;
  std::string api_key_source;
  double temperature = 1.0;
  double top_p = 0.99;
  int max_in_flight = 4;
  int timeout_ms = 30000;
  RetryPolicy retry;

  void validate() const;
  nlohmann::json to_json() const;
  static EndpointConfig from_json(const nlohmann::json& j);
};

// Issues n single-completion requests (up to max_in_flight concurrently)
// and returns the n texts in request order. n == 0 returns an empty list
// without touching the network. Connection failures and 5xx/429 statuses
// are retried per the retry policy; exhaustion raises TransportError with
// the last status.
std::vector<std::string> endpoint_sample(const EndpointConfig& config,
                                         const std::string& system_prompt,
                                         const std::string& user_prompt, int n);

// Generation-only challenger: samples questions with the fixed challenger
// prompt. Not trainable; GRPO never sees these rollouts.
class EndpointGeneratorBackend : public GeneratorBackend {
 public:
  explicit EndpointGeneratorBackend(EndpointConfig config) : config_(std::move(config)) {}
  bool trainable() const override { return false; }
  std::vector<GeneratedQuestion> sample_questions(int n, const Rng& rng) override;

 private:
  EndpointConfig config_;
};

class EndpointSolverBackend : public SolverBackend {
 public:
  explicit EndpointSolverBackend(EndpointConfig config) : config_(std::move(config)) {}
  bool trainable() const override { return false; }
  std::vector<SampledAnswer> sample_answers(const std::string& question, int m,
                                            const Rng& rng) override;

 private:
  EndpointConfig config_;
};

}  // namespace coevo
