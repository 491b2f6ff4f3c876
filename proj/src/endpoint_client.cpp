#include "coevo/endpoint_client.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <thread>

#include <httplib.h>

namespace coevo {

namespace {

constexpr const char* kChatPath = "/v1/chat/completions";

bool retryable(int status) { return status == 0 || status == 429 || status >= 500; }

std::string bearer_token(const EndpointConfig& config) {
  if (config.api_key_source.empty()) return {};
  const char* value = std::getenv(config.api_key_source.c_str());
  if (value == nullptr || *value == '\0')
    throw ConfigError("endpoint credentials missing: environment variable " +
                      config.api_key_source + " is not set");
  return value;
}

// One completion request, with retries. Returns choices[0].message.content.
std::string fetch_one(const EndpointConfig& config, const std::string& token,
                      const std::string& body) {
  int last_status = 0;
  std::string last_error = "no response";
  int backoff_ms = config.retry.backoff_ms;
  for (int attempt = 1; attempt <= config.retry.max_attempts; ++attempt) {
    if (attempt > 1) {
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
      backoff_ms *= 2;
    }
    httplib::Client client(config.base_url);
    client.set_connection_timeout(std::chrono::milliseconds(config.timeout_ms));
    client.set_read_timeout(std::chrono::milliseconds(config.timeout_ms));
    httplib::Headers headers;
    if (!token.empty()) headers.emplace("Authorization", "Bearer " + token);

    auto res = client.Post(kChatPath, headers, body, "application/json");
    if (!res) {
      last_status = 0;
      last_error = "connection failure: " + httplib::to_string(res.error());
      continue;
    }
    last_status = res->status;
    if (res->status == 200) {
      auto j = nlohmann::json::parse(res->body, nullptr, false);
      if (j.is_discarded() || !j.contains("choices") || j["choices"].empty())
        throw TransportError("endpoint returned an unparseable completion body", res->status);
      return j["choices"][0].at("message").at("content").get<std::string>();
    }
    last_error = "status " + std::to_string(res->status);
    if (!retryable(res->status)) break;
  }
  throw TransportError("endpoint request failed after retries: " + last_error, last_status);
}

}  // namespace

void RetryPolicy::validate() const {
  if (max_attempts < 1) throw ConfigError("endpoint: retry.max_attempts must be >= 1");
  if (backoff_ms < 0) throw ConfigError("endpoint: retry.backoff_ms must be >= 0");
}

void EndpointConfig::validate() const {
  if (base_url.empty()) throw ConfigError("endpoint: base_url is required");
  if (!(temperature >= 0.0)) throw ConfigError("endpoint: temperature must be >= 0");
  if (!(top_p > 0.0 && top_p <= 1.0)) throw ConfigError("endpoint: top_p must be in (0,1]");
  if (max_in_flight < 1) throw ConfigError("endpoint: max_in_flight must be >= 1");
  if (timeout_ms < 1) throw ConfigError("endpoint: timeout_ms must be >= 1");
  retry.validate();
}

nlohmann::json EndpointConfig::to_json() const {
  return {{"base_url", base_url},
          {"model_name", model_name},
          {"api_key_source", api_key_source},
          {"temperature", temperature},
          {"top_p", top_p},
          {"max_in_flight", max_in_flight},
          {"timeout_ms", timeout_ms},
          {"retry", {{"max_attempts", retry.max_attempts}, {"backoff_ms", retry.backoff_ms}}}};
}

EndpointConfig EndpointConfig::from_json(const nlohmann::json& j) {
  EndpointConfig c;
  if (j.contains("base_url")) c.base_url = j["base_url"].get<std::string>();
  if (j.contains("model_name")) c.model_name = j["model_name"].get<std::string>();
  if (j.contains("api_key_source")) c.api_key_source = j["api_key_source"].get<std::string>();
  if (j.contains("temperature")) c.temperature = j["temperature"].get<double>();
  if (j.contains("top_p")) c.top_p = j["top_p"].get<double>();
  if (j.contains("max_in_flight")) c.max_in_flight = j["max_in_flight"].get<int>();
  if (j.contains("timeout_ms")) c.timeout_ms = j["timeout_ms"].get<int>();
  if (j.contains("retry")) {
    const auto& r = j["retry"];
    if (r.contains("max_attempts")) c.retry.max_attempts = r["max_attempts"].get<int>();
    if (r.contains("backoff_ms")) c.retry.backoff_ms = r["backoff_ms"].get<int>();
  }
  return c;
}

std::vector<std::string> endpoint_sample(const EndpointConfig& config,
                                         const std::string& system_prompt,
                                         const std::string& user_prompt, int n) {
  if (n < 0) throw InvalidInputError("endpoint_sample: n must be >= 0");
  if (n == 0) return {};
  config.validate();
  std::string token = bearer_token(config);

  nlohmann::json request = {
      {"model", config.model_name},
      {"messages",
       {{{"role", "system"}, {"content", system_prompt}},
        {{"role", "user"}, {"content", user_prompt}}}},
      {"temperature", config.temperature},
      {"top_p", config.top_p},
      {"n", 1}};
  std::string body = request.dump();

  std::vector<std::string> results(n);
  int workers = std::min(config.max_in_flight, n);
  if (workers == 1) {
    for (int i = 0; i < n; ++i) results[i] = fetch_one(config, token, body);
    return results;
  }

  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1))
          results[i] = fetch_one(config, token, body);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& err : errors)
    if (err) std::rethrow_exception(err);
  return results;
}

std::vector<GeneratedQuestion> EndpointGeneratorBackend::sample_questions(int n, const Rng&) {
  auto prompts = render_prompts(Role::challenger);
  auto texts = endpoint_sample(config_, prompts.system, prompts.user, n);
  std::vector<GeneratedQuestion> out;
  out.reserve(texts.size());
  for (auto& t : texts) out.push_back({std::move(t), {}, 0.0});
  return out;
}

std::vector<SampledAnswer> EndpointSolverBackend::sample_answers(const std::string& question,
                                                                 int m, const Rng&) {
  auto prompts = render_prompts(Role::solver, question);
  auto texts = endpoint_sample(config_, prompts.system, prompts.user, m);
  std::vector<SampledAnswer> out;
  out.reserve(texts.size());
  for (auto& t : texts) out.push_back({std::move(t), {}, 0.0});
  return out;
}

}  // namespace coevo
