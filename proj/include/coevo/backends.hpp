#pragma once

#include <string>
#include <vector>

#include "coevo/grpo.hpp"
#include "coevo/rng.hpp"

namespace coevo {

// A raw generation from a question generator. Trainable backends fill the
// action path and log-probability; generation-only backends leave them empty.
struct GeneratedQuestion {
  std::string raw;
  std::vector<ActionStep> action_path;
  double logprob = 0.0;
};

struct SampledAnswer {
  std::string text;
  std::vector<ActionStep> action_path;
  double logprob = 0.0;
};

// The question-generating side of the loop.
class GeneratorBackend {
 public:
  virtual ~GeneratorBackend() = default;
  virtual bool trainable() const = 0;
  // Returns exactly n raw generations.
  virtual std::vector<GeneratedQuestion> sample_questions(int n, const Rng& rng) = 0;
};

// The answering side of the loop.
class SolverBackend {
 public:
  virtual ~SolverBackend() = default;
  virtual bool trainable() const = 0;
  // Returns exactly m answers to the given question.
  virtual std::vector<SampledAnswer> sample_answers(const std::string& question,
                                                    int m, const Rng& rng) = 0;
};

}  // namespace coevo
