#include "coevo/challenger_reward.hpp"

#include <algorithm>
#include <cmath>

#include "coevo/curation.hpp"

namespace coevo {

namespace {

constexpr std::string_view kOpenTag = "<question>";
constexpr std::string_view kCloseTag = "</question>";

int count_occurrences(std::string_view haystack, std::string_view needle) {
  int count = 0;
  size_t pos = 0;
  while ((pos = haystack.find(needle, pos)) != std::string_view::npos) {
    ++count;
    pos += needle.size();
  }
  return count;
}

std::string_view trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

FormatCheckResult check_format(std::string_view raw) {
  FormatCheckResult result;
  int opens = count_occurrences(raw, kOpenTag);
  int closes = count_occurrences(raw, kCloseTag);
  if (opens != 1 || closes != 1) return result;
  size_t open_pos = raw.find(kOpenTag);
  size_t close_pos = raw.find(kCloseTag);
  if (close_pos < open_pos) return result;
  std::string_view interior =
      trim(raw.substr(open_pos + kOpenTag.size(), close_pos - open_pos - kOpenTag.size()));
  if (interior.empty()) return result;

  result.ok = true;
  result.question_text = std::string(interior);
  if (auto boxed = extract_boxed(raw.substr(close_pos + kCloseTag.size())))
    result.self_answer = *boxed;
  return result;
}

double uncertainty_reward(double p_hat) {
  if (!(p_hat >= 0.0 && p_hat <= 1.0))
    throw InvalidInputError("uncertainty_reward: p_hat must be in [0,1]");
  return 1.0 - 2.0 * std::abs(p_hat - 0.5);
}

std::vector<double> repetition_penalty(const ClusterAssignment& assignment, double lambda,
                                       int batch_size) {
  if (static_cast<int>(assignment.labels.size()) != batch_size)
    throw InvalidInputError("repetition_penalty: assignment does not cover the batch");
  if (lambda < 0.0) throw InvalidInputError("repetition_penalty: lambda must be >= 0");
  std::vector<double> out(assignment.labels.size());
  for (size_t i = 0; i < assignment.labels.size(); ++i) {
    int size = assignment.cluster_sizes.at(assignment.labels[i]);
    out[i] = lambda * static_cast<double>(size) / static_cast<double>(batch_size);
  }
  return out;
}

double composite_reward(bool format_ok, double r_uncertainty, double r_rep) {
  if (!format_ok) return 0.0;
  return std::max(0.0, r_uncertainty - r_rep);
}

std::vector<RewardBreakdown> score_batch(
    const std::vector<std::string>& raw_generations,
    const std::vector<std::optional<double>>& solver_accuracies, double lambda, double tau) {
  if (raw_generations.size() != solver_accuracies.size())
    throw PipelineError("score_batch: accuracies not aligned with generations");

  size_t n = raw_generations.size();
  std::vector<FormatCheckResult> formats(n);
  std::vector<size_t> valid;
  for (size_t i = 0; i < n; ++i) {
    formats[i] = check_format(raw_generations[i]);
    if (formats[i].ok != solver_accuracies[i].has_value())
      throw PipelineError(formats[i].ok
                              ? "score_batch: accuracy missing for a valid question"
                              : "score_batch: accuracy supplied for a malformed generation");
    if (formats[i].ok) valid.push_back(i);
  }

  std::vector<double> penalties(valid.size(), 0.0);
  if (!valid.empty()) {
    std::vector<TokenSeq> batch;
    batch.reserve(valid.size());
    for (size_t i : valid) batch.push_back(tokenize(formats[i].question_text));
    auto assignment = cluster(pairwise_distances(batch), tau);
    penalties = repetition_penalty(assignment, lambda, static_cast<int>(valid.size()));
  }

  std::vector<RewardBreakdown> out(n);
  size_t v = 0;
  for (size_t i = 0; i < n; ++i) {
    if (!formats[i].ok) {
      out[i] = {false, 0.0, 0.0, 0.0};
      continue;
    }
    double u = uncertainty_reward(*solver_accuracies[i]);
    double rep = penalties[v++];
    out[i] = {true, u, rep, composite_reward(true, u, rep)};
  }
  return out;
}

}  // namespace coevo
