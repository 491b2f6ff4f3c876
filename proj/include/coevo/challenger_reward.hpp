#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coevo/errors.hpp"
#include "coevo/similarity.hpp"

namespace coevo {

// Structural gate on a raw generation: exactly one <question>...</question>
// block with non-empty interior. The generator's own trailing \boxed answer
// is recorded for offline analysis but never used as a label.
struct FormatCheckResult {
  bool ok = false;
  std::string question_text;
  std::optional<std::string> self_answer;
};

FormatCheckResult check_format(std::string_view raw);

// 1 - 2|p_hat - 1/2|: maximal when the solver answers correctly half the time.
double uncertainty_reward(double p_hat);

// penalty[i] = lambda * |cluster of i| / batch_size.
std::vector<double> repetition_penalty(const ClusterAssignment& assignment,
                                       double lambda, int batch_size);

// 0 when the format gate failed, else max(0, r_uncertainty - r_rep).
double composite_reward(bool format_ok, double r_uncertainty, double r_rep);

struct RewardBreakdown {
  bool format_ok = false;
  double r_uncertainty = 0.0;
  double r_rep = 0.0;
  double composite = 0.0;
};

// Full reward pipeline over one batch of raw generations. solver_accuracies
// must hold a value exactly for the generations that pass the format check
// (accuracy is only ever queried for valid questions); clustering and the
// |C|/B penalty run over that format-valid subset only. Output is aligned to
// input order.
std::vector<RewardBreakdown> score_batch(
    const std::vector<std::string>& raw_generations,
    const std::vector<std::optional<double>>& solver_accuracies, double lambda,
    double tau);

}  // namespace coevo
