#include "coevo/prompts.hpp"

namespace coevo {

namespace {

constexpr const char* kSolverSystem =
    "Please reason step by step, and put your final answer within \\boxed{}.";

constexpr const char* kChallengerSystem =
    "You are an expert competition-math problem setter. FIRST, in your private "
    "scratch-pad, think step-by-step to design a brand-new, non-trivial problem. "
    "The problem could come from any field of mathematics, including but not "
    "limited to algebra, geometry, number theory, combinatorics, prealgebra, "
    "probability, statistics, and calculus. Aim for a difficulty such that fewer "
    "than 30% of advanced high-school students could solve it. Avoid re-using "
    "textbook clich\u00e9s or famous contest problems.\n"
    "THEN, without revealing any of your private thoughts, output exactly the "
    "following two blocks:\n"
    "<question>\n"
    "{The full problem statement on one or more lines}\n"
    "</question>\n"
    "\n"
    "\\boxed{final_answer}\n"
    "\n"
    "Do NOT output anything else\u2014no explanations, no extra markup.";

constexpr const char* kChallengerUser =
    "Generate one new, challenging reasoning question now. Remember to format "
    "the output exactly as instructed.";

}  // namespace

PromptPair render_prompts(Role role, const std::optional<std::string>& problem) {
  if (role == Role::solver) {
    if (!problem || problem->empty())
      throw InvalidInputError("solver prompt requires a problem statement");
    return {kSolverSystem, *problem};
  }
  if (problem)
    throw InvalidInputError("challenger prompt takes no problem statement");
  return {kChallengerSystem, kChallengerUser};
}

}  // namespace coevo
