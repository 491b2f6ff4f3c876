#pragma once

#include <optional>
#include <string>
#include <utility>

#include "coevo/errors.hpp"

namespace coevo {

enum class Role { challenger, solver };

struct PromptPair {
  std::string system;
  std::string user;
};

// The fixed chat templates for each role, byte-exact. The solver template
// substitutes the problem statement as the user message; the challenger
// template takes no problem.
PromptPair render_prompts(Role role, const std::optional<std::string>& problem = std::nullopt);

}  // namespace coevo
