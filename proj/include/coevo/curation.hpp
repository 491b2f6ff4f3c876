#pragma once

#include <compare>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "coevo/errors.hpp"

namespace coevo {

// Canonical answer string: the equality carrier for votes and rewards.
struct AnswerKey {
  std::string canonical;

  auto operator<=>(const AnswerKey&) const = default;
};

// Content of the last \boxed{...} whose braces balance, or nullopt.
std::optional<std::string> extract_boxed(std::string_view text);

// Content of the last balanced \boxed{...}, else the last non-empty line;
// trimmed, with internal whitespace runs collapsed. No numeric re-parsing.
AnswerKey normalize_answer(std::string_view raw);

struct VoteResult {
  AnswerKey pseudo_label;
  int majority_count = 0;
  double p_hat = 0.0;
  std::map<std::string, int> histogram;
  int m = 0;
};

// Majority vote over m answers. Ties break to the lexicographically smallest
// canonical string so results are seed-independent.
VoteResult majority_vote(const std::vector<std::string>& answers, int m);

enum class RejectReason { none, too_easy, too_hard };

std::string to_string(RejectReason reason);
RejectReason reject_reason_from_string(std::string_view s);

struct BandDecision {
  bool kept = false;
  RejectReason reason = RejectReason::none;
};

// Keep iff |p_hat - 1/2| <= delta, inclusive on both edges.
BandDecision informative_band_filter(double p_hat, double delta);

struct CurationRecord {
  std::string question_id;
  std::string question_text;
  AnswerKey pseudo_label;
  double p_hat = 0.0;
  std::map<std::string, int> histogram;
  int iteration = 0;
  bool kept = false;
  RejectReason reject_reason = RejectReason::none;

  nlohmann::json to_json() const;
  static CurationRecord from_json(const nlohmann::json& j);
};

struct CurationStats {
  int kept = 0;
  int too_easy = 0;
  int too_hard = 0;
  std::map<std::string, int> p_hat_histogram;

  nlohmann::json to_json() const;
};

struct PoolEntry {
  std::string question_id;
  std::string question_text;
  std::vector<std::string> solver_answers;
};

struct CurationResult {
  std::vector<CurationRecord> records;   // every pool entry, input order
  std::vector<CurationRecord> dataset;   // kept subset, input order
  CurationStats stats;
};

// Votes and band-filters every pool entry. All entries must carry the same
// number m of solver answers. With filtering disabled every voted entry is
// kept (the curriculum passes through unfiltered).
CurationResult build_dataset(const std::vector<PoolEntry>& pool, double delta,
                             int iteration = 0, bool filter_enabled = true);

using AnswerEquality = std::function<bool(const AnswerKey&, const AnswerKey&)>;

// Binary verifiable reward: 1 iff the normalized answer equals the
// pseudo-label. A custom equality hook may replace exact string match.
int solver_reward(const std::string& answer, const AnswerKey& pseudo_label,
                  const AnswerEquality& equals = nullptr);

// Line-delimited dataset file: a {"format_version": 1} header record, then
// one record per line. Readers reject files with any other version.
inline constexpr int kDatasetFormatVersion = 1;

void write_dataset(const std::filesystem::path& path,
                   const std::vector<CurationRecord>& records);
std::vector<CurationRecord> read_dataset(const std::filesystem::path& path);

}  // namespace coevo
