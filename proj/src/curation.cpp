#include "coevo/curation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace coevo {

namespace {

std::string trim_collapse(std::string_view s) {
  std::string out;
  bool in_space = true;  // leading whitespace dropped
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      in_space = true;
      continue;
    }
    if (in_space && !out.empty()) out += ' ';
    in_space = false;
    out += c;
  }
  return out;
}

std::string format_p_hat(double p) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", p);
  return buf;
}

}  // namespace

std::optional<std::string> extract_boxed(std::string_view text) {
  constexpr std::string_view marker = "\\boxed{";
  size_t search_end = text.size();
  while (true) {
    size_t pos = text.rfind(marker, search_end == 0 ? 0 : search_end - 1);
    if (pos == std::string_view::npos) return std::nullopt;
    size_t i = pos + marker.size();
    int depth = 1;
    for (; i < text.size(); ++i) {
      if (text[i] == '{') ++depth;
      if (text[i] == '}' && --depth == 0)
        return std::string(text.substr(pos + marker.size(), i - pos - marker.size()));
    }
    if (pos == 0) return std::nullopt;  // unbalanced; try an earlier occurrence
    search_end = pos;
  }
}

AnswerKey normalize_answer(std::string_view raw) {
  if (auto boxed = extract_boxed(raw)) return {trim_collapse(*boxed)};
  // fallback: last non-empty line
  size_t end = raw.size();
  while (end > 0) {
    size_t start = raw.rfind('\n', end - 1);
    size_t line_begin = start == std::string_view::npos ? 0 : start + 1;
    std::string line = trim_collapse(raw.substr(line_begin, end - line_begin));
    if (!line.empty()) return {line};
    if (start == std::string_view::npos) break;
    end = start;
  }
  return {""};
}

VoteResult majority_vote(const std::vector<std::string>& answers, int m) {
  if (answers.empty()) throw InvalidInputError("majority_vote: empty answer list");
  if (static_cast<int>(answers.size()) != m)
    throw InvalidInputError("majority_vote: answer count does not equal m");

  VoteResult result;
  result.m = m;
  for (const auto& a : answers) ++result.histogram[normalize_answer(a).canonical];
  // std::map iterates keys ascending, so the first maximum is the
  // lexicographically smallest: the tie-break rule for free.
  for (const auto& [key, count] : result.histogram) {
    if (count > result.majority_count) {
      result.majority_count = count;
      result.pseudo_label = {key};
    }
  }
  result.p_hat = static_cast<double>(result.majority_count) / static_cast<double>(m);
  return result;
}

std::string to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::none: return "none";
    case RejectReason::too_easy: return "too_easy";
    case RejectReason::too_hard: return "too_hard";
  }
  return "none";
}

RejectReason reject_reason_from_string(std::string_view s) {
  if (s == "none") return RejectReason::none;
  if (s == "too_easy") return RejectReason::too_easy;
  if (s == "too_hard") return RejectReason::too_hard;
  throw InvalidInputError("unknown reject_reason: " + std::string(s));
}

BandDecision informative_band_filter(double p_hat, double delta) {
  if (p_hat > 0.5 + delta) return {false, RejectReason::too_easy};
  if (p_hat < 0.5 - delta) return {false, RejectReason::too_hard};
  return {true, RejectReason::none};
}

nlohmann::json CurationRecord::to_json() const {
  nlohmann::json h = nlohmann::json::object();
  for (const auto& [key, count] : histogram) h[key] = count;
  return {{"question_id", question_id}, {"question_text", question_text},
          {"pseudo_label", pseudo_label.canonical}, {"p_hat", p_hat},
          {"histogram", h}, {"iteration", iteration}, {"kept", kept},
          {"reject_reason", to_string(reject_reason)}};
}

CurationRecord CurationRecord::from_json(const nlohmann::json& j) {
  CurationRecord r;
  r.question_id = j.at("question_id").get<std::string>();
  r.question_text = j.at("question_text").get<std::string>();
  r.pseudo_label = {j.at("pseudo_label").get<std::string>()};
  r.p_hat = j.at("p_hat").get<double>();
  for (auto it = j.at("histogram").begin(); it != j.at("histogram").end(); ++it)
    r.histogram[it.key()] = it.value().get<int>();
  r.iteration = j.at("iteration").get<int>();
  r.kept = j.at("kept").get<bool>();
  r.reject_reason = reject_reason_from_string(j.at("reject_reason").get<std::string>());
  return r;
}

nlohmann::json CurationStats::to_json() const {
  nlohmann::json h = nlohmann::json::object();
  for (const auto& [key, count] : p_hat_histogram) h[key] = count;
  return {{"kept", kept}, {"too_easy", too_easy}, {"too_hard", too_hard},
          {"p_hat_histogram", h}};
}

CurationResult build_dataset(const std::vector<PoolEntry>& pool, double delta, int iteration,
                             bool filter_enabled) {
  CurationResult result;
  if (pool.empty()) return result;
  size_t m = pool.front().solver_answers.size();
  for (const auto& entry : pool)
    if (entry.solver_answers.size() != m)
      throw InvalidInputError("build_dataset: inconsistent answer count across pool");
  if (m == 0) throw InvalidInputError("build_dataset: entries carry no answers");

  for (const auto& entry : pool) {
    auto vote = majority_vote(entry.solver_answers, static_cast<int>(m));
    BandDecision band{true, RejectReason::none};
    if (filter_enabled) band = informative_band_filter(vote.p_hat, delta);

    CurationRecord record;
    record.question_id = entry.question_id;
    record.question_text = entry.question_text;
    record.pseudo_label = vote.pseudo_label;
    record.p_hat = vote.p_hat;
    record.histogram = vote.histogram;
    record.iteration = iteration;
    record.kept = band.kept;
    record.reject_reason = band.reason;

    ++result.stats.p_hat_histogram[format_p_hat(vote.p_hat)];
    if (band.kept) {
      ++result.stats.kept;
      result.dataset.push_back(record);
    } else if (band.reason == RejectReason::too_easy) {
      ++result.stats.too_easy;
    } else {
      ++result.stats.too_hard;
    }
    result.records.push_back(std::move(record));
  }
  return result;
}

int solver_reward(const std::string& answer, const AnswerKey& pseudo_label,
                  const AnswerEquality& equals) {
  AnswerKey key = normalize_answer(answer);
  bool match = equals ? equals(key, pseudo_label) : key == pseudo_label;
  return match ? 1 : 0;
}

void write_dataset(const std::filesystem::path& path,
                   const std::vector<CurationRecord>& records) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw ConfigError("cannot write dataset file: " + path.string());
    out << nlohmann::json{{"format_version", kDatasetFormatVersion}}.dump() << '\n';
    for (const auto& record : records) out << record.to_json().dump() << '\n';
  }
  std::filesystem::rename(tmp, path);
}

std::vector<CurationRecord> read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dataset file: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("dataset file is empty: " + path.string());
  auto header = nlohmann::json::parse(line, nullptr, false);
  if (header.is_discarded() || !header.contains("format_version") ||
      header["format_version"] != kDatasetFormatVersion)
    throw ConfigError("unsupported dataset format_version in " + path.string());
  std::vector<CurationRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    records.push_back(CurationRecord::from_json(nlohmann::json::parse(line)));
  }
  return records;
}

}  // namespace coevo
