#include "coevo/similarity.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <thread>
#include <unordered_map>

namespace coevo {

TokenSeq tokenize(std::string_view text) {
  TokenSeq out;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) out.emplace_back(text.substr(start, i - start));
  }
  return out;
}

namespace {

// Length-prefixed joining makes n-gram keys unambiguous for arbitrary tokens.
std::string ngram_key(const TokenSeq& tokens, size_t start, int order) {
  std::string key;
  for (int k = 0; k < order; ++k) {
    const std::string& tok = tokens[start + k];
    key += std::to_string(tok.size());
    key += ':';
    key += tok;
  }
  return key;
}

std::unordered_map<std::string, int> ngram_counts(const TokenSeq& tokens, int order) {
  std::unordered_map<std::string, int> counts;
  if (static_cast<int>(tokens.size()) < order) return counts;
  for (size_t i = 0; i + order <= tokens.size(); ++i) ++counts[ngram_key(tokens, i, order)];
  return counts;
}

}  // namespace

double sentence_bleu(const TokenSeq& candidate, const TokenSeq& reference, int max_order,
                     double smooth_eps) {
  if (max_order < 1) throw InvalidInputError("sentence_bleu: max_order must be >= 1");
  if (candidate.empty() || reference.empty()) return 0.0;

  double log_sum = 0.0;
  int included = 0;
  for (int n = 1; n <= max_order; ++n) {
    int total = static_cast<int>(candidate.size()) - n + 1;
    if (total <= 0) continue;  // candidate has no n-grams of this order
    auto cand_counts = ngram_counts(candidate, n);
    auto ref_counts = ngram_counts(reference, n);
    int matches = 0;
    for (const auto& [gram, count] : cand_counts) {
      auto it = ref_counts.find(gram);
      if (it != ref_counts.end()) matches += std::min(count, it->second);
    }
    double numer = matches > 0 ? static_cast<double>(matches) : smooth_eps;
    log_sum += std::log(numer / static_cast<double>(total));
    ++included;
  }
  double geo_mean = std::exp(log_sum / static_cast<double>(included));
  double brevity = std::min(1.0, std::exp(1.0 - static_cast<double>(reference.size()) /
                                                    static_cast<double>(candidate.size())));
  return brevity * geo_mean;
}

void DistanceMatrix::validate() const {
  if (n < 1 || entries.size() != static_cast<size_t>(n) * n)
    throw InvalidInputError("distance matrix: bad shape");
  for (int i = 0; i < n; ++i) {
    if (at(i, i) != 0.0) throw InvalidInputError("distance matrix: nonzero diagonal");
    for (int j = 0; j < n; ++j) {
      double d = at(i, j);
      if (!(d >= 0.0 && d <= 1.0)) throw InvalidInputError("distance matrix: entry outside [0,1]");
      if (std::abs(d - at(j, i)) > 1e-12) throw InvalidInputError("distance matrix: asymmetric");
    }
  }
}

DistanceMatrix pairwise_distances(const std::vector<TokenSeq>& batch) {
  if (batch.empty()) throw InvalidInputError("pairwise_distances: empty batch");
  int n = static_cast<int>(batch.size());
  DistanceMatrix m;
  m.n = n;
  m.entries.assign(static_cast<size_t>(n) * n, 0.0);

  auto fill_row = [&](int i) {
    for (int j = i + 1; j < n; ++j) {
      double sim = 0.5 * (sentence_bleu(batch[i], batch[j]) + sentence_bleu(batch[j], batch[i]));
      double d = std::clamp(1.0 - sim, 0.0, 1.0);
      m.at(i, j) = d;
      m.at(j, i) = d;
    }
  };

  // Row slots are independent, so a static fan-out stays deterministic.
  unsigned workers = std::min<unsigned>(std::thread::hardware_concurrency(), 8);
  if (n >= 64 && workers > 1) {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (int i = static_cast<int>(w); i < n; i += static_cast<int>(workers)) fill_row(i);
      });
    for (auto& t : pool) t.join();
  } else {
    for (int i = 0; i < n; ++i) fill_row(i);
  }
  return m;
}

ClusterAssignment cluster(const DistanceMatrix& matrix, double threshold,
                          std::vector<double>* trace) {
  matrix.validate();
  if (!(threshold >= 0.0 && threshold <= 1.0))
    throw InvalidInputError("cluster: threshold must be in [0,1]");
  int n = matrix.n;

  struct Node {
    int min_member;
    int size;
    bool active;
  };
  std::vector<Node> nodes(n);
  std::vector<int> owner(n);  // item -> node slot
  for (int i = 0; i < n; ++i) {
    nodes[i] = {i, 1, true};
    owner[i] = i;
  }
  // Mean inter-cluster distances, maintained by Lance-Williams updates:
  // d(k, i+j) = (|i| d(k,i) + |j| d(k,j)) / (|i| + |j|), exact for average
  // linkage on a precomputed matrix.
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) dist[i][j] = matrix.at(i, j);

  int active_count = n;
  while (active_count > 1) {
    double best = std::numeric_limits<double>::infinity();
    int best_i = -1, best_j = -1;
    for (int i = 0; i < n; ++i) {
      if (!nodes[i].active) continue;
      for (int j = i + 1; j < n; ++j) {
        if (!nodes[j].active) continue;
        double d = dist[i][j];
        int a = std::min(nodes[i].min_member, nodes[j].min_member);
        int b = std::max(nodes[i].min_member, nodes[j].min_member);
        int ba = best_i < 0 ? 0 : std::min(nodes[best_i].min_member, nodes[best_j].min_member);
        int bb = best_i < 0 ? 0 : std::max(nodes[best_i].min_member, nodes[best_j].min_member);
        if (d < best || (d == best && std::pair(a, b) < std::pair(ba, bb))) {
          best = d;
          best_i = i;
          best_j = j;
        }
      }
    }
    if (!(best < threshold)) break;
    if (trace) trace->push_back(best);

    int keep = best_i, drop = best_j;
    int si = nodes[keep].size, sj = nodes[drop].size;
    for (int k = 0; k < n; ++k) {
      if (!nodes[k].active || k == keep || k == drop) continue;
      double d = (si * dist[k][keep] + sj * dist[k][drop]) / static_cast<double>(si + sj);
      dist[k][keep] = d;
      dist[keep][k] = d;
    }
    nodes[keep].size += nodes[drop].size;
    nodes[keep].min_member = std::min(nodes[keep].min_member, nodes[drop].min_member);
    nodes[drop].active = false;
    for (int i = 0; i < n; ++i)
      if (owner[i] == drop) owner[i] = keep;
    --active_count;
  }

  // Contiguous ids 1..K in order of each cluster's smallest member.
  std::vector<std::pair<int, int>> order;  // (min_member, slot)
  for (int i = 0; i < n; ++i)
    if (nodes[i].active) order.emplace_back(nodes[i].min_member, i);
  std::sort(order.begin(), order.end());
  std::vector<int> id_of(n, 0);
  ClusterAssignment out;
  for (size_t k = 0; k < order.size(); ++k) {
    id_of[order[k].second] = static_cast<int>(k) + 1;
    out.cluster_sizes[static_cast<int>(k) + 1] = nodes[order[k].second].size;
  }
  out.labels.resize(n);
  for (int i = 0; i < n; ++i) out.labels[i] = id_of[owner[i]];
  return out;
}

}  // namespace coevo
