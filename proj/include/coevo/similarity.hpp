#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "coevo/errors.hpp"

namespace coevo {

using TokenSeq = std::vector<std::string>;

// Whitespace-split tokenization. No lowercasing, no punctuation stripping.
TokenSeq tokenize(std::string_view text);

// Smoothed sentence-level BLEU of candidate against a single reference.
//
// Geometric mean of modified n-gram precisions over the orders the candidate
// actually has n-grams for, times the brevity penalty
// min(1, exp(1 - |ref|/|cand|)). A precision whose clipped-match count is
// zero gets smooth_eps substituted for its numerator (denominator unchanged).
// Empty candidate or reference scores 0.
double sentence_bleu(const TokenSeq& candidate, const TokenSeq& reference,
                     int max_order = 4, double smooth_eps = 0.1);

// Symmetric pairwise-dissimilarity matrix: entries in [0, 1], zero diagonal.
struct DistanceMatrix {
  int n = 0;
  std::vector<double> entries;  // row-major n*n

  double at(int i, int j) const { return entries[static_cast<size_t>(i) * n + j]; }
  double& at(int i, int j) { return entries[static_cast<size_t>(i) * n + j]; }
  void validate() const;
};

// entries[i][j] = 1 - (BLEU(i|j) + BLEU(j|i)) / 2. BLEU is asymmetric, so the
// two directions are averaged to make the matrix symmetric.
DistanceMatrix pairwise_distances(const std::vector<TokenSeq>& batch);

// labels[i] in 1..K, contiguous; sizes keyed by cluster id.
struct ClusterAssignment {
  std::vector<int> labels;
  std::map<int, int> cluster_sizes;
};

// Average-linkage agglomerative clustering over a precomputed distance
// matrix. Starts from singletons and merges the pair of clusters with the
// smallest mean inter-cluster distance while that minimum is strictly below
// threshold. Ties break on the lowest (min-member, min-member) index pair.
// If trace is non-null it receives the merge heights in order.
ClusterAssignment cluster(const DistanceMatrix& matrix, double threshold,
                          std::vector<double>* trace = nullptr);

}  // namespace coevo
