#pragma once

#include <span>
#include <string>
#include <vector>

#include "contrastshap/core.hpp"

namespace contrastshap {

// Dense integer ranks 1..d over n items (d <= n, no gaps). Rank 1 is most important.
class RankVector {
 public:
  RankVector() = default;
  // Throws InvalidRankVector unless the values are dense.
  explicit RankVector(std::vector<int> ranks);

  std::size_t size() const noexcept { return ranks_.size(); }
  int operator[](std::size_t i) const { return ranks_[i]; }
  const std::vector<int>& values() const noexcept { return ranks_; }
  int distinct() const noexcept;

  friend bool operator==(const RankVector&, const RankVector&) = default;

 private:
  std::vector<int> ranks_;
};

bool is_dense_ranking(std::span<const int> ranks);

struct ReferenceRanking {
  std::string label;
  RankVector ranks;
};

inline constexpr const char* kClinicalStandardLabel = "clinical_standard";
inline constexpr const char* kAnnotatorConsensusLabel = "annotator_consensus";

// Largest value gets rank 1. Sorted neighbours within tie_epsilon chain into one tie group.
RankVector dense_rank_desc(std::span<const double> values, double tie_epsilon = 0.0);

// Raw annotator ranks: integers in 1..n, ties allowed, gaps allowed.
// Per-contrast mean rank, then dense ranking ascending (smallest mean -> 1).
RankVector consensus_rank(std::span<const std::vector<int>> annotator_ranks);

// T1c=1, T2f=2, T1n=3, T2w=3 in the declared contrast order.
ReferenceRanking clinical_standard(const ContrastSet& contrasts);

}  // namespace contrastshap
