#include "contrastshap/ranking.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <set>
#include <utility>

#include "contrastshap/error.hpp"

namespace contrastshap {

bool is_dense_ranking(std::span<const int> ranks) {
  if (ranks.empty()) return false;
  const int n = static_cast<int>(ranks.size());
  std::set<int> distinct;
  for (int r : ranks) {
    if (r < 1 || r > n) return false;
    distinct.insert(r);
  }
  return *distinct.rbegin() == static_cast<int>(distinct.size());
}

RankVector::RankVector(std::vector<int> ranks) : ranks_(std::move(ranks)) {
  if (!is_dense_ranking(ranks_)) {
    std::string shown;
    for (int r : ranks_) shown += (shown.empty() ? "" : ",") + std::to_string(r);
    throw Error(ErrorCode::kInvalidRankVector, "not a dense ranking: (" + shown + ")");
  }
}

int RankVector::distinct() const noexcept {
  return ranks_.empty() ? 0 : *std::max_element(ranks_.begin(), ranks_.end());
}

RankVector dense_rank_desc(std::span<const double> values, double tie_epsilon) {
  if (values.empty()) throw Error(ErrorCode::kEmptyInput, "nothing to rank");
  if (!(tie_epsilon >= 0.0) || !std::isfinite(tie_epsilon)) {
    throw Error(ErrorCode::kConfigInvalid, "tie_epsilon must be finite and >= 0");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kNonFiniteInput, "cannot rank non-finite value");
  }
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  std::vector<int> ranks(values.size());
  int rank = 1;
  ranks[order[0]] = rank;
  for (std::size_t k = 1; k < order.size(); ++k) {
    if (values[order[k - 1]] - values[order[k]] > tie_epsilon) ++rank;
    ranks[order[k]] = rank;
  }
  return RankVector(std::move(ranks));
}

RankVector consensus_rank(std::span<const std::vector<int>> annotator_ranks) {
  if (annotator_ranks.empty()) throw Error(ErrorCode::kEmptyInput, "no annotator rankings");
  const std::size_t n = annotator_ranks.front().size();
  if (n == 0) throw Error(ErrorCode::kEmptyInput, "empty annotator ranking");
  // All annotators share the divisor, so comparing integer rank sums is comparing means.
  std::vector<long> sums(n, 0);
  for (const auto& ranks : annotator_ranks) {
    if (ranks.size() != n) {
      throw Error(ErrorCode::kLengthMismatch, "annotator rankings differ in length");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (ranks[i] < 1 || ranks[i] > static_cast<int>(n)) {
        throw Error(ErrorCode::kInvalidRankVector,
                    "annotator rank " + std::to_string(ranks[i]) + " outside 1.." +
                        std::to_string(n));
      }
      sums[i] += ranks[i];
    }
  }
  std::vector<long> levels(sums);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  std::vector<int> ranks(n);
  for (std::size_t i = 0; i < n; ++i) {
    ranks[i] = static_cast<int>(std::lower_bound(levels.begin(), levels.end(), sums[i]) -
                                levels.begin()) +
               1;
  }
  return RankVector(std::move(ranks));
}

ReferenceRanking clinical_standard(const ContrastSet& contrasts) {
  static constexpr std::array<std::pair<const char*, int>, 4> kProtocol{
      {{"T1c", 1}, {"T2f", 2}, {"T1n", 3}, {"T2w", 3}}};
  std::vector<int> ranks(contrasts.size(), 0);
  for (const auto& [name, rank] : kProtocol) {
    auto idx = contrasts.index_of(name);
    if (!idx) {
      throw Error(ErrorCode::kUnknownContrast,
                  std::string("clinical standard needs contrast '") + name +
                      "'; supply a custom reference file instead");
    }
    ranks[*idx] = rank;
  }
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    if (ranks[i] == 0) {
      throw Error(ErrorCode::kUnknownContrast,
                  "clinical standard has no rank for '" + contrasts.name(i) + "'");
    }
  }
  return {kClinicalStandardLabel, RankVector(std::move(ranks))};
}

}  // namespace contrastshap
