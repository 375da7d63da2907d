#include "contrastshap/uncertainty.hpp"

#include <vector>

#include "contrastshap/error.hpp"
#include "contrastshap/shapley.hpp"

namespace contrastshap {

double rank_variance(std::span<const RankVector> ranks_per_fold) {
  const std::size_t k = ranks_per_fold.size();
  if (k < 2) {
    throw Error(ErrorCode::kTooFewFolds, "rank variance needs >= 2 folds, got " + std::to_string(k));
  }
  const std::size_t n = ranks_per_fold.front().size();
  for (const auto& r : ranks_per_fold) {
    if (r.size() != n) throw Error(ErrorCode::kLengthMismatch, "fold rankings differ in length");
  }
  // Var_i = (K * sum r^2 - (sum r)^2) / (K (K-1)); summing numerators keeps everything in
  // integers until one final division.
  long long numerator = 0;
  for (std::size_t i = 0; i < n; ++i) {
    long long sum = 0, sum_sq = 0;
    for (const auto& r : ranks_per_fold) {
      sum += r[i];
      sum_sq += static_cast<long long>(r[i]) * r[i];
    }
    numerator += static_cast<long long>(k) * sum_sq - sum * sum;
  }
  const double denominator = static_cast<double>(n) * static_cast<double>(k) * static_cast<double>(k - 1);
  return static_cast<double>(numerator) / denominator;
}

double max_rank_variance(std::size_t n, std::size_t folds) {
  const double span = static_cast<double>(n) - 1.0;
  const double k = static_cast<double>(folds);
  return span * span * k / (4.0 * (k - 1.0));
}

VarianceRecord subject_variance(const MetricTable& table, const std::string& subject,
                                double tie_epsilon) {
  const auto& folds = table.folds();
  if (folds.size() < 2) {
    throw Error(ErrorCode::kTooFewFolds,
                "table has " + std::to_string(folds.size()) + " fold(s); variance needs >= 2");
  }
  VarianceRecord out;
  out.subject_id = subject;
  double sum = 0.0;
  for (const auto& region : table.regions()) {
    std::vector<RankVector> ranks;
    std::size_t missing = 0;
    for (int fold : folds) {
      const auto* game = table.find({subject, fold, region});
      if (game == nullptr) {
        ++missing;
        continue;
      }
      ranks.push_back(dense_rank_desc(shapley_values(*game, table.contrasts().size()), tie_epsilon));
    }
    if (ranks.empty()) continue;
    if (missing > 0) {
      throw Error(ErrorCode::kSubjectMissingFolds,
                  "subject " + subject + " region " + region + " missing " +
                      std::to_string(missing) + " of " + std::to_string(folds.size()) + " folds");
    }
    const double v = rank_variance(ranks);
    out.per_region_v.emplace(region, v);
    sum += v;
  }
  if (out.per_region_v.empty()) {
    throw Error(ErrorCode::kSubjectMissingFolds, "subject " + subject + " has no cells");
  }
  out.overall_v = sum / static_cast<double>(out.per_region_v.size());
  out.mean_dice = mean_dice(table, subject).mean_dice;
  return out;
}

}  // namespace contrastshap
