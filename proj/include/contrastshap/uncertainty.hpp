#pragma once

#include <map>
#include <span>
#include <string>

#include "contrastshap/core.hpp"
#include "contrastshap/ranking.hpp"

namespace contrastshap {

struct VarianceRecord {
  std::string subject_id;
  std::map<std::string, double> per_region_v;
  double overall_v = 0.0;
  double mean_dice = 0.0;
};

// Mean over contrasts of the Bessel-corrected variance of each contrast's rank across folds.
// One RankVector per fold; needs at least two folds.
double rank_variance(std::span<const RankVector> ranks_per_fold);

// Largest attainable sample variance of K values in [1, n]: (n-1)^2 K / (4 (K-1)).
double max_rank_variance(std::size_t n, std::size_t folds);

// Per region, ranks each fold's sub-region Shapley values and computes rank_variance;
// the overall value is the mean over regions. Regions the subject never has are skipped;
// a region present in only some folds raises SubjectMissingFolds.
VarianceRecord subject_variance(const MetricTable& table, const std::string& subject,
                                double tie_epsilon = 0.0);

}  // namespace contrastshap
