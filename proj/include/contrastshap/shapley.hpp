#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "contrastshap/core.hpp"

namespace contrastshap {

// Coalition weights |S|!(n-|S|-1)!/n!, indexed by |S| in [0, n-1].
class ShapleyWeightTable {
 public:
  explicit ShapleyWeightTable(std::size_t n);

  std::size_t n() const noexcept { return n_; }
  double weight(std::size_t subset_size) const { return weights_.at(subset_size); }
  const std::vector<double>& weights() const noexcept { return weights_; }

  // Exact integer form: weight(s) == numerator(s) / denominator().
  std::uint64_t numerator(std::size_t subset_size) const { return numerators_.at(subset_size); }
  std::uint64_t denominator() const noexcept { return denominator_; }

 private:
  std::size_t n_;
  std::vector<std::uint64_t> numerators_;
  std::uint64_t denominator_;
  std::vector<double> weights_;
};

std::uint64_t factorial(std::size_t k);

// Bookkeeping for one exact evaluation: game values read and marginal terms summed.
struct ShapleyWork {
  std::size_t evaluations = 0;
  std::size_t marginal_terms = 0;
};

// Exact Shapley values of a complete game given as 2^n values indexed by mask.
// Masks are visited in ascending order so the summation order is fixed.
std::vector<double> shapley_values(std::span<const double> game, std::size_t n,
                                   ShapleyWork* work = nullptr);

// Average marginal contribution over all n! orderings. Independent check of
// shapley_values; n <= kMaxOracleContrasts.
inline constexpr std::size_t kMaxOracleContrasts = 8;
std::vector<double> shapley_values_by_permutation(std::span<const double> game, std::size_t n);

AttributionRecord shapley_exact(const MetricTable& table, const std::string& subject, int fold,
                                const std::string& region, ShapleyWork* work = nullptr);
AttributionRecord shapley_permutation_oracle(const MetricTable& table, const std::string& subject,
                                             int fold, const std::string& region);

// sum(phi) - (D(N) - D(empty)).
double efficiency_gap(std::span<const double> phi, std::span<const double> game);

inline constexpr const char* kOverallRegion = "overall";

// Unweighted mean over the sub-region records of one subject and fold.
AttributionRecord aggregate_overall(std::span<const AttributionRecord> records);

// Elementwise mean of phi across folds.
std::vector<double> mean_over_folds(std::span<const AttributionRecord> records);

}  // namespace contrastshap
