#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "contrastshap/ranking.hpp"
#include "contrastshap/stats.hpp"

namespace contrastshap {

inline constexpr double kSignificanceLevel = 0.05;

// Sum of absolute rank differences.
int footrule_distance(const RankVector& a, const RankVector& b);

// Largest footrule distance between two permutations of n items: floor(n^2 / 2).
int max_footrule_distance(std::size_t n);

struct NsfResult {
  double value = 1.0;
  int distance = 0;
  int max_distance = 0;
  bool clamped = false;
};

NsfResult nsf_detailed(const RankVector& model, const RankVector& reference);

// 1 - distance / max_distance, clamped to [0, 1]; warns if the clamp ever engages.
double nsf(const RankVector& model, const RankVector& reference);

struct AgreementRecord {
  std::string subject_id;
  std::string reference_label;
  double nsf = 0.0;
  double mean_dice = 0.0;
};

// Dice interval [lo, hi), or [lo, hi] when closed_high.
struct DiceBin {
  double lo = 0.0;
  double hi = 0.0;
  bool closed_high = false;

  bool contains(double dice) const { return dice >= lo && (closed_high ? dice <= hi : dice < hi); }
  std::string label() const;
  friend bool operator==(const DiceBin&, const DiceBin&) = default;
};

// Consecutive bins between the given edges; the last one is closed.
std::vector<DiceBin> bins_from_edges(std::span<const double> edges);

// <0.5 baseline, then 0.5-0.6, 0.6-0.7, 0.7-0.8, 0.8-0.9, 0.9-1.0.
std::vector<DiceBin> default_dice_bins();

struct BinComparison {
  DiceBin bin;
  bool is_baseline = false;
  std::size_t n = 0;
  std::optional<double> median_nsf;
  std::optional<stats::MannWhitneyResult> test;  // vs baseline
  bool significant = false;
  std::string status = "ok";  // "baseline", "ok" or "EmptyBin"
};

// Two-sided Mann-Whitney of each bin's NSF values against the baseline bin.
// Records falling in no bin are ignored.
std::vector<BinComparison> group_agreement_comparison(std::span<const AgreementRecord> records,
                                                      std::span<const DiceBin> bins,
                                                      std::size_t baseline_index = 0);

}  // namespace contrastshap
