#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace contrastshap::stats {

// Average ranks (1-based); tied values share the mean of the positions they occupy.
std::vector<double> fractional_ranks(std::span<const double> values);

struct CorrelationResult {
  double rho = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
};

// Pearson correlation of fractional ranks; two-sided p from Student t with n-2 df.
CorrelationResult spearman(std::span<const double> x, std::span<const double> y);

// Two-sided p of |t| under Student t with df degrees of freedom.
double student_t_two_sided_p(double t, double df);
double normal_two_sided_p(double z);

enum class MannWhitneyMethod { kExact, kNormal };

struct MannWhitneyResult {
  double u = 0.0;    // min(u_a, u_b)
  double u_a = 0.0;  // pairs with a > b, ties counted half
  double u_b = 0.0;
  double p_two_sided = 1.0;
  MannWhitneyMethod method = MannWhitneyMethod::kExact;
};

inline constexpr std::size_t kExactMannWhitneyMaxTotal = 20;

// Exact null distribution when |a|+|b| <= 20 and no value is shared between the groups;
// otherwise the normal approximation with tie-corrected variance and continuity correction.
MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b);

// Number of the C(m+k, m) group labelings whose U statistic equals u, for u = 0..m*k.
std::vector<double> mann_whitney_null_counts(std::size_t m, std::size_t k);

// Nearest-rank percentile: the ceil(pct/100 * n)-th order statistic.
double percentile_threshold(std::span<const double> values, double pct);

enum class BootstrapMode { kStratified, kPlain };

struct BootstrapOptions {
  std::size_t iterations = 5000;
  std::uint64_t seed = 0;
  BootstrapMode mode = BootstrapMode::kStratified;
  std::size_t threads = 1;
  // Cap on resample redraws within a single iteration.
  std::size_t max_redraws = 1000;
};

struct BootstrapResult {
  std::size_t iterations = 0;
  std::vector<double> rhos;
  double mean_rho = 0.0;
  double median_rho = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::uint64_t seed = 0;
  std::size_t redraws = 0;
  BootstrapMode mode = BootstrapMode::kPlain;
};

// Resamples (x, y) pairs with replacement and collects Spearman rho per iteration.
// With `strata`, each stratum is resampled to its own size. Resamples whose x or y has
// zero variance are redrawn. The result depends only on the inputs, seed and iteration
// count; thread count has no effect.
BootstrapResult bootstrap_spearman(std::span<const double> x, std::span<const double> y,
                                   const BootstrapOptions& options,
                                   std::span<const int> strata = {});

// One side of a split correlation: a result, or a status code when it could not be computed.
struct SideCorrelation {
  std::size_t n = 0;
  std::optional<CorrelationResult> result;
  std::string status = "ok";
};

struct SplitCorrelation {
  double threshold = 0.0;
  SideCorrelation below;  // x < threshold
  SideCorrelation above;  // x >= threshold
};

SplitCorrelation split_correlation(std::span<const double> x, std::span<const double> y,
                                   double threshold);

}  // namespace contrastshap::stats
