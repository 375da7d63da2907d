#include "contrastshap/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "contrastshap/error.hpp"
#include "contrastshap/parallel.hpp"
#include "contrastshap/random.hpp"

namespace contrastshap::stats {

std::vector<double> fractional_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    // positions i+1 .. j share their mean
    const double rank = static_cast<double>(i + 1 + j) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

namespace {

void check_finite(std::span<const double> v) {
  for (double d : v) {
    if (!std::isfinite(d)) throw Error(ErrorCode::kNonFiniteInput, "non-finite sample");
  }
}

// Returns NaN when either rank vector has zero variance.
double rank_correlation(std::span<const double> x, std::span<const double> y) {
  const auto rx = fractional_ranks(x);
  const auto ry = fractional_ranks(y);
  const double n = static_cast<double>(rx.size());
  // Rank means are exactly (n+1)/2 regardless of ties.
  const double mean = (n + 1.0) / 2.0;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nan("");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace

double student_t_two_sided_p(double t, double df) {
  if (std::isinf(t)) return 0.0;
  const boost::math::students_t dist(df);
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t))));
}

double normal_two_sided_p(double z) { return std::min(1.0, std::erfc(std::fabs(z) / std::sqrt(2.0))); }

CorrelationResult spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kLengthMismatch, "spearman inputs differ in length");
  }
  if (x.size() < 3) {
    throw Error(ErrorCode::kTooFewSamples,
                "spearman needs n >= 3, got " + std::to_string(x.size()));
  }
  check_finite(x);
  check_finite(y);
  const double rho = rank_correlation(x, y);
  if (std::isnan(rho)) {
    throw Error(ErrorCode::kZeroVariance, "all x or all y values are equal");
  }
  CorrelationResult out{rho, 0.0, x.size()};
  if (std::fabs(rho) < 1.0) {
    const double df = static_cast<double>(x.size()) - 2.0;
    const double t = rho * std::sqrt(df / (1.0 - rho * rho));
    out.p_value = student_t_two_sided_p(t, df);
  }
  return out;
}

std::vector<double> mann_whitney_null_counts(std::size_t m, std::size_t k) {
  // counts[i][j][u]: labelings of i "a" and j "b" items with U_a == u.
  // Adding the largest item: if it is an "a" it beats all j b-items.
  std::vector<std::vector<std::vector<double>>> counts(
      m + 1, std::vector<std::vector<double>>(k + 1));
  for (std::size_t i = 0; i <= m; ++i) {
    for (std::size_t j = 0; j <= k; ++j) {
      auto& cur = counts[i][j];
      cur.assign(i * j + 1, 0.0);
      if (i == 0 || j == 0) {
        cur[0] = 1.0;
        continue;
      }
      const auto& with_a = counts[i - 1][j];
      const auto& with_b = counts[i][j - 1];
      for (std::size_t u = 0; u < with_a.size(); ++u) cur[u + j] += with_a[u];
      for (std::size_t u = 0; u < with_b.size(); ++u) cur[u] += with_b[u];
    }
  }
  return counts[m][k];
}

MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::kEmptyGroup, "Mann-Whitney needs two non-empty groups");
  check_finite(a);
  check_finite(b);
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const auto ranks = fractional_ranks(pooled);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double rank_sum_a = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) rank_sum_a += ranks[i];

  MannWhitneyResult out;
  out.u_a = rank_sum_a - na * (na + 1.0) / 2.0;
  out.u_b = na * nb - out.u_a;
  out.u = std::min(out.u_a, out.u_b);

  bool cross_ties = false;
  {
    std::vector<double> sorted_b(b.begin(), b.end());
    std::sort(sorted_b.begin(), sorted_b.end());
    for (double v : a) {
      if (std::binary_search(sorted_b.begin(), sorted_b.end(), v)) {
        cross_ties = true;
        break;
      }
    }
  }

  if (!cross_ties && a.size() + b.size() <= kExactMannWhitneyMaxTotal) {
    out.method = MannWhitneyMethod::kExact;
    const auto counts = mann_whitney_null_counts(a.size(), b.size());
    const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
    const auto u_min = static_cast<std::size_t>(std::llround(out.u));
    double tail = 0.0;
    for (std::size_t u = 0; u <= u_min; ++u) tail += counts[u];
    out.p_two_sided = std::min(1.0, 2.0 * tail / total);
    return out;
  }

  out.method = MannWhitneyMethod::kNormal;
  const double n = na + nb;
  double tie_term = 0.0;
  {
    std::vector<double> sorted(pooled);
    std::sort(sorted.begin(), sorted.end());
    std::size_t i = 0;
    while (i < sorted.size()) {
      std::size_t j = i;
      while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
      const double t = static_cast<double>(j - i);
      tie_term += t * t * t - t;
      i = j;
    }
  }
  const double mu = na * nb / 2.0;
  const double var = na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  if (!(var > 0.0)) {
    out.p_two_sided = 1.0;
    return out;
  }
  const double z = std::max(0.0, std::fabs(out.u - mu) - 0.5) / std::sqrt(var);
  out.p_two_sided = normal_two_sided_p(z);
  return out;
}

double percentile_threshold(std::span<const double> values, double pct) {
  if (values.empty()) throw Error(ErrorCode::kEmptyInput, "percentile of empty sample");
  if (!(pct > 0.0 && pct < 100.0)) {
    throw Error(ErrorCode::kConfigInvalid, "percentile must lie in (0, 100)");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(pct * n / 100.0));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

namespace {

double nearest_rank_sorted(const std::vector<double>& sorted, double pct) {
  auto rank = static_cast<std::size_t>(std::ceil(pct * static_cast<double>(sorted.size()) / 100.0));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

}  // namespace

BootstrapResult bootstrap_spearman(std::span<const double> x, std::span<const double> y,
                                   const BootstrapOptions& options, std::span<const int> strata) {
  if (options.iterations == 0) throw Error(ErrorCode::kConfigInvalid, "iterations must be >= 1");
  // Surfaces LengthMismatch / TooFewSamples / ZeroVariance for the full sample.
  (void)spearman(x, y);

  std::vector<std::vector<std::size_t>> groups;
  if (options.mode == BootstrapMode::kStratified && !strata.empty()) {
    if (strata.size() != x.size()) {
      throw Error(ErrorCode::kLengthMismatch, "strata labels differ in length from samples");
    }
    std::map<int, std::vector<std::size_t>> by_label;
    for (std::size_t i = 0; i < strata.size(); ++i) by_label[strata[i]].push_back(i);
    for (auto& [label, members] : by_label) groups.push_back(std::move(members));
  } else {
    groups.emplace_back(x.size());
    std::iota(groups.front().begin(), groups.front().end(), 0);
  }

  BootstrapResult out;
  out.iterations = options.iterations;
  out.seed = options.seed;
  out.mode = strata.empty() ? BootstrapMode::kPlain : options.mode;
  out.rhos.assign(options.iterations, 0.0);
  std::vector<std::size_t> redraws(options.iterations, 0);

  parallel_for(options.iterations, options.threads, [&](std::size_t it) {
    auto engine = make_substream(options.seed, it);
    std::vector<double> xs(x.size()), ys(y.size());
    for (std::size_t attempt = 0;; ++attempt) {
      std::size_t pos = 0;
      for (const auto& members : groups) {
        for (std::size_t k = 0; k < members.size(); ++k) {
          const std::size_t pick = members[uniform_below(engine, members.size())];
          xs[pos] = x[pick];
          ys[pos] = y[pick];
          ++pos;
        }
      }
      const double rho = rank_correlation(xs, ys);
      if (!std::isnan(rho)) {
        out.rhos[it] = rho;
        redraws[it] = attempt;
        return;
      }
      if (attempt >= options.max_redraws) {
        throw Error(ErrorCode::kZeroVariance,
                    "bootstrap iteration " + std::to_string(it) +
                        " produced only degenerate resamples");
      }
    }
  });

  double sum = 0.0;
  for (std::size_t i = 0; i < out.rhos.size(); ++i) {
    sum += out.rhos[i];
    out.redraws += redraws[i];
  }
  out.mean_rho = sum / static_cast<double>(out.rhos.size());
  std::vector<double> sorted(out.rhos);
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size();
  out.median_rho = m % 2 == 1 ? sorted[m / 2] : (sorted[m / 2 - 1] + sorted[m / 2]) / 2.0;
  out.ci_low = nearest_rank_sorted(sorted, 2.5);
  out.ci_high = nearest_rank_sorted(sorted, 97.5);
  return out;
}

namespace {

SideCorrelation correlate_side(const std::vector<double>& x, const std::vector<double>& y) {
  SideCorrelation side;
  side.n = x.size();
  try {
    side.result = spearman(x, y);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kTooFewSamples && e.code() != ErrorCode::kZeroVariance) throw;
    side.status = std::string(error_code_name(e.code()));
  }
  return side;
}

}  // namespace

SplitCorrelation split_correlation(std::span<const double> x, std::span<const double> y,
                                   double threshold) {
  if (x.size() != y.size()) throw Error(ErrorCode::kLengthMismatch, "split inputs differ in length");
  std::vector<double> bx, by, ax, ay;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < threshold) {
      bx.push_back(x[i]);
      by.push_back(y[i]);
    } else {
      ax.push_back(x[i]);
      ay.push_back(y[i]);
    }
  }
  return {threshold, correlate_side(bx, by), correlate_side(ax, ay)};
}

}  // namespace contrastshap::stats
