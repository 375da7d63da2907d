#include "contrastshap/shapley.hpp"

#include <algorithm>
#include <numeric>

#include "contrastshap/error.hpp"

namespace contrastshap {

std::uint64_t factorial(std::size_t k) {
  if (k > 20) throw Error(ErrorCode::kConfigInvalid, "factorial overflows 64 bits");
  std::uint64_t f = 1;
  for (std::size_t i = 2; i <= k; ++i) f *= i;
  return f;
}

ShapleyWeightTable::ShapleyWeightTable(std::size_t n) : n_(n), denominator_(factorial(n)) {
  if (n == 0 || n > kMaxContrasts) {
    throw Error(ErrorCode::kInvalidContrastSet, "weight table needs 1 <= n <= 16");
  }
  numerators_.resize(n);
  weights_.resize(n);
  for (std::size_t s = 0; s < n; ++s) {
    numerators_[s] = factorial(s) * factorial(n - s - 1);
    // Both operands are below 2^53 for n <= 16, so the quotient is correctly rounded.
    weights_[s] = static_cast<double>(numerators_[s]) / static_cast<double>(denominator_);
  }
}

namespace {

void check_game(std::span<const double> game, std::size_t n) {
  if (n == 0 || n > kMaxContrasts) {
    throw Error(ErrorCode::kInvalidContrastSet, "game needs 1 <= n <= 16");
  }
  if (game.size() != (std::size_t{1} << n)) {
    throw Error(ErrorCode::kIncompleteCell, "game has " + std::to_string(game.size()) +
                                                " values, expected 2^" + std::to_string(n));
  }
}

}  // namespace

std::vector<double> shapley_values(std::span<const double> game, std::size_t n,
                                   ShapleyWork* work) {
  check_game(game, n);
  const ShapleyWeightTable weights(n);
  const std::uint32_t n_masks = std::uint32_t{1} << n;
  std::vector<double> phi(n, 0.0);
  std::size_t terms = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t bit = std::uint32_t{1} << i;
    for (std::uint32_t mask = 0; mask < n_masks; ++mask) {
      if (mask & bit) continue;
      phi[i] += weights.weight(static_cast<std::size_t>(std::popcount(mask))) *
                (game[mask | bit] - game[mask]);
      ++terms;
    }
  }
  if (work != nullptr) {
    work->evaluations = n_masks;
    work->marginal_terms = terms;
  }
  return phi;
}

std::vector<double> shapley_values_by_permutation(std::span<const double> game, std::size_t n) {
  check_game(game, n);
  if (n > kMaxOracleContrasts) {
    throw Error(ErrorCode::kNTooLargeForOracle,
                "permutation oracle limited to n <= " + std::to_string(kMaxOracleContrasts));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> sums(n, 0.0);
  std::uint64_t count = 0;
  do {
    std::uint32_t prefix = 0;
    for (std::size_t player : order) {
      const std::uint32_t with = prefix | (std::uint32_t{1} << player);
      sums[player] += game[with] - game[prefix];
      prefix = with;
    }
    ++count;
  } while (std::next_permutation(order.begin(), order.end()));
  for (auto& s : sums) s /= static_cast<double>(count);
  return sums;
}

AttributionRecord shapley_exact(const MetricTable& table, const std::string& subject, int fold,
                                const std::string& region, ShapleyWork* work) {
  const auto& game = table.game({subject, fold, region});
  return {subject, fold, region, shapley_values(game, table.contrasts().size(), work)};
}

AttributionRecord shapley_permutation_oracle(const MetricTable& table, const std::string& subject,
                                             int fold, const std::string& region) {
  const auto& game = table.game({subject, fold, region});
  return {subject, fold, region,
          shapley_values_by_permutation(game, table.contrasts().size())};
}

double efficiency_gap(std::span<const double> phi, std::span<const double> game) {
  double total = 0.0;
  for (double v : phi) total += v;
  return total - (game.back() - game.front());
}

AttributionRecord aggregate_overall(std::span<const AttributionRecord> records) {
  if (records.empty()) throw Error(ErrorCode::kEmptyInput, "no region records to aggregate");
  const std::size_t n = records.front().phi.size();
  AttributionRecord out{records.front().subject_id, records.front().fold, kOverallRegion,
                        std::vector<double>(n, 0.0)};
  for (const auto& r : records) {
    if (r.phi.size() != n) {
      throw Error(ErrorCode::kMismatchedContrasts, "region '" + r.region + "' has " +
                                                       std::to_string(r.phi.size()) +
                                                       " contrasts, expected " +
                                                       std::to_string(n));
    }
    for (std::size_t i = 0; i < n; ++i) out.phi[i] += r.phi[i];
  }
  for (auto& v : out.phi) v /= static_cast<double>(records.size());
  return out;
}

std::vector<double> mean_over_folds(std::span<const AttributionRecord> records) {
  if (records.empty()) throw Error(ErrorCode::kEmptyInput, "no fold records to average");
  const std::size_t n = records.front().phi.size();
  std::vector<double> mean(n, 0.0);
  for (const auto& r : records) {
    if (r.phi.size() != n) throw Error(ErrorCode::kMismatchedContrasts, "fold records differ in n");
    for (std::size_t i = 0; i < n; ++i) mean[i] += r.phi[i];
  }
  for (auto& v : mean) v /= static_cast<double>(records.size());
  return mean;
}

}  // namespace contrastshap
