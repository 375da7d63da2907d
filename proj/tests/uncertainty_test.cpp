#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "contrastshap/error.hpp"
#include "contrastshap/uncertainty.hpp"
#include "oracles.hpp"
#include "test_helpers.hpp"

namespace cs = contrastshap;
using testing_helpers::numbered_contrasts;

namespace {

std::vector<cs::RankVector> to_rank_vectors(const std::vector<std::vector<int>>& rows) {
  std::vector<cs::RankVector> out;
  for (const auto& r : rows) out.emplace_back(r);
  return out;
}

// Additive game whose Shapley values are exactly `w` (dyadic values keep the ties exact).
std::vector<double> additive_game(const std::vector<double>& w, double base = 0.0) {
  std::vector<double> g(std::size_t{1} << w.size(), base);
  for (std::uint32_t mask = 0; mask < g.size(); ++mask) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (mask & (1u << i)) g[mask] += w[i];
    }
  }
  return g;
}

// Weights whose descending dense ranking is `ranks` (rank r -> weight (5 - r) / 32).
std::vector<double> weights_for(const std::vector<int>& ranks) {
  std::vector<double> w;
  for (int r : ranks) w.push_back((5 - r) / 32.0);
  return w;
}

}  // namespace

TEST(RankVariance, HandComputedCases) {
  const auto constant = to_rank_vectors(std::vector<std::vector<int>>(5, {1, 2, 3, 4}));
  EXPECT_EQ(cs::rank_variance(constant), 0.0);

  // First contrast alternates 1,2,1,2,1; the rest stay put. Ranks stay dense per fold.
  const auto alternating = to_rank_vectors({{1, 2, 3, 4}, {2, 1, 3, 4}, {1, 2, 3, 4}, {2, 1, 3, 4}, {1, 2, 3, 4}});
  // Both of the first two contrasts swing between 1 and 2, each with Var = 0.3.
  EXPECT_NEAR(cs::rank_variance(alternating), 0.15, 1e-12);
  const auto single = to_rank_vectors({{1, 2, 2, 2}, {2, 1, 1, 1}, {1, 2, 2, 2}, {2, 1, 1, 1}, {1, 2, 2, 2}});
  EXPECT_NEAR(cs::rank_variance(single), 0.3, 1e-12);

  const auto reversal = to_rank_vectors({{1, 2, 3, 4}, {4, 3, 2, 1}});
  EXPECT_NEAR(cs::rank_variance(reversal), 2.5, 1e-12);
}

TEST(RankVariance, SingleMovingContrastGivesQuarterOfItsVariance) {
  // Only contrast 0's rank changes: folds 1,3,5 rank it 1 and folds 2,4 rank it 2 while the
  // others keep a ranking that stays dense in both cases.
  const auto rows = to_rank_vectors({{1, 1, 2, 3}, {2, 1, 2, 3}, {1, 1, 2, 3}, {2, 1, 2, 3}, {1, 1, 2, 3}});
  EXPECT_NEAR(cs::rank_variance(rows), 0.075, 1e-12);
}

TEST(RankVariance, MatchesOracleAndBound) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 3000; ++trial) {
    const std::size_t n = 2 + trial % 7, k = 2 + (trial / 7) % 6;
    std::vector<std::vector<int>> rows;
    for (std::size_t f = 0; f < k; ++f) rows.push_back(oracle::random_dense_ranks(n, rng));
    const double v = cs::rank_variance(to_rank_vectors(rows));
    ASSERT_NEAR(v, oracle::rank_variance(rows), 1e-12);
    ASSERT_GE(v, 0.0);
    ASSERT_LE(v, cs::max_rank_variance(n, k) + 1e-12);
    const bool constant = std::all_of(rows.begin(), rows.end(), [&](const auto& r) { return r == rows[0]; });
    ASSERT_EQ(v == 0.0, constant);

    std::shuffle(rows.begin(), rows.end(), rng);
    ASSERT_EQ(cs::rank_variance(to_rank_vectors(rows)), v);
  }
}

TEST(RankVariance, BoundIsAttained) {
  // K = 2 extreme: one fold ranks a contrast 1, the other ranks it n.
  const auto rows = to_rank_vectors({{1, 4, 2, 3}, {4, 1, 2, 3}});
  const double per = 4.5;
  EXPECT_EQ(cs::max_rank_variance(4, 2), per);
  EXPECT_NEAR(cs::rank_variance(rows), 2 * per / 4, 1e-12);
}

TEST(RankVariance, Errors) {
  const auto one = to_rank_vectors({{1, 2, 3}});
  try {
    cs::rank_variance(one);
    FAIL();
  } catch (const cs::Error& e) {
    EXPECT_EQ(e.code(), cs::ErrorCode::kTooFewFolds);
  }
  const auto ragged = to_rank_vectors({{1, 2, 3}, {1, 2}});
  try {
    cs::rank_variance(ragged);
    FAIL();
  } catch (const cs::Error& e) {
    EXPECT_EQ(e.code(), cs::ErrorCode::kLengthMismatch);
  }
}

namespace {

struct FoldPlan {
  int fold;
  std::string region;
  std::vector<double> weights;
  double base = 0.125;
};

cs::MetricTable table_from(const cs::ContrastSet& contrasts, const std::vector<FoldPlan>& plans,
                           const std::string& subject = "S1") {
  std::vector<cs::RawCell> rows;
  for (const auto& p : plans) {
    auto r = testing_helpers::cell_rows(contrasts, additive_game(p.weights, p.base), subject, p.fold, p.region);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  return cs::validate_metric_table(rows, contrasts);
}

}  // namespace

TEST(SubjectVariance, IdenticalFoldsGiveZero) {
  const auto contrasts = numbered_contrasts(4);
  std::vector<FoldPlan> plans;
  for (int f = 1; f <= 5; ++f) {
    for (const char* region : {"ED", "ET", "NCR"}) plans.push_back({f, region, {0.1, 0.2, 0.3, 0.15}});
  }
  const auto rec = cs::subject_variance(table_from(contrasts, plans), "S1");
  EXPECT_EQ(rec.overall_v, 0.0);
  EXPECT_EQ(rec.per_region_v.size(), 3u);
  EXPECT_NEAR(rec.mean_dice, 0.875, 1e-12);
}

TEST(SubjectVariance, MatchesRankMatrixRecomputation) {
  const auto contrasts = numbered_contrasts(4);
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    std::map<std::string, std::vector<std::vector<int>>> planned;
    std::vector<FoldPlan> plans;
    for (int f = 1; f <= 5; ++f) {
      for (const char* region : {"ED", "NCR"}) {
        auto ranks = oracle::random_dense_ranks(4, rng);
        planned[region].push_back(ranks);
        plans.push_back({f, region, weights_for(ranks)});
      }
    }
    const auto rec = cs::subject_variance(table_from(contrasts, plans), "S1");
    double sum = 0.0;
    for (const auto& [region, rows] : planned) {
      ASSERT_NEAR(rec.per_region_v.at(region), oracle::rank_variance(rows), 1e-12);
      sum += rec.per_region_v.at(region);
    }
    ASSERT_NEAR(rec.overall_v, sum / 2.0, 1e-12);
  }
}

TEST(SubjectVariance, ScalingAFoldLeavesVarianceUnchanged) {
  const auto contrasts = numbered_contrasts(4);
  std::vector<FoldPlan> plans{{1, "ET", {0.1, 0.2, 0.3, 0.15}, 0.0},
                              {2, "ET", {0.2, 0.1, 0.3, 0.15}, 0.0},
                              {3, "ET", {0.1, 0.2, 0.15, 0.3}, 0.0}};
  const double v = cs::subject_variance(table_from(contrasts, plans), "S1").overall_v;
  for (auto& w : plans[1].weights) w *= 0.5;
  EXPECT_EQ(cs::subject_variance(table_from(contrasts, plans), "S1").overall_v, v);
  EXPECT_GT(v, 0.0);
}

TEST(SubjectVariance, SingleRegionAndMissingFolds) {
  const auto contrasts = numbered_contrasts(3);
  std::vector<cs::RawCell> rows;
  for (int f = 1; f <= 3; ++f) {
    auto r = testing_helpers::cell_rows(contrasts, additive_game({0.1, 0.2, f == 2 ? 0.05 : 0.3}), "A", f, "ET");
    rows.insert(rows.end(), r.begin(), r.end());
  }
  // Subject B only has folds 1 and 2 of its region; fold 3 exists in the table via A.
  for (int f = 1; f <= 2; ++f) {
    auto r = testing_helpers::cell_rows(contrasts, additive_game({0.1, 0.2, 0.3}), "B", f, "ET");
    rows.insert(rows.end(), r.begin(), r.end());
  }
  const auto table = cs::validate_metric_table(rows, contrasts);
  const auto a = cs::subject_variance(table, "A");
  ASSERT_EQ(a.per_region_v.size(), 1u);
  EXPECT_EQ(a.overall_v, a.per_region_v.at("ET"));
  // fold 2 reorders the third contrast
  const std::vector<std::vector<int>> expected{{3, 2, 1}, {2, 1, 3}, {3, 2, 1}};
  EXPECT_NEAR(a.overall_v, oracle::rank_variance(expected), 1e-12);
  try {
    cs::subject_variance(table, "B");
    FAIL();
  } catch (const cs::Error& e) {
    EXPECT_EQ(e.code(), cs::ErrorCode::kSubjectMissingFolds);
  }
}

TEST(SubjectVariance, SingleFoldTableIsTooFewFolds) {
  const auto contrasts = numbered_contrasts(2);
  const auto table = testing_helpers::single_cell_table(contrasts, additive_game({0.1, 0.2}));
  try {
    cs::subject_variance(table, "S1");
    FAIL();
  } catch (const cs::Error& e) {
    EXPECT_EQ(e.code(), cs::ErrorCode::kTooFewFolds);
  }
}
