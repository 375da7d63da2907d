#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "contrastshap/error.hpp"
#include "contrastshap/ranking.hpp"
#include "oracles.hpp"

namespace cs = contrastshap;

namespace {

std::vector<int> ranks_of(std::vector<double> v, double eps = 0.0) {
  return cs::dense_rank_desc(v, eps).values();
}

}  // namespace

TEST(RankVector, RejectsGapsAndOutOfRange) {
  EXPECT_NO_THROW(cs::RankVector({1, 1, 2, 3}));
  EXPECT_THROW(cs::RankVector({1, 3, 3, 4}), cs::Error);
  EXPECT_THROW(cs::RankVector({0, 1, 2, 3}), cs::Error);
  EXPECT_THROW(cs::RankVector({1, 2, 5, 3}), cs::Error);
  EXPECT_THROW(cs::RankVector(std::vector<int>{}), cs::Error);
  EXPECT_EQ(cs::RankVector({1, 2, 2, 3}).distinct(), 3);
}

TEST(DenseRank, Examples) {
  EXPECT_EQ(ranks_of({0.5, 0.3, 0.1, 0.0}), (std::vector<int>{1, 2, 3, 4}));
  EXPECT_EQ(ranks_of({0.5, 0.5, 0.3, 0.1}), (std::vector<int>{1, 1, 2, 3}));
  EXPECT_EQ(ranks_of({0.50, 0.499, 0.3, 0.1}, 0.01), (std::vector<int>{1, 1, 2, 3}));
  EXPECT_EQ(ranks_of({0.50, 0.499, 0.3, 0.1}), (std::vector<int>{1, 2, 3, 4}));
}

TEST(DenseRank, TieGroupsChainAcrossNeighbours) {
  // 0.30 ~ 0.295 ~ 0.29 chain even though |0.30 - 0.29| > eps.
  EXPECT_EQ(ranks_of({0.30, 0.295, 0.29, 0.1}, 0.006), (std::vector<int>{1, 1, 1, 2}));
}

TEST(DenseRank, RejectsNonFinite) {
  try {
    ranks_of({0.1, std::nan(""), 0.3});
    FAIL();
  } catch (const cs::Error& e) {
    EXPECT_EQ(e.code(), cs::ErrorCode::kNonFiniteInput);
  }
  EXPECT_THROW(ranks_of({0.1, 0.2}, -1.0), cs::Error);
}

TEST(DenseRank, PropertiesOnRandomInputs) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> small(0, 5);  // coarse values force ties
  std::uniform_int_distribution<std::size_t> size(1, 9);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = size(rng);
    std::vector<double> v(n);
    for (auto& x : v) x = small(rng) * 0.1;
    const auto r = cs::dense_rank_desc(v);
    ASSERT_TRUE(cs::is_dense_ranking(r.values()));

    // permutation equivariance
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> pv(n);
    for (std::size_t i = 0; i < n; ++i) pv[i] = v[perm[i]];
    const auto pr = cs::dense_rank_desc(pv);
    for (std::size_t i = 0; i < n; ++i) ASSERT_EQ(pr[i], r[perm[i]]);

    // strictly increasing transform
    std::vector<double> tv(n);
    for (std::size_t i = 0; i < n; ++i) tv[i] = std::exp(3.0 * v[i]) - 7.0;
    ASSERT_EQ(cs::dense_rank_desc(tv), r);

    // largest value gets rank 1, ordering is respected
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (v[i] > v[j]) ASSERT_LT(r[i], r[j]);
        if (v[i] == v[j]) ASSERT_EQ(r[i], r[j]);
      }
    }
  }
}

TEST(ConsensusRank, Examples) {
  std::vector<std::vector<int>> two{{1, 2, 3, 4}, {2, 1, 3, 4}};
  EXPECT_EQ(cs::consensus_rank(two).values(), (std::vector<int>{1, 1, 2, 3}));
  std::vector<std::vector<int>> single{{1, 2, 2, 3}};
  EXPECT_EQ(cs::consensus_rank(single).values(), (std::vector<int>{1, 2, 2, 3}));
  std::vector<std::vector<int>> same{{1, 2, 3, 4}, {1, 2, 3, 4}};
  EXPECT_EQ(cs::consensus_rank(same).values(), (std::vector<int>{1, 2, 3, 4}));
  // Gapped annotator input is re-densified.
  std::vector<std::vector<int>> gapped{{1, 1, 3, 4}};
  EXPECT_EQ(cs::consensus_rank(gapped).values(), (std::vector<int>{1, 1, 2, 3}));
}

TEST(ConsensusRank, ThreeAnnotatorsUseExactMeans) {
  // sums 4, 5, 9, 12 -> means 1.33, 1.67, 3, 4
  std::vector<std::vector<int>> three{{1, 2, 3, 4}, {2, 1, 3, 4}, {1, 2, 3, 4}};
  EXPECT_EQ(cs::consensus_rank(three).values(), (std::vector<int>{1, 2, 3, 4}));
}

TEST(ConsensusRank, IdentityOnIdenticalDenseAnnotators) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const auto r = oracle::random_dense_ranks(1 + trial % 8, rng);
    std::vector<std::vector<int>> copies(1 + trial % 4, r);
    ASSERT_EQ(cs::consensus_rank(copies).values(), r);
  }
}

TEST(ConsensusRank, Errors) {
  EXPECT_THROW(cs::consensus_rank(std::vector<std::vector<int>>{}), cs::Error);
  std::vector<std::vector<int>> ragged{{1, 2, 3, 4}, {1, 2, 3}};
  try {
    cs::consensus_rank(ragged);
    FAIL();
  } catch (const cs::Error& e) {
    EXPECT_EQ(e.code(), cs::ErrorCode::kLengthMismatch);
  }
  std::vector<std::vector<int>> out_of_range{{1, 2, 3, 5}};
  EXPECT_THROW(cs::consensus_rank(out_of_range), cs::Error);
}

TEST(ClinicalStandard, FollowsDeclaredOrder) {
  const auto ref = cs::clinical_standard(cs::ContrastSet::brats());
  EXPECT_EQ(ref.label, "clinical_standard");
  EXPECT_EQ(ref.ranks.values(), (std::vector<int>{1, 3, 2, 3}));
  const auto reordered = cs::clinical_standard(cs::ContrastSet({"T1c", "T2f", "T1n", "T2w"}));
  EXPECT_EQ(reordered.ranks.values(), (std::vector<int>{1, 2, 3, 3}));
}

TEST(ClinicalStandard, NeedsEveryBratsContrast) {
  try {
    cs::clinical_standard(cs::ContrastSet({"T1c", "T1n", "T2w"}));
    FAIL();
  } catch (const cs::Error& e) {
    EXPECT_EQ(e.code(), cs::ErrorCode::kUnknownContrast);
  }
  EXPECT_THROW(cs::clinical_standard(cs::ContrastSet({"T1c", "T1n", "T2f", "T2w", "DWI"})), cs::Error);
}
