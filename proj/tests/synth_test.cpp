#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "contrastshap/agreement.hpp"
#include "contrastshap/error.hpp"
#include "contrastshap/pipeline.hpp"
#include "contrastshap/stats.hpp"
#include "contrastshap/synth.hpp"
#include "contrastshap/uncertainty.hpp"

namespace cs = contrastshap;
namespace synth = contrastshap::synth;

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size();
  return m % 2 ? v[m / 2] : (v[m / 2 - 1] + v[m / 2]) / 2;
}

double median_v(const cs::MetricTable& table) {
  std::vector<double> vs;
  for (const auto& s : table.subjects()) vs.push_back(cs::subject_variance(table, s).overall_v);
  return median(vs);
}

}  // namespace

TEST(Synth, NoiselessAdditiveGamesRecoverWeights) {
  synth::SynthConfig config;
  config.additive_weights = {0.1, 0.2, 0.3, 0.4};
  config.base = 0.0;
  config.n_subjects = 6;
  const auto out = synth::generate(config);
  EXPECT_EQ(out.clip_events, 0u);
  const auto stage = cs::pipeline::run_shapley(out.table, 0.0, 1);
  for (const auto& subject : stage.subjects) {
    for (const auto& rec : subject.cells) {
      for (std::size_t i = 0; i < 4; ++i) ASSERT_NEAR(rec.phi[i], config.additive_weights[i], 1e-9);
    }
    // T1c, T1n, T2f, T2w with weights 0.1..0.4 rank 4, 3, 2, 1.
    EXPECT_EQ(subject.ranks, cs::RankVector({4, 3, 2, 1}));
  }
  EXPECT_LE(stage.max_efficiency_gap, 1e-12);
}

TEST(Synth, InteractionAddsHalfToEachPartner) {
  synth::SynthConfig config;
  config.n_subjects = 1;
  config.n_folds = 2;
  config.interaction_strength = 0.08;
  config.interaction_pair = {1, 3};
  const auto table = synth::generate(config).table;
  const auto rec = cs::shapley_exact(table, table.subjects()[0], 1, "ET");
  const std::vector<double> expected{0.1, 0.24, 0.3, 0.19};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(rec.phi[i], expected[i], 1e-12);
}

TEST(Synth, ZeroNoiseMeansZeroVariance) {
  synth::SynthConfig config;
  config.n_subjects = 8;
  const auto table = synth::generate(config).table;
  for (const auto& s : table.subjects()) EXPECT_EQ(cs::subject_variance(table, s).overall_v, 0.0);
}

TEST(Synth, MedianVarianceGrowsWithNoise) {
  synth::SynthConfig config;
  config.n_subjects = 60;
  config.base = 0.1;
  config.seed = 17;
  double previous = -1.0;
  for (double sigma : {0.0, 0.05, 0.2}) {
    config.fold_noise_sigma = sigma;
    const double v = median_v(synth::generate(config).table);
    EXPECT_GE(v, previous) << "sigma " << sigma;
    previous = v;
  }
  EXPECT_GT(previous, 0.0);
}

TEST(Synth, Deterministic) {
  synth::SynthConfig config;
  config.fold_noise_sigma = 0.03;
  config.seed = 99;
  const auto a = synth::generate(config);
  const auto b = synth::generate(config);
  EXPECT_TRUE(a.table == b.table);
  EXPECT_EQ(a.clip_events, b.clip_events);
  config.seed = 100;
  EXPECT_FALSE(synth::generate(config).table == a.table);
}

TEST(Synth, ClipEventsAreCounted) {
  synth::SynthConfig config;
  config.base = 0.3;  // full coalition sums to 1.05
  const auto out = synth::generate(config);
  EXPECT_GT(out.clip_events, 0u);
  for (const auto& [key, game] : out.table.cells()) {
    for (double v : game) ASSERT_LE(v, 1.0);
  }
}

TEST(Synth, InvalidConfigs) {
  auto expect_invalid = [](const synth::SynthConfig& c) {
    try {
      synth::generate(c);
      ADD_FAILURE() << "accepted invalid config";
    } catch (const cs::Error& e) {
      EXPECT_EQ(e.code(), cs::ErrorCode::kConfigInvalid);
    }
  };
  synth::SynthConfig c;
  c.fold_noise_sigma = -0.1;
  expect_invalid(c);
  c = {};
  c.additive_weights = {0.1, 0.2};
  expect_invalid(c);
  c = {};
  c.additive_weights[2] = std::nan("");
  expect_invalid(c);
  c = {};
  c.interaction_strength = -1;
  expect_invalid(c);
  c = {};
  c.n_subjects = 0;
  expect_invalid(c);
}

TEST(Planted, FlipExtremes) {
  synth::SynthConfig config;
  config.n_subjects = 10;
  const cs::RankVector target({1, 2, 3, 4});
  for (double f : {0.0, 1.0}) {
    const auto cohort = synth::planted_agreement_cohort(config, target, f);
    const auto stage = cs::pipeline::run_shapley(cohort.synth.table, 0.0, 1);
    ASSERT_EQ(stage.subjects.size(), 10u);
    for (const auto& s : stage.subjects) EXPECT_EQ(cs::nsf(s.ranks, target), f == 0.0 ? 1.0 : 0.0);
    EXPECT_EQ(cohort.expected_mean_nsf, f == 0.0 ? 1.0 : 0.0);
  }
}

TEST(Planted, HalfFlippedMeanMatchesExpectation) {
  synth::SynthConfig config;
  config.n_subjects = 100;
  config.fold_noise_sigma = 0.004;
  config.seed = 8;
  const cs::RankVector target({1, 2, 3, 4});
  const auto cohort = synth::planted_agreement_cohort(config, target, 0.5);
  const auto stage = cs::pipeline::run_shapley(cohort.synth.table, 0.0, 1);
  double observed = 0.0;
  for (const auto& s : stage.subjects) observed += cs::nsf(s.ranks, target);
  observed /= static_cast<double>(stage.subjects.size());
  EXPECT_EQ(cohort.expected_mean_nsf, 0.5);
  EXPECT_NEAR(observed, cohort.expected_mean_nsf, 0.05);
  const auto flipped = std::count_if(cohort.subjects.begin(), cohort.subjects.end(),
                                     [](const auto& s) { return s.flipped; });
  EXPECT_EQ(flipped, 50);
}

TEST(Planted, TiedTargetNeedsTolerance) {
  synth::SynthConfig config;
  config.n_subjects = 5;
  const auto target = cs::clinical_standard(cs::ContrastSet::brats()).ranks;
  const auto cohort = synth::planted_agreement_cohort(config, target, 0.0);
  const auto stage = cs::pipeline::run_shapley(cohort.synth.table, 1e-9, 1);
  for (const auto& s : stage.subjects) EXPECT_EQ(s.ranks, target);
}

TEST(Planted, Errors) {
  synth::SynthConfig config;
  EXPECT_THROW(synth::planted_agreement_cohort(config, cs::RankVector({1, 2, 3}), 0.0), cs::Error);
  EXPECT_THROW(synth::planted_agreement_cohort(config, cs::RankVector({1, 2, 3, 4}), 1.5), cs::Error);
  config.additive_weights = {0.1, 0.1, 0.2, 0.2};
  EXPECT_THROW(synth::planted_agreement_cohort(config, cs::RankVector({1, 2, 3, 4}), 0.0), cs::Error);
}

TEST(Synth, NullCaseBootstrapCoversZero) {
  // Noise level and base are drawn independently per subject, so V carries no Dice signal.
  int covered = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    synth::SynthConfig layout;
    layout.seed = seed;
    std::mt19937_64 rng(seed * 7919 + 1);
    std::uniform_real_distribution<double> sigma(0.0, 0.05), base(0.0, 0.1);
    std::vector<synth::SubjectSpec> specs;
    for (int s = 0; s < 40; ++s) {
      specs.push_back({"N" + std::to_string(100 + s), layout.additive_weights, base(rng), sigma(rng)});
    }
    const auto table = synth::generate_subjects(layout, specs).table;
    std::vector<double> v, dice;
    for (const auto& id : table.subjects()) {
      const auto rec = cs::subject_variance(table, id);
      v.push_back(rec.overall_v);
      dice.push_back(rec.mean_dice);
    }
    cs::stats::BootstrapOptions opt;
    opt.iterations = 1000;
    opt.seed = seed;
    opt.mode = cs::stats::BootstrapMode::kPlain;
    const auto r = cs::stats::bootstrap_spearman(v, dice, opt);
    if (r.ci_low <= 0.0 && 0.0 <= r.ci_high) ++covered;
  }
  EXPECT_GE(covered, 45);
}
