#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "contrastshap/core.hpp"
#include "contrastshap/ranking.hpp"

namespace contrastshap::synth {

// Coalition games of the form
//   D(S) = base + sum_{i in S} w_i + interaction * [both pair members in S] + noise,
// with independent N(0, sigma^2) noise per (fold, region, coalition), clipped to [0, 1].
// Noiseless additive games have Shapley values equal to w; the interaction term adds
// interaction/2 to each pair member.
struct SynthConfig {
  std::size_t n_contrasts = 4;
  std::vector<std::string> contrast_names;  // empty: BraTS names for n = 4, else C1..Cn
  std::size_t n_subjects = 20;
  std::size_t n_folds = 5;
  std::vector<std::string> regions{"ED", "ET", "NCR"};
  std::vector<double> additive_weights{0.1, 0.2, 0.3, 0.15};
  double base = 0.05;
  double interaction_strength = 0.0;
  std::pair<std::size_t, std::size_t> interaction_pair{0, 1};
  double fold_noise_sigma = 0.0;
  std::uint64_t seed = 0;
  std::string subject_prefix = "S";
};

void validate_config(const SynthConfig& config);
ContrastSet synth_contrasts(const SynthConfig& config);

// Per-subject game parameters; the remaining layout comes from SynthConfig.
struct SubjectSpec {
  std::string subject_id;
  std::vector<double> weights;
  double base = 0.0;
  double fold_noise_sigma = 0.0;
};

struct SynthTable {
  MetricTable table;
  std::size_t clip_events = 0;
};

SynthTable generate_subjects(const SynthConfig& layout, std::span<const SubjectSpec> subjects);

// Every subject shares the configured weights, base and noise level.
SynthTable generate(const SynthConfig& config);

struct PlantedSubject {
  std::string subject_id;
  RankVector planted_ranks;
  bool flipped = false;
  double expected_nsf = 1.0;
};

struct PlantedCohort {
  SynthTable synth;
  std::vector<PlantedSubject> subjects;
  double expected_mean_nsf = 1.0;
};

// Weights are assigned so that each subject's Shapley order follows `target`, except for
// round(flip_fraction * n_subjects) subjects (chosen by seed) whose order is reversed.
// Distinct weight levels come from config.additive_weights sorted descending.
PlantedCohort planted_agreement_cohort(const SynthConfig& config, const RankVector& target,
                                       double flip_fraction);

// Reverses a dense ranking: r -> d + 1 - r.
RankVector reversed(const RankVector& ranks);

}  // namespace contrastshap::synth
