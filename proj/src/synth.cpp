#include "contrastshap/synth.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "contrastshap/agreement.hpp"
#include "contrastshap/error.hpp"
#include "contrastshap/random.hpp"

namespace contrastshap::synth {

namespace {

// Stream id reserved for choosing flipped subjects; subject streams use their index.
constexpr std::uint64_t kFlipStream = 0xF1F1F1F1F1F1F1F1ULL;

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorCode::kConfigInvalid, message);
}

}  // namespace

void validate_config(const SynthConfig& c) {
  require(c.n_contrasts >= 1 && c.n_contrasts <= kMaxContrasts, "n_contrasts must be in [1,16]");
  require(c.contrast_names.empty() || c.contrast_names.size() == c.n_contrasts,
          "contrast_names must match n_contrasts");
  require(c.additive_weights.size() == c.n_contrasts, "need one additive weight per contrast");
  for (double w : c.additive_weights) require(std::isfinite(w), "weights must be finite");
  require(std::isfinite(c.base), "base must be finite");
  require(c.n_subjects >= 1, "n_subjects must be >= 1");
  require(c.n_folds >= 1, "n_folds must be >= 1");
  require(!c.regions.empty(), "need at least one region");
  require(std::isfinite(c.interaction_strength) && c.interaction_strength >= 0.0,
          "interaction_strength must be finite and >= 0");
  require(c.interaction_pair.first < c.n_contrasts && c.interaction_pair.second < c.n_contrasts &&
              c.interaction_pair.first != c.interaction_pair.second,
          "interaction_pair must name two distinct contrasts");
  require(std::isfinite(c.fold_noise_sigma) && c.fold_noise_sigma >= 0.0,
          "fold_noise_sigma must be finite and >= 0");
}

ContrastSet synth_contrasts(const SynthConfig& config) {
  if (!config.contrast_names.empty()) return ContrastSet(config.contrast_names);
  if (config.n_contrasts == 4) return ContrastSet::brats();
  std::vector<std::string> names;
  for (std::size_t i = 0; i < config.n_contrasts; ++i) names.push_back("C" + std::to_string(i + 1));
  return ContrastSet(std::move(names));
}

SynthTable generate_subjects(const SynthConfig& layout, std::span<const SubjectSpec> subjects) {
  validate_config(layout);
  const ContrastSet contrasts = synth_contrasts(layout);
  const std::size_t n = contrasts.size();
  const std::uint32_t n_masks = contrasts.coalition_count();
  const std::uint32_t pair_mask = (std::uint32_t{1} << layout.interaction_pair.first) |
                                  (std::uint32_t{1} << layout.interaction_pair.second);

  SynthTable out;
  std::vector<RawCell> rows;
  rows.reserve(subjects.size() * layout.n_folds * layout.regions.size() * n_masks);
  for (std::size_t s = 0; s < subjects.size(); ++s) {
    const auto& spec = subjects[s];
    require(spec.weights.size() == n, "subject " + spec.subject_id + " has wrong weight count");
    require(spec.fold_noise_sigma >= 0.0, "subject noise must be >= 0");
    std::vector<double> clean(n_masks);
    for (std::uint32_t mask = 0; mask < n_masks; ++mask) {
      double d = spec.base;
      for (std::size_t i = 0; i < n; ++i) {
        if (mask & (std::uint32_t{1} << i)) d += spec.weights[i];
      }
      if ((mask & pair_mask) == pair_mask) d += layout.interaction_strength;
      clean[mask] = d;
    }
    auto engine = make_substream(layout.seed, s);
    for (std::size_t f = 0; f < layout.n_folds; ++f) {
      for (const auto& region : layout.regions) {
        for (std::uint32_t mask = 0; mask < n_masks; ++mask) {
          double d = clean[mask];
          if (spec.fold_noise_sigma > 0.0) d += spec.fold_noise_sigma * standard_normal(engine);
          if (d < 0.0 || d > 1.0) {
            ++out.clip_events;
            d = std::clamp(d, 0.0, 1.0);
          }
          rows.push_back({spec.subject_id, static_cast<int>(f + 1), region,
                          coalition_names({mask}, contrasts), d, 0});
        }
      }
    }
  }
  out.table = validate_metric_table(rows, contrasts);
  return out;
}

namespace {

std::string subject_name(const SynthConfig& config, std::size_t index) {
  // Zero-padded so lexicographic order matches generation order.
  const std::size_t width = std::to_string(config.n_subjects).size();
  std::string num = std::to_string(index + 1);
  return config.subject_prefix + std::string(width - num.size(), '0') + num;
}

}  // namespace

SynthTable generate(const SynthConfig& config) {
  validate_config(config);
  std::vector<SubjectSpec> specs;
  specs.reserve(config.n_subjects);
  for (std::size_t s = 0; s < config.n_subjects; ++s) {
    specs.push_back({subject_name(config, s), config.additive_weights, config.base,
                     config.fold_noise_sigma});
  }
  return generate_subjects(config, specs);
}

RankVector reversed(const RankVector& ranks) {
  std::vector<int> out(ranks.size());
  const int d = ranks.distinct();
  for (std::size_t i = 0; i < ranks.size(); ++i) out[i] = d + 1 - ranks[i];
  return RankVector(std::move(out));
}

PlantedCohort planted_agreement_cohort(const SynthConfig& config, const RankVector& target,
                                       double flip_fraction) {
  validate_config(config);
  require(flip_fraction >= 0.0 && flip_fraction <= 1.0, "flip_fraction must be in [0,1]");
  require(target.size() == config.n_contrasts, "target ranking length must equal n_contrasts");

  std::vector<double> levels(config.additive_weights);
  std::sort(levels.begin(), levels.end(), std::greater<>());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  require(static_cast<int>(levels.size()) >= target.distinct(),
          "additive_weights need at least as many distinct values as target rank levels");

  const auto n_flipped =
      static_cast<std::size_t>(std::llround(flip_fraction * static_cast<double>(config.n_subjects)));
  std::vector<std::size_t> order(config.n_subjects);
  std::iota(order.begin(), order.end(), 0);
  auto engine = make_substream(config.seed, kFlipStream);
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[uniform_below(engine, i)]);
  }
  std::vector<bool> flipped(config.n_subjects, false);
  for (std::size_t i = 0; i < n_flipped; ++i) flipped[order[i]] = true;

  const RankVector flipped_ranks = reversed(target);
  PlantedCohort cohort;
  std::vector<SubjectSpec> specs;
  double nsf_sum = 0.0;
  for (std::size_t s = 0; s < config.n_subjects; ++s) {
    const RankVector& planted = flipped[s] ? flipped_ranks : target;
    SubjectSpec spec{subject_name(config, s), std::vector<double>(config.n_contrasts),
                     config.base, config.fold_noise_sigma};
    for (std::size_t i = 0; i < config.n_contrasts; ++i) {
      spec.weights[i] = levels[static_cast<std::size_t>(planted[i] - 1)];
    }
    const double expected = nsf(planted, target);
    nsf_sum += expected;
    cohort.subjects.push_back({spec.subject_id, planted, flipped[s], expected});
    specs.push_back(std::move(spec));
  }
  cohort.expected_mean_nsf = nsf_sum / static_cast<double>(config.n_subjects);
  cohort.synth = generate_subjects(config, specs);
  return cohort;
}

}  // namespace contrastshap::synth
