#include "contrastshap/agreement.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "contrastshap/error.hpp"
#include "contrastshap/log.hpp"

namespace contrastshap {

int footrule_distance(const RankVector& a, const RankVector& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kLengthMismatch, "rankings have " + std::to_string(a.size()) + " and " +
                                                std::to_string(b.size()) + " entries");
  }
  int d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
  return d;
}

int max_footrule_distance(std::size_t n) { return static_cast<int>(n * n / 2); }

NsfResult nsf_detailed(const RankVector& model, const RankVector& reference) {
  if (model.size() != reference.size()) {
    throw Error(ErrorCode::kLengthMismatch, "model and reference rankings differ in length");
  }
  if (model.size() < 2) throw Error(ErrorCode::kNTooSmall, "footrule needs n >= 2");
  NsfResult out;
  out.distance = footrule_distance(model, reference);
  out.max_distance = max_footrule_distance(model.size());
  const double raw = 1.0 - static_cast<double>(out.distance) / out.max_distance;
  out.value = std::clamp(raw, 0.0, 1.0);
  out.clamped = out.value != raw;
  return out;
}

double nsf(const RankVector& model, const RankVector& reference) {
  const auto r = nsf_detailed(model, reference);
  if (r.clamped) {
    warn("NSF clamped: footrule distance " + std::to_string(r.distance) + " exceeds " +
         std::to_string(r.max_distance));
  }
  return r.value;
}

std::string DiceBin::label() const {
  char buf[64];
  std::snprintf(buf, sizeof buf, "[%g,%g%c", lo, hi, closed_high ? ']' : ')');
  return buf;
}

std::vector<DiceBin> bins_from_edges(std::span<const double> edges) {
  if (edges.size() < 2) throw Error(ErrorCode::kConfigInvalid, "need at least two bin edges");
  std::vector<DiceBin> bins;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (!(edges[i] < edges[i + 1])) {
      throw Error(ErrorCode::kConfigInvalid, "bin edges must be strictly increasing");
    }
    bins.push_back({edges[i], edges[i + 1], i + 2 == edges.size()});
  }
  return bins;
}

std::vector<DiceBin> default_dice_bins() {
  static constexpr double kEdges[] = {0.0, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  return bins_from_edges(kEdges);
}

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size();
  return m % 2 == 1 ? v[m / 2] : (v[m / 2 - 1] + v[m / 2]) / 2.0;
}

bool overlaps(const DiceBin& a, const DiceBin& b) {
  const DiceBin& first = a.lo <= b.lo ? a : b;
  const DiceBin& second = a.lo <= b.lo ? b : a;
  if (second.lo < first.hi) return true;
  return second.lo == first.hi && first.closed_high;
}

}  // namespace

std::vector<BinComparison> group_agreement_comparison(std::span<const AgreementRecord> records,
                                                      std::span<const DiceBin> bins,
                                                      std::size_t baseline_index) {
  if (baseline_index >= bins.size()) {
    throw Error(ErrorCode::kConfigInvalid, "baseline bin index out of range");
  }
  for (std::size_t i = 0; i < bins.size(); ++i) {
    for (std::size_t j = i + 1; j < bins.size(); ++j) {
      if (overlaps(bins[i], bins[j])) {
        throw Error(ErrorCode::kConfigInvalid,
                    "bins " + bins[i].label() + " and " + bins[j].label() + " overlap");
      }
    }
  }
  std::vector<std::vector<double>> members(bins.size());
  for (const auto& r : records) {
    for (std::size_t b = 0; b < bins.size(); ++b) {
      if (bins[b].contains(r.mean_dice)) {
        members[b].push_back(r.nsf);
        break;
      }
    }
  }
  const auto& baseline = members[baseline_index];
  if (baseline.empty()) {
    throw Error(ErrorCode::kEmptyBaseline, "baseline bin " + bins[baseline_index].label() +
                                               " has no subjects");
  }
  std::vector<BinComparison> out;
  for (std::size_t b = 0; b < bins.size(); ++b) {
    BinComparison row;
    row.bin = bins[b];
    row.n = members[b].size();
    if (!members[b].empty()) row.median_nsf = median(members[b]);
    if (b == baseline_index) {
      row.is_baseline = true;
      row.status = "baseline";
    } else if (members[b].empty()) {
      row.status = "EmptyBin";
    } else {
      // Baseline first: U_a counts baseline-over-bin pairs.
      row.test = stats::mann_whitney_u(baseline, members[b]);
      row.significant = row.test->p_two_sided < kSignificanceLevel;
    }
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace contrastshap
