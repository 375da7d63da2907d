#include "contrastshap/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "contrastshap/error.hpp"

namespace contrastshap {

namespace {

std::string describe(const CellKey& key) {
  std::ostringstream out;
  out << "subject=" << key.subject_id << " fold=" << key.fold << " region=" << key.region;
  return out.str();
}

std::string at_line(std::size_t line) {
  return line == 0 ? std::string{} : " (row " + std::to_string(line) + ")";
}

}  // namespace

ContrastSet::ContrastSet(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.empty() || names_.size() > kMaxContrasts) {
    throw Error(ErrorCode::kInvalidContrastSet,
                "contrast count must be in [1, " + std::to_string(kMaxContrasts) + "], got " +
                    std::to_string(names_.size()));
  }
  std::set<std::string_view> seen;
  for (const auto& n : names_) {
    if (n.empty()) throw Error(ErrorCode::kInvalidContrastSet, "empty contrast name");
    if (n == "EMPTY" || n.find('+') != std::string::npos) {
      throw Error(ErrorCode::kInvalidContrastSet, "reserved contrast name '" + n + "'");
    }
    if (!seen.insert(n).second) {
      throw Error(ErrorCode::kInvalidContrastSet, "duplicate contrast name '" + n + "'");
    }
  }
}

ContrastSet ContrastSet::brats() { return ContrastSet({"T1c", "T1n", "T2f", "T2w"}); }

std::optional<std::size_t> ContrastSet::index_of(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names_.begin());
}

Coalition coalition_from_names(std::span<const std::string> names, const ContrastSet& contrasts) {
  Coalition c;
  for (const auto& n : names) {
    auto idx = contrasts.index_of(n);
    if (!idx) throw Error(ErrorCode::kUnknownContrast, "'" + n + "' is not a declared contrast");
    c.mask |= std::uint32_t{1} << *idx;
  }
  return c;
}

std::vector<std::string> coalition_names(Coalition c, const ContrastSet& contrasts) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < contrasts.size(); ++i) {
    if (c.contains(i)) out.push_back(contrasts.name(i));
  }
  return out;
}

const MetricTable::Game* MetricTable::find(const CellKey& key) const {
  auto it = cells_.find(key);
  return it == cells_.end() ? nullptr : &it->second;
}

const MetricTable::Game& MetricTable::game(const CellKey& key) const {
  const Game* g = find(key);
  if (g == nullptr) throw Error(ErrorCode::kIncompleteCell, "no cell for " + describe(key));
  return *g;
}

std::vector<RawCell> MetricTable::to_raw_cells() const {
  std::vector<RawCell> rows;
  rows.reserve(cells_.size() * contrasts_.coalition_count());
  for (const auto& [key, game] : cells_) {
    for (std::uint32_t mask = 0; mask < game.size(); ++mask) {
      rows.push_back({key.subject_id, key.fold, key.region, coalition_names({mask}, contrasts_),
                      game[mask], 0});
    }
  }
  return rows;
}

MetricTable validate_metric_table(std::span<const RawCell> rows, const ContrastSet& contrasts,
                                  TableOptions options) {
  if (contrasts.size() == 0) throw Error(ErrorCode::kInvalidContrastSet, "no contrasts declared");
  const std::uint32_t n_coalitions = contrasts.coalition_count();

  MetricTable table;
  table.contrasts_ = contrasts;
  table.options_ = options;

  // Presence is tracked separately so that a legitimate metric value can never be
  // confused with an unfilled slot.
  std::map<CellKey, std::vector<bool>> present;
  std::set<std::string> regions;
  std::set<int> folds;
  std::set<std::string> subjects;

  for (const auto& row : rows) {
    if (!std::isfinite(row.metric)) {
      throw Error(ErrorCode::kMetricOutOfRange, "non-finite metric" + at_line(row.line));
    }
    if (options.require_unit_range && (row.metric < 0.0 || row.metric > 1.0)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "metric " << row.metric << " outside [0,1]" << at_line(row.line);
      throw Error(ErrorCode::kMetricOutOfRange, msg.str());
    }
    if (row.subject_id.empty() || row.region.empty()) {
      throw Error(ErrorCode::kParseError, "empty subject_id or region" + at_line(row.line));
    }
    Coalition c;
    try {
      c = coalition_from_names(row.coalition, contrasts);
    } catch (const Error& e) {
      throw Error(ErrorCode::kUnknownContrast, std::string(e.what()) + at_line(row.line));
    }
    if (static_cast<std::size_t>(c.cardinality()) != row.coalition.size()) {
      throw Error(ErrorCode::kParseError, "contrast repeated in coalition" + at_line(row.line));
    }
    CellKey key{row.subject_id, row.fold, row.region};
    auto& game = table.cells_[key];
    auto& seen = present[key];
    if (game.empty()) {
      game.assign(n_coalitions, 0.0);
      seen.assign(n_coalitions, false);
    }
    if (seen[c.mask]) {
      throw Error(ErrorCode::kDuplicateCell, describe(key) + " coalition mask=" +
                                                 std::to_string(c.mask) + at_line(row.line));
    }
    seen[c.mask] = true;
    game[c.mask] = row.metric;
    regions.insert(row.region);
    folds.insert(row.fold);
    subjects.insert(row.subject_id);
  }

  for (const auto& [key, seen] : present) {
    for (std::uint32_t mask = 0; mask < n_coalitions; ++mask) {
      if (!seen[mask]) {
        throw Error(ErrorCode::kMissingCoalition,
                    describe(key) + " mask=" + std::to_string(mask));
      }
    }
  }

  table.regions_.assign(regions.begin(), regions.end());
  table.folds_.assign(folds.begin(), folds.end());
  table.subjects_.assign(subjects.begin(), subjects.end());
  return table;
}

DiceSummary mean_dice(const MetricTable& table, const std::string& subject_id) {
  const std::uint32_t full = table.contrasts().coalition_count() - 1;
  double sum = 0.0;
  std::size_t count = 0;
  auto it = table.cells().lower_bound(CellKey{subject_id, std::numeric_limits<int>::min(), ""});
  for (; it != table.cells().end() && it->first.subject_id == subject_id; ++it) {
    sum += it->second[full];
    ++count;
  }
  if (count == 0) throw Error(ErrorCode::kEmptyInput, "no cells for subject " + subject_id);
  return {subject_id, sum / static_cast<double>(count)};
}

}  // namespace contrastshap
