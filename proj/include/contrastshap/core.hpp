#pragma once

#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace contrastshap {

inline constexpr std::size_t kMaxContrasts = 16;

// Ordered, immutable list of input-channel names. Index i <-> name i for the whole run.
class ContrastSet {
 public:
  ContrastSet() = default;
  explicit ContrastSet(std::vector<std::string> names);

  static ContrastSet brats();

  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  std::optional<std::size_t> index_of(std::string_view name) const;
  std::uint32_t coalition_count() const noexcept { return std::uint32_t{1} << names_.size(); }

  friend bool operator==(const ContrastSet&, const ContrastSet&) = default;

 private:
  std::vector<std::string> names_;
};

// Subset of contrasts; bit i set <=> contrast i present.
struct Coalition {
  std::uint32_t mask = 0;

  int cardinality() const noexcept { return std::popcount(mask); }
  bool contains(std::size_t i) const noexcept { return (mask >> i) & 1U; }

  friend auto operator<=>(const Coalition&, const Coalition&) = default;
};

Coalition coalition_from_names(std::span<const std::string> names, const ContrastSet& contrasts);
std::vector<std::string> coalition_names(Coalition c, const ContrastSet& contrasts);

struct CellKey {
  std::string subject_id;
  int fold = 0;
  std::string region;

  friend auto operator<=>(const CellKey&, const CellKey&) = default;
};

// One parsed input row. `line` is the source row number (0 when synthetic).
struct RawCell {
  std::string subject_id;
  int fold = 0;
  std::string region;
  std::vector<std::string> coalition;
  double metric = 0.0;
  std::size_t line = 0;
};

struct TableOptions {
  // When false, any finite metric is accepted (non-Dice games).
  bool require_unit_range = true;

  friend bool operator==(const TableOptions&, const TableOptions&) = default;
};

// The game function D(S) for every (subject, fold, region) cell. Complete by construction:
// each cell holds exactly 2^n values indexed by coalition mask.
class MetricTable {
 public:
  using Game = std::vector<double>;

  const ContrastSet& contrasts() const noexcept { return contrasts_; }
  const std::vector<std::string>& regions() const noexcept { return regions_; }
  const std::vector<int>& folds() const noexcept { return folds_; }
  const std::vector<std::string>& subjects() const noexcept { return subjects_; }
  const std::map<CellKey, Game>& cells() const noexcept { return cells_; }
  const TableOptions& options() const noexcept { return options_; }

  const Game* find(const CellKey& key) const;
  const Game& game(const CellKey& key) const;
  double value(const CellKey& key, Coalition c) const { return game(key).at(c.mask); }

  std::vector<RawCell> to_raw_cells() const;

  friend bool operator==(const MetricTable&, const MetricTable&) = default;

 private:
  friend MetricTable validate_metric_table(std::span<const RawCell>, const ContrastSet&,
                                           TableOptions);

  ContrastSet contrasts_;
  std::vector<std::string> regions_;
  std::vector<int> folds_;
  std::vector<std::string> subjects_;
  std::map<CellKey, Game> cells_;
  TableOptions options_;
};

// Builds a complete table; throws Error on duplicates, gaps, out-of-range metrics
// or unknown contrast names.
MetricTable validate_metric_table(std::span<const RawCell> rows, const ContrastSet& contrasts,
                                  TableOptions options = {});

struct AttributionRecord {
  std::string subject_id;
  int fold = 0;
  std::string region;
  std::vector<double> phi;
};

struct DiceSummary {
  std::string subject_id;
  double mean_dice = 0.0;
};

// Full-coalition metric averaged over every (fold, region) cell of the subject.
DiceSummary mean_dice(const MetricTable& table, const std::string& subject_id);

}  // namespace contrastshap
