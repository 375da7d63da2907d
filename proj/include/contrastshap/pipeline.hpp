#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "contrastshap/agreement.hpp"
#include "contrastshap/core.hpp"
#include "contrastshap/json_out.hpp"
#include "contrastshap/ranking.hpp"
#include "contrastshap/shapley.hpp"
#include "contrastshap/stats.hpp"
#include "contrastshap/uncertainty.hpp"

namespace contrastshap::pipeline {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kOutputDirEnv = "CONTRASTSHAP_OUT_DIR";

struct RunConfig {
  std::string input;
  std::vector<std::string> contrasts{"T1c", "T1n", "T2f", "T2w"};
  // "clinical" or "file:PATH" (annotator CSV or contrast,rank CSV).
  std::vector<std::string> references{"clinical"};
  std::vector<double> dice_bin_edges{0.0, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  double variance_threshold = 0.275;
  std::size_t iterations = 5000;
  double percentile = 80.0;
  std::uint64_t seed = 2024;
  stats::BootstrapMode bootstrap_mode = stats::BootstrapMode::kStratified;
  double tie_epsilon = 0.0;
  bool relax_metric_range = false;
  bool per_region_agreement = false;
  std::size_t threads = 1;
  std::string output_dir = "contrastshap-out";
};

void validate_run_config(const RunConfig& config);
Json config_to_json(const RunConfig& config);
std::string bootstrap_mode_name(stats::BootstrapMode mode);
stats::BootstrapMode parse_bootstrap_mode(const std::string& name);

// A reference ranking shared by every subject, or one per subject (annotator consensus).
struct ResolvedReference {
  std::string label;
  std::optional<RankVector> global;
  std::map<std::string, RankVector> per_subject;

  const RankVector* for_subject(const std::string& subject_id) const;
};

ResolvedReference resolve_reference(const std::string& spec, const ContrastSet& contrasts);

struct SubjectAttribution {
  std::string subject_id;
  double mean_dice = 0.0;
  std::vector<AttributionRecord> cells;             // fold-major, then region
  std::vector<AttributionRecord> overall_per_fold;  // region "overall"
  std::vector<double> phi_mean;                     // overall, averaged over folds
  RankVector ranks;
  std::size_t region_count = 0;
};

struct ShapleyStage {
  ContrastSet contrasts;
  std::vector<SubjectAttribution> subjects;  // sorted by subject_id
  ShapleyWork work_per_cell;
  double max_efficiency_gap = 0.0;
};

ShapleyStage run_shapley(const MetricTable& table, double tie_epsilon, std::size_t threads);

struct Exclusion {
  std::string subject_id;
  std::string stage;
  std::string reason;
};

struct ReferenceAgreement {
  std::string label;
  RankVector reference_for_report;  // global ranking when one exists
  std::vector<AgreementRecord> records;
  std::vector<BinComparison> bins;
  std::string status = "ok";
  // Optional per sub-region NSF, keyed by region.
  std::map<std::string, std::vector<AgreementRecord>> per_region;
};

struct AgreementStage {
  std::vector<DiceBin> bins;
  std::vector<ReferenceAgreement> references;
  std::vector<Exclusion> excluded;
};

AgreementStage run_agreement(const MetricTable& table, const ShapleyStage& shapley,
                             const std::vector<ResolvedReference>& references,
                             const std::vector<DiceBin>& bins, bool per_region,
                             double tie_epsilon);

struct StatusOr {
  std::string status = "ok";
  std::string message;
};

struct UncertaintyStage {
  std::vector<VarianceRecord> records;  // sorted by subject_id
  std::vector<Exclusion> excluded;
  std::optional<double> percentile_cut;
  std::optional<stats::CorrelationResult> full_cohort;
  StatusOr full_cohort_status;
  std::optional<stats::BootstrapResult> bootstrap;
  StatusOr bootstrap_status;
  std::optional<stats::SplitCorrelation> split;
  StatusOr split_status;
};

UncertaintyStage run_uncertainty(const MetricTable& table, const RunConfig& config);

// Stage documents (schemas attributions/agreement/uncertainty v1).
Json shapley_to_json(const ShapleyStage& stage);
Json agreement_to_json(const AgreementStage& stage, const ContrastSet& contrasts);
Json uncertainty_to_json(const UncertaintyStage& stage, const RunConfig& config);

// Consolidated report built only from stage documents, so it can be assembled either
// from a fresh run or from files written by earlier invocations.
Json build_report(const RunConfig& config, const Json& attributions, const Json& agreement,
                  const Json& uncertainty);
std::string summary_text(const Json& report);

// Flat CSV views.
std::string attributions_csv(const ShapleyStage& stage);
std::string agreement_csv(const AgreementStage& stage);
std::string variance_points_csv(const UncertaintyStage& stage);

// Throws SchemaViolation naming `source` when `doc` does not match the named schema.
void require_schema(const Json& doc, const std::string& schema_name, const std::string& source);

struct Outputs {
  std::vector<std::filesystem::path> written;
};

MetricTable load_table(const RunConfig& config);
std::vector<ResolvedReference> load_references(const RunConfig& config, const ContrastSet& contrasts);

Outputs cmd_shapley(const RunConfig& config);
Outputs cmd_agreement(const RunConfig& config);
Outputs cmd_uncertainty(const RunConfig& config);
// Recomputes every stage from the input table, or with `from_dir` consolidates the stage
// documents already present there (validated against their schemas first).
Outputs cmd_report(const RunConfig& config, const std::optional<std::filesystem::path>& from_dir);

// All stage documents plus the report, computed in memory.
struct FullRun {
  Json attributions;
  Json agreement;
  Json uncertainty;
  Json report;
};
FullRun run_all(const MetricTable& table, const RunConfig& config);

}  // namespace contrastshap::pipeline
