#include "contrastshap/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "contrastshap/error.hpp"
#include "contrastshap/log.hpp"
#include "contrastshap/parallel.hpp"
#include "contrastshap/random.hpp"
#include "contrastshap/table_io.hpp"

namespace contrastshap::pipeline {

namespace fs = std::filesystem;

namespace {

Json real_or_null(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json ranks_json(const RankVector& r) { return Json(r.values()); }

Json exclusions_json(const std::vector<Exclusion>& excluded) {
  Json out = Json::array();
  for (const auto& e : excluded) {
    out.push_back({{"subject_id", e.subject_id}, {"stage", e.stage}, {"reason", e.reason}});
  }
  return out;
}

std::string method_name(stats::MannWhitneyMethod m) {
  return m == stats::MannWhitneyMethod::kExact ? "exact" : "normal";
}

Json correlation_json(const std::optional<stats::CorrelationResult>& r, const StatusOr& status) {
  Json out;
  out["status"] = status.status;
  if (!status.message.empty()) out["message"] = status.message;
  if (r) {
    out["rho"] = r->rho;
    out["p_value"] = r->p_value;
    out["n"] = r->n;
    out["significant"] = r->p_value < kSignificanceLevel;
  }
  return out;
}

Json side_json(const stats::SideCorrelation& side) {
  Json out;
  out["status"] = side.status;
  out["n"] = side.n;
  if (side.result) {
    out["rho"] = side.result->rho;
    out["p_value"] = side.result->p_value;
    out["significant"] = side.result->p_value < kSignificanceLevel;
  }
  return out;
}

template <typename Fn>
StatusOr capture(Fn&& fn) {
  try {
    fn();
    return {};
  } catch (const Error& e) {
    if (e.error_class() != ErrorClass::kComputation) throw;
    return {std::string(error_code_name(e.code())), e.what()};
  }
}

std::string first_nonblank_line(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::string normalized;
    for (auto& f : io::split(io::trim(line), ',')) normalized += (normalized.empty() ? "" : ",") + io::trim(f);
    if (!normalized.empty()) return normalized;
  }
  return {};
}

}  // namespace

void validate_run_config(const RunConfig& c) {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw Error(ErrorCode::kConfigInvalid, msg);
  };
  require(c.iterations >= 1, "iterations must be >= 1");
  require(std::isfinite(c.variance_threshold) && c.variance_threshold >= 0.0,
          "variance threshold must be >= 0");
  require(c.percentile > 0.0 && c.percentile < 100.0, "percentile must be in (0, 100)");
  require(std::isfinite(c.tie_epsilon) && c.tie_epsilon >= 0.0, "tie epsilon must be >= 0");
  require(!c.references.empty(), "at least one reference ranking is required");
  require(!c.contrasts.empty(), "at least one contrast is required");
  require(c.threads >= 1, "threads must be >= 1");
  (void)bins_from_edges(c.dice_bin_edges);
}

std::string bootstrap_mode_name(stats::BootstrapMode mode) {
  return mode == stats::BootstrapMode::kStratified ? "stratified" : "plain";
}

stats::BootstrapMode parse_bootstrap_mode(const std::string& name) {
  if (name == "stratified") return stats::BootstrapMode::kStratified;
  if (name == "plain") return stats::BootstrapMode::kPlain;
  throw Error(ErrorCode::kConfigInvalid, "bootstrap mode must be 'stratified' or 'plain'");
}

Json config_to_json(const RunConfig& c) {
  // Thread count and output location are left out: neither may change results.
  Json out;
  out["input"] = c.input;
  out["contrasts"] = c.contrasts;
  out["references"] = c.references;
  out["dice_bin_edges"] = c.dice_bin_edges;
  out["variance_threshold"] = c.variance_threshold;
  out["iterations"] = c.iterations;
  out["percentile"] = c.percentile;
  out["seed"] = c.seed;
  out["bootstrap_mode"] = bootstrap_mode_name(c.bootstrap_mode);
  out["tie_epsilon"] = c.tie_epsilon;
  out["relax_metric_range"] = c.relax_metric_range;
  out["per_region_agreement"] = c.per_region_agreement;
  return out;
}

const RankVector* ResolvedReference::for_subject(const std::string& subject_id) const {
  if (global) return &*global;
  auto it = per_subject.find(subject_id);
  return it == per_subject.end() ? nullptr : &it->second;
}

ResolvedReference resolve_reference(const std::string& spec, const ContrastSet& contrasts) {
  if (spec == "clinical" || spec == kClinicalStandardLabel) {
    auto ref = clinical_standard(contrasts);
    return {ref.label, ref.ranks, {}};
  }
  if (spec.rfind("file:", 0) != 0) {
    throw Error(ErrorCode::kConfigInvalid, "reference must be 'clinical' or 'file:PATH', got '" + spec + "'");
  }
  const fs::path path = spec.substr(5);
  const std::string text = io::read_text_file(path);
  const std::string header = first_nonblank_line(text);
  std::istringstream in(text);
  if (header == io::kAnnotatorHeader) {
    ResolvedReference ref{kAnnotatorConsensusLabel, std::nullopt, {}};
    for (const auto& [subject, annotators] : io::parse_annotator_csv(in, contrasts, path.string())) {
      ref.per_subject.emplace(subject, consensus_rank(annotators));
    }
    return ref;
  }
  if (header == io::kReferenceHeader) {
    return {"custom:" + path.stem().string(), io::parse_reference_csv(in, contrasts, path.string()), {}};
  }
  throw Error(ErrorCode::kParseError, path.string() + ": header must be '" + io::kAnnotatorHeader +
                                          "' or '" + io::kReferenceHeader + "'");
}

ShapleyStage run_shapley(const MetricTable& table, double tie_epsilon, std::size_t threads) {
  ShapleyStage stage;
  stage.contrasts = table.contrasts();
  const auto& subjects = table.subjects();
  stage.subjects.resize(subjects.size());
  std::vector<ShapleyWork> work(subjects.size());
  std::vector<double> gaps(subjects.size(), 0.0);

  parallel_for(subjects.size(), threads, [&](std::size_t s) {
    SubjectAttribution& out = stage.subjects[s];
    out.subject_id = subjects[s];
    out.mean_dice = mean_dice(table, out.subject_id).mean_dice;
    std::set<std::string> regions_seen;
    for (int fold : table.folds()) {
      std::vector<AttributionRecord> fold_records;
      for (const auto& region : table.regions()) {
        const auto* game = table.find({out.subject_id, fold, region});
        if (game == nullptr) continue;
        ShapleyWork w;
        AttributionRecord rec{out.subject_id, fold, region,
                              shapley_values(*game, table.contrasts().size(), &w)};
        work[s] = w;
        gaps[s] = std::max(gaps[s], std::fabs(efficiency_gap(rec.phi, *game)));
        regions_seen.insert(region);
        fold_records.push_back(rec);
        out.cells.push_back(std::move(rec));
      }
      if (!fold_records.empty()) out.overall_per_fold.push_back(aggregate_overall(fold_records));
    }
    out.region_count = regions_seen.size();
    out.phi_mean = mean_over_folds(out.overall_per_fold);
    out.ranks = dense_rank_desc(out.phi_mean, tie_epsilon);
  });

  for (std::size_t s = 0; s < subjects.size(); ++s) {
    stage.max_efficiency_gap = std::max(stage.max_efficiency_gap, gaps[s]);
    if (work[s].evaluations > 0) stage.work_per_cell = work[s];
  }
  return stage;
}

AgreementStage run_agreement(const MetricTable& table, const ShapleyStage& shapley,
                             const std::vector<ResolvedReference>& references,
                             const std::vector<DiceBin>& bins, bool per_region,
                             double tie_epsilon) {
  AgreementStage stage;
  stage.bins = bins;
  for (const auto& ref : references) {
    ReferenceAgreement out;
    out.label = ref.label;
    if (ref.global) out.reference_for_report = *ref.global;
    for (const auto& subj : shapley.subjects) {
      const RankVector* reference = ref.for_subject(subj.subject_id);
      if (reference == nullptr) {
        stage.excluded.push_back({subj.subject_id, "agreement:" + ref.label,
                                  "no reference ranking for subject"});
        continue;
      }
      out.records.push_back({subj.subject_id, ref.label, nsf(subj.ranks, *reference), subj.mean_dice});
      if (per_region) {
        for (const auto& region : table.regions()) {
          std::vector<AttributionRecord> folds;
          for (const auto& cell : subj.cells) {
            if (cell.region == region) folds.push_back(cell);
          }
          if (folds.empty()) continue;
          const auto ranks = dense_rank_desc(mean_over_folds(folds), tie_epsilon);
          out.per_region[region].push_back(
              {subj.subject_id, ref.label, nsf(ranks, *reference), subj.mean_dice});
        }
      }
    }
    try {
      out.bins = group_agreement_comparison(out.records, bins, 0);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kEmptyBaseline) throw;
      out.status = "EmptyBaseline";
    }
    stage.references.push_back(std::move(out));
  }
  return stage;
}

UncertaintyStage run_uncertainty(const MetricTable& table, const RunConfig& config) {
  UncertaintyStage stage;
  for (const auto& subject : table.subjects()) {
    try {
      stage.records.push_back(subject_variance(table, subject, config.tie_epsilon));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kTooFewFolds && e.code() != ErrorCode::kSubjectMissingFolds) throw;
      warn("excluding " + subject + " from variance cohort: " + e.what());
      stage.excluded.push_back({subject, "uncertainty", e.what()});
    }
  }
  std::vector<double> v, dice;
  for (const auto& r : stage.records) {
    v.push_back(r.overall_v);
    dice.push_back(r.mean_dice);
  }
  if (!v.empty()) stage.percentile_cut = stats::percentile_threshold(v, config.percentile);

  stage.full_cohort_status = capture([&] { stage.full_cohort = stats::spearman(v, dice); });

  std::vector<int> strata;
  for (double x : v) strata.push_back(x <= *stage.percentile_cut ? 0 : 1);
  stats::BootstrapOptions options;
  options.iterations = config.iterations;
  options.seed = config.seed;
  options.mode = config.bootstrap_mode;
  options.threads = config.threads;
  stage.bootstrap_status = capture([&] {
    stage.bootstrap = stats::bootstrap_spearman(
        v, dice, options,
        config.bootstrap_mode == stats::BootstrapMode::kStratified ? std::span<const int>(strata)
                                                                    : std::span<const int>());
  });
  stage.split_status =
      capture([&] { stage.split = stats::split_correlation(v, dice, config.variance_threshold); });
  return stage;
}

Json shapley_to_json(const ShapleyStage& stage) {
  Json doc;
  doc["schema"] = "contrastshap.attributions.v1";
  doc["version"] = kVersion;
  doc["contrasts"] = stage.contrasts.names();
  doc["evaluations_per_cell"] = stage.work_per_cell.evaluations;
  doc["marginal_terms_per_record"] = stage.work_per_cell.marginal_terms;
  doc["max_efficiency_gap"] = stage.max_efficiency_gap;
  Json subjects = Json::array();
  for (const auto& s : stage.subjects) {
    Json row;
    row["subject_id"] = s.subject_id;
    row["mean_dice"] = s.mean_dice;
    row["region_count"] = s.region_count;
    row["phi_mean"] = s.phi_mean;
    row["ranks"] = ranks_json(s.ranks);
    Json cells = Json::array();
    for (const auto& c : s.cells) {
      cells.push_back({{"fold", c.fold}, {"region", c.region}, {"phi", c.phi}});
    }
    row["cells"] = std::move(cells);
    Json overall = Json::array();
    for (const auto& c : s.overall_per_fold) overall.push_back({{"fold", c.fold}, {"phi", c.phi}});
    row["overall"] = std::move(overall);
    subjects.push_back(std::move(row));
  }
  doc["subjects"] = std::move(subjects);
  return doc;
}

Json agreement_to_json(const AgreementStage& stage, const ContrastSet& contrasts) {
  Json doc;
  doc["schema"] = "contrastshap.agreement.v1";
  doc["version"] = kVersion;
  doc["contrasts"] = contrasts.names();
  doc["significance_level"] = kSignificanceLevel;
  Json bins = Json::array();
  for (const auto& b : stage.bins) {
    bins.push_back({{"label", b.label()}, {"lo", b.lo}, {"hi", b.hi}, {"closed_high", b.closed_high}});
  }
  doc["bins"] = std::move(bins);
  Json refs = Json::array();
  for (const auto& r : stage.references) {
    Json ref;
    ref["label"] = r.label;
    ref["ranks"] = r.reference_for_report.size() > 0 ? ranks_json(r.reference_for_report) : Json(nullptr);
    ref["status"] = r.status;
    Json records = Json::array();
    for (const auto& a : r.records) {
      records.push_back({{"subject_id", a.subject_id}, {"mean_dice", a.mean_dice}, {"nsf", a.nsf}});
    }
    ref["records"] = std::move(records);
    Json comparison = Json::array();
    for (const auto& b : r.bins) {
      Json row;
      row["bin"] = b.bin.label();
      row["is_baseline"] = b.is_baseline;
      row["n"] = b.n;
      row["median_nsf"] = real_or_null(b.median_nsf);
      if (b.test) {
        row["u"] = b.test->u;
        row["u_baseline"] = b.test->u_a;
        row["u_bin"] = b.test->u_b;
        row["p_two_sided"] = b.test->p_two_sided;
        row["method"] = method_name(b.test->method);
      } else {
        row["u"] = nullptr;
        row["u_baseline"] = nullptr;
        row["u_bin"] = nullptr;
        row["p_two_sided"] = nullptr;
        row["method"] = nullptr;
      }
      row["significant"] = b.significant;
      row["status"] = b.status;
      comparison.push_back(std::move(row));
    }
    ref["comparison"] = std::move(comparison);
    if (!r.per_region.empty()) {
      Json per_region = Json::object();
      for (const auto& [region, recs] : r.per_region) {
        Json list = Json::array();
        for (const auto& a : recs) list.push_back({{"subject_id", a.subject_id}, {"nsf", a.nsf}});
        per_region[region] = std::move(list);
      }
      ref["per_region"] = std::move(per_region);
    }
    refs.push_back(std::move(ref));
  }
  doc["references"] = std::move(refs);
  doc["excluded"] = exclusions_json(stage.excluded);
  return doc;
}

Json uncertainty_to_json(const UncertaintyStage& stage, const RunConfig& config) {
  Json doc;
  doc["schema"] = "contrastshap.uncertainty.v1";
  doc["version"] = kVersion;
  doc["rng"] = kRngAlgorithm;
  doc["seed"] = config.seed;
  doc["iterations"] = config.iterations;
  doc["percentile"] = config.percentile;
  doc["variance_threshold"] = config.variance_threshold;
  doc["bootstrap_mode"] = bootstrap_mode_name(config.bootstrap_mode);
  Json records = Json::array();
  for (const auto& r : stage.records) {
    Json per_region = Json::object();
    for (const auto& [region, v] : r.per_region_v) per_region[region] = v;
    records.push_back({{"subject_id", r.subject_id},
                       {"overall_v", r.overall_v},
                       {"mean_dice", r.mean_dice},
                       {"per_region_v", std::move(per_region)}});
  }
  doc["records"] = std::move(records);
  doc["excluded"] = exclusions_json(stage.excluded);
  doc["percentile_cut"] = real_or_null(stage.percentile_cut);
  doc["full_cohort"] = correlation_json(stage.full_cohort, stage.full_cohort_status);

  Json boot;
  boot["status"] = stage.bootstrap_status.status;
  if (!stage.bootstrap_status.message.empty()) boot["message"] = stage.bootstrap_status.message;
  if (stage.bootstrap) {
    const auto& b = *stage.bootstrap;
    boot["mode"] = bootstrap_mode_name(b.mode);
    boot["iterations"] = b.iterations;
    boot["seed"] = b.seed;
    boot["mean_rho"] = b.mean_rho;
    boot["median_rho"] = b.median_rho;
    boot["ci_low"] = b.ci_low;
    boot["ci_high"] = b.ci_high;
    boot["redraws"] = b.redraws;
  }
  doc["bootstrap"] = std::move(boot);

  Json split;
  split["status"] = stage.split_status.status;
  if (!stage.split_status.message.empty()) split["message"] = stage.split_status.message;
  split["threshold"] = config.variance_threshold;
  if (stage.split) {
    split["below"] = side_json(stage.split->below);
    split["above"] = side_json(stage.split->above);
  }
  doc["split"] = std::move(split);
  return doc;
}

void require_schema(const Json& doc, const std::string& schema_name, const std::string& source) {
  const auto errors = schema_violations(doc, schema_v1(schema_name));
  if (errors.empty()) return;
  std::string msg = source + " does not match schema " + schema_name + " v1:";
  for (std::size_t i = 0; i < errors.size() && i < 5; ++i) msg += "\n  " + errors[i];
  if (errors.size() > 5) msg += "\n  ... " + std::to_string(errors.size() - 5) + " more";
  throw Error(ErrorCode::kSchemaViolation, msg);
}

Json build_report(const RunConfig& config, const Json& attributions, const Json& agreement,
                  const Json& uncertainty) {
  Json report;
  report["schema"] = "contrastshap.report.v1";
  report["version"] = kVersion;
  report["rng"] = uncertainty.at("rng");
  report["seed"] = uncertainty.at("seed");
  report["config"] = config_to_json(config);
  report["contrasts"] = attributions.at("contrasts");
  report["shapley"] = {{"evaluations_per_cell", attributions.at("evaluations_per_cell")},
                       {"marginal_terms_per_record", attributions.at("marginal_terms_per_record")},
                       {"max_efficiency_gap", attributions.at("max_efficiency_gap")}};

  std::map<std::string, std::map<std::string, double>> nsf_by_subject;  // subject -> label -> nsf
  std::vector<std::string> labels;
  for (const auto& ref : agreement.at("references")) {
    const auto label = ref.at("label").get<std::string>();
    labels.push_back(label);
    for (const auto& rec : ref.at("records")) {
      nsf_by_subject[rec.at("subject_id").get<std::string>()][label] = rec.at("nsf").get<double>();
    }
  }
  std::map<std::string, double> v_by_subject;
  for (const auto& rec : uncertainty.at("records")) {
    v_by_subject[rec.at("subject_id").get<std::string>()] = rec.at("overall_v").get<double>();
  }

  Json subjects = Json::array();
  for (const auto& s : attributions.at("subjects")) {
    const auto id = s.at("subject_id").get<std::string>();
    Json row;
    row["subject_id"] = id;
    row["mean_dice"] = s.at("mean_dice");
    row["phi"] = s.at("phi_mean");
    row["ranks"] = s.at("ranks");
    Json nsf_row = Json::object();
    for (const auto& label : labels) {
      auto sit = nsf_by_subject.find(id);
      if (sit != nsf_by_subject.end() && sit->second.count(label)) {
        nsf_row[label] = sit->second.at(label);
      } else {
        nsf_row[label] = nullptr;
      }
    }
    row["nsf"] = std::move(nsf_row);
    auto vit = v_by_subject.find(id);
    row["overall_v"] = vit == v_by_subject.end() ? Json(nullptr) : Json(vit->second);
    subjects.push_back(std::move(row));
  }
  report["subjects"] = std::move(subjects);

  Json excluded = Json::array();
  for (const auto& e : agreement.at("excluded")) excluded.push_back(e);
  for (const auto& e : uncertainty.at("excluded")) excluded.push_back(e);
  report["excluded"] = std::move(excluded);

  Json agreement_block = Json::array();
  for (const auto& ref : agreement.at("references")) {
    agreement_block.push_back({{"label", ref.at("label")},
                               {"ranks", ref.at("ranks")},
                               {"status", ref.at("status")},
                               {"comparison", ref.at("comparison")}});
  }
  Json cohort;
  cohort["agreement"] = std::move(agreement_block);
  cohort["uncertainty"] = {{"percentile", uncertainty.at("percentile")},
                           {"percentile_cut", uncertainty.at("percentile_cut")},
                           {"full_cohort", uncertainty.at("full_cohort")},
                           {"bootstrap", uncertainty.at("bootstrap")},
                           {"split", uncertainty.at("split")}};
  report["cohort"] = std::move(cohort);
  return report;
}

namespace {

std::string fixed(const Json& v, int digits = 3) {
  if (!v.is_number()) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v.get<double>());
  return buf;
}

std::string p_text(const Json& v) {
  if (!v.is_number()) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v.get<double>());
  return buf;
}

}  // namespace

std::string summary_text(const Json& report) {
  std::ostringstream out;
  out << "contrastshap " << report.at("version").get<std::string>() << " report\n";
  out << "subjects: " << report.at("subjects").size()
      << "  excluded entries: " << report.at("excluded").size() << "\n";
  out << "max efficiency gap: " << report.at("shapley").at("max_efficiency_gap").get<double>() << "\n\n";
  for (const auto& ref : report.at("cohort").at("agreement")) {
    out << "agreement vs " << ref.at("label").get<std::string>() << " ("
        << ref.at("status").get<std::string>() << ")\n";
    for (const auto& row : ref.at("comparison")) {
      out << "  " << row.at("bin").get<std::string>() << "  n=" << row.at("n").get<std::size_t>()
          << "  median NSF=" << fixed(row.at("median_nsf"));
      if (row.at("is_baseline").get<bool>()) {
        out << "  (baseline)";
      } else if (row.at("status").get<std::string>() != "ok") {
        out << "  " << row.at("status").get<std::string>();
      } else {
        out << "  U=" << fixed(row.at("u"), 1) << "  p=" << p_text(row.at("p_two_sided"))
            << (row.at("significant").get<bool>() ? "  *" : "");
      }
      out << "\n";
    }
    out << "\n";
  }
  const auto& unc = report.at("cohort").at("uncertainty");
  out << "uncertainty: percentile cut " << fixed(unc.at("percentile_cut")) << "\n";
  const auto& full = unc.at("full_cohort");
  out << "  full cohort spearman: " << full.at("status").get<std::string>();
  if (full.contains("rho")) out << "  rho=" << fixed(full.at("rho")) << "  p=" << p_text(full.at("p_value"));
  out << "\n";
  const auto& boot = unc.at("bootstrap");
  out << "  bootstrap: " << boot.at("status").get<std::string>();
  if (boot.contains("mean_rho")) {
    out << "  mode=" << boot.at("mode").get<std::string>() << "  mean rho=" << fixed(boot.at("mean_rho"))
        << "  95% CI [" << fixed(boot.at("ci_low")) << ", " << fixed(boot.at("ci_high")) << "]";
  }
  out << "\n";
  const auto& split = unc.at("split");
  out << "  split at " << fixed(split.at("threshold")) << ": " << split.at("status").get<std::string>() << "\n";
  for (const char* side : {"below", "above"}) {
    if (!split.contains(side)) continue;
    const auto& s = split.at(side);
    out << "    " << side << ": n=" << s.at("n").get<std::size_t>() << "  "
        << s.at("status").get<std::string>();
    if (s.contains("rho")) out << "  rho=" << fixed(s.at("rho")) << "  p=" << p_text(s.at("p_value"));
    out << "\n";
  }
  return out.str();
}

std::string attributions_csv(const ShapleyStage& stage) {
  std::ostringstream out;
  out << "subject_id,fold,region";
  for (const auto& name : stage.contrasts.names()) out << ",phi_" << name;
  out << '\n';
  auto row = [&](const std::string& subject, const std::string& fold, const std::string& region,
                 const std::vector<double>& phi) {
    out << subject << ',' << fold << ',' << region;
    for (double v : phi) out << ',' << io::format_real(v);
    out << '\n';
  };
  for (const auto& s : stage.subjects) {
    for (const auto& c : s.cells) row(s.subject_id, std::to_string(c.fold), c.region, c.phi);
    for (const auto& c : s.overall_per_fold) row(s.subject_id, std::to_string(c.fold), c.region, c.phi);
    row(s.subject_id, "mean", kOverallRegion, s.phi_mean);
  }
  return out.str();
}

std::string agreement_csv(const AgreementStage& stage) {
  std::ostringstream out;
  out << "reference,subject_id,mean_dice,nsf\n";
  for (const auto& r : stage.references) {
    for (const auto& a : r.records) {
      out << r.label << ',' << a.subject_id << ',' << io::format_real(a.mean_dice) << ','
          << io::format_real(a.nsf) << '\n';
    }
  }
  return out.str();
}

std::string variance_points_csv(const UncertaintyStage& stage) {
  std::ostringstream out;
  out << "subject_id,overall_v,mean_dice\n";
  for (const auto& r : stage.records) {
    out << r.subject_id << ',' << io::format_real(r.overall_v) << ',' << io::format_real(r.mean_dice)
        << '\n';
  }
  return out.str();
}

MetricTable load_table(const RunConfig& config) {
  if (config.input.empty()) throw Error(ErrorCode::kConfigInvalid, "no input table given");
  TableOptions options;
  options.require_unit_range = !config.relax_metric_range;
  return io::read_metric_table(config.input, ContrastSet(config.contrasts), options);
}

std::vector<ResolvedReference> load_references(const RunConfig& config, const ContrastSet& contrasts) {
  std::vector<ResolvedReference> refs;
  std::set<std::string> labels;
  for (const auto& spec : config.references) {
    refs.push_back(resolve_reference(spec, contrasts));
    if (!labels.insert(refs.back().label).second) {
      throw Error(ErrorCode::kConfigInvalid, "reference label '" + refs.back().label + "' given twice");
    }
  }
  return refs;
}

namespace {

fs::path out_path(const RunConfig& config, const std::string& name) { return fs::path(config.output_dir) / name; }

void emit(Outputs& outputs, const fs::path& path, const std::string& content) {
  io::write_text_file(path, content);
  outputs.written.push_back(path);
}

std::string rhos_csv(const UncertaintyStage& stage) {
  std::ostringstream out;
  out << "iteration,rho\n";
  if (stage.bootstrap) {
    for (std::size_t i = 0; i < stage.bootstrap->rhos.size(); ++i) {
      out << i << ',' << io::format_real(stage.bootstrap->rhos[i]) << '\n';
    }
  }
  return out.str();
}

}  // namespace

Outputs cmd_shapley(const RunConfig& config) {
  validate_run_config(config);
  const auto table = load_table(config);
  const auto stage = run_shapley(table, config.tie_epsilon, config.threads);
  Outputs outputs;
  emit(outputs, out_path(config, "attributions.csv"), attributions_csv(stage));
  emit(outputs, out_path(config, "attributions.json"), dump_json(shapley_to_json(stage)));
  return outputs;
}

Outputs cmd_agreement(const RunConfig& config) {
  validate_run_config(config);
  const auto table = load_table(config);
  const auto refs = load_references(config, table.contrasts());
  const auto shapley = run_shapley(table, config.tie_epsilon, config.threads);
  const auto stage = run_agreement(table, shapley, refs, bins_from_edges(config.dice_bin_edges),
                                   config.per_region_agreement, config.tie_epsilon);
  Outputs outputs;
  emit(outputs, out_path(config, "agreement.csv"), agreement_csv(stage));
  emit(outputs, out_path(config, "agreement.json"), dump_json(agreement_to_json(stage, table.contrasts())));
  return outputs;
}

Outputs cmd_uncertainty(const RunConfig& config) {
  validate_run_config(config);
  const auto table = load_table(config);
  const auto stage = run_uncertainty(table, config);
  Outputs outputs;
  emit(outputs, out_path(config, "variance_dice_points.csv"), variance_points_csv(stage));
  emit(outputs, out_path(config, "bootstrap_rhos.csv"), rhos_csv(stage));
  emit(outputs, out_path(config, "uncertainty.json"), dump_json(uncertainty_to_json(stage, config)));
  return outputs;
}

FullRun run_all(const MetricTable& table, const RunConfig& config) {
  validate_run_config(config);
  const auto refs = load_references(config, table.contrasts());
  const auto shapley = run_shapley(table, config.tie_epsilon, config.threads);
  const auto agreement = run_agreement(table, shapley, refs, bins_from_edges(config.dice_bin_edges),
                                       config.per_region_agreement, config.tie_epsilon);
  const auto uncertainty = run_uncertainty(table, config);
  FullRun run;
  run.attributions = shapley_to_json(shapley);
  run.agreement = agreement_to_json(agreement, table.contrasts());
  run.uncertainty = uncertainty_to_json(uncertainty, config);
  run.report = build_report(config, run.attributions, run.agreement, run.uncertainty);
  return run;
}

Outputs cmd_report(const RunConfig& config, const std::optional<fs::path>& from_dir) {
  validate_run_config(config);
  Json attributions, agreement, uncertainty;
  if (from_dir) {
    auto load = [&](const std::string& file, const std::string& schema) {
      const fs::path path = *from_dir / file;
      if (!fs::exists(path)) {
        throw Error(ErrorCode::kIo, path.string() + " not found; run the '" + schema +
                                        "' stage first or drop --from-dir to recompute");
      }
      Json doc;
      try {
        doc = Json::parse(io::read_text_file(path));
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::kSchemaViolation, path.string() + " is not valid JSON: " + e.what());
      }
      require_schema(doc, schema, path.string());
      return doc;
    };
    attributions = load("attributions.json", "attributions");
    agreement = load("agreement.json", "agreement");
    uncertainty = load("uncertainty.json", "uncertainty");
  } else {
    auto run = run_all(load_table(config), config);
    attributions = std::move(run.attributions);
    agreement = std::move(run.agreement);
    uncertainty = std::move(run.uncertainty);
  }
  const Json report = build_report(config, attributions, agreement, uncertainty);
  require_schema(report, "report", "report");
  Outputs outputs;
  emit(outputs, out_path(config, "report.json"), dump_json(report));
  emit(outputs, out_path(config, "summary.txt"), summary_text(report));
  return outputs;
}

}  // namespace contrastshap::pipeline
