// Command-line front end: synth, shapley, agreement, uncertainty, report.

#include <cstdlib>
#include <stdexcept>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "contrastshap/error.hpp"
#include "contrastshap/json_out.hpp"
#include "contrastshap/pipeline.hpp"
#include "contrastshap/random.hpp"
#include "contrastshap/synth.hpp"
#include "contrastshap/table_io.hpp"

namespace cs = contrastshap;
namespace pl = contrastshap::pipeline;

namespace {

enum ExitCode : int { kOk = 0, kUsage = 1, kValidation = 2, kComputation = 3, kIo = 4 };

int exit_code_for(const cs::Error& e) {
  switch (e.error_class()) {
    case cs::ErrorClass::kValidation: return kValidation;
    case cs::ErrorClass::kComputation: return kComputation;
    case cs::ErrorClass::kIo: return kIo;
  }
  return kComputation;
}

struct AnalysisFlags {
  pl::RunConfig config;
  std::string bootstrap_mode = "stratified";
  std::string from_dir;
};

void add_analysis_options(CLI::App* cmd, AnalysisFlags& f) {
  auto& c = f.config;
  cmd->add_option("-i,--input", c.input, "Metric table (CSV, or JSON by extension)")->required();
  cmd->add_option("--contrasts", c.contrasts, "Contrast names in index order")
      ->delimiter(',')
      ->capture_default_str();
  cmd->add_option("--reference", c.references, "Reference ranking: clinical | file:PATH (repeatable)")
      ->capture_default_str();
  cmd->add_option("--dice-bins", c.dice_bin_edges, "Dice bin edges; the first bin is the baseline")
      ->delimiter(',')
      ->capture_default_str();
  cmd->add_option("--variance-threshold", c.variance_threshold, "Split point for subcohort correlations")
      ->capture_default_str();
  cmd->add_option("--iterations", c.iterations, "Bootstrap iterations")->capture_default_str();
  cmd->add_option("--percentile", c.percentile, "Low-variance stratum cut (nearest-rank percentile)")
      ->capture_default_str();
  cmd->add_option("--seed", c.seed, "Bootstrap seed")->capture_default_str();
  cmd->add_option("--bootstrap-mode", f.bootstrap_mode, "stratified | plain")
      ->check(CLI::IsMember({"stratified", "plain"}))
      ->capture_default_str();
  cmd->add_option("--tie-epsilon", c.tie_epsilon, "Shapley values this close share a rank")
      ->capture_default_str();
  cmd->add_flag("--relax-range", c.relax_metric_range, "Accept any finite metric, not just [0,1]");
  cmd->add_flag("--per-region-agreement", c.per_region_agreement, "Also report NSF per sub-region");
  cmd->add_option("--threads", c.threads, "Worker threads (results do not depend on it)")
      ->capture_default_str();
  cmd->add_option("-o,--out", c.output_dir, "Output directory")
      ->envname(pl::kOutputDirEnv)
      ->capture_default_str();
}

struct SynthFlags {
  cs::synth::SynthConfig config;
  std::string out = "contrastshap-out";
  double flip_fraction = -1.0;
  std::string target = "clinical";
  std::vector<std::size_t> pair{0, 1};
};

void add_synth_options(CLI::App* cmd, SynthFlags& f) {
  auto& c = f.config;
  cmd->add_option("--contrasts", c.contrast_names, "Contrast names (default T1c,T1n,T2f,T2w for 4)")
      ->delimiter(',');
  cmd->add_option("--n-contrasts", c.n_contrasts)->capture_default_str();
  cmd->add_option("--subjects", c.n_subjects)->capture_default_str();
  cmd->add_option("--folds", c.n_folds)->capture_default_str();
  cmd->add_option("--regions", c.regions)->delimiter(',')->capture_default_str();
  cmd->add_option("--weights", c.additive_weights, "Additive weight per contrast")
      ->delimiter(',')
      ->capture_default_str();
  cmd->add_option("--base", c.base, "D(empty coalition) before noise")->capture_default_str();
  cmd->add_option("--interaction", c.interaction_strength)->capture_default_str();
  cmd->add_option("--interaction-pair", f.pair, "Two contrast indices")->delimiter(',')->expected(2);
  cmd->add_option("--sigma", c.fold_noise_sigma, "Per-coalition noise standard deviation")
      ->capture_default_str();
  cmd->add_option("--seed", c.seed)->capture_default_str();
  cmd->add_option("--prefix", c.subject_prefix)->capture_default_str();
  cmd->add_option("--planted-flip-fraction", f.flip_fraction,
                  "Plant rankings that follow --target except for this fraction of subjects");
  cmd->add_option("--target", f.target, "Planted target ranking: clinical or comma-separated ranks")
      ->capture_default_str();
  cmd->add_option("-o,--out", f.out, "Output directory")->envname(pl::kOutputDirEnv)->capture_default_str();
}

void run_synth(SynthFlags& f) {
  namespace fs = std::filesystem;
  auto& c = f.config;
  c.interaction_pair = {f.pair.at(0), f.pair.at(1)};
  cs::synth::validate_config(c);
  cs::Json summary;
  summary["schema"] = "contrastshap.synth_summary.v1";
  summary["version"] = pl::kVersion;
  summary["rng"] = cs::kRngAlgorithm;
  summary["seed"] = c.seed;
  cs::synth::SynthTable synth;
  std::ostringstream expected;
  if (f.flip_fraction >= 0.0) {
    const auto contrasts = cs::synth::synth_contrasts(c);
    cs::RankVector target;
    if (f.target == "clinical") {
      target = cs::clinical_standard(contrasts).ranks;
    } else {
      std::vector<int> ranks;
      for (const auto& part : cs::io::split(f.target, ',')) ranks.push_back(std::stoi(part));
      target = cs::RankVector(std::move(ranks));
    }
    auto cohort = cs::synth::planted_agreement_cohort(c, target, f.flip_fraction);
    synth = std::move(cohort.synth);
    expected << "subject_id,flipped,expected_nsf\n";
    for (const auto& s : cohort.subjects) {
      expected << s.subject_id << ',' << (s.flipped ? 1 : 0) << ','
               << cs::io::format_real(s.expected_nsf) << '\n';
    }
    summary["planted"] = {{"target", target.values()},
                          {"flip_fraction", f.flip_fraction},
                          {"expected_mean_nsf", cohort.expected_mean_nsf}};
  } else {
    synth = cs::synth::generate(c);
  }
  summary["clip_events"] = synth.clip_events;
  summary["subjects"] = synth.table.subjects().size();
  summary["cells"] = synth.table.cells().size();

  std::ostringstream table;
  cs::io::write_metric_table_csv(table, synth.table);
  const fs::path dir(f.out);
  cs::io::write_text_file(dir / "metric_table.csv", table.str());
  cs::io::write_text_file(dir / "synth_summary.json", cs::dump_json(summary));
  if (f.flip_fraction >= 0.0) cs::io::write_text_file(dir / "planted_expected.csv", expected.str());
  if (synth.clip_events > 0) {
    std::cerr << "warning: " << synth.clip_events << " metric values clipped to [0,1]\n";
  }
  std::cout << (dir / "metric_table.csv").string() << '\n';
}

void print_outputs(const pl::Outputs& outputs) {
  for (const auto& p : outputs.written) std::cout << p.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contrast-level Shapley attribution, rank agreement and interfold rank variance"};
  app.set_config("--config", "", "TOML/INI config file; command-line flags take precedence");
  app.require_subcommand(1);

  SynthFlags synth_flags;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic metric table");
  add_synth_options(synth_cmd, synth_flags);

  AnalysisFlags shapley_flags, agreement_flags, uncertainty_flags, report_flags;
  auto* shapley_cmd = app.add_subcommand("shapley", "Per-cell, overall and fold-averaged attributions");
  add_analysis_options(shapley_cmd, shapley_flags);
  auto* agreement_cmd = app.add_subcommand("agreement", "NSF against reference rankings, Dice-bin tests");
  add_analysis_options(agreement_cmd, agreement_flags);
  auto* uncertainty_cmd = app.add_subcommand("uncertainty", "Interfold rank variance, bootstrap, split correlation");
  add_analysis_options(uncertainty_cmd, uncertainty_flags);
  auto* report_cmd = app.add_subcommand("report", "Consolidated JSON report and text summary");
  add_analysis_options(report_cmd, report_flags);
  report_cmd->add_option("--from-dir", report_flags.from_dir,
                         "Consolidate stage files from this directory instead of recomputing");
  // --input is only needed when recomputing.
  report_cmd->get_option("--input")->required(false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    auto finish = [](AnalysisFlags& f) -> pl::RunConfig& {
      f.config.bootstrap_mode = pl::parse_bootstrap_mode(f.bootstrap_mode);
      return f.config;
    };
    if (*synth_cmd) {
      run_synth(synth_flags);
    } else if (*shapley_cmd) {
      print_outputs(pl::cmd_shapley(finish(shapley_flags)));
    } else if (*agreement_cmd) {
      print_outputs(pl::cmd_agreement(finish(agreement_flags)));
    } else if (*uncertainty_cmd) {
      print_outputs(pl::cmd_uncertainty(finish(uncertainty_flags)));
    } else if (*report_cmd) {
      std::optional<std::filesystem::path> from;
      if (!report_flags.from_dir.empty()) from = report_flags.from_dir;
      else if (report_flags.config.input.empty()) {
        std::cerr << "error: report needs --input or --from-dir\n";
        return kUsage;
      }
      print_outputs(pl::cmd_report(finish(report_flags), from));
    }
  } catch (const cs::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: invalid value: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kComputation;
  }
  return kOk;
}
