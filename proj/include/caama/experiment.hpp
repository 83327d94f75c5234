#pragma once

#include "caama/distributions.hpp"
#include "caama/trainer.hpp"
#include "caama/verify.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace caama {

// JSON experiment configuration (schema_version 1).
struct ExperimentConfig {
  DistributionSpec distribution;
  TrainConfig train;
  std::vector<std::string> modes = {"CAAMA"};  // subset of CAAMA, AmaOnly, VCG
  std::string output_dir = ".";
  std::vector<std::string> report_formats = {"csv", "json"};

  void validate() const;
  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::string& path);
};

struct SummaryRow {
  std::string mode;
  double revenue = 0.0;
  double revenue_postproc = 0.0;
  double regret_ir_mean = 0.0;
  double regret_ir_max = 0.0;
  double pay_cor_share = 0.0;
  double wallclock_s = 0.0;
};

constexpr const char* kSummaryHeader =
    "mode,revenue,revenue_postproc,regret_ir_mean,regret_ir_max,pay_cor_share,"
    "wallclock_s";

void write_summary_csv(const std::vector<SummaryRow>& rows, uint64_t seed,
                       const std::string& path);

// sample: dataset CSV + JSON manifest.
void run_sample(const DistributionSpec& spec, int count, const std::string& csv_path,
                const std::string& manifest_path);

// train: one run per configured mode; writes checkpoint_<mode>.json,
// metrics_<mode>.csv and summary.csv (and summary.json when requested).
std::vector<SummaryRow> run_train(const ExperimentConfig& cfg);

// eval: verification report for a checkpoint on a dataset.
VerificationReport run_eval(const std::string& checkpoint_path,
                            const std::string& dataset_csv,
                            const std::string& dataset_manifest,
                            const std::string& output_dir,
                            bool post_processed = false);

struct SweepRow {
  double r_target = 0.0;  // 0 marks the reference rows
  std::string mode;
  double revenue = 0.0;
  double achieved_regret = 0.0;
};

// sweep-rtarget: one CAAMA run per target plus AmaOnly and VCG reference
// rows; emits the table CSV and a two-column gnuplot data file
// (achieved regret, revenue).
std::vector<SweepRow> run_sweep_rtarget(const ExperimentConfig& cfg,
                                        const std::vector<double>& targets);

struct FigureResult {
  double epsilon = 0.0;
  double fpa_line = 0.0;  // full-surplus optimum
  double vcg_line = 0.0;
  SummaryRow caama;
  SummaryRow ama_only;
};

// figure-equal-revenue: trains CAAMA and AmaOnly per epsilon on the 2-bidder
// figure-mode distribution, writes per-mode training-curve CSVs
// (iter, revenue_exact, pay_ama_share, pay_cor_share) and the analytic
// reference lines.
std::vector<FigureResult> run_figure_equal_revenue(const std::vector<double>& epsilons,
                                                   const ExperimentConfig& cfg);

}  // namespace caama
