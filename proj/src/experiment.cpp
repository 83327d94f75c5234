#include "caama/experiment.hpp"

#include "caama/mech.hpp"
#include "caama/version.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace caama {

namespace fs = std::filesystem;

void ExperimentConfig::validate() const {
  distribution.validate();
  train.validate();
  if (modes.empty()) throw std::invalid_argument("experiment: at least one mode");
  for (const auto& m : modes)
    if (m != "CAAMA" && m != "AmaOnly" && m != "VCG")
      throw std::invalid_argument("experiment: unknown mode " + m);
  for (const auto& f : report_formats)
    if (f != "csv" && f != "json")
      throw std::invalid_argument("experiment: unknown report format " + f);
}

nlohmann::json ExperimentConfig::to_json() const {
  return nlohmann::json{{"schema_version", 1},
                        {"distribution", distribution.to_json()},
                        {"train", train.to_json()},
                        {"modes", modes},
                        {"output_dir", output_dir},
                        {"report_formats", report_formats}};
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  if (j.value("schema_version", 1) != 1)
    throw std::invalid_argument("experiment config: unsupported schema_version");
  ExperimentConfig c;
  c.distribution = DistributionSpec::from_json(j.at("distribution"));
  c.train = TrainConfig::from_json(j.at("train"));
  if (j.contains("modes")) c.modes = j.at("modes").get<std::vector<std::string>>();
  c.output_dir = j.value("output_dir", std::string("."));
  if (j.contains("report_formats"))
    c.report_formats = j.at("report_formats").get<std::vector<std::string>>();
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot open config: " + path);
  nlohmann::json j;
  is >> j;
  return from_json(j);
}

namespace {

void write_manifest_comment(std::ofstream& os, uint64_t seed) {
  os << "# " << version_tag() << " seed=" << seed << "\n";
}

SummaryRow summary_from_metrics(const std::string& mode, const ExactMetrics& m,
                                double wallclock) {
  SummaryRow row;
  row.mode = mode;
  row.revenue = m.revenue;
  row.revenue_postproc = m.revenue_postproc;
  row.regret_ir_mean = m.regret_ir_mean;
  row.regret_ir_max = m.regret_ir_max;
  row.pay_cor_share = m.pay_cor_share();
  row.wallclock_s = wallclock;
  return row;
}

}  // namespace

void write_summary_csv(const std::vector<SummaryRow>& rows, uint64_t seed,
                       const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << kSummaryHeader << "\n";
  os.precision(17);
  for (const auto& r : rows)
    os << r.mode << "," << r.revenue << "," << r.revenue_postproc << ","
       << r.regret_ir_mean << "," << r.regret_ir_max << "," << r.pay_cor_share << ","
       << r.wallclock_s << "\n";
  write_manifest_comment(os, seed);
}

void run_sample(const DistributionSpec& spec, int count, const std::string& csv_path,
                const std::string& manifest_path) {
  spec.validate();
  const Dataset d = sample(spec, count);
  save_dataset(d, csv_path, manifest_path);
}

std::vector<SummaryRow> run_train(const ExperimentConfig& cfg) {
  cfg.validate();
  fs::create_directories(cfg.output_dir);
  std::vector<SummaryRow> rows;
  for (const auto& mode : cfg.modes) {
    if (mode == "VCG") {
      const auto t0 = std::chrono::steady_clock::now();
      const Dataset test = held_out_test_set(cfg.train, cfg.distribution);
      SummaryRow row;
      row.mode = mode;
      double rev = 0.0;
      for (const auto& v : test.profiles)
        rev += vcg_outcome(ValuationProfile{v}).revenue();
      row.revenue = rev / test.profiles.size();
      row.revenue_postproc = row.revenue;  // VCG is ex-post IR already
      row.wallclock_s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      rows.push_back(row);
      continue;
    }
    const TrainMode tm = train_mode_from_name(mode);
    const TrainResult result = train(cfg.train, cfg.distribution, tm);
    save_checkpoint(result.state, cfg.train, cfg.distribution,
                    (fs::path(cfg.output_dir) / ("checkpoint_" + mode + ".json")).string());
    save_metric_log(result.state.log, cfg.train.seed,
                    (fs::path(cfg.output_dir) / ("metrics_" + mode + ".csv")).string());
    rows.push_back(summary_from_metrics(mode, result.test, result.wallclock_s));
  }
  const bool want_csv = std::find(cfg.report_formats.begin(), cfg.report_formats.end(),
                                  "csv") != cfg.report_formats.end();
  const bool want_json = std::find(cfg.report_formats.begin(), cfg.report_formats.end(),
                                   "json") != cfg.report_formats.end();
  if (want_csv)
    write_summary_csv(rows, cfg.train.seed,
                      (fs::path(cfg.output_dir) / "summary.csv").string());
  if (want_json) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : rows)
      j.push_back({{"mode", r.mode},
                   {"revenue", r.revenue},
                   {"revenue_postproc", r.revenue_postproc},
                   {"regret_ir_mean", r.regret_ir_mean},
                   {"regret_ir_max", r.regret_ir_max},
                   {"pay_cor_share", r.pay_cor_share},
                   {"wallclock_s", r.wallclock_s}});
    std::ofstream os((fs::path(cfg.output_dir) / "summary.json").string());
    os << j.dump(2) << "\n";
  }
  return rows;
}

VerificationReport run_eval(const std::string& checkpoint_path,
                            const std::string& dataset_csv,
                            const std::string& dataset_manifest,
                            const std::string& output_dir, bool post_processed) {
  const Checkpoint ckpt = load_checkpoint(checkpoint_path);
  const Dataset data = load_dataset(dataset_csv, dataset_manifest);
  if (data.spec.n != ckpt.spec.n || data.spec.m != ckpt.spec.m)
    throw std::invalid_argument("run_eval: checkpoint/dataset shape mismatch");
  const AmaParams params = realize(ckpt.state.raw);
  MechanismHandle mech;
  if (!ckpt.state.cor.has_value())
    mech = make_ama_handle(params);
  else if (post_processed)
    mech = make_caama_post_handle(params, *ckpt.state.cor);
  else
    mech = make_caama_handle(params, *ckpt.state.cor);
  GridSpec grid;
  grid.seed = ckpt.cfg.seed;
  const VerificationReport rep = verification_report(mech, data.profiles, grid);
  fs::create_directories(output_dir);
  {
    std::ofstream os((fs::path(output_dir) / "report.json").string());
    os << rep.to_json().dump(2) << "\n";
  }
  {
    std::ofstream os((fs::path(output_dir) / "report.csv").string());
    os << VerificationReport::csv_header() << "\n" << rep.csv_row() << "\n";
    write_manifest_comment(os, ckpt.cfg.seed);
  }
  return rep;
}

std::vector<SweepRow> run_sweep_rtarget(const ExperimentConfig& cfg,
                                        const std::vector<double>& targets) {
  cfg.validate();
  if (targets.empty()) throw std::invalid_argument("sweep: no targets");
  for (size_t t = 0; t < targets.size(); ++t) {
    if (targets[t] <= 0.0) throw std::invalid_argument("sweep: targets must be positive");
    if (t > 0 && targets[t] >= targets[t - 1])
      throw std::invalid_argument("sweep: targets must be descending");
  }
  fs::create_directories(cfg.output_dir);
  std::vector<SweepRow> rows;

  // reference rows
  {
    const Dataset test = held_out_test_set(cfg.train, cfg.distribution);
    double rev = 0.0;
    for (const auto& v : test.profiles) rev += vcg_outcome(ValuationProfile{v}).revenue();
    rows.push_back(SweepRow{0.0, "VCG", rev / test.profiles.size(), 0.0});
  }
  {
    const TrainResult base = train(cfg.train, cfg.distribution, TrainMode::AmaOnly);
    rows.push_back(SweepRow{0.0, "AmaOnly", base.test.revenue, 0.0});
  }

  for (size_t t = 0; t < targets.size(); ++t) {
    TrainConfig tc = cfg.train;
    tc.r_target = targets[t];
    const TrainResult result = train(tc, cfg.distribution, TrainMode::CAAMA);
    rows.push_back(SweepRow{targets[t], "CAAMA", result.test.revenue,
                            result.test.regret_ir_mean});
    save_checkpoint(result.state, tc, cfg.distribution,
                    (fs::path(cfg.output_dir) /
                     ("checkpoint_rtarget_" + std::to_string(targets[t]) + ".json"))
                        .string());
  }

  {
    std::ofstream os((fs::path(cfg.output_dir) / "sweep.csv").string());
    os << "r_target,mode,revenue,achieved_regret\n";
    os.precision(17);
    for (const auto& r : rows)
      os << r.r_target << "," << r.mode << "," << r.revenue << ","
         << r.achieved_regret << "\n";
    write_manifest_comment(os, cfg.train.seed);
  }
  {
    // gnuplot-ready: achieved regret vs revenue for the CAAMA rows
    std::ofstream os((fs::path(cfg.output_dir) / "sweep_revenue_vs_regret.dat").string());
    os.precision(17);
    for (const auto& r : rows)
      if (r.mode == "CAAMA") os << r.achieved_regret << " " << r.revenue << "\n";
  }
  return rows;
}

std::vector<FigureResult> run_figure_equal_revenue(const std::vector<double>& epsilons,
                                                   const ExperimentConfig& cfg) {
  cfg.validate();
  fs::create_directories(cfg.output_dir);
  std::vector<FigureResult> results;
  std::ofstream refs((fs::path(cfg.output_dir) / "reference_lines.csv").string());
  refs << "epsilon,fpa_optimum,vcg_revenue\n";
  refs.precision(17);
  for (const double eps : epsilons) {
    DistributionSpec spec;
    spec.kind = DistKind::EqualRevenueCorrelated;
    spec.n = 2;
    spec.m = 1;
    spec.epsilon = eps;
    spec.epsilon1 = eps / 2.0;
    spec.er_figure_mode = true;
    spec.seed = cfg.distribution.seed;
    spec.validate();

    const AnalyticMoments mom = analytic_moments(spec);
    FigureResult fr;
    fr.epsilon = eps;
    fr.fpa_line = mom.optimal_full_surplus;
    fr.vcg_line = mom.vcg_revenue.value();
    refs << eps << "," << fr.fpa_line << "," << fr.vcg_line << "\n";

    for (const auto mode : {TrainMode::CAAMA, TrainMode::AmaOnly}) {
      const TrainResult result = train(cfg.train, spec, mode);
      std::ostringstream name;
      name << "curve_eps_" << eps << "_" << train_mode_name(mode) << ".csv";
      std::ofstream os((fs::path(cfg.output_dir) / name.str()).string());
      os << "iter,revenue_exact,pay_ama_share,pay_cor_share\n";
      os.precision(17);
      for (const auto& row : result.state.log) {
        const double tot = row.pay_ama_exact + row.pay_cor_exact;
        os << row.iter << "," << row.revenue_exact << ","
           << (tot != 0.0 ? row.pay_ama_exact / tot : 0.0) << ","
           << (tot != 0.0 ? row.pay_cor_exact / tot : 0.0) << "\n";
      }
      write_manifest_comment(os, cfg.train.seed);
      if (mode == TrainMode::CAAMA)
        fr.caama = summary_from_metrics("CAAMA", result.test, result.wallclock_s);
      else
        fr.ama_only = summary_from_metrics("AmaOnly", result.test, result.wallclock_s);
    }
    results.push_back(fr);
  }
  write_manifest_comment(refs, cfg.train.seed);
  return results;
}

}  // namespace caama
