// caama command line: dataset generation, training runs, checkpoint
// evaluation, the R_target sweep, the equal-revenue figure data and the
// deterministic-AMA brute-force bound.
//
// Exit codes: 0 success, 2 validation failure, 3 numeric abort.

#include "caama/experiment.hpp"
#include "caama/verify.hpp"
#include "caama/version.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>

namespace {

std::string output_root() {
  const char* env = std::getenv("CAAMA_OUTPUT_ROOT");
  return env != nullptr ? std::string(env) : std::string(".");
}

caama::DistributionSpec spec_from_flags(const std::string& kind, int n, int m,
                                        double alpha, double epsilon, double epsilon1,
                                        bool figure_mode, uint64_t seed) {
  caama::DistributionSpec spec;
  spec.kind = caama::dist_kind_from_name(kind);
  spec.n = n;
  spec.m = m;
  spec.alpha = alpha;
  spec.epsilon = epsilon;
  spec.epsilon1 = epsilon1 > 0.0 ? epsilon1 : epsilon / 2.0;
  spec.er_figure_mode = figure_mode;
  spec.seed = seed;
  spec.validate();
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"correlation-aware affine maximizer auctions"};
  app.set_version_flag("--version", caama::version_tag());
  app.require_subcommand(1);

  // ---- sample ----
  auto* sample = app.add_subcommand("sample", "draw a valuation dataset");
  std::string kind = "uniform-iid";
  int n = 2, m = 1, count = 1000;
  double alpha = 1.0, epsilon = 0.1, epsilon1 = -1.0;
  bool figure_mode = false;
  uint64_t seed = 0;
  std::string out;
  sample->add_option("--kind", kind, "distribution kind");
  sample->add_option("--n", n, "bidders");
  sample->add_option("--m", m, "items");
  sample->add_option("--alpha", alpha, "Dirichlet concentration / mixture prob");
  sample->add_option("--epsilon", epsilon, "equal-revenue floor");
  sample->add_option("--epsilon1", epsilon1, "forced-bidder slope (default epsilon/2)");
  sample->add_flag("--figure-mode", figure_mode, "2-bidder figure slope eps/(1-eps)");
  sample->add_option("--count", count, "profiles to draw")->required();
  sample->add_option("--seed", seed, "PRNG seed");
  sample->add_option("--out", out, "output prefix (default <root>/dataset)");

  // ---- train ----
  auto* tr = app.add_subcommand("train", "run the configured training modes");
  std::string config_path;
  bool desk = false;
  tr->add_option("--config", config_path, "experiment config JSON")->required();
  tr->add_flag("--desk-scale", desk, "CI preset: 16000 iters, batch 512");

  // ---- eval ----
  auto* ev = app.add_subcommand("eval", "evaluate a checkpoint on a dataset");
  std::string ckpt_path, data_csv, data_manifest, eval_out;
  bool post = false;
  ev->add_option("--checkpoint", ckpt_path)->required();
  ev->add_option("--dataset", data_csv, "dataset CSV")->required();
  ev->add_option("--manifest", data_manifest, "dataset manifest JSON")->required();
  ev->add_option("--out", eval_out, "output directory");
  ev->add_flag("--post-processed", post, "apply the opt-out transform");

  // ---- sweep-rtarget ----
  auto* sw = app.add_subcommand("sweep-rtarget", "train once per regret target");
  std::string sweep_config;
  std::vector<double> targets = {0.05, 0.02, 0.01, 0.005, 0.002, 0.001, 0.0005, 0.0001};
  sw->add_option("--config", sweep_config)->required();
  sw->add_option("--targets", targets, "descending regret targets");

  // ---- figure-equal-revenue ----
  auto* fig = app.add_subcommand("figure-equal-revenue",
                                 "training curves against the analytic lines");
  std::string fig_config;
  std::vector<double> epsilons = {0.1};
  fig->add_option("--config", fig_config)->required();
  fig->add_option("--epsilons", epsilons, "equal-revenue floors");

  // ---- verify-appendix-b ----
  auto* vb = app.add_subcommand("verify-appendix-b",
                                "brute-force deterministic-AMA revenue bound");
  double vb_eps = 0.1, vb_eps1 = 0.05;
  uint64_t vb_seed = 0;
  int vb_samples = 100000;
  vb->add_option("--epsilon", vb_eps);
  vb->add_option("--epsilon1", vb_eps1);
  vb->add_option("--seed", vb_seed);
  vb->add_option("--mc-samples", vb_samples);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sample) {
      const auto spec =
          spec_from_flags(kind, n, m, alpha, epsilon, epsilon1, figure_mode, seed);
      const std::string prefix =
          out.empty() ? (std::filesystem::path(output_root()) / "dataset").string() : out;
      caama::run_sample(spec, count, prefix + ".csv", prefix + ".manifest.json");
      std::cout << "wrote " << prefix << ".csv (" << count << " profiles)\n";
    } else if (*tr) {
      caama::ExperimentConfig cfg = caama::ExperimentConfig::load(config_path);
      if (desk) {
        cfg.train.total_iters = caama::TrainConfig::desk_scale().total_iters;
        cfg.train.batch_size = caama::TrainConfig::desk_scale().batch_size;
      }
      const auto rows = caama::run_train(cfg);
      std::cout << caama::kSummaryHeader << "\n";
      for (const auto& r : rows)
        std::cout << r.mode << "," << r.revenue << "," << r.revenue_postproc << ","
                  << r.regret_ir_mean << "," << r.regret_ir_max << ","
                  << r.pay_cor_share << "," << r.wallclock_s << "\n";
    } else if (*ev) {
      const std::string dir = eval_out.empty() ? output_root() : eval_out;
      const auto rep = caama::run_eval(ckpt_path, data_csv, data_manifest, dir, post);
      std::cout << rep.to_json().dump(2) << "\n";
    } else if (*sw) {
      caama::ExperimentConfig cfg = caama::ExperimentConfig::load(sweep_config);
      const auto rows = caama::run_sweep_rtarget(cfg, targets);
      std::cout << "r_target,mode,revenue,achieved_regret\n";
      for (const auto& r : rows)
        std::cout << r.r_target << "," << r.mode << "," << r.revenue << ","
                  << r.achieved_regret << "\n";
    } else if (*fig) {
      caama::ExperimentConfig cfg = caama::ExperimentConfig::load(fig_config);
      const auto results = caama::run_figure_equal_revenue(epsilons, cfg);
      std::cout << "epsilon,fpa_optimum,vcg,caama_revenue,ama_only_revenue\n";
      for (const auto& r : results)
        std::cout << r.epsilon << "," << r.fpa_line << "," << r.vcg_line << ","
                  << r.caama.revenue << "," << r.ama_only.revenue << "\n";
    } else if (*vb) {
      caama::DistributionSpec spec;
      spec.kind = caama::DistKind::EqualRevenueCorrelated;
      spec.n = 2;
      spec.m = 1;
      spec.epsilon = vb_eps;
      spec.epsilon1 = vb_eps1;
      spec.seed = vb_seed;
      spec.validate();
      caama::DamaGrid grid;
      grid.mc_samples = vb_samples;
      const auto result = caama::dama_brute_search(spec, grid);
      const auto mom = caama::analytic_moments(spec);
      std::cout << "best_dama_revenue=" << result.best_revenue
                << " bound=" << (vb_eps / (1.0 - vb_eps) + vb_eps1)
                << " full_surplus_optimum=" << mom.optimal_full_surplus << "\n"
                << "best_weights=" << result.weights.transpose()
                << " best_boosts=" << result.boosts.transpose() << "\n";
    }
  } catch (const caama::NumericError& e) {
    std::cerr << "numeric abort: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid arguments: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
