// Acceptance runner. Usage:
//   caama_acceptance setup <cache_dir>   trains the shared checkpoints
//   caama_acceptance <1..10> <cache_dir> runs one criterion
//   caama_acceptance all <cache_dir>     everything in order
// Each criterion prints sub-check details and one final PASS/FAIL line.

#include "caama/experiment.hpp"
#include "caama/mech.hpp"
#include "caama/verify.hpp"
#include "test_util.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace caama;
namespace fs = std::filesystem;

namespace {

struct Criterion {
  int id;
  bool pass = true;
  std::ostringstream detail;

  explicit Criterion(int i) : id(i) {}

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    detail << "  [" << (ok ? "ok" : "FAIL") << "] " << what << "\n";
  }

  int finish() {
    std::cout << detail.str();
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << id << "\n";
    return pass ? 0 : 1;
  }
};

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

// ---- shared experiment definitions ----

DistributionSpec er_spec() {
  DistributionSpec spec;
  spec.kind = DistKind::EqualRevenueCorrelated;
  spec.n = 2;
  spec.m = 1;
  spec.epsilon = 0.1;
  spec.epsilon1 = 0.05;
  spec.er_figure_mode = true;
  spec.seed = 20250810;
  return spec;
}

DistributionSpec er_forced_slope_spec() {
  DistributionSpec spec = er_spec();
  spec.er_figure_mode = false;  // n-bidder slope epsilon1
  return spec;
}

DistributionSpec dir_spec() {
  DistributionSpec spec;
  spec.kind = DistKind::DirichletValueShare;
  spec.n = 2;
  spec.m = 2;
  spec.alpha = 0.5;
  spec.seed = 20250811;
  return spec;
}

TrainConfig er_config() {
  TrainConfig cfg;
  cfg.total_iters = 18000;
  cfg.batch_size = 512;
  cfg.menu_size = 16;
  cfg.temperature = 500.0;
  // singleton conditional supports let the payment nets ride the IR boundary
  // arbitrarily closely; a loose target would equilibrate with hairline
  // violations spread across most profiles, so this family runs tight
  cfg.r_target = 1e-5;
  cfg.gamma0 = 5.0;
  cfg.step_size = 3e-4;
  cfg.eval_every = 200;
  cfg.seed = 71;
  return cfg;
}

TrainConfig dir_config() {
  TrainConfig cfg;
  cfg.total_iters = 16000;
  cfg.batch_size = 512;
  cfg.menu_size = 32;
  cfg.temperature = 500.0;
  cfg.r_target = 0.001;
  cfg.gamma0 = 3.0;
  cfg.step_size = 3e-4;
  cfg.eval_every = 200;
  cfg.seed = 73;
  return cfg;
}

struct Cache {
  fs::path dir;

  fs::path path(const std::string& name) const { return dir / (name + ".json"); }

  Checkpoint load(const std::string& name) const {
    if (!fs::exists(path(name)))
      throw std::runtime_error("missing cache entry " + name + "; run setup first");
    return load_checkpoint(path(name).string());
  }
};

void run_and_save(const Cache& cache, const std::string& name, const TrainConfig& cfg,
                  const DistributionSpec& spec, TrainMode mode) {
  std::cout << "training " << name << " ..." << std::flush;
  const TrainResult result = train(cfg, spec, mode);
  save_checkpoint(result.state, cfg, spec, cache.path(name).string());
  save_metric_log(result.state.log, cfg.seed, (cache.dir / (name + ".metrics.csv")).string());
  std::cout << " done (" << fmt(result.wallclock_s) << " s, revenue "
            << fmt(result.test.revenue) << ", regret " << fmt(result.test.regret_ir_mean)
            << ")\n";
}

int cmd_setup(const Cache& cache) {
  fs::create_directories(cache.dir);
  run_and_save(cache, "er_caama", er_config(), er_spec(), TrainMode::CAAMA);
  run_and_save(cache, "er_amaonly", er_config(), er_spec(), TrainMode::AmaOnly);
  run_and_save(cache, "dir_caama", dir_config(), dir_spec(), TrainMode::CAAMA);
  run_and_save(cache, "dir_amaonly", dir_config(), dir_spec(), TrainMode::AmaOnly);
  std::cout << "PASS setup\n";
  return 0;
}

ExactMetrics eval_checkpoint(const Checkpoint& ckpt) {
  const Dataset test = held_out_test_set(ckpt.cfg, ckpt.spec);
  return evaluate_exact(realize(ckpt.state.raw),
                        ckpt.state.cor ? &*ckpt.state.cor : nullptr, test.profiles);
}

// ---- criterion 1: mechanism correctness ----

int criterion1() {
  Criterion c(1);
  Rng rng(0xacc1);
  const std::vector<std::pair<int, int>> shapes = {{2, 1}, {2, 2}, {3, 2}};
  bool ir_ok = true, feas_ok = true, vcg_ok = true;
  for (const auto& [n, m] : shapes) {
    AmaParams full;
    full.menu = deterministic_menu(n, m);
    full.weights = Vector::Ones(n);
    full.boosts = Vector::Zero(full.size());
    for (int trial = 0; trial < 3400; ++trial) {
      const int s = 2 + static_cast<int>(rng.next_u64() % 8);
      AmaParams params = testutil::rand_ama_params(s, n, m, rng);
      ValuationProfile v{testutil::rand_profile(n, m, rng)};
      AuctionOutcome out = ama_outcome(v, params);
      ir_ok = ir_ok && out.utilities.minCoeff() >= -1e-9;
      feas_ok = feas_ok && allocation_feasible(out.allocation);

      AuctionOutcome vcg = vcg_outcome(v);
      AuctionOutcome ama = ama_outcome(v, full);
      vcg_ok = vcg_ok &&
               (vcg.allocation - ama.allocation).cwiseAbs().maxCoeff() <= 1e-12 &&
               (vcg.pay_ama - ama.pay_ama).cwiseAbs().maxCoeff() <= 1e-9;
    }
  }
  c.check(ir_ok, "AMA IR: min utility >= -1e-9 on 10200 random pairs");
  c.check(feas_ok, "no over-allocation on any outcome");
  c.check(vcg_ok, "VCG equals full-menu AMA at w=1, lambda=0 (exact)");
  return c.finish();
}

// ---- criterion 2: DSIC property suite ----

int criterion2() {
  Criterion c(2);
  Rng rng(0xacc2);
  std::vector<DistributionSpec> specs(6);
  specs[0].kind = DistKind::UniformIID;
  specs[0].n = 2;
  specs[0].m = 2;
  specs[1] = dir_spec();
  specs[2].kind = DistKind::LinearMixtureSym;
  specs[2].n = 2;
  specs[2].m = 2;
  specs[2].alpha = 0.6;
  specs[3].kind = DistKind::LinearMixtureAsym;
  specs[3].n = 2;
  specs[3].m = 2;
  specs[3].alpha = 0.6;
  specs[4] = er_spec();
  specs[5].kind = DistKind::PerfectNegativeLinear;
  specs[5].n = 2;
  specs[5].m = 2;

  for (auto& spec : specs) {
    spec.seed = rng.next_u64();
    const Dataset d = sample(spec, 1000);
    AmaParams params = testutil::rand_ama_params(8, spec.n, spec.m, rng);
    CorPaymentNet cor = cor_init(spec.n, spec.m, 16, 16, rng.next_u64());
    for (auto& b : cor.blocks) b.b3 = 0.05;  // nonzero correlation payments
    GridSpec grid;
    grid.seed = rng.next_u64();
    const double r_ama = measure_dsic_regret(make_ama_handle(params), d.profiles, grid);
    const double r_ca =
        measure_dsic_regret(make_caama_handle(params, cor), d.profiles, grid);
    const double r_post =
        measure_dsic_regret(make_caama_post_handle(params, cor), d.profiles, grid);
    c.check(r_ama <= 1e-9,
            dist_kind_name(spec.kind) + ": AMA grid regret " + fmt(r_ama));
    c.check(r_ca <= 1e-9,
            dist_kind_name(spec.kind) + ": CA-AMA grid regret " + fmt(r_ca));
    c.check(r_post <= 1e-9,
            dist_kind_name(spec.kind) + ": post-processed grid regret " + fmt(r_post));
  }
  return c.finish();
}

// ---- criterion 3: gradient acceptance ----

int criterion3() {
  Criterion c(3);
  Rng rng(0xacc3);
  const double h = 1e-5;
  const double t = 50.0;
  double worst_loss = 0.0, worst_cor = 0.0;
  const auto rel = [](double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8});
  };

  for (int trial = 0; trial < 100; ++trial) {
    RawAmaParams raw = raw_init(4, 2, 2, 0xc3000 + trial);
    CorPaymentNet cor = cor_init(2, 2, 8, 8, 0xc3500 + trial);
    for (auto& b : cor.blocks) b.b3 = rng.uniform(-0.1, 0.3);
    std::vector<Matrix> batch;
    for (int k = 0; k < 2; ++k) batch.push_back(testutil::rand_profile(2, 2, rng));
    const double gamma = rng.uniform(1.0, 10.0);

    for (const Stage stage : {Stage::Mutual, Stage::Post}) {
      const LossRecord rec = loss_and_grad(batch, raw, &cor, gamma, t, stage);
      auto probe = [&](double& coord, double analytic) {
        const double keep = coord;
        coord = keep + h;
        const double up = loss_and_grad(batch, raw, &cor, gamma, t, stage).loss;
        coord = keep - h;
        const double down = loss_and_grad(batch, raw, &cor, gamma, t, stage).loss;
        coord = keep;
        return rel((up - down) / (2.0 * h), analytic);
      };

      if (stage == Stage::Mutual) {
        for (int probe_i = 0; probe_i < 4; ++probe_i) {
          const int k = static_cast<int>(rng.next_u64() % 4);
          const int r = static_cast<int>(rng.next_u64() % 3);
          const int col = static_cast<int>(rng.next_u64() % 2);
          worst_loss = std::max(
              worst_loss, probe(raw.menu_logits[static_cast<size_t>(k)](r, col),
                                rec.grad_raw.menu_logits[static_cast<size_t>(k)](r, col)));
        }
        worst_loss = std::max(worst_loss,
                              probe(raw.weight_logits[0], rec.grad_raw.weight_logits[0]));
        worst_loss =
            std::max(worst_loss, probe(raw.boosts[1], rec.grad_raw.boosts[1]));
      }
      for (int probe_i = 0; probe_i < 3; ++probe_i) {
        const int i = static_cast<int>(rng.next_u64() % 2);
        CorBlock& b = cor.blocks[static_cast<size_t>(i)];
        const CorBlockGrad& gb = rec.grad_cor.blocks[static_cast<size_t>(i)];
        const int r = static_cast<int>(rng.next_u64() % b.w2.rows());
        const int col = static_cast<int>(rng.next_u64() % b.w2.cols());
        worst_loss = std::max(worst_loss, probe(b.w2(r, col), gb.w2(r, col)));
      }
    }

    // cor backward against the forward finite differences
    Vector x(2);
    x << rng.uniform01(), rng.uniform01();
    const int i = static_cast<int>(rng.next_u64() % 2);
    const double upstream = rng.uniform(-2.0, 2.0);
    const CorBlockGrad g = cor_backward(cor, i, x, upstream);
    CorBlock& b = cor.blocks[static_cast<size_t>(i)];
    for (int probe_i = 0; probe_i < 6; ++probe_i) {
      const int r = static_cast<int>(rng.next_u64() % b.w2.rows());
      const int col = static_cast<int>(rng.next_u64() % b.w2.cols());
      double& coord = b.w2(r, col);
      const double keep = coord;
      coord = keep + h;
      const double up = cor_forward(cor, i, x);
      coord = keep - h;
      const double down = cor_forward(cor, i, x);
      coord = keep;
      worst_cor = std::max(worst_cor,
                           rel(upstream * (up - down) / (2.0 * h), g.w2(r, col)));
    }
  }
  c.check(worst_loss <= 1e-4,
          "loss gradients (both stages) vs central differences: worst rel err " +
              fmt(worst_loss));
  c.check(worst_cor <= 1e-4,
          "cor-net backward vs central differences: worst rel err " + fmt(worst_cor));
  return c.finish();
}

// ---- criterion 4: deterministic-AMA separation on the equal-revenue family ----

int criterion4() {
  Criterion c(4);
  const DistributionSpec spec = er_forced_slope_spec();
  const double bound = spec.epsilon / (1.0 - spec.epsilon) + spec.epsilon1;
  const AnalyticMoments mom = analytic_moments(spec);

  DamaGrid grid;
  const DamaResult dama = dama_brute_search(spec, grid);
  c.check(dama.best_revenue <= bound + 0.005,
          "brute-force D-AMA revenue " + fmt(dama.best_revenue) + " <= " +
              fmt(bound) + " + 0.005");

  const Dataset mc = sample(spec, 100000);
  const double surplus = full_surplus(mc.profiles);
  c.check(std::abs(surplus - 0.2558) <= 0.005,
          "full-surplus optimum " + fmt(surplus) + " = 0.2558 +/- 0.005 (analytic " +
              fmt(mom.optimal_full_surplus) + ")");
  c.check(dama.best_revenue / mom.optimal_full_surplus <= 0.65,
          "separation ratio " + fmt(dama.best_revenue / mom.optimal_full_surplus) +
              " <= 0.65");

  // hand-set CA-AMA: deterministic menu, w = 1, lambda = 0, and the IR-tight
  // correlation payment from the conditional-support oracle
  AmaParams params = testutil::single_item_params(spec.n);
  double revenue = 0.0, regret = 0.0;
  for (const auto& v : mc.profiles) {
    AuctionOutcome out = ama_outcome(ValuationProfile{v}, params);
    for (int i = 0; i < spec.n; ++i) {
      Matrix minus(spec.n - 1, 1);
      int r = 0;
      for (int b = 0; b < spec.n; ++b)
        if (b != i) minus(r++, 0) = v(b, 0);
      const double pcor = opt_core_oracle(params, i, minus, spec);
      out.pay_cor[i] = pcor;
      out.utilities[i] -= pcor;
    }
    revenue += out.revenue();
    for (int i = 0; i < spec.n; ++i) regret += std::max(0.0, -out.utilities[i]);
  }
  revenue /= mc.profiles.size();
  regret /= mc.profiles.size();
  c.check(std::abs(revenue - mom.optimal_full_surplus) <= 0.005,
          "oracle CA-AMA revenue " + fmt(revenue) + " = optimum +/- 0.005");
  c.check(regret <= 1e-9, "oracle CA-AMA IR regret " + fmt(regret) + " = 0");
  return c.finish();
}

// ---- criterion 5: equal-revenue learning ----

int criterion5(const Cache& cache) {
  Criterion c(5);
  const Checkpoint caama = cache.load("er_caama");
  const Checkpoint amaonly = cache.load("er_amaonly");
  const ExactMetrics m_ca = eval_checkpoint(caama);
  const ExactMetrics m_ama = eval_checkpoint(amaonly);
  const double optimum = analytic_moments(er_spec()).optimal_full_surplus;

  c.check(m_ca.revenue >= 0.95 * optimum,
          "CA-AMA revenue " + fmt(m_ca.revenue) + " >= 95% of " + fmt(optimum));
  c.check(m_ca.regret_ir_mean <= 1e-3,
          "CA-AMA exact Regret_IR " + fmt(m_ca.regret_ir_mean) + " <= 1e-3");
  c.check(m_ama.revenue < 0.90 * optimum,
          "AmaOnly revenue " + fmt(m_ama.revenue) + " < 90% of optimum");
  c.check(m_ca.pay_cor_mean > m_ca.pay_ama_mean,
          "pay_cor share " + fmt(m_ca.pay_cor_share()) + " exceeds pay_ama share");
  return c.finish();
}

// ---- criterion 6: Table 1 directional check ----

int criterion6(const Cache& cache) {
  Criterion c(6);
  const Checkpoint caama = cache.load("dir_caama");
  const Checkpoint amaonly = cache.load("dir_amaonly");
  const ExactMetrics m_ca = eval_checkpoint(caama);
  const ExactMetrics m_ama = eval_checkpoint(amaonly);

  const Dataset test = held_out_test_set(caama.cfg, caama.spec);
  double vcg_rev = 0.0;
  for (const auto& v : test.profiles)
    vcg_rev += vcg_outcome(ValuationProfile{v}).revenue();
  vcg_rev /= test.profiles.size();

  c.check(m_ca.revenue > m_ama.revenue,
          "CA-AMA " + fmt(m_ca.revenue) + " > AmaOnly " + fmt(m_ama.revenue));
  c.check(m_ama.revenue > vcg_rev,
          "AmaOnly " + fmt(m_ama.revenue) + " > VCG " + fmt(vcg_rev));
  const double ratio = std::max(m_ca.regret_ir_mean / caama.cfg.r_target,
                                caama.cfg.r_target /
                                    std::max(m_ca.regret_ir_mean, 1e-12));
  c.check(ratio <= 3.0, "achieved regret " + fmt(m_ca.regret_ir_mean) +
                            " within 3x of target 0.001 (ratio " + fmt(ratio) + ")");
  // stretch target, informational only
  c.detail << "  [info] stretch: CA-AMA revenue " << fmt(m_ca.revenue)
           << " vs paper 0.8532 (within 10% = " << fmt(0.9 * 0.8532) << ")"
           << (m_ca.revenue >= 0.9 * 0.8532 ? " reached" : " not reached") << "\n";
  return c.finish();
}

// ---- criterion 7: post-processing ----

int criterion7(const Cache& cache) {
  Criterion c(7);
  for (const std::string name : {"er_caama", "dir_caama"}) {
    const Checkpoint ckpt = cache.load(name);
    const ExactMetrics m = eval_checkpoint(ckpt);
    const AmaParams params = realize(ckpt.state.raw);
    const CorPaymentNet& cor = *ckpt.state.cor;

    const Dataset test = held_out_test_set(ckpt.cfg, ckpt.spec);
    double min_u = std::numeric_limits<double>::infinity();
    for (const auto& v : test.profiles) {
      const AuctionOutcome post =
          post_process_ir(caama_outcome(ValuationProfile{v}, params, cor));
      min_u = std::min(min_u, post.utilities.minCoeff());
    }
    c.check(min_u >= 0.0, name + ": post-processed min utility " + fmt(min_u) + " >= 0");

    GridSpec grid;
    grid.seed = ckpt.cfg.seed;
    std::vector<Matrix> sub(test.profiles.begin(), test.profiles.begin() + 300);
    const double dsic = measure_dsic_regret(make_caama_post_handle(params, cor), sub, grid);
    c.check(dsic <= 1e-9, name + ": post-processed DSIC grid regret " + fmt(dsic));

    const double drop = (m.revenue - m.revenue_postproc) / std::max(m.revenue, 1e-12);
    c.check(drop <= 0.10, name + ": post-processing revenue drop " + fmt(100.0 * drop) +
                              "% (" + fmt(m.revenue) + " -> " + fmt(m.revenue_postproc) +
                              ") <= 10%");
  }
  return c.finish();
}

// ---- criterion 8: gamma schedule ----

int criterion8(const Cache& cache) {
  Criterion c(8);
  TrainConfig cfg;
  cfg.r_target = 0.001;
  cfg.gamma_delta = 0.01;
  c.check(update_gamma(5.0, 0.001, cfg) == 5.0, "regret at target leaves gamma fixed");
  const double moved = update_gamma(5.0, 0.01, cfg);
  c.check(std::abs(moved - (5.0 + 0.01 * std::log(10.0))) <= 1e-12,
          "10x regret moves gamma to " + fmt(moved) + " (= 5 + 0.01 ln 10)");
  c.check(update_gamma(19.999, 0.1, cfg) == 20.0, "cap at gamma_max = 20");

  for (const std::string name : {"er_caama", "dir_caama"}) {
    const Checkpoint ckpt = cache.load(name);
    bool in_range = ckpt.state.gamma >= 1.0 && ckpt.state.gamma <= 20.0;
    // the metric log keeps the full trajectory
    std::ifstream is((cache.dir / (name + ".metrics.csv")).string());
    std::string line;
    std::getline(is, line);  // header
    while (std::getline(is, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::stringstream ss(line);
      std::string cell;
      for (int f = 0; f < 5; ++f) std::getline(ss, cell, ',');
      const double gamma = std::stod(cell);
      in_range = in_range && gamma >= 1.0 - 1e-12 && gamma <= 20.0 + 1e-12;
    }
    c.check(in_range, name + ": gamma trajectory within [1, 20]");
  }
  return c.finish();
}

// ---- criterion 9: generalization probe ----

int criterion9(const Cache&) {
  Criterion c(9);
  const std::vector<int> k_list = {500, 2000, 8000};
  std::vector<std::vector<double>> gaps(k_list.size());
  bool bounded = true;
  for (int seed = 0; seed < 5; ++seed) {
    TrainConfig cfg;
    cfg.total_iters = 1200;
    cfg.batch_size = 256;
    cfg.menu_size = 16;
    cfg.test_size = 20000;
    cfg.seed = 900 + static_cast<uint64_t>(seed);
    const auto rows = empirical_gap_probe(cfg, dir_spec(), k_list);
    for (size_t t = 0; t < rows.size(); ++t) {
      gaps[t].push_back(rows[t].gap);
      bounded = bounded && rows[t].gap <= rows[t].bound;
      c.detail << "  [info] seed " << seed << " K=" << rows[t].k << " gap "
               << fmt(rows[t].gap) << " bound " << fmt(rows[t].bound) << "\n";
    }
  }
  std::vector<double> medians;
  for (auto& g : gaps) {
    std::sort(g.begin(), g.end());
    medians.push_back(g[g.size() / 2]);
  }
  bool monotone = true;
  for (size_t t = 1; t < medians.size(); ++t)
    monotone = monotone && medians[t] <= medians[t - 1] + 1e-12;
  c.check(monotone, "median gap nonincreasing in K: " + fmt(medians[0]) + " >= " +
                        fmt(medians[1]) + " >= " + fmt(medians[2]));
  c.check(bounded, "every measured gap below the spectral-norm generalization bound");
  return c.finish();
}

// ---- criterion 10: R_target sweep (CI subset) ----

int criterion10(const Cache& cache) {
  Criterion c(10);
  const std::vector<double> targets = {0.01, 0.002, 0.001};
  const Checkpoint amaonly = cache.load("dir_amaonly");
  const ExactMetrics m_ama = eval_checkpoint(amaonly);

  std::vector<double> revenues;
  for (const double target : targets) {
    TrainConfig cfg = dir_config();
    cfg.r_target = target;
    const TrainResult result = train(cfg, dir_spec(), TrainMode::CAAMA);
    revenues.push_back(result.test.revenue);
    const double achieved = result.test.regret_ir_mean;
    const double ratio =
        std::max(achieved / target, target / std::max(achieved, 1e-12));
    c.check(ratio <= 3.0, "target " + fmt(target) + ": achieved regret " +
                              fmt(achieved) + " within 3x (ratio " + fmt(ratio) + ")");
    c.check(result.test.revenue > m_ama.revenue,
            "target " + fmt(target) + ": CA-AMA revenue " + fmt(result.test.revenue) +
                " beats AmaOnly " + fmt(m_ama.revenue));
  }
  const double slack = 0.02 * *std::max_element(revenues.begin(), revenues.end());
  bool monotone = true;
  for (size_t t = 1; t < revenues.size(); ++t)
    monotone = monotone && revenues[t] <= revenues[t - 1] + slack;
  c.check(monotone, "revenue nonincreasing in target tightness (2% seed-noise slack)");
  return c.finish();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: caama_acceptance <setup|1..10|all> <cache_dir>\n";
    return 2;
  }
  const std::string cmd = argv[1];
  Cache cache{fs::path(argv[2])};
  try {
    if (cmd == "setup") return cmd_setup(cache);
    if (cmd == "all") {
      int rc = cmd_setup(cache);
      rc |= criterion1();
      rc |= criterion2();
      rc |= criterion3();
      rc |= criterion4();
      rc |= criterion5(cache);
      rc |= criterion6(cache);
      rc |= criterion7(cache);
      rc |= criterion8(cache);
      rc |= criterion9(cache);
      rc |= criterion10(cache);
      return rc;
    }
    const int id = std::stoi(cmd);
    switch (id) {
      case 1: return criterion1();
      case 2: return criterion2();
      case 3: return criterion3();
      case 4: return criterion4();
      case 5: return criterion5(cache);
      case 6: return criterion6(cache);
      case 7: return criterion7(cache);
      case 8: return criterion8(cache);
      case 9: return criterion9(cache);
      case 10: return criterion10(cache);
      default: break;
    }
    std::cerr << "unknown criterion " << cmd << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
