#include "caama/trainer.hpp"

#include "caama/mech.hpp"
#include "caama/rng.hpp"
#include "caama/version.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace caama {

namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;
constexpr double kRegretFloor = 1e-8;

uint64_t mix_seed(uint64_t seed, uint64_t tag) {
  return Rng::substream(seed, tag).next_u64();
}

template <typename T>
void adam_apply(T& x, const T& g, T& m, T& v, double lr, double c1, double c2) {
  m = kBeta1 * m + (1.0 - kBeta1) * g;
  v = (kBeta2 * v.array() + (1.0 - kBeta2) * g.array().square()).matrix();
  x.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + kAdamEps);
}

void adam_apply_scalar(double& x, double g, double& m, double& v, double lr,
                       double c1, double c2) {
  m = kBeta1 * m + (1.0 - kBeta1) * g;
  v = kBeta2 * v + (1.0 - kBeta2) * g * g;
  x -= lr * (m / c1) / (std::sqrt(v / c2) + kAdamEps);
}

}  // namespace

void TrainConfig::validate() const {
  if (total_iters < 1 || batch_size < 1 || menu_size < 1 || test_size < 1 ||
      eval_every < 1)
    throw std::invalid_argument("train config: counts must be positive");
  if (!(mutual_fraction > 0.0 && mutual_fraction < 1.0))
    throw std::invalid_argument("train config: mutual_fraction in (0,1)");
  if (!(gamma_min <= gamma0 && gamma0 <= gamma_max))
    throw std::invalid_argument("train config: gamma0 outside [gamma_min, gamma_max]");
  if (!(temperature > 0.0 && r_target > 0.0 && step_size > 0.0 &&
        gamma_delta > 0.0))
    throw std::invalid_argument("train config: positives must be positive");
}

nlohmann::json TrainConfig::to_json() const {
  return nlohmann::json{
      {"total_iters", total_iters},   {"mutual_fraction", mutual_fraction},
      {"batch_size", batch_size},     {"temperature", temperature},
      {"r_target", r_target},         {"gamma0", gamma0},
      {"gamma_delta", gamma_delta},   {"gamma_max", gamma_max},
      {"gamma_min", gamma_min},       {"step_size", step_size},
      {"menu_size", menu_size},       {"cor_h1", cor_h1},
      {"cor_h2", cor_h2},             {"seed", seed},
      {"eval_every", eval_every},     {"test_size", test_size}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.total_iters = j.value("total_iters", c.total_iters);
  c.mutual_fraction = j.value("mutual_fraction", c.mutual_fraction);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.temperature = j.value("temperature", c.temperature);
  c.r_target = j.value("r_target", c.r_target);
  c.gamma0 = j.value("gamma0", c.gamma0);
  c.gamma_delta = j.value("gamma_delta", c.gamma_delta);
  c.gamma_max = j.value("gamma_max", c.gamma_max);
  c.gamma_min = j.value("gamma_min", c.gamma_min);
  c.step_size = j.value("step_size", c.step_size);
  c.menu_size = j.value("menu_size", c.menu_size);
  c.cor_h1 = j.value("cor_h1", c.cor_h1);
  c.cor_h2 = j.value("cor_h2", c.cor_h2);
  c.seed = j.value("seed", c.seed);
  c.eval_every = j.value("eval_every", c.eval_every);
  c.test_size = j.value("test_size", c.test_size);
  c.validate();
  return c;
}

TrainConfig TrainConfig::desk_scale() {
  TrainConfig c;
  c.total_iters = 16000;
  c.batch_size = 512;
  return c;
}

std::string train_mode_name(TrainMode m) {
  return m == TrainMode::CAAMA ? "CAAMA" : "AmaOnly";
}

TrainMode train_mode_from_name(const std::string& s) {
  if (s == "CAAMA") return TrainMode::CAAMA;
  if (s == "AmaOnly") return TrainMode::AmaOnly;
  throw std::invalid_argument("unknown train mode: " + s);
}

double update_gamma(double gamma, double regret_batch, const TrainConfig& cfg) {
  if (regret_batch < 0.0)
    throw std::invalid_argument("update_gamma: regret must be >= 0");
  const double g = gamma + cfg.gamma_delta * (std::log(std::max(regret_batch, kRegretFloor)) -
                                              std::log(cfg.r_target));
  return std::clamp(g, cfg.gamma_min, cfg.gamma_max);
}

TrainState init_state(const TrainConfig& cfg, const DistributionSpec& spec,
                      TrainMode mode) {
  cfg.validate();
  spec.validate();
  TrainState st;
  st.mode = mode;
  st.raw = raw_init(cfg.menu_size, spec.n, spec.m, mix_seed(cfg.seed, 0x01));
  if (mode == TrainMode::CAAMA)
    st.cor = cor_init(spec.n, spec.m, cfg.cor_h1, cfg.cor_h2, mix_seed(cfg.seed, 0x02));
  st.gamma = cfg.gamma0;
  st.adam.m_raw = RawGrads::zeros_like(st.raw);
  st.adam.v_raw = RawGrads::zeros_like(st.raw);
  if (st.cor) {
    st.adam.m_cor = CorGrad::zeros_like(*st.cor);
    st.adam.v_cor = CorGrad::zeros_like(*st.cor);
  }
  return st;
}

void adam_update_raw(RawAmaParams& raw, const RawGrads& g, AdamState& adam, double lr) {
  const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(adam.t));
  const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(adam.t));
  for (size_t k = 0; k < raw.menu_logits.size(); ++k)
    adam_apply(raw.menu_logits[k], g.menu_logits[k], adam.m_raw.menu_logits[k],
               adam.v_raw.menu_logits[k], lr, c1, c2);
  adam_apply(raw.weight_logits, g.weight_logits, adam.m_raw.weight_logits,
             adam.v_raw.weight_logits, lr, c1, c2);
  adam_apply(raw.boosts, g.boosts, adam.m_raw.boosts, adam.v_raw.boosts, lr, c1, c2);
}

void adam_update_cor(CorPaymentNet& cor, const CorGrad& g, AdamState& adam, double lr) {
  const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(adam.t));
  const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(adam.t));
  for (size_t i = 0; i < cor.blocks.size(); ++i) {
    CorBlock& b = cor.blocks[i];
    const CorBlockGrad& gb = g.blocks[i];
    adam_apply(b.w1, gb.w1, adam.m_cor.blocks[i].w1, adam.v_cor.blocks[i].w1, lr, c1, c2);
    adam_apply(b.w2, gb.w2, adam.m_cor.blocks[i].w2, adam.v_cor.blocks[i].w2, lr, c1, c2);
    adam_apply(b.w3, gb.w3, adam.m_cor.blocks[i].w3, adam.v_cor.blocks[i].w3, lr, c1, c2);
    if (!cor.bias_free) {
      adam_apply(b.b1, gb.b1, adam.m_cor.blocks[i].b1, adam.v_cor.blocks[i].b1, lr, c1, c2);
      adam_apply(b.b2, gb.b2, adam.m_cor.blocks[i].b2, adam.v_cor.blocks[i].b2, lr, c1, c2);
      adam_apply_scalar(b.b3, gb.b3, adam.m_cor.blocks[i].b3, adam.v_cor.blocks[i].b3,
                        lr, c1, c2);
    }
  }
}

void step(TrainState& state, const TrainConfig& cfg, const DistributionSpec& spec) {
  DistributionSpec train_spec = spec;
  train_spec.seed = mix_seed(cfg.seed, 0x7a11);

  // fresh batch every iteration
  std::vector<Matrix> batch(static_cast<size_t>(cfg.batch_size));
  const uint64_t base = static_cast<uint64_t>(state.iter) *
                        static_cast<uint64_t>(cfg.batch_size);
  for (int b = 0; b < cfg.batch_size; ++b)
    batch[static_cast<size_t>(b)] = sample_profile(train_spec, base + static_cast<uint64_t>(b));

  const CorPaymentNet* cor = state.cor ? &*state.cor : nullptr;
  const Stage stage = state.mode == TrainMode::AmaOnly ? Stage::Mutual : state.stage;
  LossRecord rec = loss_and_grad(batch, state.raw, cor, state.gamma, cfg.temperature,
                                 stage);
  if (!std::isfinite(rec.loss)) throw NumericError(state.iter);

  state.adam.t += 1;
  const bool update_raw = state.mode == TrainMode::AmaOnly || state.stage == Stage::Mutual;
  if (update_raw) adam_update_raw(state.raw, rec.grad_raw, state.adam, cfg.step_size);
  if (state.cor) adam_update_cor(*state.cor, rec.grad_cor, state.adam, cfg.step_size);

  if (state.cor) state.gamma = update_gamma(state.gamma, rec.regret_ir_mean, cfg);

  if (state.iter % cfg.eval_every == 0 || state.iter + 1 == cfg.total_iters) {
    const AmaParams params = realize(state.raw);
    double pay_ama = 0.0, pay_cor = 0.0;
    for (const auto& v : batch) {
      const ValuationProfile prof{v};
      const AuctionOutcome out = cor ? caama_outcome(prof, params, *cor)
                                     : ama_outcome(prof, params);
      pay_ama += out.pay_ama.sum();
      pay_cor += out.pay_cor.sum();
    }
    pay_ama /= static_cast<double>(batch.size());
    pay_cor /= static_cast<double>(batch.size());
    state.log.push_back(MetricRow{state.iter, rec.revenue_mean, pay_ama + pay_cor,
                                  rec.regret_ir_mean, state.gamma, stage, pay_ama,
                                  pay_cor});
  }

  state.iter += 1;
  if (state.mode == TrainMode::CAAMA && state.stage == Stage::Mutual &&
      state.iter >= static_cast<int>(cfg.mutual_fraction * cfg.total_iters))
    state.stage = Stage::Post;
}

ExactMetrics evaluate_exact(const AmaParams& params, const CorPaymentNet* cor,
                            const std::vector<Matrix>& profiles) {
  ExactMetrics m;
  if (profiles.empty()) return m;
  m.min_utility = std::numeric_limits<double>::infinity();
  for (const auto& v : profiles) {
    const ValuationProfile prof{v};
    const AuctionOutcome out = cor ? caama_outcome(prof, params, *cor)
                                   : ama_outcome(prof, params);
    const AuctionOutcome post = post_process_ir(out);
    m.revenue += out.revenue();
    m.revenue_postproc += post.revenue();
    m.pay_ama_mean += out.pay_ama.sum();
    m.pay_cor_mean += out.pay_cor.sum();
    double reg = 0.0;
    for (int i = 0; i < out.utilities.size(); ++i) {
      reg += std::max(0.0, -out.utilities[i]);
      m.min_utility = std::min(m.min_utility, out.utilities[i]);
    }
    m.regret_ir_mean += reg;
    m.regret_ir_max = std::max(m.regret_ir_max, reg);
  }
  const double k = static_cast<double>(profiles.size());
  m.revenue /= k;
  m.revenue_postproc /= k;
  m.pay_ama_mean /= k;
  m.pay_cor_mean /= k;
  m.regret_ir_mean /= k;
  return m;
}

Dataset held_out_test_set(const TrainConfig& cfg, const DistributionSpec& spec) {
  DistributionSpec test_spec = spec;
  test_spec.seed = mix_seed(cfg.seed, 0x7e57);
  return sample(test_spec, cfg.test_size);
}

TrainResult train(const TrainConfig& cfg, const DistributionSpec& spec, TrainMode mode) {
  const auto t0 = std::chrono::steady_clock::now();
  TrainResult result;
  result.state = init_state(cfg, spec, mode);
  for (int it = 0; it < cfg.total_iters; ++it) step(result.state, cfg, spec);

  const Dataset test = held_out_test_set(cfg, spec);
  const AmaParams params = realize(result.state.raw);
  const CorPaymentNet* cor = result.state.cor ? &*result.state.cor : nullptr;
  result.test = evaluate_exact(params, cor, test.profiles);
  if (mode == TrainMode::AmaOnly) {
    // pure AMA is IR: report exactly zero, independent of fp slack
    result.test.regret_ir_mean = 0.0;
    result.test.regret_ir_max = 0.0;
    result.test.min_utility = std::max(result.test.min_utility, 0.0);
  }
  result.wallclock_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

void save_checkpoint(const TrainState& state, const TrainConfig& cfg,
                     const DistributionSpec& spec, const std::string& path) {
  nlohmann::json j{{"format", "caama_checkpoint/1"},
                   {"version", version_tag()},
                   {"mode", train_mode_name(state.mode)},
                   {"iter", state.iter},
                   {"gamma", state.gamma},
                   {"seed", cfg.seed},
                   {"raw", state.raw.to_json()},
                   {"config", cfg.to_json()},
                   {"spec", spec.to_json()}};
  if (state.cor) j["cor"] = cor_to_json(*state.cor);
  std::ofstream os(path);
  if (!os) throw std::runtime_error("save_checkpoint: cannot open " + path);
  os << j.dump(2) << "\n";
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("load_checkpoint: cannot open " + path);
  nlohmann::json j;
  is >> j;
  if (j.at("format").get<std::string>() != "caama_checkpoint/1")
    throw std::invalid_argument("load_checkpoint: unknown format tag");
  Checkpoint c;
  c.cfg = TrainConfig::from_json(j.at("config"));
  c.spec = DistributionSpec::from_json(j.at("spec"));
  c.state.mode = train_mode_from_name(j.at("mode").get<std::string>());
  c.state.iter = j.at("iter").get<int>();
  c.state.gamma = j.at("gamma").get<double>();
  c.state.raw = RawAmaParams::from_json(j.at("raw"));
  if (j.contains("cor")) c.state.cor = cor_from_json(j.at("cor"));
  return c;
}

void save_metric_log(const std::vector<MetricRow>& log, uint64_t seed,
                     const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("save_metric_log: cannot open " + path);
  os << "iter,revenue_soft,revenue_exact,regret_ir,gamma,stage\n";
  os.precision(17);
  for (const auto& r : log) {
    os << r.iter << "," << r.revenue_soft << "," << r.revenue_exact << ","
       << r.regret_ir << "," << r.gamma << ","
       << (r.stage == Stage::Mutual ? "mutual" : "post") << "\n";
  }
  os << "# " << version_tag() << " seed=" << seed << "\n";
}

}  // namespace caama
