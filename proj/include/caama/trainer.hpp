#pragma once

#include "caama/cor_net.hpp"
#include "caama/distributions.hpp"
#include "caama/relaxation.hpp"
#include "caama/types.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace caama {

struct TrainConfig {
  int total_iters = 32000;
  double mutual_fraction = 0.75;
  int batch_size = 2048;
  double temperature = 500.0;  // asw softmax temperature during mutual training
  double r_target = 0.001;
  double gamma0 = 5.0;
  double gamma_delta = 0.01;
  double gamma_max = 20.0;
  double gamma_min = 1.0;
  double step_size = 3e-4;
  int menu_size = 32;
  int cor_h1 = kCorDefaultWidth;
  int cor_h2 = kCorDefaultWidth;
  uint64_t seed = 0;
  int eval_every = 250;
  int test_size = 20000;

  void validate() const;
  nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);

  // CI preset: halved iterations, batch 512.
  static TrainConfig desk_scale();
};

enum class TrainMode { CAAMA, AmaOnly };

std::string train_mode_name(TrainMode m);
TrainMode train_mode_from_name(const std::string& s);

struct MetricRow {
  int iter = 0;
  double revenue_soft = 0.0;
  double revenue_exact = 0.0;
  double regret_ir = 0.0;
  double gamma = 0.0;
  Stage stage = Stage::Mutual;
  // batch decomposition of the exact revenue (not part of the metric CSV)
  double pay_ama_exact = 0.0;
  double pay_cor_exact = 0.0;
};

// Adam-style moments, one mirror per parameter block.
struct AdamState {
  RawGrads m_raw, v_raw;
  CorGrad m_cor, v_cor;
  long t = 0;
};

struct TrainState {
  RawAmaParams raw;
  std::optional<CorPaymentNet> cor;  // absent in AmaOnly mode
  double gamma = 0.0;
  int iter = 0;
  Stage stage = Stage::Mutual;
  AdamState adam;
  TrainMode mode = TrainMode::CAAMA;
  std::vector<MetricRow> log;
};

// Thrown when training hits a non-finite loss; carries the iteration.
struct NumericError : std::runtime_error {
  int iter;
  explicit NumericError(int it)
      : std::runtime_error("non-finite loss at iteration " + std::to_string(it)),
        iter(it) {}
};

// clip(gamma + gamma_delta (log max(regret, 1e-8) - log r_target),
//      gamma_min, gamma_max)
double update_gamma(double gamma, double regret_batch, const TrainConfig& cfg);

// One Adam update on each parameter set; the caller owns adam.t (increment
// once per optimizer step before calling).
void adam_update_raw(RawAmaParams& raw, const RawGrads& g, AdamState& adam, double lr);
void adam_update_cor(CorPaymentNet& cor, const CorGrad& g, AdamState& adam, double lr);

TrainState init_state(const TrainConfig& cfg, const DistributionSpec& spec,
                      TrainMode mode);

// One optimization step: fresh batch, stage-appropriate loss, Adam update on
// the unfrozen parameters, gamma update from the batch mean Regret_IR. The
// stage flips to Post at mutual_fraction * total_iters (CAAMA mode only; the
// AmaOnly baseline trains the AMA parameters for the whole run).
void step(TrainState& state, const TrainConfig& cfg, const DistributionSpec& spec);

// Exact test-set metrics via mech_core evaluation.
struct ExactMetrics {
  double revenue = 0.0;
  double revenue_postproc = 0.0;
  double regret_ir_mean = 0.0;
  double regret_ir_max = 0.0;
  double min_utility = 0.0;
  double pay_ama_mean = 0.0;
  double pay_cor_mean = 0.0;

  double pay_cor_share() const {
    const double tot = pay_ama_mean + pay_cor_mean;
    return tot != 0.0 ? pay_cor_mean / tot : 0.0;
  }
};

ExactMetrics evaluate_exact(const AmaParams& params, const CorPaymentNet* cor,
                            const std::vector<Matrix>& profiles);

struct TrainResult {
  TrainState state;
  ExactMetrics test;
  double wallclock_s = 0.0;
};

// Held-out test set shared by all modes under the same cfg.seed.
Dataset held_out_test_set(const TrainConfig& cfg, const DistributionSpec& spec);

TrainResult train(const TrainConfig& cfg, const DistributionSpec& spec, TrainMode mode);

// Checkpoint bundle (raw params, cor net, config, iter, gamma, seed, spec).
void save_checkpoint(const TrainState& state, const TrainConfig& cfg,
                     const DistributionSpec& spec, const std::string& path);

struct Checkpoint {
  TrainState state;
  TrainConfig cfg;
  DistributionSpec spec;
};

Checkpoint load_checkpoint(const std::string& path);

void save_metric_log(const std::vector<MetricRow>& log, uint64_t seed,
                     const std::string& path);

}  // namespace caama
