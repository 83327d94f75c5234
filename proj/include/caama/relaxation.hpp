#pragma once

#include "caama/cor_net.hpp"
#include "caama/types.hpp"

#include <json.hpp>

#include <cstdint>
#include <span>
#include <vector>

namespace caama {

// Unconstrained trainable parameters that generate a feasible AmaParams.
// menu_logits[k] is (n+1) x m: column j holds the receiver logits for item j
// of menu entry k, row 0 being the reserve slot.
struct RawAmaParams {
  std::vector<Matrix> menu_logits;  // S entries, (n+1) x m each
  Vector weight_logits;             // n
  Vector boosts;                    // S
  double temperature_feas = 1.0;

  int size() const { return static_cast<int>(menu_logits.size()); }
  int bidders() const { return static_cast<int>(weight_logits.size()); }
  int items() const {
    return menu_logits.empty() ? 0 : static_cast<int>(menu_logits.front().cols());
  }

  nlohmann::json to_json() const;
  static RawAmaParams from_json(const nlohmann::json& j);
};

// Small random logits so realized menu entries are distinct; boosts start at
// zero and weight logits at softplus^{-1}(1), i.e. weights near 1.
RawAmaParams raw_init(int s, int n, int m, uint64_t seed);

// Per-item softmax over (n+1) receiver slots with the reserve coordinate
// dropped (column sums <= 1 by construction); w_i = softplus(logit) + 1e-3.
AmaParams realize(const RawAmaParams& raw);

struct SoftOutcome {
  Allocation soft_alloc;                  // sum_k softmax(asw T)_k A_k
  std::vector<Allocation> soft_alloc_minus;  // same with asw_{-i}
  Vector pay_hat;
  Vector util_hat;
};

SoftOutcome soft_allocate(const ValuationProfile& v, const AmaParams& params, double t);

// Adds the relaxed payments p_hat_i = (asw_{-i}(g_{-i}) - asw_{-i}(g)) / w_i
// (asw_{-i} extended linearly over menu mixtures) and utilities.
SoftOutcome soft_payment_utility(const ValuationProfile& v, const AmaParams& params,
                                 double t);

struct RawGrads {
  std::vector<Matrix> menu_logits;
  Vector weight_logits;
  Vector boosts;

  static RawGrads zeros_like(const RawAmaParams& raw);
  void set_zero();
  void add(const RawGrads& other);
};

enum class Stage { Mutual, Post };

struct LossRecord {
  double loss = 0.0;          // sum over the batch of (-revenue + gamma * regret)
  double revenue_mean = 0.0;
  double regret_ir_mean = 0.0;
  RawGrads grad_raw;
  CorGrad grad_cor;
};

// Exact gradients of the batch loss. Mutual stage: soft payments/utilities,
// gradients flow into both parameter sets. Post stage: exact AMA payments and
// utilities, grad_raw is zero, only the cor net receives gradients.
// cor == nullptr runs the pure-AMA baseline: p_cor = 0 and the IR penalty is
// dropped (pure AMA is IR).
LossRecord loss_and_grad(std::span<const Matrix> batch, const RawAmaParams& raw,
                         const CorPaymentNet* cor, double gamma, double t,
                         Stage stage);

}  // namespace caama
