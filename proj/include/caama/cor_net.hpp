#pragma once

#include "caama/types.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace caama {

// One three-layer ReLU network per bidder, mapping the flattened V_{-i}
// to a scalar correlation-aware payment:
//   f(x) = W3 relu(W2 relu(W1 x + b1) + b2) + b3.
// In bias-free mode the b's are pinned to zero and excluded from gradients.
struct CorBlock {
  Matrix w1;  // h1 x (n-1)m
  Vector b1;  // h1
  Matrix w2;  // h2 x h1
  Vector b2;  // h2
  Matrix w3;  // 1 x h2
  double b3 = 0.0;
};

struct CorPaymentNet {
  std::vector<CorBlock> blocks;  // exactly n, one per bidder
  int input_width = 0;           // (n-1)*m
  int h1 = 0;
  int h2 = 0;
  bool bias_free = false;

  int bidders() const { return static_cast<int>(blocks.size()); }
};

// Gradients mirror the parameter blocks.
struct CorBlockGrad {
  Matrix w1;
  Vector b1;
  Matrix w2;
  Vector b2;
  Matrix w3;
  double b3 = 0.0;

  void set_zero();
};

struct CorGrad {
  std::vector<CorBlockGrad> blocks;

  static CorGrad zeros_like(const CorPaymentNet& net);
  void set_zero();
  void add_scaled(const CorGrad& other, double scale);
};

// Scratch buffers reused across the per-profile forward/backward calls.
struct CorScratch {
  Vector z1, a1, z2, a2, d1, d2;
};

constexpr int kCorDefaultWidth = 64;

CorPaymentNet cor_init(int n, int m, int h1 = kCorDefaultWidth,
                       int h2 = kCorDefaultWidth, uint64_t seed = 0,
                       bool bias_free = false);

double cor_forward(const CorPaymentNet& net, int i, const Vector& v_minus_i);
double cor_forward(const CorPaymentNet& net, int i, const Matrix& profile_values);

// Exact gradient of the output w.r.t. block i, scaled by upstream_grad.
CorBlockGrad cor_backward(const CorPaymentNet& net, int i, const Vector& v_minus_i,
                          double upstream_grad);

// Hot-loop variants: forward caching activations in scratch, then a backward
// that reuses them and accumulates the scaled gradient into acc.
double cor_forward_cached(const CorPaymentNet& net, int i, const Vector& v_minus_i,
                          CorScratch& ws);
void cor_backward_cached(const CorPaymentNet& net, int i, const Vector& v_minus_i,
                         double upstream_grad, CorBlockGrad& acc, CorScratch& ws);

// Largest singular value of (W1, W2, W3); power iteration, 100 steps,
// tolerance 1e-6, biases excluded.
std::array<double, 3> cor_spectral_norms(const CorPaymentNet& net, int i);

double matrix_spectral_norm(const Matrix& w, int max_iters = 100, double tol = 1e-6);

// JSON document with a format tag, shape record and row-major weight arrays.
nlohmann::json cor_to_json(const CorPaymentNet& net);
CorPaymentNet cor_from_json(const nlohmann::json& j);
void cor_save(const CorPaymentNet& net, std::ostream& os);
CorPaymentNet cor_load(std::istream& is);

}  // namespace caama
