#pragma once

#include "caama/rng.hpp"
#include "caama/types.hpp"

namespace caama::testutil {

inline Matrix rand_profile(int n, int m, Rng& rng) {
  Matrix v(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) v(i, j) = rng.uniform01();
  return v;
}

// Random feasible menu: per-item softmax columns, so entries are interior
// points of the feasible polytope and distinct with probability one.
inline AmaParams rand_ama_params(int s, int n, int m, Rng& rng) {
  AmaParams params;
  params.menu.reserve(static_cast<size_t>(s));
  for (int k = 0; k < s; ++k) {
    Allocation a(n, m);
    for (int j = 0; j < m; ++j) {
      Vector logits(n + 1);
      for (int r = 0; r <= n; ++r) logits[r] = rng.uniform(-2.0, 2.0);
      logits = (logits.array() - logits.maxCoeff()).exp();
      logits /= logits.sum();
      a.col(j) = logits.tail(n);
    }
    params.menu.push_back(std::move(a));
  }
  params.weights = Vector(n);
  for (int i = 0; i < n; ++i) params.weights[i] = rng.uniform(0.5, 2.0);
  params.boosts = Vector(s);
  for (int k = 0; k < s; ++k) params.boosts[k] = rng.uniform(-0.5, 0.5);
  return params;
}

// Single-item deterministic menu [reserve, to-1, ..., to-n] with w = 1,
// lambda = 0 unless given.
inline AmaParams single_item_params(int n, Vector boosts = Vector()) {
  AmaParams params;
  params.menu = deterministic_menu(n, 1);
  params.weights = Vector::Ones(n);
  params.boosts = boosts.size() > 0 ? boosts : Vector::Zero(n + 1);
  return params;
}

}  // namespace caama::testutil
