#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace caama {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Numerical slack for feasibility / IR assertions on exact evaluation paths.
inline constexpr double kFeasTol = 1e-9;

// An allocation is an n x m matrix with entries in [0,1] and per-item
// (column) sums <= 1.
using Allocation = Matrix;

bool allocation_feasible(const Allocation& a, double tol = kFeasTol);

// Per-bidder, per-item values in [0,1]; row i is bidder i's valuation vector.
struct ValuationProfile {
  Matrix values;

  ValuationProfile() = default;
  explicit ValuationProfile(Matrix v) : values(std::move(v)) {}

  int bidders() const { return static_cast<int>(values.rows()); }
  int items() const { return static_cast<int>(values.cols()); }

  bool valid(double tol = kFeasTol) const;
};

// Flattens the profile with row i removed, row-major, remaining bidders in
// original order. This is the input layout of the correlation payment nets.
Vector flatten_minus(const Matrix& values, int i);
void flatten_minus_into(const Matrix& values, int i, Vector& out);

// AMA parameters: a menu of S candidate allocations, strictly positive
// bidder weights and per-entry boosts.
struct AmaParams {
  std::vector<Allocation> menu;
  Vector weights;
  Vector boosts;

  int size() const { return static_cast<int>(menu.size()); }
  int bidders() const { return static_cast<int>(weights.size()); }

  // Throws std::invalid_argument on violated invariants. Menu distinctness
  // (pairwise L_inf > tol) is only enforced when strict_distinct is set;
  // realized training menus may pass arbitrarily close to one another.
  void validate(bool strict_distinct = true, double tol = kFeasTol) const;
};

// All (n+1)^m deterministic allocations, item-major, receiver 0 = reserve.
// Entry k assigns item j to digit_j(k) - 1, or keeps it unallocated when the
// digit is 0 (item 0 is the most significant digit).
std::vector<Allocation> deterministic_menu(int n, int m);

struct AuctionOutcome {
  Allocation allocation;  // n x m
  Vector pay_ama;         // per bidder, >= 0
  Vector pay_cor;         // per bidder, may be negative
  Vector utilities;       // v_i . alloc_i - pay_ama_i - pay_cor_i
  int winner_index = -1;  // index of the chosen menu entry

  double revenue() const { return pay_ama.sum() + pay_cor.sum(); }
};

}  // namespace caama
