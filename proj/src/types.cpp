#include "caama/types.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace caama {

bool allocation_feasible(const Allocation& a, double tol) {
  if (a.size() == 0) return false;
  if ((a.array() < -tol).any() || (a.array() > 1.0 + tol).any()) return false;
  for (int j = 0; j < a.cols(); ++j) {
    if (a.col(j).sum() > 1.0 + tol) return false;
  }
  return true;
}

bool ValuationProfile::valid(double tol) const {
  if (values.rows() < 1 || values.cols() < 1) return false;
  return !((values.array() < -tol).any() || (values.array() > 1.0 + tol).any());
}

Vector flatten_minus(const Matrix& values, int i) {
  Vector out;
  flatten_minus_into(values, i, out);
  return out;
}

void flatten_minus_into(const Matrix& values, int i, Vector& out) {
  const int n = static_cast<int>(values.rows());
  const int m = static_cast<int>(values.cols());
  if (i < 0 || i >= n) throw std::out_of_range("flatten_minus: bidder index");
  out.resize((n - 1) * m);
  int r = 0;
  for (int b = 0; b < n; ++b) {
    if (b == i) continue;
    out.segment(r * m, m) = values.row(b).transpose();
    ++r;
  }
}

void AmaParams::validate(bool strict_distinct, double tol) const {
  if (menu.empty()) throw std::invalid_argument("AmaParams: empty menu");
  const int n = bidders();
  if (n < 1) throw std::invalid_argument("AmaParams: no bidders");
  if ((weights.array() <= 0.0).any())
    throw std::invalid_argument("AmaParams: weights must be strictly positive");
  if (boosts.size() != size())
    throw std::invalid_argument("AmaParams: boosts/menu size mismatch");
  const int m = static_cast<int>(menu.front().cols());
  for (const auto& a : menu) {
    if (a.rows() != n || a.cols() != m)
      throw std::invalid_argument("AmaParams: menu entry shape mismatch");
    if (!allocation_feasible(a, tol))
      throw std::invalid_argument("AmaParams: infeasible menu entry");
  }
  if (strict_distinct) {
    for (size_t k = 0; k < menu.size(); ++k) {
      for (size_t l = k + 1; l < menu.size(); ++l) {
        if ((menu[k] - menu[l]).cwiseAbs().maxCoeff() <= tol)
          throw std::invalid_argument(
              "AmaParams: duplicate menu entries " + std::to_string(k) + "," +
              std::to_string(l));
      }
    }
  }
}

std::vector<Allocation> deterministic_menu(int n, int m) {
  if (n < 1 || m < 1) throw std::invalid_argument("deterministic_menu: shape");
  long total = 1;
  for (int j = 0; j < m; ++j) {
    total *= (n + 1);
    if (total > 1'000'000) throw std::invalid_argument("deterministic_menu: too large");
  }
  std::vector<Allocation> menu;
  menu.reserve(static_cast<size_t>(total));
  for (long k = 0; k < total; ++k) {
    Allocation a = Matrix::Zero(n, m);
    long rem = k;
    // item 0 is the most significant digit
    for (int j = m - 1; j >= 0; --j) {
      const int digit = static_cast<int>(rem % (n + 1));
      rem /= (n + 1);
      if (digit > 0) a(digit - 1, j) = 1.0;
    }
    menu.push_back(std::move(a));
  }
  return menu;
}

}  // namespace caama
