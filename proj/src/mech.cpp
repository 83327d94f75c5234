#include "caama/mech.hpp"

#include <stdexcept>

namespace caama {

namespace {

void check_shapes(const ValuationProfile& v, const AmaParams& params) {
  if (v.bidders() != params.bidders())
    throw std::invalid_argument("mech: bidder count mismatch");
  if (!params.menu.empty() && params.menu.front().cols() != v.values.cols())
    throw std::invalid_argument("mech: item count mismatch");
}

}  // namespace

double asw(int k, const ValuationProfile& v, const AmaParams& params) {
  if (k < 0 || k >= params.size()) throw std::out_of_range("asw: menu index");
  const Allocation& a = params.menu[static_cast<size_t>(k)];
  double total = params.boosts[k];
  for (int i = 0; i < v.bidders(); ++i)
    total += params.weights[i] * v.values.row(i).dot(a.row(i));
  return total;
}

double asw_minus(int i, int k, const ValuationProfile& v, const AmaParams& params) {
  if (i < 0 || i >= v.bidders()) throw std::out_of_range("asw_minus: bidder index");
  const Allocation& a = params.menu[static_cast<size_t>(k)];
  return asw(k, v, params) - params.weights[i] * v.values.row(i).dot(a.row(i));
}

AuctionOutcome ama_outcome(const ValuationProfile& v, const AmaParams& params) {
  check_shapes(v, params);
  const int n = v.bidders();
  const int s = params.size();

  // own_val(i, k) = v_i . (A_k)_i
  Matrix own_val(n, s);
  Vector asw_all(s);
  for (int k = 0; k < s; ++k) {
    const Allocation& a = params.menu[static_cast<size_t>(k)];
    double total = params.boosts[k];
    for (int i = 0; i < n; ++i) {
      const double c = v.values.row(i).dot(a.row(i));
      own_val(i, k) = c;
      total += params.weights[i] * c;
    }
    asw_all[k] = total;
  }

  int winner = 0;
  for (int k = 1; k < s; ++k)
    if (asw_all[k] > asw_all[winner]) winner = k;  // lowest index on ties

  AuctionOutcome out;
  out.allocation = params.menu[static_cast<size_t>(winner)];
  out.winner_index = winner;
  out.pay_ama = Vector::Zero(n);
  out.pay_cor = Vector::Zero(n);
  out.utilities = Vector::Zero(n);
  for (int i = 0; i < n; ++i) {
    double best_minus = asw_all[0] - params.weights[i] * own_val(i, 0);
    for (int k = 1; k < s; ++k) {
      const double m = asw_all[k] - params.weights[i] * own_val(i, k);
      if (m > best_minus) best_minus = m;
    }
    const double winner_minus = asw_all[winner] - params.weights[i] * own_val(i, winner);
    out.pay_ama[i] = (best_minus - winner_minus) / params.weights[i];
    out.utilities[i] = own_val(i, winner) - out.pay_ama[i];
  }
  return out;
}

AuctionOutcome caama_outcome(const ValuationProfile& v, const AmaParams& params,
                             const CorPaymentNet& cor) {
  if (cor.input_width != (v.bidders() - 1) * v.items())
    throw std::invalid_argument("caama_outcome: cor input width mismatch");
  AuctionOutcome out = ama_outcome(v, params);
  for (int i = 0; i < v.bidders(); ++i) {
    out.pay_cor[i] = cor_forward(cor, i, v.values);
    out.utilities[i] -= out.pay_cor[i];
  }
  return out;
}

AuctionOutcome vcg_outcome(const ValuationProfile& v) {
  const int n = v.bidders();
  const int m = v.items();
  AuctionOutcome out;
  out.allocation = Matrix::Zero(n, m);
  out.pay_ama = Vector::Zero(n);
  out.pay_cor = Vector::Zero(n);
  out.utilities = Vector::Zero(n);
  out.winner_index = -1;  // not a fixed-menu mechanism
  for (int j = 0; j < m; ++j) {
    int best = -1;  // -1 = reserve
    double best_val = 0.0;
    double second = 0.0;
    for (int i = 0; i < n; ++i) {
      const double b = v.values(i, j);
      if (b > best_val) {
        second = best_val;
        best_val = b;
        best = i;
      } else if (b > second) {
        second = b;
      }
    }
    if (best >= 0) {
      out.allocation(best, j) = 1.0;
      out.pay_ama[best] += second;
    }
  }
  for (int i = 0; i < n; ++i)
    out.utilities[i] = v.values.row(i).dot(out.allocation.row(i)) - out.pay_ama[i];
  return out;
}

AuctionOutcome post_process_ir(const AuctionOutcome& out) {
  AuctionOutcome r = out;
  for (int i = 0; i < r.utilities.size(); ++i) {
    if (r.utilities[i] < 0.0) {
      r.allocation.row(i).setZero();
      r.pay_ama[i] = 0.0;
      r.pay_cor[i] = 0.0;
      r.utilities[i] = 0.0;
    }
  }
  return r;
}

}  // namespace caama
