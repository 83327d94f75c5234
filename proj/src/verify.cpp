#include "caama/verify.hpp"

#include "caama/rng.hpp"
#include "caama/version.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace caama {

nlohmann::json VerificationReport::to_json() const {
  return nlohmann::json{{"dsic_regret_max", dsic_regret_max},
                        {"ir_regret_mean", ir_regret_mean},
                        {"ir_regret_max", ir_regret_max},
                        {"revenue_mean", revenue_mean},
                        {"revenue_post_processed", revenue_post_processed},
                        {"min_utility", min_utility},
                        {"sample_count", sample_count}};
}

std::string VerificationReport::csv_header() {
  return "dsic_regret_max,ir_regret_mean,ir_regret_max,revenue_mean,"
         "revenue_post_processed,min_utility,sample_count";
}

std::string VerificationReport::csv_row() const {
  std::ostringstream os;
  os.precision(17);
  os << dsic_regret_max << "," << ir_regret_mean << "," << ir_regret_max << ","
     << revenue_mean << "," << revenue_post_processed << "," << min_utility << ","
     << sample_count;
  return os.str();
}

MechanismHandle make_ama_handle(const AmaParams& params) {
  MechanismHandle h;
  h.outcome = [params](const Matrix& values) {
    return ama_outcome(ValuationProfile{values}, params);
  };
  h.utility = [params](int i, const Matrix& values, const Vector& bid) {
    Matrix reported = values;
    reported.row(i) = bid.transpose();
    const AuctionOutcome out = ama_outcome(ValuationProfile{reported}, params);
    return values.row(i).dot(out.allocation.row(i)) - out.pay_ama[i];
  };
  return h;
}

MechanismHandle make_caama_handle(const AmaParams& params, const CorPaymentNet& cor) {
  MechanismHandle h;
  h.outcome = [params, cor](const Matrix& values) {
    return caama_outcome(ValuationProfile{values}, params, cor);
  };
  h.utility = [params, cor](int i, const Matrix& values, const Vector& bid) {
    Matrix reported = values;
    reported.row(i) = bid.transpose();
    const AuctionOutcome out = ama_outcome(ValuationProfile{reported}, params);
    // p_cor_i reads V_{-i}, which the misreport cannot touch
    const double pcor = cor_forward(cor, i, reported);
    return values.row(i).dot(out.allocation.row(i)) - out.pay_ama[i] - pcor;
  };
  return h;
}

MechanismHandle make_caama_post_handle(const AmaParams& params,
                                       const CorPaymentNet& cor) {
  MechanismHandle base = make_caama_handle(params, cor);
  MechanismHandle h;
  h.outcome = [base](const Matrix& values) {
    return post_process_ir(base.outcome(values));
  };
  h.utility = [base](int i, const Matrix& values, const Vector& bid) {
    return std::max(base.utility(i, values, bid), 0.0);
  };
  return h;
}

namespace {

// All misreports probed for one (n, m) shape: full per-item grids for m <= 2,
// random probes otherwise.
std::vector<Vector> misreport_set(int m, const GridSpec& grid) {
  std::vector<Vector> bids;
  if (m <= 2) {
    const int p = std::max(2, grid.points_per_item);
    if (m == 1) {
      for (int a = 0; a < p; ++a) {
        Vector b(1);
        b[0] = static_cast<double>(a) / (p - 1);
        bids.push_back(b);
      }
    } else {
      for (int a = 0; a < p; ++a)
        for (int c = 0; c < p; ++c) {
          Vector b(2);
          b[0] = static_cast<double>(a) / (p - 1);
          b[1] = static_cast<double>(c) / (p - 1);
          bids.push_back(b);
        }
    }
  } else {
    Rng rng = Rng::substream(grid.seed, 0xb1d5ULL);
    for (int r = 0; r < grid.random_probes; ++r) {
      Vector b(m);
      for (int j = 0; j < m; ++j) b[j] = rng.uniform01();
      bids.push_back(b);
    }
  }
  return bids;
}

}  // namespace

double measure_dsic_regret(const MechanismHandle& mech,
                           const std::vector<Matrix>& test, const GridSpec& grid) {
  if (test.empty()) throw std::invalid_argument("measure_dsic_regret: empty test set");
  const int m = static_cast<int>(test.front().cols());
  const std::vector<Vector> bids = misreport_set(m, grid);
  double worst = 0.0;
  for (const auto& values : test) {
    const int n = static_cast<int>(values.rows());
    for (int i = 0; i < n; ++i) {
      const double truthful = mech.utility(i, values, values.row(i).transpose());
      for (const auto& b : bids) {
        const double u = mech.utility(i, values, b);
        if (u - truthful > worst) worst = u - truthful;
      }
    }
  }
  return worst;
}

IrStats measure_ir(const MechanismHandle& mech, const std::vector<Matrix>& test) {
  if (test.empty()) throw std::invalid_argument("measure_ir: empty test set");
  IrStats st;
  st.min_utility = std::numeric_limits<double>::infinity();
  for (const auto& values : test) {
    const AuctionOutcome out = mech.outcome(values);
    double reg = 0.0;
    for (int i = 0; i < out.utilities.size(); ++i) {
      reg += std::max(0.0, -out.utilities[i]);
      st.min_utility = std::min(st.min_utility, out.utilities[i]);
    }
    st.ir_regret_mean += reg;
    st.ir_regret_max = std::max(st.ir_regret_max, reg);
  }
  st.ir_regret_mean /= static_cast<double>(test.size());
  return st;
}

VerificationReport verification_report(const MechanismHandle& mech,
                                       const std::vector<Matrix>& test,
                                       const GridSpec& grid) {
  VerificationReport rep;
  rep.sample_count = static_cast<int>(test.size());
  rep.dsic_regret_max = measure_dsic_regret(mech, test, grid);
  const IrStats st = measure_ir(mech, test);
  rep.ir_regret_mean = st.ir_regret_mean;
  rep.ir_regret_max = st.ir_regret_max;
  rep.min_utility = st.min_utility;
  for (const auto& values : test) {
    const AuctionOutcome out = mech.outcome(values);
    rep.revenue_mean += out.revenue();
    rep.revenue_post_processed += post_process_ir(out).revenue();
  }
  rep.revenue_mean /= static_cast<double>(test.size());
  rep.revenue_post_processed /= static_cast<double>(test.size());
  return rep;
}

namespace {

double ama_utility_at(const AmaParams& params, int i, const Matrix& v_minus_i,
                      const Vector& vi) {
  const int n = static_cast<int>(v_minus_i.rows()) + 1;
  const int m = static_cast<int>(v_minus_i.cols());
  Matrix values(n, m);
  int r = 0;
  for (int b = 0; b < n; ++b) {
    if (b == i) {
      values.row(b) = vi.transpose().cwiseMax(0.0).cwiseMin(1.0);
    } else {
      values.row(b) = v_minus_i.row(r);
      ++r;
    }
  }
  const AuctionOutcome out = ama_outcome(ValuationProfile{values}, params);
  return out.utilities[i];
}

double support_infimum(const AmaParams& params, int i, const Matrix& v_minus_i,
                       const ConditionalSupport& sup) {
  switch (sup.kind) {
    case ConditionalSupport::Kind::Singleton:
      return ama_utility_at(params, i, v_minus_i, sup.point);
    case ConditionalSupport::Kind::Box: {
      const int dims = static_cast<int>(sup.lo.size());
      constexpr int kGridPoints = 65;
      double cells = 1.0;
      for (int d = 0; d < dims; ++d) cells *= kGridPoints;
      if (cells > 300000.0)
        throw std::invalid_argument("opt_core_oracle: support grid too large");
      Vector vi(dims);
      std::vector<int> idx(static_cast<size_t>(dims), 0);
      double best = std::numeric_limits<double>::infinity();
      for (;;) {
        for (int d = 0; d < dims; ++d) {
          const double frac = static_cast<double>(idx[static_cast<size_t>(d)]) /
                              (kGridPoints - 1);
          vi[d] = sup.lo[d] + frac * (sup.hi[d] - sup.lo[d]);
        }
        best = std::min(best, ama_utility_at(params, i, v_minus_i, vi));
        int d = 0;
        while (d < dims && ++idx[static_cast<size_t>(d)] == kGridPoints) {
          idx[static_cast<size_t>(d)] = 0;
          ++d;
        }
        if (d == dims) break;
      }
      return best;
    }
    case ConditionalSupport::Kind::Union: {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& member : sup.members)
        best = std::min(best, support_infimum(params, i, v_minus_i, member));
      return best;
    }
  }
  throw std::invalid_argument("opt_core_oracle: unknown support structure");
}

}  // namespace

double opt_core_oracle(const AmaParams& params, int i, const Matrix& v_minus_i,
                       const DistributionSpec& spec) {
  const ConditionalSupport sup = conditional_support(spec, i, v_minus_i);
  return support_infimum(params, i, v_minus_i, sup);
}

double dama_cell_revenue(const std::vector<double>& v1_samples, double slope,
                         const Vector& weights, const Vector& boosts) {
  const int n = static_cast<int>(weights.size());
  double total = 0.0;
  for (const double v1 : v1_samples) {
    // asw of [reserve, bidder 1, ..., bidder n]
    double best = boosts[0];
    int winner = 0;
    const double forced = slope * (1.0 - v1);
    for (int i = 1; i <= n; ++i) {
      const double val = i == 1 ? v1 : forced;
      const double a = weights[i - 1] * val + boosts[i];
      if (a > best) {
        best = a;
        winner = i;
      }
    }
    if (winner == 0) continue;
    const int wi = winner - 1;
    // max_k asw_{-winner}(k): winner's own entry contributes only its boost
    double best_minus = std::max(boosts[0], boosts[winner]);
    for (int i = 1; i <= n; ++i) {
      if (i == winner) continue;
      const double val = i == 1 ? v1 : forced;
      best_minus = std::max(best_minus, weights[i - 1] * val + boosts[i]);
    }
    total += (best_minus - boosts[winner]) / weights[wi];
  }
  return total / static_cast<double>(v1_samples.size());
}

namespace {

// Exact threshold evaluator for the 2-bidder cell: identical sample-by-sample
// semantics to dama_cell_revenue, but O(log N) per cell over the sorted v1
// array via monotone winner predicates and prefix sums.
struct FastCellEval {
  const std::vector<double>& v1;   // ascending
  const std::vector<double>& pref; // pref[i] = sum of v1[0..i)
  double slope;

  double sum_range(size_t a, size_t b) const { return pref[b] - pref[a]; }

  double revenue(double w2, double d1, double d2) const {
    const size_t count = v1.size();
    const auto first_true = [&](auto pred) -> size_t {
      size_t lo = 0, hi = count;
      while (lo < hi) {
        const size_t mid = (lo + hi) / 2;
        if (pred(v1[mid])) hi = mid; else lo = mid + 1;
      }
      return lo;
    };
    const auto asw2 = [&](double v) { return w2 * slope * (1.0 - v) + d2; };
    // bidder 1 wins: v + d1 >= asw2(v) and v + d1 > 0 (both nondecreasing)
    const size_t i1 = first_true(
        [&](double v) { return v + d1 >= asw2(v) && v + d1 > 0.0; });
    // bidder 2 wins: asw2 > v + d1 and asw2 > 0 (both nonincreasing);
    // find the first index where bidder 2 stops winning
    const size_t i2 = first_true(
        [&](double v) { return !(asw2(v) > v + d1 && asw2(v) > 0.0); });

    double total = 0.0;
    if (i1 < count) {
      // p1 = max(c1, asw2(v)) - d1 on [i1, count)
      const double c1 = std::max(0.0, d1);
      size_t iflat = first_true([&](double v) { return asw2(v) <= c1; });
      iflat = std::max(iflat, i1);
      if (i1 < iflat)
        total += static_cast<double>(iflat - i1) * (w2 * slope + d2 - d1) -
                 w2 * slope * sum_range(i1, iflat);
      total += static_cast<double>(count - iflat) * (c1 - d1);
    }
    if (i2 > 0) {
      // p2 = (max(c2, v + d1) - d2) / w2 on [0, i2)
      const double c2 = std::max(0.0, d2);
      size_t irise = first_true([&](double v) { return v + d1 > c2; });
      irise = std::min(irise, i2);
      total += static_cast<double>(irise) * (c2 - d2) / w2;
      if (irise < i2)
        total += (sum_range(irise, i2) +
                  static_cast<double>(i2 - irise) * (d1 - d2)) /
                 w2;
    }
    return total / static_cast<double>(count);
  }
};

}  // namespace

DamaResult dama_brute_search(const DistributionSpec& spec, const DamaGrid& grid) {
  spec.validate();
  if (spec.kind != DistKind::EqualRevenueCorrelated)
    throw std::invalid_argument("dama_brute_search: equal-revenue spec required");
  const int n = spec.n;
  double cells = std::pow(static_cast<double>(grid.weight_points), n - 1) *
                 std::pow(static_cast<double>(grid.boost_points), n + 1);
  if (cells > 1e7)
    throw std::invalid_argument("dama_brute_search: grid too large (> 1e7 cells)");
  if (n != 2)
    throw std::invalid_argument(
        "dama_brute_search: only the 2-bidder grid fits under the cell guard");

  std::vector<double> v1(static_cast<size_t>(grid.mc_samples));
  for (int k = 0; k < grid.mc_samples; ++k)
    v1[static_cast<size_t>(k)] = sample_profile(spec, static_cast<uint64_t>(k))(0, 0);
  std::sort(v1.begin(), v1.end());
  std::vector<double> pref(v1.size() + 1, 0.0);
  for (size_t t = 0; t < v1.size(); ++t) pref[t + 1] = pref[t] + v1[t];

  const FastCellEval eval{v1, pref, spec.er_slope()};

  const int bp = grid.boost_points;
  const double bstep = (grid.boost_hi - grid.boost_lo) / (bp - 1);
  const double lw_lo = std::log(grid.weight_lo), lw_hi = std::log(grid.weight_hi);

  DamaResult best;
  best.best_revenue = -1.0;
  for (int wi = 0; wi < grid.weight_points; ++wi) {
    const double w2 = std::exp(lw_lo + (lw_hi - lw_lo) * wi /
                               (grid.weight_points - 1));
    // revenue depends on the boosts only through their differences to the
    // reserve boost, so sweep (b1 - b0, b2 - b0) over reachable index pairs
    for (int db1 = -(bp - 1); db1 <= bp - 1; ++db1) {
      for (int db2 = -(bp - 1); db2 <= bp - 1; ++db2) {
        const int hi_d = std::max({0, db1, db2});
        const int lo_d = std::min({0, db1, db2});
        if (hi_d - lo_d > bp - 1) continue;  // no in-range (b0,b1,b2) triple
        const double rev = eval.revenue(w2, db1 * bstep, db2 * bstep);
        if (rev > best.best_revenue) {
          best.best_revenue = rev;
          best.weights = Vector(2);
          best.weights << 1.0, w2;
          const int a0 = -lo_d;  // smallest index putting all boosts in range
          best.boosts = Vector(3);
          best.boosts << grid.boost_lo + a0 * bstep,
              grid.boost_lo + (a0 + db1) * bstep, grid.boost_lo + (a0 + db2) * bstep;
        }
      }
    }
  }
  return best;
}

void GenBoundInputs::validate() const {
  if (!(m1 > 0.0 && m2 > 0.0 && m3 > 0.0))
    throw std::invalid_argument("gen_bound: spectral bounds must be positive");
  if (h1 < 1 || h2 < 1 || n < 1 || m < 1 || k < 1)
    throw std::invalid_argument("gen_bound: counts must be positive");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("gen_bound: delta in (0,1)");
}

double gen_bound(const GenBoundInputs& in) {
  in.validate();
  const double bx = std::sqrt(static_cast<double>((in.n - 1) * in.m));
  const double bp = bx * in.m1 * in.m2 * in.m3;
  const double d = std::max({(in.n - 1) * in.m, in.h1, in.h2, 1});
  const double kk = static_cast<double>(in.k);
  return 2.0 * in.n * bp * std::sqrt(2.0 * std::log(2.0 * d)) / std::sqrt(kk) +
         in.n * bp * std::sqrt(std::log(2.0 / in.delta) / (2.0 * kk));
}

std::vector<GapRow> empirical_gap_probe(const TrainConfig& cfg,
                                        const DistributionSpec& spec,
                                        const std::vector<int>& k_list) {
  for (size_t t = 1; t < k_list.size(); ++t)
    if (k_list[t] <= k_list[t - 1])
      throw std::invalid_argument("empirical_gap_probe: k_list must be increasing");

  // fixed AMA parameters from a short baseline run
  TrainConfig warm = cfg;
  TrainResult base = train(warm, spec, TrainMode::AmaOnly);
  const RawAmaParams frozen = base.state.raw;
  const AmaParams params = realize(frozen);

  DistributionSpec test_spec = spec;
  test_spec.seed = Rng::substream(cfg.seed, 0x9a9ULL).next_u64();
  const Dataset test = sample(test_spec, cfg.test_size);

  std::vector<GapRow> rows;
  for (size_t t = 0; t < k_list.size(); ++t) {
    const int k = k_list[t];
    DistributionSpec train_spec = spec;
    train_spec.seed = Rng::substream(cfg.seed, 0x6a6ULL + t).next_u64();
    const Dataset data = sample(train_spec, k);

    CorPaymentNet cor = cor_init(spec.n, spec.m, cfg.cor_h1, cfg.cor_h2,
                                 Rng::substream(cfg.seed, 0xc0fULL + t).next_u64());
    AdamState adam;
    adam.m_cor = CorGrad::zeros_like(cor);
    adam.v_cor = CorGrad::zeros_like(cor);
    double gamma = cfg.gamma0;
    const int batch = std::min(cfg.batch_size, k);
    std::vector<Matrix> minibatch(static_cast<size_t>(batch));
    Rng idx_rng = Rng::substream(cfg.seed, 0x1dbULL + t);
    for (int it = 0; it < cfg.total_iters; ++it) {
      for (int b = 0; b < batch; ++b) {
        const size_t pick = static_cast<size_t>(idx_rng.next_u64() %
                                                static_cast<uint64_t>(k));
        minibatch[static_cast<size_t>(b)] = data.profiles[pick];
      }
      LossRecord rec = loss_and_grad(minibatch, frozen, &cor, gamma,
                                     cfg.temperature, Stage::Post);
      if (!std::isfinite(rec.loss)) throw NumericError(it);
      adam.t += 1;
      adam_update_cor(cor, rec.grad_cor, adam, cfg.step_size);
      gamma = update_gamma(gamma, rec.regret_ir_mean, cfg);
    }

    const ExactMetrics on_train = evaluate_exact(params, &cor, data.profiles);
    const ExactMetrics on_test = evaluate_exact(params, &cor, test.profiles);

    GapRow row;
    row.k = k;
    row.train_regret = on_train.regret_ir_mean;
    row.test_regret = on_test.regret_ir_mean;
    row.gap = std::abs(on_train.regret_ir_mean - on_test.regret_ir_mean);
    GenBoundInputs gb;
    gb.n = spec.n;
    gb.m = spec.m;
    gb.h1 = cfg.cor_h1;
    gb.h2 = cfg.cor_h2;
    gb.k = k;
    gb.delta = 0.05;
    gb.m1 = gb.m2 = gb.m3 = 0.0;
    for (int i = 0; i < spec.n; ++i) {
      const auto norms = cor_spectral_norms(cor, i);
      gb.m1 = std::max(gb.m1, norms[0]);
      gb.m2 = std::max(gb.m2, norms[1]);
      gb.m3 = std::max(gb.m3, norms[2]);
    }
    row.bound = gen_bound(gb);
    rows.push_back(row);
  }
  return rows;
}

double full_surplus(const std::vector<Matrix>& test) {
  if (test.empty()) throw std::invalid_argument("full_surplus: empty test set");
  double total = 0.0;
  for (const auto& v : test) total += v.colwise().maxCoeff().sum();
  return total / static_cast<double>(test.size());
}

}  // namespace caama
