#pragma once

#include "caama/cor_net.hpp"
#include "caama/distributions.hpp"
#include "caama/mech.hpp"
#include "caama/trainer.hpp"
#include "caama/types.hpp"

#include <json.hpp>

#include <functional>
#include <string>
#include <vector>

namespace caama {

struct VerificationReport {
  double dsic_regret_max = 0.0;
  double ir_regret_mean = 0.0;
  double ir_regret_max = 0.0;
  double revenue_mean = 0.0;
  double revenue_post_processed = 0.0;
  double min_utility = 0.0;
  int sample_count = 0;

  nlohmann::json to_json() const;
  static std::string csv_header();
  std::string csv_row() const;
};

// A mechanism under test: truthful outcome plus the utility bidder i with
// true valuations `values` gets when reporting `bid` instead of row i.
struct MechanismHandle {
  std::function<AuctionOutcome(const Matrix& values)> outcome;
  std::function<double(int i, const Matrix& values, const Vector& bid)> utility;
};

MechanismHandle make_ama_handle(const AmaParams& params);
MechanismHandle make_caama_handle(const AmaParams& params, const CorPaymentNet& cor);
// Opt-out applied: reported utility is max(u, 0).
MechanismHandle make_caama_post_handle(const AmaParams& params, const CorPaymentNet& cor);

struct GridSpec {
  int points_per_item = 21;  // per-item grid for m <= 2
  int random_probes = 256;   // random misreports for m > 2
  uint64_t seed = 0;
};

// max over (profile, bidder, probed misreport) of utility(misreport) -
// utility(truthful), floored at 0.
double measure_dsic_regret(const MechanismHandle& mech,
                           const std::vector<Matrix>& test, const GridSpec& grid);

// Exact per-profile sum_i max(0, -u_i) statistics.
struct IrStats {
  double ir_regret_mean = 0.0;
  double ir_regret_max = 0.0;
  double min_utility = 0.0;
};
IrStats measure_ir(const MechanismHandle& mech, const std::vector<Matrix>& test);

VerificationReport verification_report(const MechanismHandle& mech,
                                       const std::vector<Matrix>& test,
                                       const GridSpec& grid);

// Infimum of the exact AMA utility of bidder i over the conditional support
// of v_i given V_{-i}; exact for singletons, 65-point-per-dimension grid
// minimization for boxes.
double opt_core_oracle(const AmaParams& params, int i, const Matrix& v_minus_i,
                       const DistributionSpec& spec);

// Exhaustive grid search over deterministic single-item AMA parameters for
// the equal-revenue construction: w_1 = 1 fixed, w_2..w_n on a log grid,
// boosts on a uniform grid, Monte-Carlo revenue on mc_samples profiles.
struct DamaGrid {
  int weight_points = 33;
  double weight_lo = 0.1, weight_hi = 10.0;
  int boost_points = 41;
  double boost_lo = -1.0, boost_hi = 1.0;
  int mc_samples = 100000;
};

struct DamaResult {
  double best_revenue = 0.0;
  Vector weights;  // n entries, weights[0] == 1
  Vector boosts;   // n+1 entries: reserve, bidder 1, ..., bidder n
};

DamaResult dama_brute_search(const DistributionSpec& spec, const DamaGrid& grid);

// Single-cell Monte-Carlo revenue by direct per-sample evaluation; the
// independent route used to cross-check the search's threshold evaluator.
double dama_cell_revenue(const std::vector<double>& v1_samples, double slope,
                         const Vector& weights, const Vector& boosts);

struct GenBoundInputs {
  double m1 = 1.0, m2 = 1.0, m3 = 1.0;  // spectral bounds
  int h1 = kCorDefaultWidth, h2 = kCorDefaultWidth;
  int n = 2, m = 1;
  int k = 1;          // sample count
  double delta = 0.05;

  void validate() const;
};

// 2n B_p sqrt(2 log(2d)) / sqrt(K) + n B_p sqrt(log(2/delta) / (2K)),
// B_p = sqrt((n-1)m) M1 M2 M3, d = max{(n-1)m, h1, h2, 1}.
double gen_bound(const GenBoundInputs& in);

struct GapRow {
  int k = 0;
  double train_regret = 0.0;
  double test_regret = 0.0;
  double gap = 0.0;
  double bound = 0.0;  // gen_bound with the trained net's measured norms
};

// Freezes an AMA (short baseline training), then post-trains a fresh cor net
// on K samples for each K and measures the train/test Regret_IR gap on a
// held-out set.
std::vector<GapRow> empirical_gap_probe(const TrainConfig& cfg,
                                        const DistributionSpec& spec,
                                        const std::vector<int>& k_list);

// Mean over profiles of sum_j max_i v_ij.
double full_surplus(const std::vector<Matrix>& test);

}  // namespace caama
