#pragma once

#include "caama/types.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace caama {

enum class DistKind {
  UniformIID,
  DirichletValueShare,
  LinearMixtureSym,
  LinearMixtureAsym,
  EqualRevenueCorrelated,
  PerfectNegativeLinear,
};

std::string dist_kind_name(DistKind k);
DistKind dist_kind_from_name(const std::string& name);

struct DistributionSpec {
  DistKind kind = DistKind::UniformIID;
  int n = 2;
  int m = 1;
  double alpha = 1.0;      // Dirichlet concentration, or mixture correlation prob
  double epsilon = 0.1;    // equal-revenue support floor
  double epsilon1 = 0.05;  // slope of the forced bidders (n-bidder mode)
  // Slope selection for the correlated bidders under EqualRevenueCorrelated:
  // false -> v_i = epsilon1 (1 - v_1) for i >= 2 (n-bidder construction),
  // true  -> v_2 = epsilon/(1-epsilon) (1 - v_1) (2-bidder figure mode).
  bool er_figure_mode = false;
  uint64_t seed = 0;

  double er_slope() const {
    return er_figure_mode ? epsilon / (1.0 - epsilon) : epsilon1;
  }

  // Throws std::invalid_argument on unsupported (kind, n, m) combinations.
  void validate() const;

  nlohmann::json to_json() const;
  static DistributionSpec from_json(const nlohmann::json& j);
};

struct Dataset {
  std::vector<Matrix> profiles;  // each n x m
  DistributionSpec spec;

  int count() const { return static_cast<int>(profiles.size()); }
};

// Deterministic per (spec.seed, index): the draw for a profile never depends
// on batching or parallel generation order.
Matrix sample_profile(const DistributionSpec& spec, uint64_t index);

Dataset sample(const DistributionSpec& spec, int count, uint64_t first_index = 0);

// Inverse CDF of the equal revenue distribution with pdf
// eps / ((1-eps) v^2) on [eps, 1]: u in [0,1) -> eps / (1 - (1-eps) u).
double equal_revenue_inverse_cdf(double u, double epsilon);

// Conditional support of bidder i's valuation vector given the others'.
struct ConditionalSupport {
  enum class Kind { Singleton, Box, Union };
  Kind kind = Kind::Box;
  Vector point;                            // Singleton
  Vector lo, hi;                           // Box
  std::vector<ConditionalSupport> members; // Union

  static ConditionalSupport singleton(Vector p);
  static ConditionalSupport box(Vector lo, Vector hi);
  static ConditionalSupport join(std::vector<ConditionalSupport> members);
};

// v_minus_i: (n-1) x m, bidder i's row removed, original order preserved.
ConditionalSupport conditional_support(const DistributionSpec& spec, int i,
                                       const Matrix& v_minus_i);

struct AnalyticMoments {
  double optimal_full_surplus = 0.0;
  std::optional<double> vcg_revenue;
};

// Closed forms for the perfectly correlated families; throws for kinds
// without one.
AnalyticMoments analytic_moments(const DistributionSpec& spec);

// File interface: CSV with one row per profile (n*m columns, header row
// naming v_i_j, 1-based) plus a JSON manifest with provenance.
void save_dataset(const Dataset& d, const std::string& csv_path,
                  const std::string& manifest_path);
Dataset load_dataset(const std::string& csv_path, const std::string& manifest_path);

}  // namespace caama
