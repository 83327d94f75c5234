#include "caama/distributions.hpp"

#include "caama/rng.hpp"
#include "caama/version.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace caama {

std::string dist_kind_name(DistKind k) {
  switch (k) {
    case DistKind::UniformIID: return "uniform-iid";
    case DistKind::DirichletValueShare: return "dirichlet";
    case DistKind::LinearMixtureSym: return "linear-mixture-sym";
    case DistKind::LinearMixtureAsym: return "linear-mixture-asym";
    case DistKind::EqualRevenueCorrelated: return "equal-revenue";
    case DistKind::PerfectNegativeLinear: return "perfect-negative-linear";
  }
  throw std::invalid_argument("dist_kind_name: bad kind");
}

DistKind dist_kind_from_name(const std::string& name) {
  if (name == "uniform-iid") return DistKind::UniformIID;
  if (name == "dirichlet") return DistKind::DirichletValueShare;
  if (name == "linear-mixture-sym") return DistKind::LinearMixtureSym;
  if (name == "linear-mixture-asym") return DistKind::LinearMixtureAsym;
  if (name == "equal-revenue") return DistKind::EqualRevenueCorrelated;
  if (name == "perfect-negative-linear") return DistKind::PerfectNegativeLinear;
  throw std::invalid_argument("unknown distribution kind: " + name);
}

void DistributionSpec::validate() const {
  if (n < 1 || m < 1) throw std::invalid_argument("distribution: n, m must be >= 1");
  switch (kind) {
    case DistKind::UniformIID:
      break;
    case DistKind::DirichletValueShare:
      if (!(alpha > 0.0)) throw std::invalid_argument("dirichlet: alpha must be > 0");
      if (n < 2) throw std::invalid_argument("dirichlet: needs n >= 2");
      break;
    case DistKind::LinearMixtureSym:
    case DistKind::LinearMixtureAsym:
      if (n != 2) throw std::invalid_argument("linear mixtures are 2-bidder only");
      if (alpha < 0.0 || alpha > 1.0)
        throw std::invalid_argument("mixture: alpha must be in [0,1]");
      break;
    case DistKind::EqualRevenueCorrelated:
      if (m != 1) throw std::invalid_argument("equal-revenue: single item only");
      if (n < 2) throw std::invalid_argument("equal-revenue: needs n >= 2");
      if (!(epsilon > 0.0 && epsilon < 1.0 && epsilon1 > 0.0 && epsilon1 < epsilon))
        throw std::invalid_argument("equal-revenue: need 0 < epsilon1 < epsilon < 1");
      if (er_figure_mode && n != 2)
        throw std::invalid_argument("equal-revenue figure mode is 2-bidder only");
      break;
    case DistKind::PerfectNegativeLinear:
      if (n != 2) throw std::invalid_argument("perfect-negative-linear is 2-bidder only");
      break;
  }
}

nlohmann::json DistributionSpec::to_json() const {
  return nlohmann::json{{"kind", dist_kind_name(kind)},
                        {"n", n},
                        {"m", m},
                        {"alpha", alpha},
                        {"epsilon", epsilon},
                        {"epsilon1", epsilon1},
                        {"er_figure_mode", er_figure_mode},
                        {"seed", seed}};
}

DistributionSpec DistributionSpec::from_json(const nlohmann::json& j) {
  DistributionSpec s;
  s.kind = dist_kind_from_name(j.at("kind").get<std::string>());
  s.n = j.at("n").get<int>();
  s.m = j.at("m").get<int>();
  s.alpha = j.value("alpha", 1.0);
  s.epsilon = j.value("epsilon", 0.1);
  s.epsilon1 = j.value("epsilon1", 0.05);
  s.er_figure_mode = j.value("er_figure_mode", false);
  s.seed = j.value("seed", static_cast<uint64_t>(0));
  s.validate();
  return s;
}

Matrix sample_profile(const DistributionSpec& spec, uint64_t index) {
  Rng rng = Rng::substream(spec.seed, index);
  const int n = spec.n;
  const int m = spec.m;
  Matrix v(n, m);
  switch (spec.kind) {
    case DistKind::UniformIID:
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) v(i, j) = rng.uniform01();
      break;
    case DistKind::DirichletValueShare:
      for (int j = 0; j < m; ++j) {
        const double total = rng.uniform(0.5, 1.0);
        // Dirichlet via normalized Gamma draws
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
          v(i, j) = rng.gamma(spec.alpha);
          sum += v(i, j);
        }
        for (int i = 0; i < n; ++i) v(i, j) = total * v(i, j) / sum;
      }
      break;
    case DistKind::LinearMixtureSym:
      for (int j = 0; j < m; ++j) {
        v(0, j) = rng.uniform01();
        const bool correlated = rng.uniform01() < spec.alpha;
        v(1, j) = correlated ? 1.0 - v(0, j) : rng.uniform01();
      }
      break;
    case DistKind::LinearMixtureAsym:
      for (int j = 0; j < m; ++j) {
        v(0, j) = rng.uniform01();
        const bool correlated = rng.uniform01() < spec.alpha;
        v(1, j) = correlated ? (1.0 - v(0, j)) / 4.0 : rng.uniform01() / 4.0;
      }
      break;
    case DistKind::EqualRevenueCorrelated: {
      const double v1 = equal_revenue_inverse_cdf(rng.uniform01(), spec.epsilon);
      v(0, 0) = v1;
      for (int i = 1; i < n; ++i) v(i, 0) = spec.er_slope() * (1.0 - v1);
      break;
    }
    case DistKind::PerfectNegativeLinear:
      for (int j = 0; j < m; ++j) {
        v(0, j) = rng.uniform01();
        v(1, j) = 1.0 - v(0, j);
      }
      break;
  }
  return v;
}

Dataset sample(const DistributionSpec& spec, int count, uint64_t first_index) {
  spec.validate();
  if (count < 1) throw std::invalid_argument("sample: count must be >= 1");
  Dataset d;
  d.spec = spec;
  d.profiles.reserve(static_cast<size_t>(count));
  for (int k = 0; k < count; ++k)
    d.profiles.push_back(sample_profile(spec, first_index + static_cast<uint64_t>(k)));
  return d;
}

double equal_revenue_inverse_cdf(double u, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("equal_revenue_inverse_cdf: epsilon out of range");
  if (!(u >= 0.0 && u < 1.0))
    throw std::invalid_argument("equal_revenue_inverse_cdf: u out of [0,1)");
  return epsilon / (1.0 - (1.0 - epsilon) * u);
}

ConditionalSupport ConditionalSupport::singleton(Vector p) {
  ConditionalSupport s;
  s.kind = Kind::Singleton;
  s.point = std::move(p);
  return s;
}

ConditionalSupport ConditionalSupport::box(Vector lo, Vector hi) {
  ConditionalSupport s;
  s.kind = Kind::Box;
  s.lo = std::move(lo);
  s.hi = std::move(hi);
  return s;
}

ConditionalSupport ConditionalSupport::join(std::vector<ConditionalSupport> members) {
  ConditionalSupport s;
  s.kind = Kind::Union;
  s.members = std::move(members);
  return s;
}

ConditionalSupport conditional_support(const DistributionSpec& spec, int i,
                                       const Matrix& v_minus_i) {
  spec.validate();
  if (i < 0 || i >= spec.n) throw std::out_of_range("conditional_support: bidder");
  if (v_minus_i.rows() != spec.n - 1 || v_minus_i.cols() != spec.m)
    throw std::invalid_argument("conditional_support: v_minus_i shape");
  const int m = spec.m;
  switch (spec.kind) {
    case DistKind::UniformIID:
      return ConditionalSupport::box(Vector::Zero(m), Vector::Ones(m));
    case DistKind::PerfectNegativeLinear:
      return ConditionalSupport::singleton(
          (Vector::Ones(m) - v_minus_i.row(0).transpose()).eval());
    case DistKind::EqualRevenueCorrelated: {
      const double s = spec.er_slope();
      if (i == 0) {
        // any forced bidder pins v_1 down exactly
        Vector p(1);
        p[0] = 1.0 - v_minus_i(0, 0) / s;
        return ConditionalSupport::singleton(p);
      }
      Vector p(1);
      p[0] = s * (1.0 - v_minus_i(0, 0));  // row 0 of V_{-i} is bidder 1
      return ConditionalSupport::singleton(p);
    }
    case DistKind::LinearMixtureSym:
    case DistKind::LinearMixtureAsym: {
      const bool asym = spec.kind == DistKind::LinearMixtureAsym;
      const Vector other = v_minus_i.row(0).transpose();
      Vector corr(m);
      bool corr_ok = true;
      Vector lo = Vector::Zero(m), hi(m);
      if (i == 1) {
        for (int j = 0; j < m; ++j)
          corr[j] = asym ? (1.0 - other[j]) / 4.0 : 1.0 - other[j];
        hi.setConstant(asym ? 0.25 : 1.0);
      } else {
        for (int j = 0; j < m; ++j) {
          corr[j] = asym ? 1.0 - 4.0 * other[j] : 1.0 - other[j];
          if (corr[j] < 0.0 || corr[j] > 1.0) corr_ok = false;
        }
        hi.setOnes();
      }
      std::vector<ConditionalSupport> members;
      if (spec.alpha > 0.0 && corr_ok)
        members.push_back(ConditionalSupport::singleton(corr));
      if (spec.alpha < 1.0)
        members.push_back(ConditionalSupport::box(lo, hi));
      if (members.size() == 1) return members.front();
      return ConditionalSupport::join(std::move(members));
    }
    case DistKind::DirichletValueShare: {
      Vector lo(m), hi(m);
      for (int j = 0; j < m; ++j) {
        const double others = v_minus_i.col(j).sum();
        lo[j] = std::max(0.0, 0.5 - others);
        hi[j] = std::max(lo[j], 1.0 - others);
      }
      return ConditionalSupport::box(lo, hi);
    }
  }
  throw std::invalid_argument("conditional_support: unknown kind");
}

AnalyticMoments analytic_moments(const DistributionSpec& spec) {
  spec.validate();
  AnalyticMoments out;
  switch (spec.kind) {
    case DistKind::EqualRevenueCorrelated: {
      const double eps = spec.epsilon;
      const double mean_v1 = eps * std::log(1.0 / eps) / (1.0 - eps);
      // bidder 1 always has the highest value, so full surplus = E[v_1]
      out.optimal_full_surplus = mean_v1;
      // VCG allocates to bidder 1 at the forced second-highest price
      out.vcg_revenue = spec.er_slope() * (1.0 - mean_v1);
      return out;
    }
    case DistKind::PerfectNegativeLinear:
      // E[max(u, 1-u)] = 3/4 per item
      out.optimal_full_surplus = 0.75 * spec.m;
      return out;
    default:
      throw std::invalid_argument("analytic_moments: no closed form for this kind");
  }
}

void save_dataset(const Dataset& d, const std::string& csv_path,
                  const std::string& manifest_path) {
  std::ofstream csv(csv_path);
  if (!csv) throw std::runtime_error("save_dataset: cannot open " + csv_path);
  const int n = d.spec.n, m = d.spec.m;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j)
      csv << "v_" << (i + 1) << "_" << (j + 1) << (i == n - 1 && j == m - 1 ? "" : ",");
  csv << "\n";
  csv.precision(17);
  for (const auto& p : d.profiles) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j)
        csv << p(i, j) << (i == n - 1 && j == m - 1 ? "" : ",");
    csv << "\n";
  }
  csv << "# " << version_tag() << " seed=" << d.spec.seed << "\n";

  nlohmann::json manifest{{"schema_version", 1},
                          {"spec", d.spec.to_json()},
                          {"count", d.count()},
                          {"seed", d.spec.seed},
                          {"version", version_tag()}};
  std::ofstream mf(manifest_path);
  if (!mf) throw std::runtime_error("save_dataset: cannot open " + manifest_path);
  mf << manifest.dump(2) << "\n";
}

Dataset load_dataset(const std::string& csv_path, const std::string& manifest_path) {
  std::ifstream mf(manifest_path);
  if (!mf) throw std::runtime_error("load_dataset: cannot open " + manifest_path);
  nlohmann::json manifest;
  mf >> manifest;
  Dataset d;
  d.spec = DistributionSpec::from_json(manifest.at("spec"));

  std::ifstream csv(csv_path);
  if (!csv) throw std::runtime_error("load_dataset: cannot open " + csv_path);
  std::string line;
  if (!std::getline(csv, line)) throw std::runtime_error("load_dataset: empty csv");
  const int n = d.spec.n, m = d.spec.m;
  while (std::getline(csv, line)) {
    if (line.empty() || line[0] == '#') continue;
    Matrix v(n, m);
    std::stringstream ss(line);
    std::string cell;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) {
        if (!std::getline(ss, cell, ','))
          throw std::runtime_error("load_dataset: short row");
        v(i, j) = std::stod(cell);
      }
    if (!ValuationProfile{v}.valid())
      throw std::runtime_error("load_dataset: value outside [0,1] in row " +
                               std::to_string(d.profiles.size() + 1));
    d.profiles.push_back(std::move(v));
  }
  if (d.count() != manifest.at("count").get<int>())
    throw std::runtime_error("load_dataset: row count does not match manifest");
  return d;
}

}  // namespace caama
