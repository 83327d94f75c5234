#include "caama/relaxation.hpp"

#include "caama/mech.hpp"
#include "caama/parallel.hpp"
#include "caama/rng.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>

namespace caama {

namespace {

double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// max-subtracted softmax of t * x
void softmax_scaled(const Vector& x, double t, Vector& out) {
  out = t * x;
  const double mx = out.maxCoeff();
  out = (out.array() - mx).exp();
  out /= out.sum();
}

}  // namespace

RawAmaParams raw_init(int s, int n, int m, uint64_t seed) {
  if (s < 1 || n < 1 || m < 1) throw std::invalid_argument("raw_init: shape");
  Rng rng = Rng::substream(seed, 0xa11aULL);
  RawAmaParams raw;
  raw.menu_logits.reserve(static_cast<size_t>(s));
  for (int k = 0; k < s; ++k) {
    Matrix l(n + 1, m);
    for (int r = 0; r <= n; ++r)
      for (int j = 0; j < m; ++j) l(r, j) = rng.uniform(-0.5, 0.5);
    raw.menu_logits.push_back(std::move(l));
  }
  // softplus(x) = 1  <=>  x = log(e - 1)
  raw.weight_logits = Vector::Constant(n, std::log(std::exp(1.0) - 1.0));
  raw.boosts = Vector::Zero(s);
  return raw;
}

AmaParams realize(const RawAmaParams& raw) {
  const int s = raw.size();
  const int n = raw.bidders();
  const int m = raw.items();
  if (s < 1 || n < 1 || m < 1) throw std::invalid_argument("realize: empty raw params");
  AmaParams params;
  params.menu.reserve(static_cast<size_t>(s));
  Vector q(n + 1);
  for (int k = 0; k < s; ++k) {
    Allocation a(n, m);
    for (int j = 0; j < m; ++j) {
      softmax_scaled(raw.menu_logits[static_cast<size_t>(k)].col(j),
                     raw.temperature_feas, q);
      a.col(j) = q.tail(n);
    }
    params.menu.push_back(std::move(a));
  }
  params.weights = Vector(n);
  for (int i = 0; i < n; ++i)
    params.weights[i] = softplus(raw.weight_logits[i]) + 1e-3;
  params.boosts = raw.boosts;
  return params;
}

SoftOutcome soft_allocate(const ValuationProfile& v, const AmaParams& params, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("soft_allocate: temperature must be > 0");
  const int n = v.bidders();
  const int s = params.size();
  Matrix own(n, s);
  Vector e(s);
  for (int k = 0; k < s; ++k) {
    const Allocation& a = params.menu[static_cast<size_t>(k)];
    double total = params.boosts[k];
    for (int i = 0; i < n; ++i) {
      own(i, k) = v.values.row(i).dot(a.row(i));
      total += params.weights[i] * own(i, k);
    }
    e[k] = total;
  }
  SoftOutcome out;
  Vector w(s);
  softmax_scaled(e, t, w);
  out.soft_alloc = Matrix::Zero(n, v.items());
  for (int k = 0; k < s; ++k) out.soft_alloc += w[k] * params.menu[static_cast<size_t>(k)];
  out.soft_alloc_minus.resize(static_cast<size_t>(n));
  Vector f(s), wi(s);
  for (int i = 0; i < n; ++i) {
    f = e - params.weights[i] * own.row(i).transpose();
    softmax_scaled(f, t, wi);
    Matrix g = Matrix::Zero(n, v.items());
    for (int k = 0; k < s; ++k) g += wi[k] * params.menu[static_cast<size_t>(k)];
    out.soft_alloc_minus[static_cast<size_t>(i)] = std::move(g);
  }
  return out;
}

SoftOutcome soft_payment_utility(const ValuationProfile& v, const AmaParams& params,
                                 double t) {
  if (!(t > 0.0)) throw std::invalid_argument("soft_payment_utility: temperature");
  const int n = v.bidders();
  const int s = params.size();
  Matrix own(n, s);
  Vector e(s);
  for (int k = 0; k < s; ++k) {
    const Allocation& a = params.menu[static_cast<size_t>(k)];
    double total = params.boosts[k];
    for (int i = 0; i < n; ++i) {
      own(i, k) = v.values.row(i).dot(a.row(i));
      total += params.weights[i] * own(i, k);
    }
    e[k] = total;
  }
  SoftOutcome out = soft_allocate(v, params, t);
  out.pay_hat = Vector(n);
  out.util_hat = Vector(n);
  Vector sfull(s), f(s), si(s);
  softmax_scaled(e, t, sfull);
  for (int i = 0; i < n; ++i) {
    f = e - params.weights[i] * own.row(i).transpose();
    softmax_scaled(f, t, si);
    const double n_i = si.dot(f) - sfull.dot(f);
    out.pay_hat[i] = n_i / params.weights[i];
    out.util_hat[i] = sfull.dot(own.row(i).transpose()) - out.pay_hat[i];
  }
  return out;
}

RawGrads RawGrads::zeros_like(const RawAmaParams& raw) {
  RawGrads g;
  g.menu_logits.reserve(raw.menu_logits.size());
  for (const auto& l : raw.menu_logits) g.menu_logits.push_back(Matrix::Zero(l.rows(), l.cols()));
  g.weight_logits = Vector::Zero(raw.weight_logits.size());
  g.boosts = Vector::Zero(raw.boosts.size());
  return g;
}

void RawGrads::set_zero() {
  for (auto& l : menu_logits) l.setZero();
  weight_logits.setZero();
  boosts.setZero();
}

void RawGrads::add(const RawGrads& other) {
  for (size_t k = 0; k < menu_logits.size(); ++k) menu_logits[k] += other.menu_logits[k];
  weight_logits += other.weight_logits;
  boosts += other.boosts;
}

namespace {

// Shared per-chunk evaluation state for the batch loss.
struct ChunkAccum {
  double loss = 0.0;
  double revenue = 0.0;
  double regret = 0.0;
  RawGrads graw;
  CorGrad gcor;
};

struct MutualScratch {
  Matrix own;            // n x S
  Vector e, sfull, f, si, gf_sum, h, ge;
  Matrix gown;           // n x S
  Vector gw;             // n
  std::vector<Vector> xs;           // per-bidder cor inputs
  std::vector<CorScratch> cor_ws;   // per-bidder cached activations

  void ensure_bidders(int n) {
    if (static_cast<int>(xs.size()) != n) {
      xs.resize(static_cast<size_t>(n));
      cor_ws.resize(static_cast<size_t>(n));
    }
  }
};

// One profile, mutual stage. Accumulates gradients w.r.t. the *realized*
// params into (gown, gw via acc vectors, gboost) and cor grads, then the
// caller maps them back through realize().
void mutual_profile(const Matrix& values, const AmaParams& params,
                    const CorPaymentNet* cor, double gamma, double t,
                    ChunkAccum& acc, MutualScratch& ws,
                    std::vector<Matrix>& galloc, Vector& gweights, Vector& gboosts) {
  const int n = static_cast<int>(values.rows());
  const int s = params.size();

  ws.own.resize(n, s);
  ws.e.resize(s);
  for (int k = 0; k < s; ++k) {
    const Allocation& a = params.menu[static_cast<size_t>(k)];
    double total = params.boosts[k];
    for (int i = 0; i < n; ++i) {
      const double c = values.row(i).dot(a.row(i));
      ws.own(i, k) = c;
      total += params.weights[i] * c;
    }
    ws.e[k] = total;
  }
  softmax_scaled(ws.e, t, ws.sfull);

  Vector pay(n), util(n), pcor(n), alpha(n), beta(n);
  ws.gown.setZero(n, s);
  ws.gw.setZero(n);
  ws.ge.setZero(s);
  ws.h.setZero(s);
  ws.gf_sum.setZero(s);

  // forward for all bidders first (loss pieces), then backward passes
  ws.ensure_bidders(n);
  Matrix fmat(s, n);
  for (int i = 0; i < n; ++i) {
    fmat.col(i) = ws.e - params.weights[i] * ws.own.row(i).transpose();
    softmax_scaled(fmat.col(i), t, ws.si);
    const double n_i = ws.si.dot(fmat.col(i)) - ws.sfull.dot(fmat.col(i));
    pay[i] = n_i / params.weights[i];
    util[i] = ws.sfull.dot(ws.own.row(i).transpose()) - pay[i];
    if (cor != nullptr) {
      flatten_minus_into(values, i, ws.xs[static_cast<size_t>(i)]);
      pcor[i] = cor_forward_cached(*cor, i, ws.xs[static_cast<size_t>(i)],
                                   ws.cor_ws[static_cast<size_t>(i)]);
    } else {
      pcor[i] = 0.0;
    }
  }

  double revenue = 0.0, regret = 0.0;
  for (int i = 0; i < n; ++i) {
    revenue += pay[i] + pcor[i];
    if (cor != nullptr) regret += std::max(0.0, -(util[i] - pcor[i]));
  }
  acc.loss += -revenue + gamma * regret;
  acc.revenue += revenue;
  acc.regret += regret;

  for (int i = 0; i < n; ++i) {
    const double chi =
        (cor != nullptr && util[i] - pcor[i] < 0.0) ? 1.0 : 0.0;
    alpha[i] = -1.0 + gamma * chi;
    beta[i] = -gamma * chi;
    if (cor != nullptr) {
      const double delta = -1.0 + gamma * chi;
      cor_backward_cached(*cor, i, ws.xs[static_cast<size_t>(i)], delta,
                          acc.gcor.blocks[static_cast<size_t>(i)],
                          ws.cor_ws[static_cast<size_t>(i)]);
    }
  }

  // backward through the soft payment/utility formulas
  for (int i = 0; i < n; ++i) {
    const auto fi = fmat.col(i);
    softmax_scaled(fi, t, ws.si);
    const double self_avg = ws.si.dot(fi);
    const double wi = params.weights[i];
    // d loss / d f_i[k], combining the direct term and the softmax(f_i) path
    ws.f = (alpha[i] / wi) *
           (ws.si - ws.sfull +
            (t * (fi.array() - self_avg) * ws.si.array()).matrix());
    ws.gf_sum += ws.f;
    ws.gown.row(i).noalias() -= wi * ws.f.transpose();
    ws.gw[i] -= ws.f.dot(ws.own.row(i).transpose());
    // d loss / d s[k] contributions (through p_hat and the soft welfare)
    ws.h.noalias() -= (alpha[i] / wi) * fi;
    ws.h.noalias() += beta[i] * ws.own.row(i).transpose();
    // explicit 1/w_i of the payment
    ws.gw[i] -= alpha[i] * pay[i] / wi;
    // soft welfare direct own-value term
    ws.gown.row(i).noalias() += beta[i] * ws.sfull.transpose();
  }
  // softmax(e) backward
  const double havg = ws.sfull.dot(ws.h);
  ws.ge = (t * ws.sfull.array() * (ws.h.array() - havg)).matrix() + ws.gf_sum;
  // e[k] = sum_i w_i own(i,k) + lambda_k
  for (int i = 0; i < n; ++i) {
    ws.gown.row(i).noalias() += params.weights[i] * ws.ge.transpose();
    ws.gw[i] += ws.ge.dot(ws.own.row(i).transpose());
  }
  gboosts += ws.ge;
  gweights += ws.gw;
  // own(i,k) = v_i . (A_k)_i
  for (int k = 0; k < s; ++k)
    for (int i = 0; i < n; ++i)
      galloc[static_cast<size_t>(k)].row(i).noalias() +=
          ws.gown(i, k) * values.row(i);
}

void post_profile(const Matrix& values, const AmaParams& params,
                  const CorPaymentNet* cor, double gamma, ChunkAccum& acc,
                  MutualScratch& ws) {
  ValuationProfile prof{values};
  AuctionOutcome out = ama_outcome(prof, params);
  const int n = static_cast<int>(values.rows());
  ws.ensure_bidders(n);
  double revenue = 0.0, regret = 0.0;
  for (int i = 0; i < n; ++i) {
    double pcor = 0.0;
    if (cor != nullptr) {
      flatten_minus_into(values, i, ws.xs[static_cast<size_t>(i)]);
      pcor = cor_forward_cached(*cor, i, ws.xs[static_cast<size_t>(i)],
                                ws.cor_ws[static_cast<size_t>(i)]);
    }
    const double uca = out.utilities[i] - pcor;
    revenue += out.pay_ama[i] + pcor;
    if (cor != nullptr) {
      regret += std::max(0.0, -uca);
      const double chi = uca < 0.0 ? 1.0 : 0.0;
      const double delta = -1.0 + gamma * chi;
      cor_backward_cached(*cor, i, ws.xs[static_cast<size_t>(i)], delta,
                          acc.gcor.blocks[static_cast<size_t>(i)],
                          ws.cor_ws[static_cast<size_t>(i)]);
    }
  }
  acc.loss += -revenue + (cor != nullptr ? gamma * regret : 0.0);
  acc.revenue += revenue;
  acc.regret += regret;
}

}  // namespace

LossRecord loss_and_grad(std::span<const Matrix> batch, const RawAmaParams& raw,
                         const CorPaymentNet* cor, double gamma, double t,
                         Stage stage) {
  if (gamma < 0.0) throw std::invalid_argument("loss_and_grad: gamma must be >= 0");
  const AmaParams params = realize(raw);
  const int count = static_cast<int>(batch.size());
  const int n = raw.bidders();
  const int s = raw.size();
  const int m = raw.items();

  const int chunks = std::min(kReduceChunks, std::max(1, count));
  std::vector<ChunkAccum> accs(static_cast<size_t>(chunks));
  // realized-parameter gradients per chunk (mutual stage only)
  std::vector<std::vector<Matrix>> galloc(static_cast<size_t>(chunks));
  std::vector<Vector> gweights(static_cast<size_t>(chunks));
  std::vector<Vector> gboosts(static_cast<size_t>(chunks));
  for (int c = 0; c < chunks; ++c) {
    if (cor != nullptr) accs[static_cast<size_t>(c)].gcor = CorGrad::zeros_like(*cor);
    galloc[static_cast<size_t>(c)].assign(static_cast<size_t>(s), Matrix::Zero(n, m));
    gweights[static_cast<size_t>(c)] = Vector::Zero(n);
    gboosts[static_cast<size_t>(c)] = Vector::Zero(s);
  }

  for_each_chunk(count, [&](int c, int begin, int end) {
    MutualScratch ws;
    auto& acc = accs[static_cast<size_t>(c)];
    for (int b = begin; b < end; ++b) {
      if (stage == Stage::Mutual) {
        mutual_profile(batch[static_cast<size_t>(b)], params, cor, gamma, t, acc, ws,
                       galloc[static_cast<size_t>(c)], gweights[static_cast<size_t>(c)],
                       gboosts[static_cast<size_t>(c)]);
      } else {
        post_profile(batch[static_cast<size_t>(b)], params, cor, gamma, acc, ws);
      }
    }
  });

  LossRecord rec;
  rec.grad_raw = RawGrads::zeros_like(raw);
  if (cor != nullptr) rec.grad_cor = CorGrad::zeros_like(*cor);
  std::vector<Matrix> galloc_total(static_cast<size_t>(s), Matrix::Zero(n, m));
  Vector gweights_total = Vector::Zero(n);
  for (int c = 0; c < chunks; ++c) {
    rec.loss += accs[static_cast<size_t>(c)].loss;
    rec.revenue_mean += accs[static_cast<size_t>(c)].revenue;
    rec.regret_ir_mean += accs[static_cast<size_t>(c)].regret;
    if (cor != nullptr) rec.grad_cor.add_scaled(accs[static_cast<size_t>(c)].gcor, 1.0);
    if (stage == Stage::Mutual) {
      for (int k = 0; k < s; ++k)
        galloc_total[static_cast<size_t>(k)] += galloc[static_cast<size_t>(c)][static_cast<size_t>(k)];
      gweights_total += gweights[static_cast<size_t>(c)];
      rec.grad_raw.boosts += gboosts[static_cast<size_t>(c)];
    }
  }
  if (count > 0) {
    rec.revenue_mean /= count;
    rec.regret_ir_mean /= count;
  }

  if (stage == Stage::Mutual) {
    // map realized-parameter gradients back through realize()
    Vector q(n + 1), up(n + 1);
    for (int k = 0; k < s; ++k) {
      const Matrix& logits = raw.menu_logits[static_cast<size_t>(k)];
      Matrix& gl = rec.grad_raw.menu_logits[static_cast<size_t>(k)];
      for (int j = 0; j < m; ++j) {
        softmax_scaled(logits.col(j), raw.temperature_feas, q);
        up[0] = 0.0;  // reserve slot has no downstream use
        up.tail(n) = galloc_total[static_cast<size_t>(k)].col(j);
        const double dot = q.dot(up);
        gl.col(j) = (raw.temperature_feas * q.array() * (up.array() - dot)).matrix();
      }
    }
    for (int i = 0; i < n; ++i)
      rec.grad_raw.weight_logits[i] = sigmoid(raw.weight_logits[i]) * gweights_total[i];
  }
  return rec;
}

nlohmann::json RawAmaParams::to_json() const {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& l : menu_logits) {
    std::vector<double> flat(static_cast<size_t>(l.size()));
    for (int r = 0; r < l.rows(); ++r)
      for (int c = 0; c < l.cols(); ++c)
        flat[static_cast<size_t>(r) * l.cols() + c] = l(r, c);
    entries.push_back({{"rows", l.rows()}, {"cols", l.cols()}, {"data", flat}});
  }
  return nlohmann::json{
      {"format", "raw_ama/1"},
      {"menu_logits", entries},
      {"weight_logits", std::vector<double>(weight_logits.begin(), weight_logits.end())},
      {"boosts", std::vector<double>(boosts.begin(), boosts.end())},
      {"temperature_feas", temperature_feas}};
}

RawAmaParams RawAmaParams::from_json(const nlohmann::json& j) {
  if (j.at("format").get<std::string>() != "raw_ama/1")
    throw std::invalid_argument("RawAmaParams: unknown format tag");
  RawAmaParams raw;
  for (const auto& je : j.at("menu_logits")) {
    const int rows = je.at("rows").get<int>();
    const int cols = je.at("cols").get<int>();
    const auto flat = je.at("data").get<std::vector<double>>();
    Matrix l(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) l(r, c) = flat[static_cast<size_t>(r) * cols + c];
    raw.menu_logits.push_back(std::move(l));
  }
  const auto wl = j.at("weight_logits").get<std::vector<double>>();
  const auto bs = j.at("boosts").get<std::vector<double>>();
  raw.weight_logits = Eigen::Map<const Vector>(wl.data(), static_cast<long>(wl.size()));
  raw.boosts = Eigen::Map<const Vector>(bs.data(), static_cast<long>(bs.size()));
  raw.temperature_feas = j.at("temperature_feas").get<double>();
  return raw;
}

}  // namespace caama
