#include "caama/cor_net.hpp"

#include "caama/rng.hpp"

#include <json.hpp>

#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace caama {

namespace {

Matrix uniform_matrix(int rows, int cols, double scale, Rng& rng) {
  Matrix w(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) w(r, c) = rng.uniform(-scale, scale);
  return w;
}

void check_block(const CorPaymentNet& net, int i) {
  if (i < 0 || i >= net.bidders())
    throw std::out_of_range("cor net: bidder index");
}

}  // namespace

void CorBlockGrad::set_zero() {
  w1.setZero();
  b1.setZero();
  w2.setZero();
  b2.setZero();
  w3.setZero();
  b3 = 0.0;
}

CorGrad CorGrad::zeros_like(const CorPaymentNet& net) {
  CorGrad g;
  g.blocks.resize(net.blocks.size());
  for (size_t i = 0; i < net.blocks.size(); ++i) {
    const CorBlock& b = net.blocks[i];
    g.blocks[i].w1 = Matrix::Zero(b.w1.rows(), b.w1.cols());
    g.blocks[i].b1 = Vector::Zero(b.b1.size());
    g.blocks[i].w2 = Matrix::Zero(b.w2.rows(), b.w2.cols());
    g.blocks[i].b2 = Vector::Zero(b.b2.size());
    g.blocks[i].w3 = Matrix::Zero(b.w3.rows(), b.w3.cols());
    g.blocks[i].b3 = 0.0;
  }
  return g;
}

void CorGrad::set_zero() {
  for (auto& b : blocks) b.set_zero();
}

void CorGrad::add_scaled(const CorGrad& other, double scale) {
  for (size_t i = 0; i < blocks.size(); ++i) {
    blocks[i].w1 += scale * other.blocks[i].w1;
    blocks[i].b1 += scale * other.blocks[i].b1;
    blocks[i].w2 += scale * other.blocks[i].w2;
    blocks[i].b2 += scale * other.blocks[i].b2;
    blocks[i].w3 += scale * other.blocks[i].w3;
    blocks[i].b3 += scale * other.blocks[i].b3;
  }
}

CorPaymentNet cor_init(int n, int m, int h1, int h2, uint64_t seed, bool bias_free) {
  if (n < 2 || m < 1) throw std::invalid_argument("cor_init: need n >= 2, m >= 1");
  if (h1 < 1 || h2 < 1) throw std::invalid_argument("cor_init: widths must be >= 1");
  CorPaymentNet net;
  net.input_width = (n - 1) * m;
  net.h1 = h1;
  net.h2 = h2;
  net.bias_free = bias_free;
  net.blocks.resize(n);
  for (int i = 0; i < n; ++i) {
    Rng rng = Rng::substream(seed, static_cast<uint64_t>(i));
    CorBlock& b = net.blocks[i];
    b.w1 = uniform_matrix(h1, net.input_width, 1.0 / std::sqrt(net.input_width), rng);
    b.w2 = uniform_matrix(h2, h1, 1.0 / std::sqrt(h1), rng);
    b.w3 = uniform_matrix(1, h2, 1.0 / std::sqrt(h2), rng);
    b.b1 = Vector::Zero(h1);
    b.b2 = Vector::Zero(h2);
    b.b3 = 0.0;
  }
  return net;
}

double cor_forward(const CorPaymentNet& net, int i, const Vector& x) {
  check_block(net, i);
  if (x.size() != net.input_width)
    throw std::invalid_argument("cor_forward: input width mismatch");
  const CorBlock& b = net.blocks[i];
  const Vector a1 = (b.w1 * x + b.b1).cwiseMax(0.0);
  const Vector a2 = (b.w2 * a1 + b.b2).cwiseMax(0.0);
  return (b.w3 * a2)(0) + b.b3;
}

double cor_forward(const CorPaymentNet& net, int i, const Matrix& profile_values) {
  return cor_forward(net, i, flatten_minus(profile_values, i));
}

double cor_forward_cached(const CorPaymentNet& net, int i, const Vector& x,
                          CorScratch& ws) {
  check_block(net, i);
  if (x.size() != net.input_width)
    throw std::invalid_argument("cor_forward_cached: input width mismatch");
  const CorBlock& b = net.blocks[i];
  ws.z1.noalias() = b.w1 * x;
  ws.z1 += b.b1;
  ws.a1 = ws.z1.cwiseMax(0.0);
  ws.z2.noalias() = b.w2 * ws.a1;
  ws.z2 += b.b2;
  ws.a2 = ws.z2.cwiseMax(0.0);
  return (b.w3 * ws.a2)(0) + b.b3;
}

void cor_backward_cached(const CorPaymentNet& net, int i, const Vector& x,
                         double upstream, CorBlockGrad& acc, CorScratch& ws) {
  if (upstream == 0.0) return;
  const CorBlock& b = net.blocks[i];
  // relu subgradient at 0 is taken as 0
  ws.d2 = (upstream * b.w3.transpose()).cwiseProduct(
      (ws.z2.array() > 0.0).cast<double>().matrix());
  ws.d1 = (b.w2.transpose() * ws.d2).cwiseProduct(
      (ws.z1.array() > 0.0).cast<double>().matrix());
  acc.w3.noalias() += upstream * ws.a2.transpose();
  acc.w2.noalias() += ws.d2 * ws.a1.transpose();
  acc.w1.noalias() += ws.d1 * x.transpose();
  if (!net.bias_free) {
    acc.b3 += upstream;
    acc.b2 += ws.d2;
    acc.b1 += ws.d1;
  }
}

CorBlockGrad cor_backward(const CorPaymentNet& net, int i, const Vector& x,
                          double upstream) {
  check_block(net, i);
  const CorBlock& b = net.blocks[i];
  CorBlockGrad g;
  g.w1 = Matrix::Zero(b.w1.rows(), b.w1.cols());
  g.b1 = Vector::Zero(b.b1.size());
  g.w2 = Matrix::Zero(b.w2.rows(), b.w2.cols());
  g.b2 = Vector::Zero(b.b2.size());
  g.w3 = Matrix::Zero(b.w3.rows(), b.w3.cols());
  CorScratch ws;
  cor_forward_cached(net, i, x, ws);
  cor_backward_cached(net, i, x, upstream, g, ws);
  return g;
}

double matrix_spectral_norm(const Matrix& w, int max_iters, double tol) {
  if (w.size() == 0) return 0.0;
  Vector v = Vector::Ones(w.cols());
  v.normalize();
  double sigma = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    Vector u = w * v;
    const double nu = u.norm();
    if (nu == 0.0) return 0.0;
    Vector vn = w.transpose() * (u / nu);
    const double nv = vn.norm();
    if (nv == 0.0) return nu;
    v = vn / nv;
    if (std::abs(nu - sigma) <= tol * std::max(1.0, nu)) {
      sigma = nu;
      break;
    }
    sigma = nu;
  }
  return (w * v).norm();
}

std::array<double, 3> cor_spectral_norms(const CorPaymentNet& net, int i) {
  check_block(net, i);
  const CorBlock& b = net.blocks[i];
  return {matrix_spectral_norm(b.w1), matrix_spectral_norm(b.w2),
          matrix_spectral_norm(b.w3)};
}

namespace {

nlohmann::json matrix_to_json(const Matrix& w) {
  std::vector<double> flat(static_cast<size_t>(w.size()));
  for (int r = 0; r < w.rows(); ++r)
    for (int c = 0; c < w.cols(); ++c)
      flat[static_cast<size_t>(r) * w.cols() + c] = w(r, c);
  return nlohmann::json{{"rows", w.rows()}, {"cols", w.cols()}, {"data", flat}};
}

Matrix matrix_from_json(const nlohmann::json& j) {
  const int rows = j.at("rows").get<int>();
  const int cols = j.at("cols").get<int>();
  const auto flat = j.at("data").get<std::vector<double>>();
  if (static_cast<int>(flat.size()) != rows * cols)
    throw std::invalid_argument("cor_load: matrix size mismatch");
  Matrix w(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) w(r, c) = flat[static_cast<size_t>(r) * cols + c];
  return w;
}

}  // namespace

nlohmann::json cor_to_json(const CorPaymentNet& net) {
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : net.blocks) {
    blocks.push_back({{"w1", matrix_to_json(b.w1)},
                      {"b1", std::vector<double>(b.b1.begin(), b.b1.end())},
                      {"w2", matrix_to_json(b.w2)},
                      {"b2", std::vector<double>(b.b2.begin(), b.b2.end())},
                      {"w3", matrix_to_json(b.w3)},
                      {"b3", b.b3}});
  }
  return nlohmann::json{{"format", "cor_net/1"},
                        {"input_width", net.input_width},
                        {"h1", net.h1},
                        {"h2", net.h2},
                        {"bias_free", net.bias_free},
                        {"blocks", blocks}};
}

CorPaymentNet cor_from_json(const nlohmann::json& j) {
  if (j.at("format").get<std::string>() != "cor_net/1")
    throw std::invalid_argument("cor_load: unknown format tag");
  CorPaymentNet net;
  net.input_width = j.at("input_width").get<int>();
  net.h1 = j.at("h1").get<int>();
  net.h2 = j.at("h2").get<int>();
  net.bias_free = j.at("bias_free").get<bool>();
  for (const auto& jb : j.at("blocks")) {
    CorBlock b;
    b.w1 = matrix_from_json(jb.at("w1"));
    b.w2 = matrix_from_json(jb.at("w2"));
    b.w3 = matrix_from_json(jb.at("w3"));
    const auto b1 = jb.at("b1").get<std::vector<double>>();
    const auto b2 = jb.at("b2").get<std::vector<double>>();
    b.b1 = Eigen::Map<const Vector>(b1.data(), static_cast<long>(b1.size()));
    b.b2 = Eigen::Map<const Vector>(b2.data(), static_cast<long>(b2.size()));
    b.b3 = jb.at("b3").get<double>();
    net.blocks.push_back(std::move(b));
  }
  return net;
}

void cor_save(const CorPaymentNet& net, std::ostream& os) {
  os << cor_to_json(net).dump(2) << "\n";
}

CorPaymentNet cor_load(std::istream& is) {
  nlohmann::json j;
  is >> j;
  return cor_from_json(j);
}

}  // namespace caama
