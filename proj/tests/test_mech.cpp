#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "caama/mech.hpp"
#include "caama/rng.hpp"
#include "test_util.hpp"

#include <cmath>

using namespace caama;
using testutil::rand_ama_params;
using testutil::rand_profile;
using testutil::single_item_params;

namespace {

ValuationProfile profile2x1(double v1, double v2) {
  Matrix v(2, 1);
  v << v1, v2;
  return ValuationProfile{v};
}

}  // namespace

TEST_CASE("asw: zero valuations leave only the boost") {
  Rng rng(7);
  AmaParams params = rand_ama_params(5, 3, 2, rng);
  ValuationProfile v{Matrix::Zero(3, 2)};
  for (int k = 0; k < params.size(); ++k)
    CHECK(asw(k, v, params) == doctest::Approx(params.boosts[k]).epsilon(1e-12));
}

TEST_CASE("asw: unit weights, zero boosts reduce to welfare") {
  AmaParams params = single_item_params(2);
  ValuationProfile v = profile2x1(0.8, 0.3);
  CHECK(asw(0, v, params) == doctest::Approx(0.0));   // reserve
  CHECK(asw(1, v, params) == doctest::Approx(0.8));   // to bidder 1
  CHECK(asw(2, v, params) == doctest::Approx(0.3));   // to bidder 2
}

TEST_CASE("asw: boosted single-item scores match the winner condition") {
  Vector boosts(3);
  boosts << 0.11, -0.2, 0.35;
  AmaParams params = single_item_params(2, boosts);
  ValuationProfile v = profile2x1(0.6, 0.25);
  CHECK(asw(0, v, params) == doctest::Approx(0.11));
  CHECK(asw(1, v, params) == doctest::Approx(0.6 - 0.2));
  CHECK(asw(2, v, params) == doctest::Approx(0.25 + 0.35));
  CHECK_THROWS_AS(asw(3, v, params), std::out_of_range);
}

TEST_CASE("asw_minus: absent bidder changes nothing") {
  Rng rng(3);
  AmaParams params = rand_ama_params(4, 2, 2, rng);
  params.menu[1].row(0).setZero();  // bidder 1 absent from entry 1
  ValuationProfile v{rand_profile(2, 2, rng)};
  CHECK(asw_minus(0, 1, v, params) == doctest::Approx(asw(1, v, params)).epsilon(1e-12));
}

TEST_CASE("asw_minus: winner's contribution removed") {
  AmaParams params = single_item_params(2);
  ValuationProfile v = profile2x1(0.8, 0.3);
  CHECK(asw_minus(0, 1, v, params) == doctest::Approx(0.0));
}

TEST_CASE("asw_minus: weighted case with boost") {
  // w = (2,1), lambda_1 = 0.5, v_1 = 0.4: asw_minus_1(to-1) = 0.5
  Vector boosts(3);
  boosts << 0.0, 0.5, 0.0;
  AmaParams params = single_item_params(2, boosts);
  params.weights << 2.0, 1.0;
  ValuationProfile v = profile2x1(0.4, 0.9);
  CHECK(asw_minus(0, 1, v, params) == doctest::Approx(0.5));
}

TEST_CASE("ama_outcome: reduces to second price") {
  AmaParams params = single_item_params(2);
  ValuationProfile v = profile2x1(0.8, 0.3);
  AuctionOutcome out = ama_outcome(v, params);
  CHECK(out.winner_index == 1);
  CHECK(out.pay_ama[0] == doctest::Approx(0.3));
  CHECK(out.pay_ama[1] == doctest::Approx(0.0));
  CHECK(out.utilities[0] == doctest::Approx(0.5));
}

TEST_CASE("ama_outcome: boost shifts the threshold payment") {
  Vector boosts(3);
  boosts << 0.0, 0.2, 0.0;
  AmaParams params = single_item_params(2, boosts);
  ValuationProfile v = profile2x1(0.5, 0.4);
  AuctionOutcome out = ama_outcome(v, params);
  CHECK(out.winner_index == 1);
  // p_1 = max{0.4, 0.2, 0} - 0.2
  CHECK(out.pay_ama[0] == doctest::Approx(0.2));
}

TEST_CASE("ama_outcome: IR and feasibility on random instances") {
  Rng rng(11);
  for (int trial = 0; trial < 3000; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 2);
    const int m = 1 + static_cast<int>(rng.next_u64() % 2);
    const int s = 2 + static_cast<int>(rng.next_u64() % 6);
    AmaParams params = rand_ama_params(s, n, m, rng);
    ValuationProfile v{rand_profile(n, m, rng)};
    AuctionOutcome out = ama_outcome(v, params);
    CHECK(out.utilities.minCoeff() >= -kFeasTol);
    CHECK(out.pay_ama.minCoeff() >= -kFeasTol);
    CHECK(allocation_feasible(out.allocation));
    // utilities are recomputable from the stored fields
    for (int i = 0; i < n; ++i) {
      const double u = v.values.row(i).dot(out.allocation.row(i)) - out.pay_ama[i] -
                       out.pay_cor[i];
      CHECK(out.utilities[i] == doctest::Approx(u).epsilon(1e-12));
    }
  }
}

TEST_CASE("ama_outcome: winner invariant under joint (w, lambda) scaling") {
  Rng rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    AmaParams params = rand_ama_params(6, 2, 2, rng);
    ValuationProfile v{rand_profile(2, 2, rng)};
    AuctionOutcome base = ama_outcome(v, params);
    AmaParams scaled = params;
    const double c = rng.uniform(0.1, 10.0);
    scaled.weights *= c;
    scaled.boosts *= c;
    CHECK(ama_outcome(v, scaled).winner_index == base.winner_index);
  }
}

TEST_CASE("vcg_outcome: single item second price") {
  AuctionOutcome out = vcg_outcome(profile2x1(0.8, 0.3));
  CHECK(out.pay_ama[0] == doctest::Approx(0.3));
  CHECK(out.allocation(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("vcg_outcome: per-item second price on 2x2") {
  Matrix v(2, 2);
  v << 0.9, 0.1, 0.2, 0.7;
  AuctionOutcome out = vcg_outcome(ValuationProfile{v});
  CHECK(out.pay_ama[0] == doctest::Approx(0.2));
  CHECK(out.pay_ama[1] == doctest::Approx(0.1));
  CHECK(out.revenue() == doctest::Approx(0.3));
}

TEST_CASE("vcg_outcome: equals full-menu AMA with unit weights") {
  Rng rng(17);
  AmaParams full;
  full.menu = deterministic_menu(2, 2);
  full.weights = Vector::Ones(2);
  full.boosts = Vector::Zero(full.size());
  for (int trial = 0; trial < 500; ++trial) {
    ValuationProfile v{rand_profile(2, 2, rng)};
    AuctionOutcome vcg = vcg_outcome(v);
    AuctionOutcome ama = ama_outcome(v, full);
    CHECK((vcg.allocation - ama.allocation).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((vcg.pay_ama - ama.pay_ama).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("caama_outcome: zero cor net replicates classic AMA") {
  Rng rng(19);
  AmaParams params = rand_ama_params(5, 2, 2, rng);
  CorPaymentNet cor = cor_init(2, 2, 4, 4, 0);
  for (auto& b : cor.blocks) {
    b.w1.setZero();
    b.w2.setZero();
    b.w3.setZero();
  }
  ValuationProfile v{rand_profile(2, 2, rng)};
  AuctionOutcome plain = ama_outcome(v, params);
  AuctionOutcome ca = caama_outcome(v, params, cor);
  CHECK(ca.pay_cor.cwiseAbs().maxCoeff() == 0.0);
  CHECK((ca.utilities - plain.utilities).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("caama_outcome: full-surplus payment under perfect correlation") {
  // p_1_cor(v_2) = 1 - 2 v_2 realized exactly by a 1-wide relu net
  CorPaymentNet cor;
  cor.input_width = 1;
  cor.h1 = cor.h2 = 1;
  CorBlock b;
  b.w1 = Matrix::Constant(1, 1, 1.0);
  b.b1 = Vector::Zero(1);
  b.w2 = Matrix::Constant(1, 1, 1.0);
  b.b2 = Vector::Zero(1);
  b.w3 = Matrix::Constant(1, 1, -2.0);
  b.b3 = 1.0;
  CorBlock zero = b;
  zero.w1.setZero();
  zero.w2.setZero();
  zero.w3.setZero();
  zero.b3 = 0.0;
  cor.blocks = {b, zero};

  AmaParams params = single_item_params(2);
  Rng rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const double v1 = rng.uniform(0.5001, 1.0);  // bidder 1 wins
    ValuationProfile v = profile2x1(v1, 1.0 - v1);
    AuctionOutcome out = caama_outcome(v, params, cor);
    CHECK(out.winner_index == 1);
    // total payment 1 - v_2 = v_1: the full-surplus optimum
    CHECK(out.pay_ama[0] + out.pay_cor[0] == doctest::Approx(v1).epsilon(1e-10));
    CHECK(out.utilities[0] == doctest::Approx(0.0).epsilon(1e-10));
  }
}

TEST_CASE("caama_outcome: pay_cor never depends on the own row") {
  Rng rng(29);
  AmaParams params = rand_ama_params(4, 3, 2, rng);
  CorPaymentNet cor = cor_init(3, 2, 8, 8, 5);
  ValuationProfile v{rand_profile(3, 2, rng)};
  AuctionOutcome base = caama_outcome(v, params, cor);
  for (int trial = 0; trial < 50; ++trial) {
    ValuationProfile perturbed = v;
    const int i = static_cast<int>(rng.next_u64() % 3);
    for (int j = 0; j < 2; ++j) perturbed.values(i, j) = rng.uniform01();
    AuctionOutcome out = caama_outcome(perturbed, params, cor);
    CHECK(out.pay_cor[i] == doctest::Approx(base.pay_cor[i]).epsilon(1e-14));
  }
}

TEST_CASE("post_process_ir: nonnegative utilities unchanged") {
  Rng rng(31);
  AmaParams params = rand_ama_params(5, 2, 2, rng);
  ValuationProfile v{rand_profile(2, 2, rng)};
  AuctionOutcome out = ama_outcome(v, params);
  AuctionOutcome post = post_process_ir(out);
  CHECK((post.utilities - out.utilities).cwiseAbs().maxCoeff() == 0.0);
  CHECK((post.allocation - out.allocation).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("post_process_ir: negative-utility bidder zeroed") {
  AuctionOutcome out;
  out.allocation = Matrix::Ones(2, 1) * 0.5;
  out.pay_ama = Vector(2);
  out.pay_ama << 0.1, 0.4;
  out.pay_cor = Vector::Zero(2);
  out.utilities = Vector(2);
  out.utilities << 0.2, -0.1;
  AuctionOutcome post = post_process_ir(out);
  CHECK(post.utilities[0] == doctest::Approx(0.2));
  CHECK(post.utilities[1] == doctest::Approx(0.0));
  CHECK(post.allocation(1, 0) == doctest::Approx(0.0));
  CHECK(post.pay_ama[1] == doctest::Approx(0.0));
  CHECK(post.allocation(0, 0) == doctest::Approx(0.5));
  CHECK(post.utilities.minCoeff() >= 0.0);
}

TEST_CASE("post_process_ir: idempotent and revenue-reducing for pay_cor >= 0") {
  Rng rng(37);
  for (int trial = 0; trial < 200; ++trial) {
    AmaParams params = rand_ama_params(4, 2, 2, rng);
    ValuationProfile v{rand_profile(2, 2, rng)};
    AuctionOutcome out = ama_outcome(v, params);
    // inflate with a nonnegative cor payment to force violations
    for (int i = 0; i < 2; ++i) {
      out.pay_cor[i] = rng.uniform(0.0, 0.5);
      out.utilities[i] -= out.pay_cor[i];
    }
    AuctionOutcome once = post_process_ir(out);
    AuctionOutcome twice = post_process_ir(once);
    CHECK((once.utilities - twice.utilities).cwiseAbs().maxCoeff() == 0.0);
    CHECK((once.allocation - twice.allocation).cwiseAbs().maxCoeff() == 0.0);
    CHECK(once.revenue() <= out.revenue() + 1e-12);
    CHECK(once.utilities.minCoeff() >= 0.0);
  }
}

TEST_CASE("deterministic menu enumerates (n+1)^m distinct entries") {
  auto menu = deterministic_menu(2, 2);
  CHECK(menu.size() == 9);
  AmaParams params;
  params.menu = menu;
  params.weights = Vector::Ones(2);
  params.boosts = Vector::Zero(9);
  CHECK_NOTHROW(params.validate(true));
}
