#pragma once

#include "caama/cor_net.hpp"
#include "caama/types.hpp"

namespace caama {

// Affine social welfare of menu entry k:
//   asw(k; V) = sum_i w_i (v_i . (A_k)_i) + lambda_k.
double asw(int k, const ValuationProfile& v, const AmaParams& params);

// asw(k; V) minus bidder i's weighted contribution.
double asw_minus(int i, int k, const ValuationProfile& v, const AmaParams& params);

// Exact AMA evaluation: winner is the asw-maximizing entry (lowest index on
// ties); bidder i pays (max_k asw_{-i}(k) - asw_{-i}(k*)) / w_i.
AuctionOutcome ama_outcome(const ValuationProfile& v, const AmaParams& params);

// AMA allocation and payments plus the correlation payment
// p_cor_i = cor(i, V_{-i}), which never depends on bidder i's own row.
AuctionOutcome caama_outcome(const ValuationProfile& v, const AmaParams& params,
                             const CorPaymentNet& cor);

// VCG for additive valuations: each item goes to its highest bidder at the
// second-highest price (reserve price 0); equals full-menu AMA with w = 1,
// lambda = 0.
AuctionOutcome vcg_outcome(const ValuationProfile& v);

// Opt-out transform: every bidder with strictly negative utility gets a zero
// allocation row and zero payments. Ensures min utility >= 0 and preserves
// DSIC (max{., 0} is nondecreasing).
AuctionOutcome post_process_ir(const AuctionOutcome& out);

}  // namespace caama
