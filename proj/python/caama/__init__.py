"""Correlation-aware affine maximizer auctions.

Thin wrapper over the compiled core: valuation samplers, exact AMA / VCG /
CA-AMA evaluation, the differentiable softmax relaxation, two-stage training
and the verification oracles.
"""

from ._caama import (  # noqa: F401
    AmaParams,
    AuctionOutcome,
    DistributionSpec,
    ExactMetrics,
    GenBoundInputs,
    SoftOutcome,
    TrainConfig,
    __version__,
    ama_outcome,
    analytic_moments,
    asw,
    dama_brute_search,
    deterministic_menu,
    equal_revenue_inverse_cdf,
    full_surplus,
    gen_bound,
    post_process_ir,
    sample,
    soft_payment_utility,
    train,
    update_gamma,
    vcg_outcome,
)
