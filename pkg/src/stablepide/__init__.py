"""Monotone schemes for alpha-stable PIDEs under sublinear expectation."""

from .errors import AccuracyError, AssumptionViolated, InvalidParameters, NotAvailable
from .measure import (
    AssumptionConstants,
    DistributionSpec,
    StableParams,
    TailProfile,
    assumption_constants,
    beta_profile,
    build_distribution,
    cdf,
    gamma_exponent,
    lemma_I1,
    lemma_I2,
    pdf,
)
from .pide import (
    SmoothTestFunction,
    characteristic_exponent,
    consistency_residual,
    nonlocal_operator,
    reference_linear,
)
from .scheme import (
    GridFunction,
    SchemeConfig,
    SchemeSolution,
    holder_time,
    lipschitz_of,
    scheme_operator_S,
    solve,
    solve_truncated,
    step,
)
from .sublinear import Integrand, SublinearKernel, expect, expect_abs, expect_clamped

__all__ = [
    "AccuracyError",
    "AssumptionViolated",
    "InvalidParameters",
    "NotAvailable",
    "AssumptionConstants",
    "DistributionSpec",
    "StableParams",
    "TailProfile",
    "assumption_constants",
    "beta_profile",
    "build_distribution",
    "cdf",
    "gamma_exponent",
    "lemma_I1",
    "lemma_I2",
    "pdf",
    "SmoothTestFunction",
    "characteristic_exponent",
    "consistency_residual",
    "nonlocal_operator",
    "reference_linear",
    "GridFunction",
    "SchemeConfig",
    "SchemeSolution",
    "holder_time",
    "lipschitz_of",
    "scheme_operator_S",
    "solve",
    "solve_truncated",
    "step",
    "Integrand",
    "SublinearKernel",
    "expect",
    "expect_abs",
    "expect_clamped",
]
