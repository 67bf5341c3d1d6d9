"""Closed-form posterior for a single coefficient.

With one coordinate the normalizing integral of exp(-tau*(c*x^2 - 2*w*x +
2*mu*|x|)) splits at the origin into two half-Gaussian pieces, each of which
is an erfcx evaluation.  Everything here is exact up to floating point and
serves as the ground-truth oracle for the multivariate approximations.
"""

import math
from dataclasses import dataclass

import numpy as np

from .special import log_erfcx


@dataclass(frozen=True)
class OneDimProblem:
    """Single-coefficient problem: quadratic weight c, linear weight w,
    l1 weight mu, inverse temperature tau."""

    c: float
    w: float
    mu: float
    tau: float

    def __post_init__(self):
        if not (self.c > 0.0 and self.mu > 0.0 and self.tau > 0.0):
            raise ValueError("c, mu and tau must all be positive")


def _half_line_logs(p):
    # log of the two half-line integrals, up to the shared Gaussian prefactor
    s = math.sqrt(p.tau / p.c)
    return log_erfcx(s * (p.mu + p.w)), log_erfcx(s * (p.mu - p.w))


def log_z_exact(p):
    """Log normalizing constant of the single-coefficient posterior.

    Combines the two half-line pieces in log space; no overflow for any
    positive tau.
    """
    lp, lm = _half_line_logs(p)
    half = 0.5 * (math.log(math.pi) - math.log(p.tau * p.c))
    return float(np.logaddexp(lp, lm)) + half - math.log(2.0)


def prob_nonnegative(p):
    """Posterior probability that the coefficient is >= 0.

    Equal to the negative-side erfcx weight over the total.  Written with
    expit of the log-weight difference so it is exact in both tails; > 1/2
    exactly when w > 0.
    """
    lp, lm = _half_line_logs(p)
    # expit(lm - lp) without importing scipy here: both orderings are safe
    d = lm - lp
    if d >= 0.0:
        return 1.0 / (1.0 + math.exp(-d))
    e = math.exp(d)
    return e / (1.0 + e)


def expectation_exact(p):
    """Posterior mean of the coefficient.

    w/c plus a shrinkage term (1 - 2*alpha)*mu/c where alpha is the
    nonnegative-side probability; the tanh form keeps it stable when one
    side carries essentially all the mass.
    """
    lp, lm = _half_line_logs(p)
    return p.w / p.c + (p.mu / p.c) * math.tanh(0.5 * (lp - lm))


def density_exact(p, x):
    """Normalized posterior density at x (scalar or array)."""
    x = np.asarray(x, dtype=float)
    log_num = -p.tau * (p.c * x * x - 2.0 * p.w * x + 2.0 * p.mu * np.abs(x))
    out = np.exp(log_num - log_z_exact(p))
    return float(out) if out.ndim == 0 else out
