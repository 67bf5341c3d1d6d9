"""Leading-order log-partition function and its determinant machinery.

Everything is assembled and returned in log space.  The Gaussian-curvature
correction enters through det(C + D) where D is a nonnegative diagonal built
from the stationary point; for wide designs (p > n) that determinant is
reduced to an n x n eigenvalue problem through the matrix determinant lemma
instead of being formed at p x p size.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg as sla

from .errors import (
    NonPositiveQ,
    NotConverged,
    NumericalOverflow,
    SingularMatrix,
    TransitionValue,
)

_TRANSITION_TOL = 1e-8


@dataclass(frozen=True)
class LogPartition:
    """log Z split into its additive pieces.

    log_z is exactly exp_term + log_det_term + prefactor_term + q_term (the
    last is 0 unless an observable factor was attached).  d_tau holds the
    diagonal curvature weights, kept for reuse in marginal grids.
    """

    log_z: float
    exp_term: float
    log_det_term: float
    prefactor_term: float
    q_term: float
    d_tau: np.ndarray


def _d_diag(u, mu, tau):
    return tau * (mu * mu - u * u) ** 2 / (mu * mu + u * u)


def _log_det(c, d, lam, factor, method):
    if method == "lowrank":
        if factor is None:
            raise ValueError("low-rank route needs the design factor")
        if lam <= 0.0:
            raise ValueError("low-rank route needs lam > 0")
        n = factor.shape[0]
        dp = d + lam
        # det(A'A/(2n) + diag(dp)) = prod(dp) * det(I_n + A diag(1/dp) A'/(2n))
        b = np.eye(n) + (factor / dp) @ factor.T / (2.0 * n)
        eig = sla.eigvalsh(b)
        if eig[0] <= 0.0:
            raise SingularMatrix("low-rank core matrix not positive definite")
        return float(np.sum(np.log(dp)) + np.sum(np.log(eig)))
    try:
        chol = sla.cholesky(c + np.diag(d), lower=True)
    except sla.LinAlgError as exc:
        raise SingularMatrix(str(exc)) from None
    return float(2.0 * np.sum(np.log(np.diagonal(chol))))


def log_det_c_plus_d(problem, d_tau, method="auto"):
    """log det(C + diag(d_tau)).

    method "direct" factors the p x p matrix, "lowrank" goes through the
    n-dimensional determinant lemma (requires the problem to carry its
    design factor and lam > 0), "auto" picks lowrank exactly when it is
    available and p > n.
    """
    d = np.asarray(d_tau, dtype=float)
    if d.shape != (problem.p,):
        raise ValueError(f"d_tau must have length {problem.p}")
    if np.any(d < 0.0):
        raise ValueError("d_tau entries must be nonnegative")
    if method == "auto":
        n = problem.low_rank_factor.shape[0] if problem.low_rank_factor is not None else None
        use_lowrank = n is not None and problem.lam > 0.0 and problem.p > n
        method = "lowrank" if use_lowrank else "direct"
    if method not in ("direct", "lowrank"):
        raise ValueError(f"unknown method {method!r}")
    return _log_det(problem.c, d, problem.lam, problem.low_rank_factor, method)


def _core(c, w, mu, tau, x, u, lam, factor):
    """Array-level evaluation shared with the marginal-density code."""
    p = w.shape[0]
    d = _d_diag(u, mu, tau)
    exp_term = tau * float((w - u) @ x)
    if not math.isfinite(exp_term):
        raise NumericalOverflow(f"exponential term is {exp_term}")
    n = factor.shape[0] if factor is not None else None
    use_lowrank = n is not None and lam > 0.0 and p > n
    ld = _log_det(c, d, lam, factor, "lowrank" if use_lowrank else "direct")
    log_det_term = -0.5 * ld
    prefactor_term = (
        p * math.log(mu)
        - 0.5 * p * math.log(tau)
        - 0.5 * float(np.sum(np.log(mu * mu + u * u)))
    )
    return exp_term, log_det_term, prefactor_term, d


def log_partition(problem, saddle):
    """Leading-order log Z at the converged stationary point.

    The exponential term is evaluated as tau*(w - u)'x, which equals the
    quadratic form tau*(w - u)'C^{-1}(w - u) without any linear solve since
    x is exactly C^{-1}(w - u) at the stationary point.
    """
    if saddle.tau != problem.tau:
        raise ValueError("saddle was computed at a different tau")
    if not saddle.converged:
        raise NotConverged(saddle.cycles, "stationary point not converged")
    exp_term, log_det_term, prefactor_term, d = _core(
        problem.c,
        problem.w,
        problem.mu,
        problem.tau,
        saddle.x_tau,
        saddle.u_tau,
        problem.lam,
        problem.low_rank_factor,
    )
    total = exp_term + log_det_term + prefactor_term
    return LogPartition(
        log_z=total,
        exp_term=exp_term,
        log_det_term=log_det_term,
        prefactor_term=prefactor_term,
        q_term=0.0,
        d_tau=d,
    )


def log_partition_generalized(problem, saddle, q_at_saddle):
    """log Z with a positive observable factor attached.

    At leading order an analytic factor in the integrand only contributes
    its value at the stationary point, so the result is the base log Z plus
    log(q_at_saddle).  Sign tracking for non-positive factors is the
    caller's job; q_at_saddle <= 0 is rejected.
    """
    q = float(q_at_saddle)
    if not q > 0.0:
        raise NonPositiveQ(f"observable factor at the saddle must be > 0, got {q}")
    base = log_partition(problem, saddle)
    q_term = math.log(q)
    return LogPartition(
        log_z=base.exp_term + base.log_det_term + base.prefactor_term + q_term,
        exp_term=base.exp_term,
        log_det_term=base.log_det_term,
        prefactor_term=base.prefactor_term,
        q_term=q_term,
        d_tau=base.d_tau,
    )


def log_partition_zero_temp(problem, ml, saddle_limit_u=None):
    """Infinite-tau limit of log Z from the penalized ML solution alone.

    The active coordinates contribute a Gaussian block, the zero coordinates
    a product of shifted two-sided exponentials evaluated at the limiting
    dual vector (w - C x_hat by optimality; pass saddle_limit_u to override).
    Diagnostic only: the limit is discontinuous at l1 weights where a
    coordinate sits exactly on its inclusion boundary, and such points are
    rejected via TransitionValue rather than papered over.
    """
    if not ml.converged:
        raise NotConverged(ml.cycles, "ML solution not converged")
    x = ml.x_hat
    u = problem.w - problem.c @ x if saddle_limit_u is None else np.asarray(
        saddle_limit_u, dtype=float
    )
    if u.shape != (problem.p,):
        raise ValueError(f"saddle_limit_u must have length {problem.p}")
    mu, tau = problem.mu, problem.tau
    for j in range(problem.p):
        if abs(x[j]) < _TRANSITION_TOL and mu - abs(u[j]) < _TRANSITION_TOL:
            raise TransitionValue(j)
    active = np.array(ml.active_set, dtype=int)
    inactive = np.setdiff1d(np.arange(problem.p), active)
    n_act = active.size
    out = -(0.5 * n_act + inactive.size) * math.log(tau)
    out -= 0.5 * n_act * math.log(2.0)
    if n_act:
        c_act = problem.c[np.ix_(active, active)]
        v = problem.w[active] - mu * np.sign(u[active])
        try:
            chol = sla.cholesky(c_act, lower=True)
        except sla.LinAlgError as exc:
            raise SingularMatrix(str(exc)) from None
        half = sla.solve_triangular(chol, v, lower=True)
        out += tau * float(half @ half)
        out -= float(np.sum(np.log(np.diagonal(chol))))
    if inactive.size:
        uz = u[inactive]
        out += float(np.sum(np.log(mu / (mu * mu - uz * uz))))
    return out
