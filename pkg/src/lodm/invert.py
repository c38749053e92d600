"""
Inverting the link: recovering latent values from observations.

For a linear link the latent value after observations ``y_0, ..., y_k`` is
an affine function of the starting state ``z``; the coefficient on ``z`` is
the row vector ``e_p^T A^(k+1)`` and its l1 norm is the exact Lipschitz
constant of the iterated link under the max metric on states.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_discrete_lyapunov
from scipy.signal import lfilter, lfiltic

from lodm.exceptions import DomainError, NotInvertibleError
from lodm.models import (
    LodmParams,
    ModelSpec,
    _upsilon_scalar,
    default_state,
    link_step,
    simulate,
    upsilon,
)
from lodm.poly import in_stability_region
from lodm.statespace import build_companion, geometric_gain, spectral_radius

__all__ = [
    "InitPoint",
    "geometric_bound",
    "MomentEstimate",
    "iterate_link",
    "latent_path",
    "latent_reconstruct",
    "lipschitz_estimate",
    "moment_check",
    "truncation_length",
]


@dataclass(frozen=True)
class InitPoint:
    """Constant starting state: ``x_init`` repeated p times, ``u_init`` q-1 times."""

    x_init: float
    u_init: float = 0.0

    def to_state(self, p: int, q: int) -> np.ndarray:
        return np.concatenate((np.full(p, float(self.x_init)), np.full(q - 1, float(self.u_init))))


def _resolve_state(spec: ModelSpec, params: LodmParams, z0) -> np.ndarray:
    if z0 is None:
        return default_state(spec, params)
    if isinstance(z0, InitPoint):
        z = z0.to_state(spec.p, spec.q)
    else:
        z = np.asarray(z0, dtype=float).ravel()
    if z.size != spec.state_dim:
        raise ValueError(f"initial state must have length {spec.state_dim}")
    return z


def iterate_link(
    spec: ModelSpec,
    params: LodmParams,
    y: Sequence,
    z0: InitPoint | Sequence[float] | None = None,
) -> float:
    """
    Latent value ``x_{k+1}`` after feeding ``y_0, ..., y_k`` from state ``z0``.

    Runs the scalar recursion step by step. ``z0`` may be an
    :class:`InitPoint`, a full state vector in companion layout, or ``None``
    for the fixed point of the noiseless recursion.
    """
    if len(y) == 0:
        raise ValueError("need at least one observation")
    p = spec.p
    z = _resolve_state(spec, params, z0)
    ups = _upsilon_scalar(spec.family)
    if spec.family.is_count:
        upsilon(spec, np.asarray(y))  # domain check
    omega, a, b = params.omega, params.a, params.b
    xs = [float(v) for v in z[:p]]
    us = [float(v) for v in z[p:]] + [0.0]
    x = xs[-1]
    for k, yk in enumerate(y):
        us[-1] = ups(yk)
        x = link_step(omega, a, b, xs, us)
        if not math.isfinite(x) or (spec.family.sign_constrained and not x > 0):
            raise DomainError(f"latent recursion left its domain at step {k}")
        xs = xs[1:] + [x]
        us = us[1:] + [0.0]
    return x


def latent_path(
    spec: ModelSpec,
    params: LodmParams,
    y: Sequence,
    z0: InitPoint | Sequence[float] | None = None,
) -> np.ndarray:
    """
    All filtered latent values ``x_0, ..., x_n`` for ``n`` observations.

    ``x_0`` is the current latent entry of ``z0`` and ``x_{k+1}`` equals
    ``iterate_link(spec, params, y[:k+1], z0)`` up to rounding. The
    recursion runs as an IIR filter around the fixed point
    ``omega / (1 - sum(a))``, which requires ``a`` in the stability region.
    """
    if not in_stability_region(params.a):
        raise NotInvertibleError("not invertible (L-1 fails)")
    p, q = spec.p, spec.q
    z = _resolve_state(spec, params, z0)
    u = upsilon(spec, np.asarray(y))
    u = np.atleast_1d(np.asarray(u, dtype=float))
    center = params.omega * geometric_gain(params.a)
    num = np.asarray(params.b)
    den = np.concatenate(([1.0], -np.asarray(params.a)))
    x_hist = z[:p][::-1] - center
    u_hist = z[p:][::-1]
    zi = lfiltic(num, den, x_hist, u_hist)
    out, _ = lfilter(num, den, u, zi=zi)
    path = np.concatenate(([z[p - 1]], out + center))
    if not np.all(np.isfinite(path)) or (
        spec.family.sign_constrained and np.any(path <= 0)
    ):
        raise DomainError("latent recursion left its domain")
    return path


def latent_reconstruct(params: LodmParams, upsilon_y: Sequence[float]) -> float:
    """
    Truncated series for the latent value following the last observation.

    Parameters
    ----------
    params : LodmParams
    upsilon_y : sequence of float
        Transformed observations ``Upsilon(Y_{-n}), ..., Upsilon(Y_0)``,
        oldest first.

    Returns
    -------
    float
        ``sum_{k=0}^{n} e_p^T A^k (omega_vec + Upsilon(Y_{-k}) b_vec)``.
    """
    if not in_stability_region(params.a):
        raise NotInvertibleError("not invertible (L-1 fails)")
    comp = build_companion(params.omega, params.a, params.b)
    u = np.asarray(upsilon_y, dtype=float).ravel()
    row = comp.selector
    total = 0.0
    for uk in u[::-1]:
        total += row @ comp.omega_vec + uk * (row @ comp.b_vec)
        row = row @ comp.A
    return float(total)


def lipschitz_estimate(params: LodmParams, n: int) -> float:
    """l1 norm of ``e_p^T A^n``: the exact Lipschitz constant after n steps."""
    if n < 1:
        raise ValueError("n must be >= 1")
    comp = build_companion(params.omega, params.a, params.b)
    row = comp.selector
    for _ in range(n):
        row = row @ comp.A
    return float(np.sum(np.abs(row)))


def geometric_bound(params: LodmParams, slack: float = 0.05) -> tuple[float, float]:
    """
    Constants ``(C, rate)`` with ``lipschitz_estimate(n) <= C * rate**n`` for all n.

    ``rate`` is the spectral radius of the companion matrix plus ``slack``.
    ``C`` comes from a quadratic Lyapunov function: with ``M = A / rate``
    and ``P`` solving ``P - M^T P M = I``, ``M`` does not expand the
    ``P``-norm, so ``|e_p^T A^n z| <= rate**n |e_p|_{P^-1} |z|_P`` and the
    ``P``-norm over the unit max-ball is at most ``sqrt(sum |P_ij|)``.
    """
    if slack <= 0:
        raise ValueError("slack must be > 0")
    comp = build_companion(params.omega, params.a, params.b)
    rate = spectral_radius(comp) + slack
    M = comp.A / rate
    P = solve_discrete_lyapunov(M.T, np.eye(comp.dim))
    e = comp.selector
    C = math.sqrt(float(e @ np.linalg.solve(P, e)) * float(np.abs(P).sum()))
    return C, rate


def truncation_length(
    params: LodmParams, tol: float, scale: float = 1.0, max_n: int = 100_000
) -> int:
    """
    Smallest ``n`` for which the series truncation error bound
    ``lipschitz_estimate(n + 1) * scale`` is at most ``tol``.
    """
    if not in_stability_region(params.a):
        raise NotInvertibleError("not invertible (L-1 fails)")
    comp = build_companion(params.omega, params.a, params.b)
    row = comp.selector @ comp.A
    for n in range(max_n + 1):
        if np.sum(np.abs(row)) * scale <= tol:
            return n
        row = row @ comp.A
    raise RuntimeError(f"tolerance not reached within {max_n} terms")


@dataclass(frozen=True)
class MomentEstimate:
    mean: float
    stderr: float
    n: int


def moment_check(
    spec: ModelSpec,
    params: LodmParams,
    n_mc: int,
    seed: int = 0,
    burn_in: int = 1000,
    n_batches: int = 50,
) -> MomentEstimate:
    """
    Monte Carlo estimate of ``E[log+ |Upsilon(Y)|]`` under the simulated law.

    The standard error uses non-overlapping batch means so that serial
    dependence along the path is accounted for; below ``10 * n_batches``
    draws it falls back to the i.i.d. formula.
    """
    if n_mc < 1:
        raise ValueError("n_mc must be >= 1")
    traj = simulate(spec, params, n_mc, burn_in=burn_in, seed=seed)
    vals = np.log(np.maximum(np.abs(upsilon(spec, traj.y)), 1.0))
    vals = np.atleast_1d(vals)
    mean = float(vals.mean())
    if n_mc >= 10 * n_batches:
        m = n_mc // n_batches
        batch = vals[: m * n_batches].reshape(n_batches, m).mean(axis=1)
        se = float(batch.std(ddof=1) / math.sqrt(n_batches))
    elif n_mc > 1:
        se = float(vals.std(ddof=1) / math.sqrt(n_mc))
    else:
        se = float("nan")
    return MomentEstimate(mean=mean, stderr=se, n=n_mc)
