"""
Conditional likelihood, maximum likelihood fitting and likelihood profiles.

The latent path is recovered from the observations by running the link from
a fixed starting state; the first ``discard`` terms of the log-likelihood are
dropped so the arbitrary start has washed out.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.optimize import minimize

from lodm.exceptions import DomainError, NotInvertibleError
from lodm.ident import EquivCurve, curve_point
from lodm.invert import InitPoint, latent_path
from lodm.models import LodmParams, ModelSpec, default_state, log_density
from lodm.poly import in_stability_region

__all__ = [
    "DEFAULT_DISCARD",
    "FitOptions",
    "FitResult",
    "conditional_loglik",
    "fit_mle",
    "profile_along_curve",
]

DEFAULT_DISCARD = 100


def conditional_loglik(
    spec: ModelSpec,
    params: LodmParams,
    y: Sequence,
    z0: InitPoint | Sequence[float] | None = None,
    discard: int = DEFAULT_DISCARD,
) -> float:
    """
    Mean per-observation conditional log-likelihood.

    Parameters
    ----------
    spec : ModelSpec
    params : LodmParams
    y : sequence
        Observations ``y_0, ..., y_{n-1}``.
    z0 : InitPoint or sequence of float, optional
        Starting state. Defaults to the fixed point of the noiseless
        recursion, ``x = omega / (1 - sum(a))`` and ``u = 0``.
    discard : int
        Number of leading terms left out of the average.

    Returns
    -------
    float
        ``mean_{k >= discard} log g(x_k; y_k)``.
    """
    y = np.asarray(y)
    n = y.size
    if not 0 <= discard < n:
        raise ValueError("discard must satisfy 0 <= discard < len(y)")
    params.validate(spec)
    if not in_stability_region(params.a):
        raise NotInvertibleError("not invertible (L-1 fails)")
    x = latent_path(spec, params, y[:-1], z0) if n > 1 else None
    if x is None:
        z = default_state(spec, params) if z0 is None else z0
        if isinstance(z, InitPoint):
            z = z.to_state(spec.p, spec.q)
        x = np.asarray(z, dtype=float)[spec.p - 1 : spec.p]
    ll = log_density(spec, params.phi, x[discard:], y[discard:])
    return float(np.mean(ll))


@dataclass
class FitOptions:
    """
    Settings for :func:`fit_mle`.

    ``fixed`` names parameters held at their start values, using the names
    ``omega``, ``a1``..``ap``, ``b1``..``bq`` and ``phi``. ``restarts``
    reruns the simplex search from the incumbent, which helps it escape
    premature collapse.
    """

    discard: int = DEFAULT_DISCARD
    z0: InitPoint | None = None
    fixed: tuple[str, ...] = ()
    max_iter: int = 4000
    xatol: float = 1e-7
    fatol: float = 1e-10
    initial_step: float = 0.1
    restarts: int = 1


@dataclass
class FitResult:
    theta_hat: LodmParams
    loglik: float
    iterations: int
    converged: bool
    start: LodmParams
    n_eval: int = 0
    message: str = ""
    extra: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "theta_hat": self.theta_hat.to_dict(),
            "loglik": self.loglik,
            "iterations": self.iterations,
            "converged": self.converged,
            "start": self.start.to_dict(),
            "n_eval": self.n_eval,
            "message": self.message,
        }


def _param_names(spec: ModelSpec) -> list[str]:
    names = ["omega"]
    names += [f"a{i + 1}" for i in range(spec.p)]
    names += [f"b{i + 1}" for i in range(spec.q)]
    if spec.family.has_phi:
        names.append("phi")
    return names


def _flatten(spec: ModelSpec, params: LodmParams) -> np.ndarray:
    v = [params.omega, *params.a, *params.b]
    if spec.family.has_phi:
        v.append(params.phi)
    return np.array(v, dtype=float)


def _unflatten(spec: ModelSpec, v: np.ndarray, phi: float | None) -> LodmParams:
    p, q = spec.p, spec.q
    if spec.family.has_phi:
        phi = float(v[1 + p + q])
    return LodmParams(v[0], v[1 : 1 + p], v[1 + p : 1 + p + q], phi)


def _log_mask(spec: ModelSpec) -> np.ndarray:
    """Which coordinates are optimized on the log scale."""
    n = 1 + spec.p + spec.q + int(spec.family.has_phi)
    mask = np.full(n, spec.family.sign_constrained)
    if spec.family.has_phi:
        mask[-1] = True
    return mask


def fit_mle(
    spec: ModelSpec,
    y: Sequence,
    start: LodmParams,
    opts: FitOptions | None = None,
) -> FitResult:
    """
    Maximize the conditional log-likelihood with the Nelder-Mead simplex.

    Positive coordinates (all of them for GARCH and NBIN-GARCH, and the
    negative binomial shape) are searched on the log scale. Proposals
    outside the stability region or leaving the latent domain get an
    objective of minus infinity, so the maximized function is exactly the
    likelihood on the feasible set.
    """
    opts = opts or FitOptions()
    y = np.asarray(y)
    start.validate(spec)
    if not in_stability_region(start.a):
        raise NotInvertibleError("infeasible start: not invertible (L-1 fails)")
    names = _param_names(spec)
    unknown = set(opts.fixed) - set(names)
    if unknown:
        raise ValueError(f"unknown parameter names in fixed: {sorted(unknown)}")
    full = _flatten(spec, start)
    logm = _log_mask(spec)
    free = np.array([nm not in opts.fixed for nm in names])
    if np.any(logm & free & (full <= 0)):
        bad = [nm for nm, m, f, v in zip(names, logm, free, full) if m and f and v <= 0]
        raise DomainError(f"infeasible start: {bad} must be > 0 to be estimated")

    def to_theta(w: np.ndarray) -> np.ndarray:
        v = full.copy()
        fv = np.where(logm[free], np.exp(w), w)
        v[free] = fv
        return v

    w0 = np.where(logm[free], np.log(np.where(logm[free], full[free], 1.0)), full[free])

    def objective(w: np.ndarray) -> float:
        v = to_theta(w)
        if not np.all(np.isfinite(v)):
            return math.inf
        par = _unflatten(spec, v, start.phi)
        if not in_stability_region(par.a):
            return math.inf
        try:
            ll = conditional_loglik(spec, par, y, opts.z0, opts.discard)
        except (DomainError, ValueError, FloatingPointError):
            return math.inf
        return -ll if math.isfinite(ll) else math.inf

    start_ll = -objective(w0)
    if not math.isfinite(start_ll):
        raise DomainError("infeasible start: likelihood is not finite")
    w, f = w0, -start_ll
    iterations, n_eval, converged, message = 0, 0, False, ""
    if w0.size:
        for _ in range(1 + max(opts.restarts, 0)):
            simplex = np.vstack([w] + [w + opts.initial_step * e for e in np.eye(w.size)])
            with np.errstate(all="ignore"):
                res = minimize(
                    objective,
                    w,
                    method="Nelder-Mead",
                    options={
                        "initial_simplex": simplex,
                        "maxiter": opts.max_iter,
                        "maxfev": 4 * opts.max_iter,
                        "xatol": opts.xatol,
                        "fatol": opts.fatol,
                    },
                )
            iterations += int(res.nit)
            n_eval += int(res.nfev)
            converged, message = bool(res.success), str(res.message)
            if res.fun <= f:
                w, f = res.x, float(res.fun)
    theta_hat = _unflatten(spec, to_theta(w), start.phi)
    loglik = conditional_loglik(spec, theta_hat, y, opts.z0, opts.discard)
    return FitResult(
        theta_hat=theta_hat,
        loglik=loglik,
        iterations=iterations,
        converged=converged or not w0.size,
        start=start,
        n_eval=n_eval,
        message=message,
    )


def profile_along_curve(
    spec: ModelSpec,
    y: Sequence,
    curve: EquivCurve,
    d_grid: Sequence[float],
    discard: int = DEFAULT_DISCARD,
    z0: InitPoint | Sequence[float] | None = None,
) -> list[tuple[float, float]]:
    """
    Conditional log-likelihood at ``curve_point(curve, d)`` for each ``d``.

    All points share the same starting state; by default the base point's
    fixed point, which is also the fixed point of every curve point since
    ``omega / (1 - sum(a))`` is constant along the curve.
    """
    if z0 is None:
        z0 = default_state(spec, curve.base)
    points = [curve_point(curve, float(d)) for d in d_grid]
    return [
        (float(d), conditional_loglik(spec, par, y, z0, discard))
        for d, par in zip(d_grid, points)
    ]
