"""
Identifiability of the linear part of an LODM.

The linear coefficients are identifiable exactly when the autoregressive
coefficients are in the stability region and ``P(z; a)`` and ``Q(z; b)``
share no root. When they do share a factor ``U``, writing ``P = C U`` and
``Q = D U`` gives the polynomial identity ``Q (P + d C) = P (Q + d D)`` for
every real ``d``, hence a line of coefficient vectors with the same impulse
response. Adjusting ``omega`` to keep ``omega / (1 - sum(a))`` fixed turns
that line into a curve of observationally equivalent parameters.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from lodm.exceptions import NoCurveError, NotInvertibleError
from lodm.models import LodmParams, ModelSpec
from lodm.poly import (
    DEFAULT_TOL,
    Poly,
    in_stability_region,
    make_P,
    make_Q,
    poly_divide_exact,
    poly_gcd,
    roots,
)
from lodm.statespace import build_companion, geometric_gain, impulse_response

__all__ = [
    "EquivCurve",
    "IdentReport",
    "Verdict",
    "check_identifiable",
    "curve_point",
    "equivalent",
    "non_ident_curve",
]

STABILITY_MARGIN = 1e-3


class Verdict(str, enum.Enum):
    IDENTIFIABLE = "Identifiable"
    NOT_IDENTIFIABLE = "NotIdentifiable"
    INVERTIBILITY_FAILS = "InvertibilityFails"


def _complex_list(z) -> list[list[float]]:
    return [[float(np.real(v)), float(np.imag(v))] for v in z]


@dataclass(frozen=True)
class IdentReport:
    invertible: bool
    coprime: bool
    common_roots: tuple[complex, ...]
    verdict: Verdict

    def to_dict(self) -> dict[str, Any]:
        return {
            "invertible": self.invertible,
            "coprime": self.coprime,
            "common_roots": _complex_list(self.common_roots),
            "verdict": self.verdict.value,
        }


def check_identifiable(params: LodmParams, tol: float = DEFAULT_TOL) -> IdentReport:
    invertible = in_stability_region(params.a)
    g = poly_gcd(make_P(params.a), make_Q(params.b), tol)
    is_coprime = g.degree == 0
    common = () if is_coprime else tuple(complex(r) for r in roots(g))
    if not invertible:
        verdict = Verdict.INVERTIBILITY_FAILS
    elif is_coprime:
        verdict = Verdict.IDENTIFIABLE
    else:
        verdict = Verdict.NOT_IDENTIFIABLE
    return IdentReport(invertible, is_coprime, common, verdict)


def equivalent(
    p1: LodmParams, p2: LodmParams, K: int = 200, tol: float = DEFAULT_TOL
) -> bool:
    """
    Observational equivalence of the linear parts, tested to horizon ``K``.

    Two parameters are equivalent when they have the same ``b_1``, the same
    impulse response ``h_0, ..., h_K`` and the same stationary level
    ``omega / (1 - sum(a))``, all within ``tol``.
    """
    for par in (p1, p2):
        if not in_stability_region(par.a):
            raise NotInvertibleError("not invertible (L-1 fails)")
    if abs(p1.b[0] - p2.b[0]) > tol:
        return False
    h1 = impulse_response(build_companion(p1.omega, p1.a, p1.b), K)
    h2 = impulse_response(build_companion(p2.omega, p2.a, p2.b), K)
    if np.max(np.abs(h1 - h2)) > tol:
        return False
    lvl1 = p1.omega * geometric_gain(p1.a)
    lvl2 = p2.omega * geometric_gain(p2.a)
    return abs(lvl1 - lvl2) <= tol


@dataclass(frozen=True, eq=False)
class EquivCurve:
    """
    Line ``a(d) = base.a + d * dir_a``, ``b_{2:q}(d) = base.b[1:] + d * dir_b``.

    ``b_1`` and ``phi`` stay at their base values and ``omega(d)`` is derived
    from ``a(d)``; see :func:`curve_point`. ``interior`` is False when the
    base sits on the boundary of the sign constraints, in which case the
    curve may only extend to one side of ``d = 0``.
    """

    base: LodmParams
    dir_a: tuple[float, ...]
    dir_b: tuple[float, ...]
    d_range: tuple[float, float]
    gcd: Poly
    C: Poly
    D: Poly
    interior: bool = True
    sign_constrained: bool = False
    common_roots: tuple[complex, ...] = field(default=())

    def to_dict(self) -> dict[str, Any]:
        return {
            "base": self.base.to_dict(),
            "dir_a": list(self.dir_a),
            "dir_b": list(self.dir_b),
            "d_range": list(self.d_range),
            "gcd": self.gcd.coeffs.tolist(),
            "C": self.C.coeffs.tolist(),
            "D": self.D.coeffs.tolist(),
            "interior": self.interior,
            "sign_constrained": self.sign_constrained,
            "common_roots": _complex_list(self.common_roots),
        }


def _pad_left(c: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros(n)
    if n:
        out[n - c.size:] = c
    return out


def _max_root_modulus(a: np.ndarray) -> float:
    return float(np.max(np.abs(roots(make_P(a)))))


def _stable_edge(a0: np.ndarray, da: np.ndarray, sign: float, limit: float) -> float:
    """Distance from d = 0 to the first loss of stability along ``sign``."""

    def ok(d: float) -> bool:
        return _max_root_modulus(a0 + sign * d * da) < limit

    step, d = 1e-2, 0.0
    while ok(d + step):
        d += step
        if d > 2.0:
            step *= 1.5
        if d > 1e8:
            return float("inf")
    lo, hi = d, d + step
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo


def _linear_bounds(c0: np.ndarray, c1: np.ndarray) -> tuple[float, float]:
    """Interval of d with ``c0 + d * c1 >= 0`` componentwise."""
    lo, hi = -np.inf, np.inf
    for v0, v1 in zip(c0, c1):
        if v1 > 0:
            lo = max(lo, -v0 / v1)
        elif v1 < 0:
            hi = min(hi, -v0 / v1)
        elif v0 < 0:
            return 0.0, 0.0
    return float(lo), float(hi)


def non_ident_curve(
    params: LodmParams,
    tol: float = DEFAULT_TOL,
    spec: ModelSpec | None = None,
) -> EquivCurve:
    """
    Curve of parameters equivalent to ``params`` when the coprimality fails.

    Parameters
    ----------
    params : LodmParams
        Base point; its ``a`` must be in the stability region and
        ``P(.; a)``, ``Q(.; b)`` must share a root.
    tol : float
        GCD tolerance.
    spec : ModelSpec, optional
        When given and the family is sign-constrained, the admissible range
        of ``d`` also keeps ``a``, ``b`` >= 0 and ``omega`` > 0.

    Returns
    -------
    EquivCurve

    Raises
    ------
    NoCurveError
        If ``P`` and ``Q`` are coprime.
    NotInvertibleError
        If ``a`` is outside the stability region.
    """
    report = check_identifiable(params, tol)
    if not report.invertible:
        raise NotInvertibleError("not invertible (L-1 fails)")
    if report.coprime:
        raise NoCurveError("no curve exists (L-2 holds)")
    p, q = params.p, params.q
    P, Q = make_P(params.a), make_Q(params.b)
    U = poly_gcd(P, Q, tol)
    C = poly_divide_exact(P, U, tol)
    D = Poly([0.0]) if Q.is_zero else poly_divide_exact(Q, U, tol)
    # P_d = P + d C has z^{p-k} coefficient -a_k(d)
    dir_a = -_pad_left(C.coeffs, p)
    # Q_d = Q + d D has z^{q-1-k} coefficient b_{k+1}(d); deg D <= q - 2
    dir_b = _pad_left(D.coeffs, q)[1:] if q > 1 else np.zeros(0)

    a0 = np.asarray(params.a)
    rho0 = _max_root_modulus(a0)
    margin = min(STABILITY_MARGIN, 0.5 * (1.0 - rho0))
    limit = 1.0 - margin
    lo = -_stable_edge(a0, dir_a, -1.0, limit)
    hi = _stable_edge(a0, dir_a, 1.0, limit)

    constrained = spec is not None and spec.family.sign_constrained
    interior = True
    if constrained:
        b_tail = np.asarray(params.b[1:])
        c0 = np.concatenate((a0, b_tail))
        c1 = np.concatenate((dir_a, dir_b))
        s_lo, s_hi = _linear_bounds(c0, c1)
        lo, hi = max(lo, s_lo), min(hi, s_hi)
        # b_1 is fixed along the curve but still bounds the neighborhood
        interior = bool(params.omega > 0 and np.all(c0 > 0) and params.b[0] > 0)
    return EquivCurve(
        base=params,
        dir_a=tuple(float(v) for v in dir_a),
        dir_b=tuple(float(v) for v in dir_b),
        d_range=(float(lo), float(hi)),
        gcd=U,
        C=C,
        D=D,
        interior=interior,
        sign_constrained=constrained,
        common_roots=report.common_roots,
    )


def curve_point(curve: EquivCurve, d: float) -> LodmParams:
    """
    Parameter at position ``d`` on the curve.

    ``omega(d) = omega* gain(a*) / gain(a(d))`` with ``gain(a) = 1 / (1 - sum(a))``
    keeps the stationary level of the latent process unchanged.
    """
    lo, hi = curve.d_range
    if not lo <= d <= hi:
        raise ValueError(f"d={d} outside the valid range [{lo:.6g}, {hi:.6g}]")
    base = curve.base
    if d == 0:
        return base
    a = np.asarray(base.a) + d * np.asarray(curve.dir_a)
    b_tail = np.asarray(base.b[1:]) + d * np.asarray(curve.dir_b)
    if curve.sign_constrained:
        # rounding at the boundary of the sign constraints
        a = np.where((a < 0) & (a > -1e-14), 0.0, a)
        b_tail = np.where((b_tail < 0) & (b_tail > -1e-14), 0.0, b_tail)
    omega = base.omega * geometric_gain(base.a) / geometric_gain(a)
    return LodmParams(omega, a, (base.b[0], *b_tail), base.phi)
