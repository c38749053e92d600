"""
Real polynomials in one complex variable.

Holds the autoregressive polynomial ``P(z) = z**p - sum_k a_k z**(p-k)`` and
the observation polynomial ``Q(z) = sum_k b_{k+1} z**(q-1-k)`` together with
root finding, stability-region membership and a tolerant Euclidean GCD.
Coefficients are stored highest degree first, as in :func:`numpy.polyval`.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DEFAULT_TOL",
    "Poly",
    "coprime",
    "in_stability_region",
    "make_P",
    "make_Q",
    "poly_divide_exact",
    "poly_gcd",
    "roots",
]

DEFAULT_TOL = 1e-9


def _strip(coeffs: np.ndarray, thresh: float = 0.0) -> np.ndarray:
    """Drop leading coefficients with modulus <= thresh; zero maps to [0.0]."""
    nz = np.flatnonzero(np.abs(coeffs) > thresh)
    if nz.size == 0:
        return np.zeros(1)
    return coeffs[nz[0]:].copy()


@dataclass(frozen=True, eq=False)
class Poly:
    """
    Real-coefficient polynomial, highest degree first.

    The constructor normalizes the coefficients: exact leading zeros are
    removed and the zero polynomial is stored as ``[0.0]``.
    """

    coeffs: np.ndarray

    def __post_init__(self) -> None:
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=float))
        if c.ndim != 1:
            raise ValueError("coefficients must be one-dimensional")
        c = _strip(c)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    @property
    def is_zero(self) -> bool:
        return self.coeffs.size == 1 and self.coeffs[0] == 0.0

    @property
    def scale(self) -> float:
        """Max-norm of the coefficients."""
        return float(np.max(np.abs(self.coeffs)))

    def __call__(self, z):
        # Horner
        z = np.asarray(z, dtype=complex if np.iscomplexobj(z) else float)
        out = np.zeros_like(z) + self.coeffs[0]
        for c in self.coeffs[1:]:
            out = out * z + c
        return out

    def monic(self) -> Poly:
        if self.is_zero:
            raise ValueError("zero polynomial has no monic form")
        return Poly(self.coeffs / self.coeffs[0])

    def __add__(self, other: Poly) -> Poly:
        return Poly(np.polyadd(self.coeffs, _as_poly(other).coeffs))

    def __sub__(self, other: Poly) -> Poly:
        return Poly(np.polysub(self.coeffs, _as_poly(other).coeffs))

    def __mul__(self, other) -> Poly:
        if np.isscalar(other):
            return Poly(self.coeffs * float(other))
        return Poly(np.convolve(self.coeffs, _as_poly(other).coeffs))

    __rmul__ = __mul__

    def __neg__(self) -> Poly:
        return Poly(-self.coeffs)

    def allclose(self, other: Poly, atol: float = 1e-12) -> bool:
        diff = (self - other).coeffs
        return bool(np.max(np.abs(diff)) <= atol)

    def __repr__(self) -> str:
        return f"Poly({self.coeffs.tolist()})"


def _as_poly(x) -> Poly:
    return x if isinstance(x, Poly) else Poly(x)


def make_P(a: Sequence[float]) -> Poly:
    """
    Monic autoregressive polynomial ``z**p - sum_{k=1}^p a_k z**(p-k)``.

    Parameters
    ----------
    a : sequence of float
        Autoregressive coefficients ``a_1, ..., a_p``.

    Returns
    -------
    Poly
        Polynomial of degree ``p`` with coefficients ``[1, -a_1, ..., -a_p]``.
    """
    a = np.asarray(a, dtype=float).ravel()
    if a.size == 0:
        raise ValueError("order must be >= 1")
    return Poly(np.concatenate(([1.0], -a)))


def make_Q(b: Sequence[float]) -> Poly:
    """Observation polynomial ``sum_{k=0}^{q-1} b_{k+1} z**(q-1-k)``."""
    b = np.asarray(b, dtype=float).ravel()
    if b.size == 0:
        raise ValueError("order must be >= 1")
    return Poly(b)


def companion_matrix(poly: Poly) -> np.ndarray:
    """Frobenius companion matrix of the monic version of ``poly``."""
    c = poly.monic().coeffs
    n = c.size - 1
    m = np.zeros((n, n))
    m[0, :] = -c[1:]
    if n > 1:
        m[1:, :-1] = np.eye(n - 1)
    return m


def roots(poly: Poly) -> np.ndarray:
    """
    All complex roots, with multiplicity, as companion-matrix eigenvalues.

    Roots are ordered by decreasing modulus, ties broken by argument, so the
    output is deterministic for a given input.
    """
    poly = _as_poly(poly)
    if poly.is_zero or poly.degree < 1:
        raise ValueError("no roots defined for a constant polynomial")
    r = np.linalg.eigvals(companion_matrix(poly)).astype(complex)
    order = np.lexsort((np.angle(r), -np.abs(r)))
    return r[order]


def in_stability_region(a: Sequence[float], margin: float = 0.0) -> bool:
    """
    True when every root of ``make_P(a)`` has modulus below ``1 - margin``.

    This is the same as ``1 - sum_k a_k z**k`` having no zero in the closed
    unit disk, since its zeros are the reciprocals of the roots of ``P``.
    """
    r = roots(make_P(a))
    return bool(np.max(np.abs(r)) < 1.0 - margin)


def _rem(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    _, r = np.polydiv(num, den)
    return r


def poly_gcd(P: Poly, Q: Poly, tol: float = DEFAULT_TOL) -> Poly:
    """
    Monic numerical greatest common divisor by the Euclidean algorithm.

    A remainder is treated as zero once its max-norm falls below ``tol``
    times the max-norm of the corresponding dividend; leading coefficients
    below that threshold are dropped as well. The relative threshold makes
    the result invariant to rescaling either argument.

    Parameters
    ----------
    P, Q : Poly
        Polynomials; ``P`` must not be identically zero.
    tol : float
        Relative tolerance.

    Returns
    -------
    Poly
        Monic divisor. Degree zero (the constant 1) means coprime. When ``Q``
        is the zero polynomial the monic form of ``P`` is returned.
    """
    P, Q = _as_poly(P), _as_poly(Q)
    if P.is_zero:
        if Q.is_zero:
            raise ValueError("gcd of two zero polynomials is undefined")
        raise ValueError("P must not be identically zero")
    if Q.is_zero:
        return P.monic()
    # unit max-norm inputs; leading coefficients negligible against their
    # own polynomial are dropped
    a = _strip(P.coeffs / P.scale, tol)
    b = _strip(Q.coeffs / Q.scale, tol)
    if b.size > a.size:
        a, b = b, a
    while b.size > 1:
        thresh = tol * float(np.max(np.abs(a)))
        r = _strip(_rem(a, b), thresh)
        if r.size == 1 and abs(r[0]) <= thresh:
            break
        a, b = b, r
    g = Poly(b).monic()
    if g.degree == 0:
        return Poly([1.0])
    return g


def coprime(P: Poly, Q: Poly, tol: float = DEFAULT_TOL) -> bool:
    """True when ``P`` and ``Q`` share no root up to ``tol``."""
    return poly_gcd(P, Q, tol).degree == 0


def poly_divide_exact(P: Poly, U: Poly, tol: float = DEFAULT_TOL) -> Poly:
    """
    Quotient ``P / U`` for a divisor ``U`` of ``P``.

    Raises
    ------
    ValueError
        If the remainder exceeds ``tol`` times the coefficient scale of ``P``.
    """
    P, U = _as_poly(P), _as_poly(U)
    if U.is_zero:
        raise ZeroDivisionError("division by the zero polynomial")
    if P.is_zero:
        return Poly([0.0])
    q, r = np.polydiv(P.coeffs, U.coeffs)
    if np.max(np.abs(r)) > tol * P.scale:
        raise ValueError("not divisible")
    return Poly(q)
