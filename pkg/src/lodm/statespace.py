"""
Companion-form state space of a linear link of order (p, q).

The state is ``z_k = (x_{k-p+1}, ..., x_k, u_{k-q+1}, ..., u_{k-1})`` of
length ``p + q - 1`` and evolves as ``z_{k+1} = omega_vec + A z_k + b_vec u_k``.
Row ``p`` (1-based) of ``A`` carries ``(a_p, ..., a_1, b_q, ..., b_2)``, the
first ``p - 1`` rows shift the x-block and the last ``q - 1`` rows shift the
u-block. With ``q = 1`` only the top-left ``p x p`` block remains.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from lodm.exceptions import NotInvertibleError
from lodm.poly import in_stability_region

__all__ = [
    "Companion",
    "build_companion",
    "direct_recursion_oracle",
    "geometric_gain",
    "geometric_gain_matrix",
    "impulse_response",
    "spectral_radius",
]


def _frozen(x) -> np.ndarray:
    arr = np.array(x, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Companion:
    p: int
    q: int
    A: np.ndarray
    b_vec: np.ndarray
    omega_vec: np.ndarray
    a: np.ndarray
    b: np.ndarray
    omega: float

    @property
    def dim(self) -> int:
        return self.p + self.q - 1

    @property
    def selector(self) -> np.ndarray:
        """Canonical vector picking the current latent value x_k."""
        e = np.zeros(self.dim)
        e[self.p - 1] = 1.0
        return e


def build_companion(omega: float, a: Sequence[float], b: Sequence[float]) -> Companion:
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    p, q = a.size, b.size
    if p < 1 or q < 1:
        raise ValueError("orders p and q must be >= 1")
    n = p + q - 1
    A = np.zeros((n, n))
    for j in range(p - 1):
        A[j, j + 1] = 1.0
    A[p - 1, :p] = a[::-1]
    if q > 1:
        A[p - 1, p:] = b[:0:-1]
        for j in range(p, n - 1):
            A[j, j + 1] = 1.0
    b_vec = np.zeros(n)
    b_vec[p - 1] = b[0]
    if q > 1:
        b_vec[n - 1] = 1.0
    omega_vec = np.zeros(n)
    omega_vec[p - 1] = omega
    return Companion(
        p=p,
        q=q,
        A=_frozen(A),
        b_vec=_frozen(b_vec),
        omega_vec=_frozen(omega_vec),
        a=_frozen(a),
        b=_frozen(b),
        omega=float(omega),
    )


def impulse_response(comp: Companion, K: int) -> np.ndarray:
    """
    Impulse response ``h_k = e_p^T A^k b_vec`` for ``k = 0, ..., K``.

    Computed by repeated matrix-vector products.
    """
    if K < 0:
        raise ValueError("K must be >= 0")
    h = np.empty(K + 1)
    v = np.array(comp.b_vec)
    idx = comp.p - 1
    for k in range(K + 1):
        h[k] = v[idx]
        v = comp.A @ v
    return h


def geometric_gain(a: Sequence[float]) -> float:
    """
    Sum of ``e_p^T A^k e_p`` over ``k >= 0``, i.e. ``1 / (1 - sum(a))``.

    Raises
    ------
    NotInvertibleError
        If ``a`` is outside the stability region, where the series diverges.
    """
    a = np.asarray(a, dtype=float).ravel()
    if not in_stability_region(a):
        raise NotInvertibleError("gain undefined outside stability region")
    return 1.0 / (1.0 - float(np.sum(a)))


def geometric_gain_matrix(a: Sequence[float]) -> float:
    """Same quantity as :func:`geometric_gain`, via ``(I - A_p)^{-1}``."""
    a = np.asarray(a, dtype=float).ravel()
    if not in_stability_region(a):
        raise NotInvertibleError("gain undefined outside stability region")
    p = a.size
    Ap = build_companion(0.0, a, [0.0]).A
    e = np.zeros(p)
    e[-1] = 1.0
    return float(e @ np.linalg.solve(np.eye(p) - Ap, e))


def direct_recursion_oracle(
    a: Sequence[float],
    b: Sequence[float],
    y: Sequence[float],
    z0: Sequence[float] | None,
    K: int,
) -> np.ndarray:
    """
    Brute-force scalar recursion ``x_t = sum a_k x_{t-k} + sum b_k y_{t+1-k}``.

    Parameters
    ----------
    a, b : sequence of float
        Coefficients of orders ``p`` and ``q``.
    y : sequence of float
        Inputs ``y_0, y_1, ...``; at least ``K`` values are needed.
    z0 : sequence of float or None
        Pre-sample values in companion layout,
        ``(x_{-p}, ..., x_{-1}, y_{-q+1}, ..., y_{-1})``. ``None`` means zeros.
    K : int
        Number of steps.

    Returns
    -------
    ndarray
        ``x_0, ..., x_{K-1}``. With an impulse input and zero ``z0`` this is
        ``h_0, ..., h_{K-1}``.
    """
    a = [float(v) for v in np.ravel(a)]
    b = [float(v) for v in np.ravel(b)]
    p, q = len(a), len(b)
    if K < 1:
        raise ValueError("K must be >= 1")
    if len(y) < K:
        raise ValueError(f"need at least {K} inputs, got {len(y)}")
    if z0 is None:
        z0 = [0.0] * (p + q - 1)
    z0 = [float(v) for v in z0]
    if len(z0) != p + q - 1:
        raise ValueError("z0 must have length p + q - 1")
    xs = z0[:p]
    ys = z0[p:] + [0.0]
    out = np.empty(K)
    for t in range(K):
        ys[-1] = float(y[t])
        x = 0.0
        for k in range(1, p + 1):
            x += a[k - 1] * xs[-k]
        for k in range(1, q + 1):
            x += b[k - 1] * ys[-k]
        out[t] = x
        xs = xs[1:] + [x]
        ys = ys[1:] + [0.0]
    return out


def spectral_radius(comp: Companion) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(comp.A))))
