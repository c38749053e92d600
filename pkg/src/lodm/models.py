"""
Linearly observation-driven model families and path simulation.

Three families share the affine link
``x_{k+1} = omega + sum_i a_i x_{k+1-i} + sum_i b_i Upsilon(y_{k+1-i})``
and differ in their observation kernel and admissible mapping ``Upsilon``:

=================  =====================  ==============  ==================
family             kernel given x          Upsilon(y)      latent domain
=================  =====================  ==============  ==================
``garch``          Normal(0, x)           ``y**2``        x > 0
``loglin_poisson`` Poisson(exp(x))        ``log(1+y)``    all reals
``nbin_garch``     NegBin(r, mean r*x)    ``y``           x > 0
=================  =====================  ==============  ==================
"""

from __future__ import annotations

import enum
import math
import warnings
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.special import gammaln

from lodm.exceptions import DomainError
from lodm.poly import in_stability_region
from lodm.statespace import geometric_gain

__all__ = [
    "Family",
    "LodmParams",
    "ModelSpec",
    "StationarityWarning",
    "Trajectory",
    "link_step",
    "log_density",
    "sample_obs",
    "simulate",
    "upsilon",
]

LOG_2PI = math.log(2.0 * math.pi)


class StationarityWarning(UserWarning):
    pass


class Family(str, enum.Enum):
    GARCH = "garch"
    LOGLIN_POISSON = "loglin_poisson"
    NBIN_GARCH = "nbin_garch"

    @property
    def is_count(self) -> bool:
        return self is not Family.GARCH

    @property
    def sign_constrained(self) -> bool:
        return self is not Family.LOGLIN_POISSON

    @property
    def has_phi(self) -> bool:
        return self is Family.NBIN_GARCH


@dataclass(frozen=True)
class ModelSpec:
    family: Family
    p: int
    q: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "family", Family(self.family))
        if self.p < 1 or self.q < 1:
            raise ValueError("orders p and q must be >= 1")

    @property
    def state_dim(self) -> int:
        return self.p + self.q - 1


@dataclass(frozen=True)
class LodmParams:
    """Linear coefficients ``(omega, a, b)`` plus the kernel parameter ``phi``."""

    omega: float
    a: tuple[float, ...]
    b: tuple[float, ...]
    phi: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "omega", float(self.omega))
        object.__setattr__(self, "a", tuple(float(v) for v in np.ravel(self.a)))
        object.__setattr__(self, "b", tuple(float(v) for v in np.ravel(self.b)))
        if self.phi is not None:
            object.__setattr__(self, "phi", float(self.phi))
        if not self.a or not self.b:
            raise ValueError("orders p and q must be >= 1")

    @property
    def p(self) -> int:
        return len(self.a)

    @property
    def q(self) -> int:
        return len(self.b)

    def validate(self, spec: ModelSpec) -> None:
        """Raise if the parameters do not fit ``spec``."""
        if (self.p, self.q) != (spec.p, spec.q):
            raise ValueError(
                f"parameter orders ({self.p}, {self.q}) do not match "
                f"model orders ({spec.p}, {spec.q})"
            )
        fam = spec.family
        if fam.sign_constrained:
            if not self.omega > 0:
                raise DomainError("omega must be > 0 for this family")
            if min(self.a) < 0 or min(self.b) < 0:
                raise DomainError("a and b must be >= 0 for this family")
        if fam.has_phi:
            if self.phi is None or not self.phi > 0:
                raise DomainError("negative binomial shape r must be > 0")

    def to_dict(self) -> dict[str, Any]:
        return {"omega": self.omega, "a": list(self.a), "b": list(self.b), "phi": self.phi}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> LodmParams:
        return cls(d["omega"], d["a"], d["b"], d.get("phi"))


def upsilon(spec: ModelSpec, y):
    """Admissible mapping; accepts scalars or arrays."""
    fam = spec.family
    y = np.asarray(y, dtype=float)
    if fam is Family.GARCH:
        out = y * y
    else:
        if np.any(y < 0) or np.any(y != np.floor(y)):
            raise DomainError("count observations must be nonnegative integers")
        out = np.log1p(y) if fam is Family.LOGLIN_POISSON else y.copy()
    return float(out) if out.ndim == 0 else out


def _check_latent(spec: ModelSpec, x: np.ndarray) -> None:
    if not np.all(np.isfinite(x)):
        raise DomainError("latent value is not finite")
    if spec.family.sign_constrained and np.any(x <= 0):
        raise DomainError("latent value must be > 0 for this family")


def log_density(spec: ModelSpec, phi: float | None, x, y):
    """
    Log of the observation density ``g(x; y)``.

    Vectorized over ``x`` and ``y``. The Poisson and negative binomial
    densities are with respect to the counting measure, the Gaussian one
    with respect to Lebesgue measure.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    _check_latent(spec, x)
    fam = spec.family
    if fam is Family.GARCH:
        out = -0.5 * (LOG_2PI + np.log(x) + y * y / x)
    else:
        if np.any(y < 0) or np.any(y != np.floor(y)):
            raise DomainError("count observations must be nonnegative integers")
        if fam is Family.LOGLIN_POISSON:
            out = x * y - np.exp(x) - gammaln(y + 1.0)
        else:
            if phi is None or not phi > 0:
                raise DomainError("negative binomial shape r must be > 0")
            r = float(phi)
            # y*log(x) vanishes at y = 0 for every x > 0
            out = (
                gammaln(r + y)
                - gammaln(y + 1.0)
                - gammaln(r)
                - (r + y) * np.log1p(x)
                + y * np.log(x)
            )
    return float(out) if out.ndim == 0 else out


def sample_obs(spec: ModelSpec, phi: float | None, x: float, rng: np.random.Generator):
    """Draw one observation from the kernel at latent value ``x``."""
    fam = spec.family
    if fam is Family.GARCH:
        if not x > 0:
            raise DomainError("variance must be > 0")
        return float(rng.normal(0.0, math.sqrt(x)))
    if fam is Family.LOGLIN_POISSON:
        # numpy's Poisson sampler rejects intensities above about 9e18
        if not math.isfinite(x) or x > 43.0:
            raise DomainError("log intensity is not finite or too large to sample")
        return int(rng.poisson(math.exp(x)))
    if not x > 0:
        raise DomainError("negative binomial mean scale must be > 0")
    if phi is None or not phi > 0:
        raise DomainError("negative binomial shape r must be > 0")
    # Gamma-Poisson mixture: mean r * x
    return int(rng.poisson(rng.gamma(phi, x)))


def link_step(
    omega: float,
    a: Sequence[float],
    b: Sequence[float],
    xs: Sequence[float],
    us: Sequence[float],
) -> float:
    """
    One application of the reduced link.

    ``xs`` and ``us`` hold the most recent values last:
    ``xs[-i]`` pairs with ``a[i-1]`` and ``us[-i]`` with ``b[i-1]``. Every
    caller that must reproduce a stored latent path exactly goes through
    this function so the floating-point evaluation order is identical.
    """
    x = omega
    for i in range(1, len(a) + 1):
        x += a[i - 1] * xs[-i]
    for i in range(1, len(b) + 1):
        x += b[i - 1] * us[-i]
    return x


def default_state(spec: ModelSpec, params: LodmParams) -> np.ndarray:
    """Fixed point of the noiseless recursion: x = omega * gain, u = 0."""
    try:
        x0 = params.omega * geometric_gain(params.a)
    except ValueError:
        x0 = params.omega
    if spec.family.sign_constrained and not x0 > 0:
        x0 = params.omega
    z = np.zeros(spec.state_dim)
    z[: spec.p] = x0
    return z


@dataclass(frozen=True, eq=False)
class Trajectory:
    """
    Simulated path.

    ``x[k]`` is the latent value under which ``y[k]`` was drawn and
    ``state0`` is the full state ``(x_{-p+1}, ..., x_0, u_{-q+1}, ..., u_{-1})``
    just before ``y[0]``, so the link applied to ``state0`` and ``y[:k]``
    reproduces ``x[k]``.
    """

    y: np.ndarray
    x: np.ndarray | None
    state0: np.ndarray
    meta: dict[str, Any] = field(default_factory=dict)

    def __len__(self) -> int:
        return self.y.size


def _check_stationarity(spec: ModelSpec, params: LodmParams) -> None:
    if not in_stability_region(params.a):
        warnings.warn(
            "autoregressive coefficients outside the stability region; "
            "the simulated path is not stationary",
            StationarityWarning,
            stacklevel=3,
        )
    elif spec.family.sign_constrained and sum(params.a) + sum(params.b) >= 1:
        warnings.warn(
            "sum(a) + sum(b) >= 1; the usual sufficient condition for a "
            "stationary solution fails",
            StationarityWarning,
            stacklevel=3,
        )


def simulate(
    spec: ModelSpec,
    params: LodmParams,
    n: int,
    burn_in: int = 1000,
    seed: int = 0,
    init: Sequence[float] | None = None,
) -> Trajectory:
    """
    Simulate ``n`` observations after discarding ``burn_in`` steps.

    Parameters
    ----------
    spec : ModelSpec
    params : LodmParams
    n : int
        Number of retained observations.
    burn_in : int
        Number of discarded leading steps.
    seed : int
        Seed for :func:`numpy.random.default_rng`.
    init : sequence of float, optional
        Starting state of length ``p + q - 1``. Defaults to the fixed point
        of the noiseless recursion.

    Returns
    -------
    Trajectory
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if burn_in < 0:
        raise ValueError("burn_in must be >= 0")
    params.validate(spec)
    _check_stationarity(spec, params)
    p, q = spec.p, spec.q
    z = default_state(spec, params) if init is None else np.asarray(init, dtype=float)
    if z.shape != (spec.state_dim,):
        raise ValueError(f"init must have length {spec.state_dim}")
    _check_latent(spec, z[:p])

    rng = np.random.default_rng(seed)
    omega, a, b, phi = params.omega, params.a, params.b, params.phi
    xs = [float(v) for v in z[:p]]
    us = [float(v) for v in z[p:]] + [0.0]
    total = burn_in + n
    ys = np.empty(n, dtype=np.int64 if spec.family.is_count else float)
    xout = np.empty(n)
    state0 = None
    ups = _upsilon_scalar(spec.family)
    for k in range(total):
        if k == burn_in:
            state0 = np.array(xs + us[:-1])
        x = xs[-1]
        y = sample_obs(spec, phi, x, rng)
        if k >= burn_in:
            ys[k - burn_in] = y
            xout[k - burn_in] = x
        us[-1] = ups(y)
        x_next = link_step(omega, a, b, xs, us)
        if not math.isfinite(x_next) or (spec.family.sign_constrained and not x_next > 0):
            raise DomainError(f"latent path left its domain at step {k}")
        xs = xs[1:] + [x_next]
        us = us[1:] + [0.0]
    meta = {
        "family": spec.family.value,
        "p": p,
        "q": q,
        "params": params.to_dict(),
        "seed": seed,
        "burn_in": burn_in,
        "n": n,
    }
    return Trajectory(y=ys, x=xout, state0=state0, meta=meta)


def _upsilon_scalar(fam: Family):
    if fam is Family.GARCH:
        return lambda y: y * y
    if fam is Family.LOGLIN_POISSON:
        # same kernel as the vectorized transform, so paths agree bit for bit
        return lambda y: float(np.log1p(y))
    return float
