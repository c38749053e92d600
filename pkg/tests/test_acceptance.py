"""
Acceptance criteria at their stated tolerances and runtime budgets.

Each test records one ``criterion N: PASS|FAIL`` line, shown in the pytest
terminal summary, and then asserts the same condition.
"""

import time

import numpy as np
import pytest
from scipy import stats

from lodm.ident import Verdict, check_identifiable, curve_point, non_ident_curve
from lodm.inference import conditional_loglik, fit_mle
from lodm.invert import geometric_bound, latent_reconstruct, lipschitz_estimate, moment_check
from lodm.models import LodmParams, ModelSpec, simulate, upsilon
from lodm.poly import in_stability_region, make_P, make_Q
from lodm.statespace import (
    build_companion,
    direct_recursion_oracle,
    geometric_gain,
    impulse_response,
    spectral_radius,
)

from .conftest import draw_stable_ab

pytestmark = pytest.mark.acceptance

GARCH11 = ModelSpec("garch", 1, 1)
POIS22 = ModelSpec("loglin_poisson", 2, 2)
TRUTH = LodmParams(0.1, [0.5], [0.3])
WORKED = LodmParams(0.1, (0.7, -0.1), (0.4, -0.2))


@pytest.fixture
def record(acceptance_log):
    def _record(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        acceptance_log.append(line)
        print(line)
        assert ok, line

    return _record


def test_criterion_1_oracle_equivalence(record):
    rng = np.random.default_rng(1)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        a, b = draw_stable_ab(rng, 4, 4)
        h = impulse_response(build_companion(0.0, a, b), 50)
        y = np.zeros(51)
        y[0] = 1.0
        worst = max(worst, float(np.max(np.abs(h - direct_recursion_oracle(a, b, y, None, 51)))))
    dt = time.perf_counter() - t0
    record(1, worst <= 1e-10 and dt < 5, f"max |h - oracle| = {worst:.2e} (<= 1e-10), {dt:.2f}s (< 5s)")


def winding_zeros(a, m=10_000):
    """Zeros of 1 - sum a_k z^k inside the unit disk, by the argument principle
    on m points of the unit circle."""
    z = np.exp(2j * np.pi * np.arange(m + 1) / m)
    lag = 1 - sum(a[k] * z ** (k + 1) for k in range(len(a)))
    return int(round(np.sum(np.diff(np.unwrap(np.angle(lag)))) / (2 * np.pi)))


def test_criterion_2_stability_region(record):
    rng = np.random.default_rng(2)
    radii = np.sqrt(np.linspace(0, 1, 40))
    angles = np.linspace(0, 2 * np.pi, 250, endpoint=False)
    disk = (radii[:, None] * np.exp(1j * angles)[None, :]).ravel()
    t0 = time.perf_counter()
    stable = unstable = disagree = 0
    while stable < 50 or unstable < 50:
        p = int(rng.integers(1, 5))
        a = rng.uniform(-1.2, 1.2, p)
        verdict = in_stability_region(a)
        if (verdict and stable >= 50) or (not verdict and unstable >= 50):
            continue
        stable += verdict
        unstable += not verdict
        # grid oracle: zero count from the boundary ring, and the minimum
        # modulus over the disk grid, which is small exactly when a zero is inside
        lag = 1 - sum(a[k] * disk ** (k + 1) for k in range(p))
        grid_stable = winding_zeros(a) == 0
        near_zero = float(np.min(np.abs(lag)))
        if grid_stable != verdict or (not verdict and near_zero > 0.5):
            disagree += 1
    dt = time.perf_counter() - t0
    record(2, disagree == 0 and dt < 10,
           f"{disagree} disagreements on 50 stable + 50 unstable draws, {dt:.2f}s (< 10s)")


def test_criterion_3_garch_verdicts(record):
    with_b = check_identifiable(LodmParams(0.1, [0.5], [0.3])).verdict
    without_b = check_identifiable(LodmParams(0.1, [0.5], [0.0])).verdict
    ok = with_b is Verdict.IDENTIFIABLE and without_b is Verdict.NOT_IDENTIFIABLE
    record(3, ok, f"b1=0.3 -> {with_b.value}, b1=0 -> {without_b.value}")


def test_criterion_4_worked_curve(record):
    rng = np.random.default_rng(4)
    t0 = time.perf_counter()
    curve = non_ident_curve(WORKED)
    P0, Q0 = make_P(WORKED.a), make_Q(WORKED.b)
    h0 = impulse_response(build_companion(0.0, WORKED.a, WORKED.b), 200)
    lvl0 = WORKED.omega * geometric_gain(WORKED.a)
    e_poly = e_h = e_lvl = 0.0
    for d in rng.uniform(*curve.d_range, 20):
        pt = curve_point(curve, float(d))
        e_poly = max(e_poly, (Q0 * make_P(pt.a) - P0 * make_Q(pt.b)).scale)
        h = impulse_response(build_companion(0.0, pt.a, pt.b), 200)
        e_h = max(e_h, float(np.max(np.abs(h - h0))))
        e_lvl = max(e_lvl, abs(pt.omega * geometric_gain(pt.a) - lvl0))
    dt = time.perf_counter() - t0
    ok = e_poly <= 1e-12 and e_h <= 1e-10 and e_lvl <= 1e-12 and dt < 1
    record(4, ok, f"identity {e_poly:.1e}, impulse {e_h:.1e}, level {e_lvl:.1e}, {dt:.2f}s (< 1s)")


def test_criterion_5_likelihood_flatness(record):
    t0 = time.perf_counter()
    y = simulate(POIS22, WORKED, 20_000, burn_in=1000, seed=5).y
    curve = non_ident_curve(WORKED)
    vals = [conditional_loglik(POIS22, curve_point(curve, d), y, discard=100) for d in (-0.1, 0.0, 0.1)]
    spread = max(vals) - min(vals)
    dt = time.perf_counter() - t0
    record(5, spread <= 1e-4 and dt < 30, f"spread {spread:.2e} (<= 1e-4), {dt:.2f}s (< 30s)")


def random_far_point(rng, truth_vec):
    while True:
        v = truth_vec + rng.uniform(-0.2, 0.2, 3)
        if np.max(np.abs(v - truth_vec)) < 0.05 or np.any(v <= 0):
            continue
        if in_stability_region(v[1:2]):
            return LodmParams(v[0], v[1:2], v[2:3])


def test_criterion_6_likelihood_discrimination(record):
    rng = np.random.default_rng(6)
    t0 = time.perf_counter()
    y = simulate(GARCH11, TRUTH, 20_000, burn_in=1000, seed=6).y
    ll_true = conditional_loglik(GARCH11, TRUTH, y)
    wins = sum(
        ll_true > conditional_loglik(GARCH11, random_far_point(rng, np.array([0.1, 0.5, 0.3])), y)
        for _ in range(20)
    )
    dt = time.perf_counter() - t0
    record(6, wins >= 19 and dt < 60, f"truth better in {wins}/20 (>= 19), {dt:.2f}s (< 60s)")


def test_criterion_7_qmle_recovery(record):
    t0 = time.perf_counter()
    start = LodmParams(0.2, [0.3], [0.2])
    errors = []
    # seed 7 is the documented single run; seeds 7..16 form the 10-seed check
    for seed in range(7, 17):
        y = simulate(GARCH11, TRUTH, 20_000, burn_in=1000, seed=seed).y
        th = fit_mle(GARCH11, y, start).theta_hat
        errors.append(float(np.max(np.abs(np.r_[th.omega, th.a, th.b] - [0.1, 0.5, 0.3]))))
    passes = sum(e <= 0.1 for e in errors)
    dt = time.perf_counter() - t0
    ok = errors[0] <= 0.1 and passes >= 9 and dt < 120
    record(7, ok, f"seed 7 max error {errors[0]:.3f}, {passes}/10 seeds within 0.1 (>= 9), {dt:.1f}s (< 120s)")


def test_criterion_8_contraction_and_reconstruction(record):
    rng = np.random.default_rng(8)
    t0 = time.perf_counter()
    bound_violations = 0
    for _ in range(200):
        a, b = draw_stable_ab(rng)
        par = LodmParams(0.0, a, b)
        C, rate = geometric_bound(par)
        bound_violations += sum(
            lipschitz_estimate(par, n) > C * rate**n * (1 + 1e-9) for n in range(1, 61)
        )
    # reconstruction over spectral radii up to the 0.8 boundary, two families
    worst = {}
    n = 100
    for fam, omega in (("garch", 0.1), ("loglin_poisson", 0.2)):
        spec = ModelSpec(fam, 1, 1)
        for rho in (0.3, 0.5, 0.7, 0.8):
            par = LodmParams(omega, [rho], [0.1])
            assert spectral_radius(build_companion(omega, [rho], [0.1])) <= 0.8 + 1e-15
            tr = simulate(spec, par, 2000, burn_in=500, seed=8)
            u = upsilon(spec, tr.y)
            err = max(
                abs(latent_reconstruct(par, u[m - n : m + 1]) - tr.x[m + 1])
                for m in range(n + 1, len(tr) - 1, 10)
            )
            worst[(fam, rho)] = err
    dt = time.perf_counter() - t0
    failing = {k: v for k, v in worst.items() if v > 1e-10}
    ok = bound_violations == 0 and not failing and dt < 10
    detail = (
        f"{bound_violations} decay-bound violations; reconstruction worst "
        f"{max(worst.values()):.1e} (<= 1e-10); failing at "
        f"{sorted(failing) or 'none'}; {dt:.2f}s (< 10s)"
    )
    record(8, ok, detail)


def test_criterion_9_moment_check(record):
    t0 = time.perf_counter()
    spec = ModelSpec("loglin_poisson", 1, 1)
    est = moment_check(spec, LodmParams(0.0, [0.0], [0.0]), 10**6, seed=9)
    y = np.arange(201)
    exact = float(np.sum(stats.poisson.pmf(y, 1.0) * np.log(np.maximum(np.log1p(y), 1.0))))
    z = abs(est.mean - exact) / est.stderr
    dt = time.perf_counter() - t0
    record(9, z <= 3 and dt < 10,
           f"estimate {est.mean:.5f} vs exact {exact:.5f}, {z:.2f} standard errors (<= 3), {dt:.2f}s (< 10s)")
