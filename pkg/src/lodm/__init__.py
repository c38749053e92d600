"""Identifiability of linearly observation-driven time series models."""

from lodm.exceptions import DomainError, NoCurveError, NotInvertibleError
from lodm.ident import (
    EquivCurve,
    IdentReport,
    Verdict,
    check_identifiable,
    curve_point,
    equivalent,
    non_ident_curve,
)
from lodm.inference import (
    FitOptions,
    FitResult,
    conditional_loglik,
    fit_mle,
    profile_along_curve,
)
from lodm.invert import (
    InitPoint,
    MomentEstimate,
    geometric_bound,
    iterate_link,
    latent_path,
    latent_reconstruct,
    lipschitz_estimate,
    moment_check,
    truncation_length,
)
from lodm.models import (
    Family,
    LodmParams,
    ModelSpec,
    Trajectory,
    log_density,
    sample_obs,
    simulate,
    upsilon,
)
from lodm.poly import (
    Poly,
    coprime,
    in_stability_region,
    make_P,
    make_Q,
    poly_divide_exact,
    poly_gcd,
    roots,
)
from lodm.statespace import (
    Companion,
    build_companion,
    direct_recursion_oracle,
    geometric_gain,
    impulse_response,
    spectral_radius,
)

__version__ = "0.1.0"
