"""
Command-line interface.

Every subcommand reads a JSON run configuration (``--config``) whose fields
may be overridden by flags. Exit codes: 0 success or identifiable, 1 runtime
or domain error, 2 configuration error, 3 not identifiable / no curve,
4 invertibility failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any

import numpy as np

from lodm.exceptions import DomainError, NoCurveError, NotInvertibleError
from lodm.ident import Verdict, check_identifiable, curve_point, non_ident_curve
from lodm.inference import DEFAULT_DISCARD, FitOptions, fit_mle, profile_along_curve
from lodm.invert import latent_path
from lodm.models import (
    Family,
    LodmParams,
    ModelSpec,
    StationarityWarning,
    default_state,
    simulate,
)
from lodm.poly import DEFAULT_TOL, in_stability_region
from lodm.statespace import build_companion, impulse_response

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2
EXIT_NOT_IDENTIFIABLE = 3
EXIT_NOT_INVERTIBLE = 4

FAMILY_ALIASES = {
    "garch": Family.GARCH,
    "garchgaussian": Family.GARCH,
    "loglin_poisson": Family.LOGLIN_POISSON,
    "loglinpoisson": Family.LOGLIN_POISSON,
    "nbin_garch": Family.NBIN_GARCH,
    "nbingarch": Family.NBIN_GARCH,
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    family: str
    p: int
    q: int
    omega: float
    a: list[float]
    b: list[float]
    phi: float | None = None
    seed: int = 0
    n: int = 1000
    burn_in: int = 1000
    tol: float = DEFAULT_TOL

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> RunConfig:
        missing = [k for k in ("family", "omega", "a", "b") if k not in d]
        if missing:
            raise ConfigError(f"missing config fields: {', '.join(missing)}")
        try:
            a = [float(v) for v in np.ravel(d["a"])]
            b = [float(v) for v in np.ravel(d["b"])]
            cfg = cls(
                family=str(d["family"]),
                p=int(d.get("p", len(a))),
                q=int(d.get("q", len(b))),
                omega=float(d["omega"]),
                a=a,
                b=b,
                phi=None if d.get("phi") is None else float(d["phi"]),
                seed=int(d.get("seed", 0)),
                n=int(d.get("n", 1000)),
                burn_in=int(d.get("burn_in", 1000)),
                tol=float(d.get("tol", DEFAULT_TOL)),
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid config value: {exc}") from exc
        cfg.check()
        return cfg

    def check(self) -> None:
        if self.family.lower() not in FAMILY_ALIASES:
            raise ConfigError(
                f"unknown family {self.family!r}; expected one of "
                "garch, loglin_poisson, nbin_garch"
            )
        if self.p < 1 or self.q < 1:
            raise ConfigError("p and q must be >= 1")
        if len(self.a) != self.p:
            raise ConfigError(f"a has length {len(self.a)}, expected p={self.p}")
        if len(self.b) != self.q:
            raise ConfigError(f"b has length {len(self.b)}, expected q={self.q}")
        if self.n < 1:
            raise ConfigError("n must be >= 1")
        if self.burn_in < 0:
            raise ConfigError("burn_in must be >= 0")
        if not self.tol > 0:
            raise ConfigError("tol must be > 0")
        if self.spec.family.has_phi and self.phi is None:
            raise ConfigError("nbin_garch requires phi (negative binomial shape r)")

    @property
    def spec(self) -> ModelSpec:
        return ModelSpec(FAMILY_ALIASES[self.family.lower()], self.p, self.q)

    @property
    def params(self) -> LodmParams:
        return LodmParams(self.omega, self.a, self.b, self.phi)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def _num(v: float) -> str:
    """Deterministic text form of a number for CSV output."""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _write_text(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _sidecar(out: str) -> Path:
    return Path(out).with_suffix(".json")


def _csv_text(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_num(v) for v in row])
    return buf.getvalue()


def _read_observations(path: str) -> np.ndarray:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "y" not in reader.fieldnames:
            raise ConfigError(f"{path}: expected a CSV with a 'y' column")
        ys = [float(row["y"]) for row in reader]
    if not ys:
        raise ConfigError(f"{path}: no observations")
    return np.asarray(ys)


def load_config(args: argparse.Namespace) -> RunConfig:
    data: dict[str, Any] = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
    overrides = {
        "family": args.family,
        "omega": args.omega,
        "a": args.a,
        "b": args.b,
        "phi": args.phi,
        "seed": args.seed,
        "n": args.n,
        "burn_in": args.burn_in,
        "tol": args.tol,
    }
    for key, val in overrides.items():
        if val is not None:
            data[key] = val
    if args.a is not None:
        data.pop("p", None)
    if args.b is not None:
        data.pop("q", None)
    return RunConfig.from_dict(data)


def cmd_simulate(cfg: RunConfig, args: argparse.Namespace) -> int:
    spec, params = cfg.spec, cfg.params
    if not in_stability_region(params.a) and not args.force:
        print(
            "error: autoregressive coefficients outside the stability region; "
            "the path is not stationary (pass --force to simulate anyway)",
            file=sys.stderr,
        )
        return EXIT_RUNTIME
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", StationarityWarning)
        traj = simulate(spec, params, cfg.n, cfg.burn_in, cfg.seed)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    rows = zip(range(len(traj)), traj.y.tolist(), traj.x.tolist())
    _write_text(_csv_text(["k", "y", "x"], rows), args.out)
    if args.out and args.out != "-":
        meta = dict(traj.meta)
        meta["state0"] = traj.state0.tolist()
        _sidecar(args.out).write_text(_dumps(meta))
    return EXIT_OK


def cmd_check(cfg: RunConfig, args: argparse.Namespace) -> int:
    report = check_identifiable(cfg.params, cfg.tol)
    _write_text(_dumps(report.to_dict()), args.out)
    return {
        Verdict.IDENTIFIABLE: EXIT_OK,
        Verdict.NOT_IDENTIFIABLE: EXIT_NOT_IDENTIFIABLE,
        Verdict.INVERTIBILITY_FAILS: EXIT_NOT_INVERTIBLE,
    }[report.verdict]


def cmd_curve(cfg: RunConfig, args: argparse.Namespace) -> int:
    try:
        curve = non_ident_curve(cfg.params, cfg.tol, cfg.spec)
    except NoCurveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_IDENTIFIABLE
    d_values = args.d if args.d is not None else [0.0]
    lo, hi = curve.d_range
    bad = [d for d in d_values if not lo <= d <= hi]
    if bad:
        print(
            f"error: d values {bad} outside the valid range [{lo!r}, {hi!r}]",
            file=sys.stderr,
        )
        return EXIT_RUNTIME
    header = ["d", "omega"]
    header += [f"a{i + 1}" for i in range(cfg.p)]
    header += [f"b{i + 1}" for i in range(cfg.q)]
    rows = []
    for d in d_values:
        par = curve_point(curve, d)
        rows.append([d, par.omega, *par.a, *par.b])
    _write_text(_csv_text(header, rows), args.out)
    if args.out and args.out != "-":
        _sidecar(args.out).write_text(_dumps(curve.to_dict()))
    return EXIT_OK


def cmd_impulse(cfg: RunConfig, args: argparse.Namespace) -> int:
    if args.K < 0:
        raise ConfigError("K must be >= 0")
    h = impulse_response(build_companion(cfg.omega, cfg.a, cfg.b), args.K)
    _write_text(_csv_text(["k", "h"], zip(range(args.K + 1), h.tolist())), args.out)
    return EXIT_OK


def _require_data(args: argparse.Namespace) -> np.ndarray:
    if not args.data:
        raise ConfigError("--data PATH is required for this command")
    return _read_observations(args.data)


def cmd_reconstruct(cfg: RunConfig, args: argparse.Namespace) -> int:
    y = _require_data(args)
    spec = cfg.spec
    if spec.family.is_count:
        y = y.astype(np.int64)
    x = latent_path(spec, cfg.params, y[:-1]) if y.size > 1 else None
    if x is None:
        x = default_state(spec, cfg.params)[spec.p - 1 : spec.p]
    rows = zip(range(y.size), y.tolist(), x.tolist())
    _write_text(_csv_text(["k", "y", "x"], rows), args.out)
    return EXIT_OK


def cmd_fit(cfg: RunConfig, args: argparse.Namespace) -> int:
    y = _require_data(args)
    if cfg.spec.family.is_count:
        y = y.astype(np.int64)
    opts = FitOptions(discard=args.discard, fixed=tuple(args.fix or ()))
    res = fit_mle(cfg.spec, y, cfg.params, opts)
    _write_text(_dumps(res.to_dict()), args.out)
    return EXIT_OK


def cmd_profile(cfg: RunConfig, args: argparse.Namespace) -> int:
    y = _require_data(args)
    if cfg.spec.family.is_count:
        y = y.astype(np.int64)
    try:
        curve = non_ident_curve(cfg.params, cfg.tol, cfg.spec)
    except NoCurveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_IDENTIFIABLE
    d_values = args.d if args.d is not None else [0.0]
    lo, hi = curve.d_range
    bad = [d for d in d_values if not lo <= d <= hi]
    if bad:
        print(
            f"error: d values {bad} outside the valid range [{lo!r}, {hi!r}]",
            file=sys.stderr,
        )
        return EXIT_RUNTIME
    prof = profile_along_curve(cfg.spec, y, curve, d_values, args.discard)
    _write_text(_csv_text(["d", "loglik"], prof), args.out)
    return EXIT_OK


COMMANDS = {
    "simulate": (cmd_simulate, "simulate a trajectory (CSV k,y,x + JSON sidecar)"),
    "check": (cmd_check, "decide identifiability; verdict in JSON and exit code"),
    "curve": (cmd_curve, "points on the curve of equivalent parameters"),
    "impulse": (cmd_impulse, "impulse response h_0..h_K (CSV k,h)"),
    "reconstruct": (cmd_reconstruct, "filtered latent path from observations"),
    "fit": (cmd_fit, "maximum conditional likelihood fit (FitResult JSON)"),
    "profile": (cmd_profile, "conditional log-likelihood along the curve (CSV d,loglik)"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON run configuration")
    common.add_argument("--out", metavar="PATH", help="output file (default stdout)")
    common.add_argument("--seed", type=int)
    common.add_argument("--n", type=int)
    common.add_argument("--burn-in", dest="burn_in", type=int)
    common.add_argument("--tol", type=float)
    common.add_argument("--discard", type=int, default=DEFAULT_DISCARD)
    common.add_argument("--force", action="store_true", help="simulate outside the stability region")
    common.add_argument("--family")
    common.add_argument("--omega", type=float)
    common.add_argument("--a", type=float, nargs="+")
    common.add_argument("--b", type=float, nargs="+")
    common.add_argument("--phi", type=float)
    common.add_argument("--d", type=float, nargs="+", help="curve positions")
    common.add_argument("--K", type=int, default=50, help="impulse response horizon")
    common.add_argument("--data", metavar="PATH", help="observation CSV with a 'y' column")
    common.add_argument("--fix", nargs="+", help="parameter names held fixed in fit")

    parser = argparse.ArgumentParser(
        prog="lodm",
        description="Identifiability of linearly observation-driven time series models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_text)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_CONFIG
    func, _ = COMMANDS[args.command]
    try:
        cfg = load_config(args)
        return func(cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NotInvertibleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_INVERTIBLE
    except (DomainError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
