"""Command line front-end: ``flab exponents|zeros|sum|scaling|verify-envelope|detp-check``.

Settings come from built-in defaults, then an optional ``--config`` file of
``key = value`` lines, then command-line flags (highest priority).
Exit codes: 0 success, 2 invalid configuration or regime, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .detp import DetpConstants, bound_suite
from .errors import ConfigError, FlabError
from .families import EnvelopeGrid, FamilySpec, verify_envelope
from .harness import (ExperimentConfig, emit_plot_data, parse_regions, run_scaling_experiment, run_sum,
                      run_zeros)
from .spectra import GrowthEnvelope, derive_bundle
from .textio import dumps_json, format_zeros, parse_complex_list, read_config, read_matrix, read_zeros

log = logging.getLogger("flab")


# -- settings ---------------------------------------------------------------------

class Settings:
    """Merged view of config-file strings and typed command-line values."""

    def __init__(self, args: argparse.Namespace):
        self.values: dict = {}
        if getattr(args, "config", None):
            self.values.update(read_config(args.config))
        for key, value in vars(args).items():
            if key not in ("command", "config", "func", "verbose") and value is not None:
                self.values[key] = value

    def has(self, key: str) -> bool:
        return key in self.values

    def _get(self, key, conv, default, required):
        if key not in self.values:
            if required:
                raise ConfigError(f"missing setting --{key.replace('_', '-')}")
            return default
        raw = self.values[key]
        try:
            return conv(raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {key.replace('_', '-')}: {raw!r} ({exc})") from None

    def str(self, key, default=None, required=False):
        return self._get(key, str, default, required)

    def float(self, key, default=None, required=False):
        return self._get(key, float, default, required)

    def int(self, key, default=None, required=False):
        def conv(v):
            if isinstance(v, str) and not v.strip().lstrip("+-").isdigit():
                raise ValueError("not an integer")
            return int(v)
        return self._get(key, conv, default, required)

    def floats(self, key, default=None, required=False):
        def conv(v):
            if isinstance(v, (list, tuple)):
                return tuple(float(x) for x in v)
            return tuple(float(x) for x in str(v).split(",") if x.strip())
        return self._get(key, conv, default, required)


def _matrix(settings: Settings) -> np.ndarray:
    if settings.has("matrix") and settings.has("diag"):
        raise ConfigError("give either --matrix or --diag, not both")
    if settings.has("matrix"):
        return read_matrix(settings.str("matrix"))
    if settings.has("diag"):
        try:
            entries = parse_complex_list(settings.str("diag"))
        except ValueError as exc:
            raise ConfigError(f"bad --diag: {exc}") from None
        if not entries:
            raise ConfigError("--diag needs at least one entry")
        return np.diag(np.array(entries, dtype=complex))
    raise ConfigError("family matrix missing: pass --matrix <csv> or --diag a,b,...")


def _family(settings: Settings) -> FamilySpec:
    kind = settings.str("family", required=True)
    p = settings.int("p", 1)
    if kind == "scalar":
        B = _matrix(settings) if (settings.has("matrix") or settings.has("diag")) else np.eye(1)
        return FamilySpec(kind, B, p=p, rho=settings.float("rho", required=True), phi=settings.str("phi", required=True),
                          M=settings.float("M", required=True), sigma=settings.float("sigma", required=True))
    if settings.has("sigma"):
        raise ConfigError(f"sigma is fixed by the {kind} family and cannot be set")
    rho = settings.float("rho") if kind == "sqrt" else None
    if kind == "inv-sqrt" and settings.has("rho"):
        raise ConfigError("rho is fixed (= 1) for the inv-sqrt family")
    return FamilySpec(kind, _matrix(settings), p=p, rho=rho)


def _regions(settings: Settings):
    return parse_regions(settings.str("region")) if settings.has("region") else None


def _write(settings: Settings, text: str) -> None:
    out = settings.str("out")
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# -- subcommands --------------------------------------------------------------------

def cmd_exponents(settings: Settings) -> int:
    env = GrowthEnvelope(1.0, settings.float("rho", required=True), settings.float("sigma", required=True),
                         settings.int("p", 1))
    bundle = derive_bundle(env, settings.float("eps", required=True), settings.float("eps_prime", 0.1),
                           settings.float("nu_factor", 1.0), settings.float("mu", 1.0))
    _write(settings, dumps_json(bundle.to_dict()))
    return 0


def cmd_zeros(settings: Settings) -> int:
    spec = _family(settings)
    zeros, summary = run_zeros(spec, _regions(settings), settings.float("tol", 1e-9), spec.p)
    _write(settings, format_zeros(zeros))
    print(summary, file=sys.stderr)
    return 0


def cmd_sum(settings: Settings) -> int:
    zeros = read_zeros(settings.str("zeros", required=True))
    env = GrowthEnvelope(settings.float("M", required=True), settings.float("rho", required=True),
                         settings.float("sigma", required=True), settings.int("p", 1))
    report = run_sum(zeros, env, settings.str("inequality", required=True), settings.float("eps", required=True),
                     settings.float("eps_prime", 0.1), settings.float("mu", 1.0), settings.float("nu_factor", 1.0))
    _write(settings, dumps_json(report))
    return 0


def cmd_scaling(settings: Settings) -> int:
    config = ExperimentConfig(
        family=_family(settings),
        inequality=settings.str("inequality", required=True),
        eps=settings.float("eps", required=True),
        eps_prime=settings.float("eps_prime", 0.1),
        mu_radius_factor=settings.float("mu", 1.0),
        tail_cutoff_factor=settings.float("nu_factor", 1.0),
        kappas=settings.floats("kappa", (1.0,)),
        regions=_regions(settings),
        tol=settings.float("tol", 1e-9),
        seed=settings.int("seed", 0),
        solver=settings.str("solver", "auto"),
    )
    report = run_scaling_experiment(config)
    _write(settings, emit_plot_data(report))
    if settings.has("report"):
        Path(settings.str("report")).write_text(dumps_json(report.to_dict()))
    if report.failed:
        for row in report.rows:
            if row.status != "ok":
                print(f"kappa={row.kappa}: {row.message}", file=sys.stderr)
        return 3
    return 0


def cmd_verify_envelope(settings: Settings) -> int:
    family = _family(settings).build(1.0)
    grid = EnvelopeGrid(settings.float("r_min", 1e-3), settings.float("r_max", 1e3),
                        settings.int("n_moduli", 64), settings.int("n_angles", 63))
    if not 0 < grid.r_min < grid.r_max or grid.n_moduli < 1 or grid.n_angles < 1:
        raise ConfigError("envelope grid needs 0 < r_min < r_max and positive counts")
    report = verify_envelope(family, grid)
    _write(settings, dumps_json(report.to_dict()))
    return 0 if report.passed else 1


def cmd_detp_check(settings: Settings) -> int:
    p = settings.int("p", 1)
    constants = DetpConstants(p, settings.float("gamma"))
    report = bound_suite(p, settings.int("trials", 500), settings.int("dim", 8), settings.float("norm_cap", 2.0),
                         settings.int("seed", 0), constants)
    _write(settings, dumps_json(report))
    return 0


# -- parser -------------------------------------------------------------------------

def _add_family(sp):
    sp.add_argument("--family", choices=("inv-sqrt", "sqrt", "scalar"))
    sp.add_argument("--matrix", help="matrix CSV with header '# n=<dim>'")
    sp.add_argument("--diag", help="diagonal matrix entries, e.g. '-i,1-i'")
    sp.add_argument("--p", type=int)
    sp.add_argument("--rho", type=float)
    sp.add_argument("--sigma", type=float, help="scalar family only")
    sp.add_argument("--M", type=float, help="scalar family envelope constant")
    sp.add_argument("--phi", help="scalar family: expression in lam, e.g. 'sqrt(lam)**-1'")


def _add_exponent_flags(sp):
    sp.add_argument("--eps", type=float)
    sp.add_argument("--eps-prime", type=float)
    sp.add_argument("--mu", type=float, help="radius factor for gkeq3, in (0, 1]")
    sp.add_argument("--nu-factor", type=float, help="tail cutoff factor for freq1, >= 1")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="flab", description="eigenvalue sums for analytic operator families")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--config", help="key = value settings file; flags override it")
        sp.add_argument("--out", help="output path (default: stdout)")
        sp.set_defaults(func=func)
        return sp

    sp = command("exponents", cmd_exponents, "print the derived exponent bundle as JSON")
    sp.add_argument("--p", type=int)
    sp.add_argument("--rho", type=float)
    sp.add_argument("--sigma", type=float)
    _add_exponent_flags(sp)

    sp = command("zeros", cmd_zeros, "locate eigenvalues of finite type, write re,im,multiplicity CSV")
    _add_family(sp)
    sp.add_argument("--region", help="x0,x1,y0,y1 (several separated by ';')")
    sp.add_argument("--tol", type=float)

    sp = command("sum", cmd_sum, "evaluate one weighted eigenvalue sum from a zeros CSV")
    sp.add_argument("--zeros", help="zeros CSV (re,im,multiplicity)")
    sp.add_argument("--inequality")
    sp.add_argument("--p", type=int)
    sp.add_argument("--rho", type=float)
    sp.add_argument("--sigma", type=float)
    sp.add_argument("--M", type=float)
    _add_exponent_flags(sp)

    sp = command("scaling", cmd_scaling, "sweep B -> kappa B and report lhs / rhs per kappa as CSV")
    _add_family(sp)
    _add_exponent_flags(sp)
    sp.add_argument("--inequality")
    sp.add_argument("--kappa", help="comma-separated, strictly increasing")
    sp.add_argument("--region", help="x0,x1,y0,y1 (several separated by ';')")
    sp.add_argument("--tol", type=float)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--solver", choices=("auto", "closed-form", "zerofind"))
    sp.add_argument("--report", help="also write the full JSON report here")

    sp = command("verify-envelope", cmd_verify_envelope, "sample the growth envelope of a family")
    _add_family(sp)
    sp.add_argument("--r-min", type=float)
    sp.add_argument("--r-max", type=float)
    sp.add_argument("--n-moduli", type=int)
    sp.add_argument("--n-angles", type=int)

    sp = command("detp-check", cmd_detp_check, "test the det_p bounds on random matrices")
    sp.add_argument("--p", type=int)
    sp.add_argument("--trials", type=int)
    sp.add_argument("--dim", type=int)
    sp.add_argument("--norm-cap", type=float)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--gamma", type=float, help="override gamma_p")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(Settings(args))
    except FlabError as exc:
        print(f"flab: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(f"flab: error: {exc}", file=sys.stderr)
        return ConfigError.exit_code


if __name__ == "__main__":
    sys.exit(main())
