"""Experiment orchestration: zero searches, single sums, and kappa sweeps.

A scaling experiment rebuilds the family with B replaced by kappa * B (so the
envelope constant M becomes kappa * M), recomputes the zero set and reports
the weighted sum against its C-free right-hand side for each kappa.
"""

from __future__ import annotations

import io
import csv
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .cutplane import Box
from .detp import (AnchorConfig, anchor_direction, determinant_function, select_anchor)
from .errors import ConfigError, NumericalError
from .families import FamilySpec, OperatorFamily
from .linalg import singular_values
from .spectra import (GrowthEnvelope, INEQUALITIES, blaschke_sum_B, check_compatible, derive_bundle,
                      regime_classify, sum_inequality)
from .textio import format_float
from .zerofind import ZeroSet, localize_in_region, localize_zeros

log = logging.getLogger(__name__)

SOLVERS = ("auto", "closed-form", "zerofind")
PLOT_HEADER = ("kappa", "M", "lhs", "rhs_without_C", "ratio", "status")

# Default search squares reach this factor past the a priori bound on |lambda|.
_REGION_MARGIN = 1.05


Rect = tuple[float, float, float, float]


def parse_region(text: str) -> Rect:
    parts = [p for p in text.replace(" ", "").split(",") if p]
    if len(parts) != 4:
        raise ConfigError(f"region needs x0,x1,y0,y1, got {text!r}")
    try:
        x0, x1, y0, y1 = (float(p) for p in parts)
    except ValueError:
        raise ConfigError(f"region has a non-numeric bound: {text!r}") from None
    if not (x0 < x1 and y0 < y1) or not all(map(math.isfinite, (x0, x1, y0, y1))):
        raise ConfigError(f"region must satisfy x0 < x1 and y0 < y1, got {text!r}")
    return x0, x1, y0, y1


def parse_regions(text: str) -> tuple[Rect, ...]:
    """One or more rectangles separated by ';'."""
    return tuple(parse_region(chunk) for chunk in text.split(";") if chunk.strip())


def default_region(family_spec: FamilySpec, kappa: float = 1.0) -> Rect:
    """Square that provably contains every zero of a built-in family.

    inv-sqrt: a zero needs ||B||_op |lam|^(-1/2) >= 1.  sqrt: -1/sqrt(lam) is
    an eigenvalue of B, so |lam| <= 1 / s_min(B)^2.
    """
    if family_spec.kind == "scalar":
        raise ConfigError("scalar families have no default search region; pass --region")
    s = singular_values(kappa * np.asarray(family_spec.B, dtype=complex))
    if family_spec.kind == "inv-sqrt":
        reach = float(s[0]) ** 2
    else:
        if s[-1] <= 1e-12 * max(float(s[0]), 1e-300):
            raise ConfigError("sqrt family with singular B has no a priori zero bound; pass --region")
        reach = 1.0 / float(s[-1]) ** 2
    R = _REGION_MARGIN * max(reach, 1e-6)
    return -R, R, -R, R


def find_zeros(family: OperatorFamily, regions, tol: float, p: int | None = None,
               winding_log=None) -> tuple[ZeroSet, list]:
    """Zeros of det_p(I + T) over rectangles (split around the cut as needed).

    Returns the merged ZeroSet and the unresolved strips along the cut.
    """
    f = determinant_function(family, p)
    found = ZeroSet()
    strips = []
    for rect in regions:
        if isinstance(rect, Box):
            found = found.union(localize_zeros(f, rect, tol, log=winding_log))
            continue
        res = localize_in_region(f, rect, tol, log=winding_log)
        found = found.union(res.zeros)
        if res.unresolved is not None:
            strips.append(res.unresolved)
    return found, strips


@dataclass
class ExperimentConfig:
    family: FamilySpec
    inequality: str
    eps: float
    eps_prime: float = 0.1
    mu_radius_factor: float = 1.0
    tail_cutoff_factor: float = 1.0
    kappas: tuple[float, ...] = (1.0,)
    regions: tuple[Rect, ...] | None = None
    tol: float = 1e-9
    seed: int = 0
    solver: str = "auto"

    def __post_init__(self):
        self.kappas = tuple(float(k) for k in self.kappas)
        if not self.kappas or any(not k > 0 for k in self.kappas):
            raise ConfigError("kappa list must be nonempty and positive")
        if any(b <= a for a, b in zip(self.kappas, self.kappas[1:])):
            raise ConfigError("kappa list must be strictly increasing")
        if not self.tol > 0:
            raise ConfigError("tol must be positive")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.solver not in SOLVERS:
            raise ConfigError(f"solver must be one of {', '.join(SOLVERS)}")
        if self.inequality not in INEQUALITIES:
            raise ConfigError(f"unknown inequality {self.inequality!r}; expected one of {', '.join(INEQUALITIES)}")
        env = self.family.build(1.0).envelope
        check_compatible(self.inequality, regime_classify(env), self.eps)
        # validates eps, eps', mu and nu
        derive_bundle(env, self.eps, self.eps_prime, self.tail_cutoff_factor, self.mu_radius_factor)


@dataclass
class ReportRow:
    kappa: float
    M: float
    lhs: float | None = None
    rhs_without_C: float | None = None
    ratio: float | None = None
    status: str = "ok"
    message: str = ""
    zero_count: int | None = None
    total_multiplicity: int | None = None
    anchor_t: float | None = None
    blaschke_B: float | None = None

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class ExperimentReport:
    rows: list[ReportRow]
    metadata: dict = field(default_factory=dict)

    @property
    def failed(self) -> bool:
        return any(r.status != "ok" for r in self.rows)

    def to_dict(self) -> dict:
        return {"rows": [r.to_dict() for r in self.rows], "metadata": self.metadata}


def _anchor_metadata(family: OperatorFamily, zeros: ZeroSet, bundle) -> tuple[float | None, float | None]:
    """Anchor t and the weighted sum over the zeros of h(lam) = f(t lam) / f(-t)."""
    env = family.envelope
    f = determinant_function(family)
    try:
        t = select_anchor(f, AnchorConfig(direction=anchor_direction(env.rho, env.sigma)))
    except NumericalError as exc:
        log.warning("no anchor for %s: %s", family.label, exc)
        return None, None
    return t, blaschke_sum_B(zeros.scaled(1.0 / t), bundle.a, bundle.eps, bundle.s1, bundle.s2)


def _row_zeros(config: ExperimentConfig, family: OperatorFamily, kappa: float, winding_log) -> ZeroSet:
    closed = family.closed_form_spectrum() if config.solver != "zerofind" else None
    if config.solver == "closed-form" and closed is None:
        raise ConfigError(f"family {family.label} has no closed-form spectrum")
    if closed is not None:
        return closed
    regions = config.regions or (default_region(config.family, kappa),)
    zeros, strips = find_zeros(family, regions, config.tol, winding_log=winding_log)
    for strip in strips:
        log.info("kappa=%s: strip %s along the cut was not searched", kappa, strip)
    return zeros


def run_scaling_experiment(config: ExperimentConfig, winding_log=None) -> ExperimentReport:
    """One row per kappa; numerical failures mark the row failed and the sweep goes on.

    ``winding_log`` (a zerofind.WindingLog) collects every winding computed
    when the solver route is used.
    """
    rows = []
    bundle = None
    for kappa in config.kappas:
        family = config.family.build(kappa)
        env = family.envelope
        bundle = derive_bundle(env, config.eps, config.eps_prime,
                               config.tail_cutoff_factor, config.mu_radius_factor)
        row = ReportRow(kappa=kappa, M=env.M)
        try:
            zeros = _row_zeros(config, family, kappa, winding_log)
            rep = sum_inequality(zeros, bundle, env, config.inequality)
            row.lhs, row.rhs_without_C, row.ratio = rep.lhs, rep.rhs_without_C, rep.ratio
            row.zero_count, row.total_multiplicity = len(zeros), zeros.total_multiplicity
            row.anchor_t, row.blaschke_B = _anchor_metadata(family, zeros, bundle)
        except NumericalError as exc:
            row.status, row.message = "failed", f"{type(exc).__name__}: {exc}"
            log.warning("kappa=%s failed: %s", kappa, row.message)
        rows.append(row)
    rows.sort(key=lambda r: r.kappa)
    meta = {
        "family": config.family.kind,
        "inequality": config.inequality,
        "solver": config.solver,
        "seed": int(config.seed),
        "tol": config.tol,
        "bundle": bundle.to_dict(),
    }
    return ExperimentReport(rows, meta)


def emit_plot_data(report: ExperimentReport) -> str:
    """CSV with header kappa,M,lhs,rhs_without_C,ratio,status; failed rows keep only kappa."""
    if not report.rows:
        raise ConfigError("report has no rows")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(PLOT_HEADER)
    for r in report.rows:
        if r.status == "ok":
            writer.writerow([format_float(r.kappa), format_float(r.M), format_float(r.lhs),
                             format_float(r.rhs_without_C), format_float(r.ratio), r.status])
        else:
            writer.writerow([format_float(r.kappa), "", "", "", "", r.status])
    return buf.getvalue()


def run_zeros(family_spec: FamilySpec, regions, tol: float, p: int | None = None) -> tuple[ZeroSet, str]:
    """Search regions (default: the a priori square of a built-in) and summarize the result."""
    family = family_spec.build(1.0)
    regions = regions or (default_region(family_spec),)
    zeros, strips = find_zeros(family, regions, tol, p)
    summary = f"{len(zeros)} zeros, total multiplicity {zeros.total_multiplicity}"
    if strips:
        summary += f"; {len(strips)} strip(s) along the cut not searched"
    return zeros, summary


def run_sum(zeros: ZeroSet, envelope: GrowthEnvelope, which: str, eps: float, eps_prime: float = 0.1,
            mu_radius_factor: float = 1.0, tail_cutoff_factor: float = 1.0) -> dict:
    bundle = derive_bundle(envelope, eps, eps_prime, tail_cutoff_factor, mu_radius_factor)
    rep = sum_inequality(zeros, bundle, envelope, which)
    out = rep.to_dict()
    out["bundle"] = bundle.to_dict()
    return out
