"""Analytic operator families T(lam) on the slit plane.

The two built-ins are rank-structured multiples of lam^(-1/2) and lam^(1/2):

* ``family_inverse_sqrt``: T(lam) = B / sqrt(lam).  Since dist <= |lam|,
  ||T(lam)||_p = ||B||_p |lam|^(-1/2) <= ||B||_p / (dist |lam|^(-1/2)), i.e.
  an envelope with rho = 1, sigma = -1/2.  det(I + T) vanishes where
  sqrt(lam) = -beta for an eigenvalue beta of B; with the upper-half-plane
  square root that needs Im beta < 0 and gives lam = beta^2.
* ``family_sqrt``: T(lam) = B sqrt(lam), envelope (rho, -1/2 - rho) for any
  rho > 0 because (|lam| / dist)^rho >= 1.  Zeros at lam = 1 / beta^2 for
  eigenvalues with Im beta > 0.

Flipping the square-root branch would flip both eligibility conditions.
"""

from __future__ import annotations

import ast
import math
import operator
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .cutplane import check_off_cut, dist_to_cut, is_off_cut, sqrt_cut
from .errors import ConfigError
from .linalg import MAX_DIM, as_complex_matrix, schatten_norm
from .spectra import GrowthEnvelope
from .zerofind import ZeroSet

# Eigenvalues of B closer than this (relative) are treated as one multiple eigenvalue.
EIGEN_CLUSTER_RTOL = 1e-7


@dataclass(frozen=True)
class OperatorFamily:
    evaluator: Callable = field(repr=False)
    envelope: GrowthEnvelope
    closed_form: Callable[[], ZeroSet] | None = field(default=None, repr=False)
    label: str = ""

    def __call__(self, lam):
        return self.evaluator(lam)

    def closed_form_spectrum(self) -> ZeroSet | None:
        return None if self.closed_form is None else self.closed_form()


def _matrix(B) -> np.ndarray:
    try:
        B = as_complex_matrix(B)
    except ValueError as exc:
        raise ConfigError(f"family matrix: {exc}") from None
    if B.ndim != 2:
        raise ConfigError("family matrix must be a single square matrix")
    if B.shape[0] > MAX_DIM:
        raise ConfigError(f"matrix dimension {B.shape[0]} exceeds the desk-scale cap {MAX_DIM}")
    return B


def _times_matrix(B: np.ndarray, phi):
    phi = np.asarray(phi, dtype=complex)
    return phi[..., None, None] * B


def _envelope_constant(B: np.ndarray, p: int) -> float:
    # Any M > 0 certifies the zero family.
    norm = schatten_norm(B, p)
    return norm if norm > 0 else 1.0


def _spectrum(B: np.ndarray, eligible, image) -> ZeroSet:
    beta = np.linalg.eigvals(B)
    pts = []
    for b in beta:
        if eligible(b):
            z = image(b)
            if is_off_cut(z):
                pts.append((z, 1))
    return ZeroSet.from_points(pts, resolution=EIGEN_CLUSTER_RTOL)


def family_inverse_sqrt(B, p: int = 1) -> OperatorFamily:
    B = _matrix(B)
    env = GrowthEnvelope(_envelope_constant(B, p), 1.0, -0.5, p)

    def evaluate(lam):
        return _times_matrix(B, 1.0 / np.asarray(sqrt_cut(lam)))

    def spectrum() -> ZeroSet:
        return _spectrum(B, lambda b: b.imag < -1e-12 * abs(b), lambda b: b * b)

    return OperatorFamily(evaluate, env, spectrum, label="inv-sqrt")


def family_sqrt(B, p: int = 1, rho: float = 1.0) -> OperatorFamily:
    if not rho > 0:
        raise ConfigError(f"sqrt family needs rho > 0, got {rho}")
    B = _matrix(B)
    env = GrowthEnvelope(_envelope_constant(B, p), rho, -0.5 - rho, p)

    def evaluate(lam):
        return _times_matrix(B, sqrt_cut(lam))

    def spectrum() -> ZeroSet:
        return _spectrum(B, lambda b: b.imag > 1e-12 * abs(b), lambda b: 1.0 / (b * b))

    return OperatorFamily(evaluate, env, spectrum, label="sqrt")


def family_scalar(B, phi: Callable, envelope: GrowthEnvelope, label: str = "scalar") -> OperatorFamily:
    """T(lam) = B phi(lam) with a caller-claimed envelope; phi must be analytic off the cut."""
    B = _matrix(B)

    def evaluate(lam):
        check_off_cut(lam)
        lam = np.asarray(lam, dtype=complex)
        return _times_matrix(B, np.broadcast_to(phi(lam), lam.shape))

    return OperatorFamily(evaluate, envelope, None, label=label)


@dataclass(frozen=True)
class EnvelopeGrid:
    """Polar sample grid: log-spaced moduli times angles 2 pi j / (n_angles + 1)."""

    r_min: float = 1e-3
    r_max: float = 1e3
    n_moduli: int = 64
    n_angles: int = 63

    def points(self) -> np.ndarray:
        r = np.geomspace(self.r_min, self.r_max, self.n_moduli)
        theta = 2 * np.pi * np.arange(1, self.n_angles + 1) / (self.n_angles + 1)
        z = (r[:, None] * np.exp(1j * theta[None, :])).ravel()
        z = z[is_off_cut(z)]
        order = np.lexsort((z.imag, z.real))
        return z[order]


@dataclass(frozen=True)
class EnvelopeReport:
    max_ratio: float
    worst_point: complex
    passed: bool

    def to_dict(self) -> dict:
        return {"max_ratio": self.max_ratio,
                "worst_point": [self.worst_point.real, self.worst_point.imag],
                "pass": self.passed}


def verify_envelope(family: OperatorFamily, grid: EnvelopeGrid | None = None) -> EnvelopeReport:
    """Largest sampled value of ||T(lam)||_p dist^rho |lam|^sigma / M (must be <= 1)."""
    grid = grid or EnvelopeGrid()
    z = grid.points()
    env = family.envelope
    norms = np.atleast_1d(schatten_norm(family.evaluator(z), env.p))
    ratio = norms * np.asarray(dist_to_cut(z)) ** env.rho * np.abs(z) ** env.sigma / env.M
    # ties (up to rounding) go to the first point in (Re, Im) order
    top = float(np.max(ratio))
    k = int(np.flatnonzero(ratio >= top * (1 - 1e-12))[0])
    worst = float(ratio[k])
    return EnvelopeReport(worst, complex(z[k]), worst <= 1 + 1e-9)


# -- restricted expressions for user-supplied phi ---------------------------

def log_cut(lam):
    """Logarithm with arg in (0, 2 pi), analytic off [0, inf)."""
    check_off_cut(lam)
    lam = np.asarray(lam, dtype=complex)
    arg = np.mod(np.angle(lam), 2 * np.pi)
    out = np.log(np.abs(lam)) + 1j * arg
    return complex(out) if out.ndim == 0 else out


_FUNCS = {"sqrt": sqrt_cut, "log": log_cut, "exp": np.exp}
_CONSTS = {"i": 1j, "j": 1j, "pi": math.pi, "e": math.e}
_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}


def parse_phi(expr: str) -> Callable:
    """Compile an arithmetic expression in ``lam`` (alias ``z``) into a vectorized function.

    Allowed: numbers, i, pi, e, + - * / **, and sqrt/log/exp taken on the
    branch cut along [0, inf).
    """
    try:
        tree = ast.parse(expr, mode="eval")
    except SyntaxError as exc:
        raise ConfigError(f"cannot parse phi expression {expr!r}: {exc.msg}") from None

    def build(node):
        if isinstance(node, ast.Expression):
            return build(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float, complex)):
            c = complex(node.value)
            return lambda lam: c
        if isinstance(node, ast.Name):
            if node.id in ("lam", "z"):
                return lambda lam: lam
            if node.id in _CONSTS:
                c = _CONSTS[node.id]
                return lambda lam: c
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            op, left, right = _BINOPS[type(node.op)], build(node.left), build(node.right)
            return lambda lam: op(left(lam), right(lam))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            inner = build(node.operand)
            sign = -1 if isinstance(node.op, ast.USub) else 1
            return lambda lam: sign * inner(lam)
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
                and node.func.id in _FUNCS and len(node.args) == 1 and not node.keywords):
            fn, arg = _FUNCS[node.func.id], build(node.args[0])
            return lambda lam: fn(arg(lam))
        raise ConfigError(f"unsupported element in phi expression: {ast.dump(node)[:60]}")

    compiled = build(tree)

    def phi(lam):
        lam = np.asarray(lam, dtype=complex)
        return np.broadcast_to(np.asarray(compiled(lam), dtype=complex), lam.shape)

    return phi


FAMILY_KINDS = ("inv-sqrt", "sqrt", "scalar")


@dataclass(frozen=True)
class FamilySpec:
    """Declarative family description; ``build(kappa)`` scales B (and hence M) by kappa."""

    kind: str
    B: np.ndarray = field(repr=False)
    p: int = 1
    rho: float | None = None
    phi: str | None = None
    M: float | None = None
    sigma: float | None = None

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise ConfigError(f"family must be one of {', '.join(FAMILY_KINDS)}, got {self.kind!r}")
        if self.kind == "scalar" and (self.phi is None or None in (self.M, self.rho, self.sigma)):
            raise ConfigError("scalar family needs phi, M, rho and sigma")

    def build(self, kappa: float = 1.0) -> OperatorFamily:
        if not kappa > 0:
            raise ConfigError("kappa must be positive")
        B = kappa * _matrix(self.B)
        if self.kind == "inv-sqrt":
            return family_inverse_sqrt(B, self.p)
        if self.kind == "sqrt":
            return family_sqrt(B, self.p, 1.0 if self.rho is None else self.rho)
        env = GrowthEnvelope(kappa * self.M, self.rho, self.sigma, self.p)
        return family_scalar(B, parse_phi(self.phi), env, label=f"scalar[{self.phi}]")
