"""Exponent bookkeeping and weighted sums over eigenvalues/zeros.

Every exponent is a closed-form expression in (p, rho, sigma, eps); the
sums weight each zero z by dist(z, [0, inf))^(p rho + 1 + eps) |z|^e for an
inequality-specific e, restricted to a disc or its complement whose radius
scales like M^(1/(rho + sigma)).
"""

from __future__ import annotations

import enum
import numbers
from dataclasses import asdict, dataclass

import numpy as np

from .cutplane import dist_to_cut
from .errors import ConfigError, RegimeError
from .zerofind import ZeroSet


def _pos(x: float) -> float:
    return x if x > 0 else 0.0


def bracket(u: float, c: float, eps: float) -> float:
    """{u}_{c,eps} = (u_- - 1 + eps)_+ - min(c, u_+)."""
    if c < 0 or not eps > 0:
        raise ConfigError(f"bracket needs c >= 0 and eps > 0 (got c={c}, eps={eps})")
    return _pos(_pos(-u) - 1.0 + eps) - min(c, _pos(u))


@dataclass(frozen=True)
class ScalarGrowthBound:
    """log|h(lam)| <= K |lam|^-r (1 + |lam|)^b / dist(lam)^a."""

    K: float
    a: float
    b: float
    r: float

    def __post_init__(self):
        if not self.K > 0 or self.a < 0 or self.b < 0:
            raise ConfigError("growth bound needs K > 0 and a, b >= 0")

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=complex)
        m = np.abs(lam)
        return self.K * m ** (-self.r) * (1.0 + m) ** self.b / np.asarray(dist_to_cut(lam)) ** self.a


@dataclass(frozen=True)
class GrowthEnvelope:
    """||T(lam)||_p <= M / (dist(lam)^rho |lam|^sigma)."""

    M: float
    rho: float
    sigma: float
    p: int = 1

    def __post_init__(self):
        if not self.M > 0:
            raise ConfigError(f"envelope constant M must be positive, got {self.M}")
        if self.rho < 0:
            raise ConfigError(f"rho must be >= 0, got {self.rho}")
        if isinstance(self.p, bool) or not isinstance(self.p, numbers.Real) or self.p != int(self.p) or self.p < 1:
            raise ConfigError(f"p must be an integer >= 1, got {self.p!r}")
        object.__setattr__(self, "p", int(self.p))

    def bound(self, lam):
        lam = np.asarray(lam, dtype=complex)
        return self.M / (np.asarray(dist_to_cut(lam)) ** self.rho * np.abs(lam) ** self.sigma)

    @property
    def radius(self) -> float:
        """M^(1/(rho+sigma)), the modulus separating the 'small' and 'large' eigenvalues."""
        if self.rho + self.sigma == 0:
            raise RegimeError("rho + sigma = 0 is not supported")
        return self.M ** (1.0 / (self.rho + self.sigma))

    def scaled(self, kappa: float) -> "GrowthEnvelope":
        return GrowthEnvelope(self.M * kappa, self.rho, self.sigma, self.p)


class Regime(str, enum.Enum):
    THM1_RANGE1 = "THM1_RANGE1"
    THM2_CASE1 = "THM2_CASE1"
    THM2_CASE2 = "THM2_CASE2"
    THMA_OTHER = "THMA_OTHER"


def regime_classify(envelope: GrowthEnvelope) -> Regime:
    rho, sigma = envelope.rho, envelope.sigma
    t = rho + sigma
    if rho <= 0:
        raise RegimeError("rho = 0 envelopes are not covered")
    if t == 0:
        raise RegimeError("rho + sigma = 0 is not supported")
    if 0 < t <= rho / 2:
        return Regime.THM1_RANGE1
    if t > rho / 2:
        return Regime.THMA_OTHER
    if -rho / 2 <= t < 0:
        return Regime.THM2_CASE1
    return Regime.THM2_CASE2


def blaschke_exponents(a: float, b: float, r: float, eps: float) -> tuple[float, float, float]:
    """(s, s1, s2) for the zero-sum weight dist^(a+1+eps) |z|^s1 / (1+|z|)^s2."""
    if a < 0 or b < 0 or not eps > 0:
        raise ConfigError("need a, b >= 0 and eps > 0")
    s = 3 * a - 2 * b + 2 * r
    bu = bracket(-2 * r - a, a, eps)
    bs = bracket(s, a, eps)
    s1 = (bu - a - 1 - eps) / 2
    s2 = a + 1 + eps + (bu + bs) / 2
    return s, s1, s2


@dataclass(frozen=True)
class ExponentBundle:
    regime: Regime
    p: int
    rho: float
    sigma: float
    a: float
    b: float
    r: float
    bracket_u: float
    bracket_s: float
    s: float
    s1: float
    s2: float
    q: float
    l: float
    eps: float
    eps_prime: float
    tail_cutoff_factor: float
    mu_radius_factor: float

    def to_dict(self) -> dict:
        d = asdict(self)
        d["regime"] = self.regime.value
        return d


def growth_parameters(envelope: GrowthEnvelope, regime: Regime) -> tuple[float, float, float]:
    """(a, b, r) of the scalar growth bound satisfied by the normalized determinant."""
    p, rho, sigma = envelope.p, envelope.rho, envelope.sigma
    if regime in (Regime.THM2_CASE1, Regime.THM2_CASE2):
        return p * rho, -p * (rho + sigma), -p * rho
    return p * rho, p * (rho + sigma), p * sigma


def derive_bundle(envelope: GrowthEnvelope, eps: float, eps_prime: float = 0.1,
                  tail_cutoff_factor: float = 1.0, mu_radius_factor: float = 1.0) -> ExponentBundle:
    if not eps > 0 or not eps_prime > 0:
        raise ConfigError("eps and eps_prime must be positive")
    if not tail_cutoff_factor >= 1:
        raise ConfigError("tail cutoff factor must be >= 1")
    if not 0 < mu_radius_factor <= 1:
        raise ConfigError("mu radius factor must lie in (0, 1]")
    regime = regime_classify(envelope)
    p, rho, sigma = envelope.p, envelope.rho, envelope.sigma
    a, b, r = growth_parameters(envelope, regime)
    s, s1, s2 = blaschke_exponents(a, b, r, eps)
    return ExponentBundle(
        regime=regime, p=p, rho=rho, sigma=sigma, a=a, b=b, r=r,
        bracket_u=bracket(-2 * r - a, a, eps), bracket_s=bracket(s, a, eps),
        s=s, s1=s1, s2=s2,
        q=_pos(p * rho + 2 * p * sigma - 1 + eps),
        l=_pos(-3 * p * rho - 2 * p * sigma - 1 + eps),
        eps=eps, eps_prime=eps_prime,
        tail_cutoff_factor=tail_cutoff_factor, mu_radius_factor=mu_radius_factor,
    )


def blaschke_sum_B(zeros: ZeroSet, a: float, eps: float, s1: float, s2: float) -> float:
    """sum over zeros (with multiplicity) of dist^(a+1+eps) |z|^s1 / (1+|z|)^s2."""
    if not len(zeros):
        return 0.0
    z, m = zeros.locations, zeros.multiplicities
    mod = np.abs(z)
    w = np.asarray(dist_to_cut(z)) ** (a + 1 + eps) * mod ** s1 / (1.0 + mod) ** s2
    return float(np.sum(m * w))


INEQUALITIES = ("freq1", "freq2", "gkeq1", "gkeq2", "gkeq3", "gkeq4")

_APPLICABLE = {
    Regime.THM1_RANGE1: ("gkeq1", "freq1", "freq2"),
    Regime.THMA_OTHER: ("freq1", "freq2"),
    Regime.THM2_CASE1: ("gkeq2", "gkeq3"),
    Regime.THM2_CASE2: ("gkeq3", "gkeq4"),
}


@dataclass(frozen=True)
class SumReport:
    which: str
    lhs: float
    rhs_power_of_M: float
    rhs_without_C: float
    ratio: float
    cutoff: float
    side: str
    dist_exponent: float
    modulus_exponent: float
    terms: int

    def to_dict(self) -> dict:
        return asdict(self)


def _inequality_shape(which: str, bundle: ExponentBundle, envelope: GrowthEnvelope):
    """(side, radius, modulus exponent, M power, extra factor) for one inequality."""
    p, rho, sigma, eps = bundle.p, bundle.rho, bundle.sigma, bundle.eps
    t = rho + sigma
    R = envelope.radius
    ep, nu, mu = bundle.eps_prime, bundle.tail_cutoff_factor, bundle.mu_radius_factor
    if which == "freq2":
        return "le", R, (bundle.q - p * rho - 1 - eps) / 2, (bundle.q + p * rho + 1 + eps) / (2 * t), 1.0
    if which == "freq1":
        return "ge", nu * R, t - p * rho - 1 - eps - ep, (t - ep) / t, nu ** (-ep)
    if which == "gkeq1":
        return "le", R, p * sigma - (1 + eps) / 2, p + (1 + eps) / (2 * t), 1.0
    if which == "gkeq2":
        return "ge", R, p * sigma - 1.5 * (1 + eps), p - (1 + eps) / (2 * t), 1.0
    if which == "gkeq3":
        return "le", mu * R, t - p * rho - 1 - eps + ep, (t + ep) / t, mu ** ep
    if which == "gkeq4":
        return ("ge", R, -(bundle.l + 3 * (p * rho + 1 + eps)) / 2,
                -(bundle.l + p * rho + 1 + eps) / (2 * t), 1.0)
    raise ConfigError(f"unknown inequality {which!r}; expected one of {', '.join(INEQUALITIES)}")


def check_compatible(which: str, regime: Regime, eps: float | None = None) -> None:
    if which not in INEQUALITIES:
        raise ConfigError(f"unknown inequality {which!r}; expected one of {', '.join(INEQUALITIES)}")
    applicable = _APPLICABLE[regime]
    if which not in applicable:
        raise RegimeError(
            f"{which} does not apply in regime {regime.value}; "
            f"applicable inequalities there: {', '.join(applicable)}")
    if which == "gkeq1" and eps is not None and not eps < 1:
        raise RegimeError("gkeq1 is stated for 0 < eps < 1")


def sum_inequality(zeros: ZeroSet, bundle: ExponentBundle, envelope: GrowthEnvelope, which: str,
                   cutoff_rtol: float = 1e-9) -> SumReport:
    """Left-hand side and C-free right-hand side of one weighted eigenvalue-sum inequality.

    Zeros within relative distance ``cutoff_rtol`` of the cutoff circle count
    as inside it, so numerically located zeros on the circle are not lost.
    """
    if (bundle.p, bundle.rho, bundle.sigma) != (envelope.p, envelope.rho, envelope.sigma):
        raise ConfigError("exponent bundle was derived for a different envelope")
    check_compatible(which, bundle.regime, bundle.eps)
    side, radius, mod_exp, m_pow, factor = _inequality_shape(which, bundle, envelope)
    dist_exp = bundle.p * bundle.rho + 1 + bundle.eps
    lhs, terms = 0.0, 0
    if len(zeros):
        z, m = zeros.locations, zeros.multiplicities
        mod = np.abs(z)
        if side == "le":
            keep = mod <= radius * (1.0 + cutoff_rtol)
        else:
            keep = mod >= radius * (1.0 - cutoff_rtol)
        w = np.asarray(dist_to_cut(z[keep])) ** dist_exp * mod[keep] ** mod_exp
        lhs = float(np.sum(m[keep] * w))
        terms = int(np.sum(m[keep]))
    rhs = factor * envelope.M ** m_pow
    return SumReport(which=which, lhs=lhs, rhs_power_of_M=m_pow, rhs_without_C=rhs,
                     ratio=lhs / rhs, cutoff=radius, side=side, dist_exponent=dist_exp,
                     modulus_exponent=mod_exp, terms=terms)


@dataclass(frozen=True)
class WeightComparison:
    lhs_exp: float
    rhs_exp: float
    stronger: bool


def weight_comparison_exponents(p: int, rho: float, sigma: float, eps: float) -> WeightComparison:
    """Compare the |z| exponents of gkeq1 and freq2 on the unit disc.

    A smaller exponent gives a larger weight for |z| <= 1, so ``stronger``
    means the gkeq1 sum controls small eigenvalues at least as well.
    """
    env = GrowthEnvelope(1.0, rho, sigma, p)
    if regime_classify(env) is not Regime.THM1_RANGE1:
        raise RegimeError(f"weight comparison needs regime THM1_RANGE1, got {regime_classify(env).value}")
    if not 0 < eps < 1:
        raise RegimeError("weight comparison needs 0 < eps < 1")
    q = _pos(p * rho + 2 * p * sigma - 1 + eps)
    lhs = p * sigma - (1 + eps) / 2
    rhs = (q - p * rho - 1 - eps) / 2
    return WeightComparison(lhs, rhs, lhs <= rhs + 1e-12)

