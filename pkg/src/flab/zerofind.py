"""Derivative-free zero localization by the argument principle.

``winding_count`` tracks the phase of f along a rectangle, refining the
boundary until every step turns by less than a quarter revolution, |f|
changes by less than a factor e^(pi/2), and no step is longer than a quarter
of its distance to the origin; the criteria must also survive one extra
halving of every step of the first accepted sampling.
``localize_zeros`` quadrisects boxes with nonzero winding until they are
smaller than the requested tolerance, checking at every split that the four
children account for exactly the parent's count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator

import numpy as np

from .cutplane import Box, cut_strip, is_off_cut, split_region
from .detp import determinant_function
from .errors import (BoundaryZeroError, ConfigError, CutError, NonIntegerWindingError,
                     NumericalError, SubdivisionBudgetError, WindingAdditivityError)

ScalarFunction = Callable[[complex], complex]

SNAP_TOL = 0.05
BOUNDARY_ZERO_RTOL = 1e-13
_MAX_PHASE_STEP = 0.5 * math.pi
_ORIGIN_SEGMENT_RATIO = 0.25

# Split fractions tried in order; off-centre so that zeros sitting on "nice"
# coordinates (the real axis, integers) rarely land on a dividing line.
_SPLITS = ((0.5123, 0.4877), (0.4711, 0.5289), (0.5437, 0.4561), (0.4591, 0.5407), (0.5269, 0.5371))
_REGION_JITTER = (0.0, 1.3e-3, 2.9e-3, 4.7e-3, 7.1e-3)


@dataclass(frozen=True)
class ZeroSet:
    """Zeros with multiplicities, kept sorted by (Re, Im)."""

    entries: tuple[tuple[complex, int], ...] = ()

    def __post_init__(self):
        cleaned = []
        for z, m in self.entries:
            z, m = complex(z), int(m)
            if m < 1:
                raise ValueError(f"multiplicity must be >= 1, got {m}")
            if not is_off_cut(z):
                raise CutError(f"zero {z!r} lies on the cut [0, inf)")
            cleaned.append((z, m))
        cleaned.sort(key=lambda e: (e[0].real, e[0].imag))
        object.__setattr__(self, "entries", tuple(cleaned))

    @classmethod
    def from_points(cls, points: Iterable[tuple[complex, int]], resolution: float = 0.0) -> "ZeroSet":
        """Build a ZeroSet, merging points within ``resolution * (1 + |z|)`` of each other."""
        clusters: list[list] = []
        for z, m in points:
            z = complex(z)
            for c in clusters:
                if abs(c[0] - z) <= resolution * (1.0 + abs(z)):
                    c[0] = (c[0] * c[1] + z * m) / (c[1] + m)
                    c[1] += m
                    break
            else:
                clusters.append([z, int(m)])
        return cls(tuple((z, m) for z, m in clusters))

    def __iter__(self) -> Iterator[tuple[complex, int]]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def locations(self) -> np.ndarray:
        return np.array([z for z, _ in self.entries], dtype=complex)

    @property
    def multiplicities(self) -> np.ndarray:
        return np.array([m for _, m in self.entries], dtype=int)

    @property
    def total_multiplicity(self) -> int:
        return sum(m for _, m in self.entries)

    def union(self, other: "ZeroSet") -> "ZeroSet":
        return ZeroSet(self.entries + other.entries)

    def scaled(self, c: complex) -> "ZeroSet":
        return ZeroSet(tuple((c * z, m) for z, m in self.entries))


@dataclass
class WindingLog:
    """Running certificate for a batch of winding computations."""

    windings: int = 0
    max_offset: float = 0.0
    additivity_checks: int = 0
    evaluations: int = 0
    values: list[float] = field(default_factory=list, repr=False)

    def record(self, raw: float, evals: int) -> None:
        self.windings += 1
        self.evaluations += evals
        self.max_offset = max(self.max_offset, abs(raw - round(raw)))
        self.values.append(raw)


def _contour_points(corners: np.ndarray, t: np.ndarray) -> np.ndarray:
    k = np.minimum(np.floor(t).astype(int), 3)
    frac = t - k
    return corners[k] + frac * (corners[k + 1] - corners[k])


def log_parts(f: ScalarFunction) -> Callable:
    """z -> (w, c) with log f = w + c, w's argument known only mod 2 pi and c continuous.

    Functions may supply ``f.log_parts`` (the determinant functions do, with c
    the log of a zero-free factor); otherwise w = log f(z) and c = 0.  Zero
    values give w = -inf.
    """
    native = getattr(f, "log_parts", None)
    if callable(native):
        def parts(z):
            w, c = native(z)
            return np.asarray(w, dtype=complex), np.asarray(c, dtype=complex)
        return parts

    def parts(z):
        v = np.asarray(f(z), dtype=complex)
        if np.any(~np.isfinite(v)):
            raise NumericalError("f is not finite at a sample point")
        with np.errstate(divide="ignore"):
            w = np.where(v == 0, complex(-np.inf, 0.0), np.log(np.where(v == 0, 1.0, v)))
        return w, np.zeros_like(w)

    return parts


def _wrap(x):
    return np.mod(np.asarray(x) + math.pi, 2 * math.pi) - math.pi


def winding_count(f: ScalarFunction, box: Box, *, samples_per_edge: int = 32,
                  max_evals: int = 200_000, log: WindingLog | None = None) -> int:
    """Number of zeros of f inside ``box`` (with multiplicity) from its phase along the boundary.

    Works on log f (see ``log_parts``), so values far outside the double
    range are fine.
    Raises BoundaryZeroError when |f| at a boundary sample drops below 1e-13
    times its value at both neighbouring samples (the scale is local because
    |f| may span many orders of magnitude along one contour), or when
    refinement keeps splitting an already minute boundary segment.
    """
    parts = log_parts(f)
    corners = np.array(box.corners() + (box.corners()[0],), dtype=complex)
    n = int(samples_per_edge)
    t = np.arange(4 * n) / n
    w, c = parts(_contour_points(corners, t))
    evals = len(t)
    thresh = math.log(BOUNDARY_ZERO_RTOL)
    verified = False
    while True:
        if np.any(np.isnan(w)) or np.any(np.isposinf(w.real)):
            raise NumericalError(f"f is not finite on the boundary of {box.as_tuple()}")
        logmod = w.real
        scale = np.minimum(np.roll(logmod, 1), np.roll(logmod, -1))
        small = np.isneginf(logmod) | (logmod <= thresh + scale)
        if small.any():
            z = _contour_points(corners, t[small][:1])[0]
            raise BoundaryZeroError(f"|f| vanishes near {z!r} on the boundary of {box.as_tuple()}")
        tt = np.append(t, 4.0)
        ww = np.append(w, w[0])
        wsteps = _wrap(np.diff(ww.imag))
        # |d log|w|| tracks |d arg w| for analytic w; a large modulus jump
        # flags a phase change that may have wrapped past +-pi unseen.
        bad = (np.abs(wsteps) >= _MAX_PHASE_STEP) | (np.abs(np.diff(ww.real)) >= _MAX_PHASE_STEP)
        # Branch points of lam^(+-1/2)-type families sit at the origin; keep
        # segments short relative to their distance from it.
        zz = _contour_points(corners, tt)
        bad |= np.abs(np.diff(zz)) > _ORIGIN_SEGMENT_RATIO * np.minimum(np.abs(zz[1:]), np.abs(zz[:-1]))
        if not bad.any():
            if verified:
                break
            # A step can straddle a zero so that both ends see the same |f|
            # and a phase change near 2 pi; halving every step once exposes it.
            bad = np.ones(len(t), dtype=bool)
            verified = True
        if np.any(np.diff(tt)[bad] < 1e-13):
            z = _contour_points(corners, t[bad][:1])[0]
            raise BoundaryZeroError(f"phase jump does not resolve near {z!r} on {box.as_tuple()}")
        new_t = 0.5 * (tt[:-1][bad] + tt[1:][bad])
        evals += len(new_t)
        if evals > max_evals:
            raise NonIntegerWindingError(
                f"boundary refinement budget ({max_evals} evaluations) exhausted on {box.as_tuple()}")
        new_w, new_c = parts(_contour_points(corners, new_t))
        t = np.concatenate([t, new_t])
        w = np.concatenate([w, new_w])
        c = np.concatenate([c, new_c])
        order = np.argsort(t, kind="stable")
        t, w, c = t[order], w[order], c[order]
    # The continuous part is single valued, so its increments telescope.
    cc = np.append(c, c[0])
    steps = wsteps + np.diff(cc.imag)
    raw = float(steps.sum() / (2.0 * math.pi))
    k = round(raw)
    if abs(raw - k) > SNAP_TOL:
        raise NonIntegerWindingError(f"winding {raw:.6f} is not within {SNAP_TOL} of an integer")
    if k < 0:
        raise NonIntegerWindingError(
            f"negative winding {k} on {box.as_tuple()}: f is not analytic there or the contour is under-resolved")
    if log is not None:
        log.record(raw, evals)
    return int(k)


def _quadrisect(f, box: Box, parent: int, samples: int, log: WindingLog | None):
    last: Exception | None = None
    for fx, fy in _SPLITS:
        children = box.split(fx, fy)
        try:
            counts = [winding_count(f, c, samples_per_edge=samples, log=log) for c in children]
            if sum(counts) != parent:
                counts = [winding_count(f, c, samples_per_edge=4 * samples, log=log) for c in children]
        except BoundaryZeroError as exc:
            last = exc
            continue
        if log is not None:
            log.additivity_checks += 1
        if sum(counts) != parent:
            raise WindingAdditivityError(
                f"children of {box.as_tuple()} wind {counts} (sum {sum(counts)}) but the parent winds {parent}")
        return children, counts
    raise BoundaryZeroError(f"every split of {box.as_tuple()} puts a zero on a dividing line") from last


def _newton(f, z0: complex, mult: int, box: Box, tol: float, iters: int = 40) -> complex | None:
    """Multiplicity-aware Newton iteration z -= m f / f', with f' by central differences."""
    parts = log_parts(f)

    def g(pts):
        w, c = parts(pts)
        return w + c

    z = z0
    for _ in range(iters):
        h = min(1e-7 * (1.0 + abs(z)), 1e-3 * box.diameter)
        pts = np.array([z, z + h, z - h, z + 1j * h, z - 1j * h])
        if not np.all(is_off_cut(pts)):
            return None
        vals = g(pts)
        if np.isneginf(vals[0].real):
            return z
        # f(pts) / f(z), free of the overall scale of f
        with np.errstate(over="ignore", invalid="ignore"):
            _, rp, rm, rip, rim = np.exp(vals - vals[0])
        deriv = 0.5 * ((rp - rm) / (2 * h) + (rip - rim) / (2j * h))
        if deriv == 0 or not np.isfinite(deriv):
            return None
        step = mult / deriv
        z = z - step
        if not box.contains(z):
            return None
        if abs(step) <= max(1e-3 * tol, 4e-16 * abs(z)):
            return z
    return None


def _tiny_box(z: complex, tol: float) -> Box | None:
    w = 0.35 * tol
    try:
        return Box(z.real - w, z.real + w, z.imag - w, z.imag + w)
    except (CutError, ConfigError):
        return None


def _shortcut(f, box: Box, count: int, tol: float, samples: int, log) -> complex | None:
    """Try to certify all ``count`` zeros of ``box`` inside a tol-sized box around a Newton limit."""
    z = _newton(f, box.center, count, box, tol)
    if z is None:
        return None
    tiny = _tiny_box(z, tol)
    if tiny is None or not box.contains_box(tiny):
        return None
    try:
        if winding_count(f, tiny, samples_per_edge=samples, log=log) == count:
            return z
    except NumericalError:
        pass
    return None


def localize_zeros(f: ScalarFunction, region: Box, tol: float, *, max_depth: int = 60,
                   polish: bool = True, samples_per_edge: int = 32,
                   log: WindingLog | None = None) -> ZeroSet:
    """All zeros of f in ``region`` to within ``tol``, with multiplicities.

    Boxes are quadrisected until their diameter is at most ``tol``, at which
    point the centre (optionally Newton-polished inside the box) is reported.
    A box whose zeros all fall inside a tol-sized box around a Newton limit,
    certified by a winding count, is finished early.
    """
    if not tol > 0:
        raise ConfigError("tol must be positive")
    reach = max(abs(c) for c in region.corners())
    if tol < 1e-13 * (1.0 + reach):
        raise ConfigError(f"tol {tol} is below double-precision resolution for this region")
    total = winding_count(f, region, samples_per_edge=samples_per_edge, log=log)
    found: list[tuple[complex, int]] = []
    stack = [(region, total, 0)] if total else []
    while stack:
        box, count, depth = stack.pop()
        if box.diameter <= tol:
            z = box.center
            if polish:
                z = _newton(f, z, count, box, tol) or z
            found.append((z, count))
            continue
        z = _shortcut(f, box, count, tol, samples_per_edge, log)
        if z is not None:
            found.append((z, count))
            continue
        if depth >= max_depth:
            raise SubdivisionBudgetError(f"subdivision depth {max_depth} exceeded at {box.as_tuple()}")
        children, counts = _quadrisect(f, box, count, samples_per_edge, log)
        for child, k in zip(children, counts):
            if k:
                stack.append((child, k, depth + 1))
    # An even-order zero on a dividing line leaves the phase untouched, so the
    # children meeting there share its multiplicity; merge them back.
    zeros = ZeroSet.from_points(found, resolution=tol)
    assert zeros.total_multiplicity == total
    return zeros


@dataclass(frozen=True)
class RegionResult:
    zeros: ZeroSet
    boxes: tuple[Box, ...]
    unresolved: tuple[float, float, float, float] | None


def localize_in_region(f: ScalarFunction, rect, tol: float, *, gap: float | None = None,
                       **kwargs) -> RegionResult:
    """Localize zeros in a rectangle that may straddle the cut.

    The rectangle is split around [0, inf) (see ``split_region``); on a
    boundary zero the outer edges and the gap are nudged outward along a
    fixed sequence and the search restarts.
    """
    x0, x1, y0, y1 = map(float, rect)
    last: Exception | None = None
    for j in _REGION_JITTER:
        wx, wy = j * (x1 - x0), j * (y1 - y0)
        jittered = (x0 - wx, x1 + wx, y0 - wy, y1 + wy)
        g = None if gap is None else gap * (1.0 + 100 * j)
        boxes = split_region(jittered, g)
        try:
            parts = [localize_zeros(f, b, tol, **kwargs) for b in boxes]
        except BoundaryZeroError as exc:
            last = exc
            continue
        zeros = ZeroSet(tuple(e for part in parts for e in part))
        return RegionResult(zeros, tuple(boxes), cut_strip(jittered, g))
    raise BoundaryZeroError(f"could not place region edges clear of zeros for {rect}") from last


def eigenvalues_of_finite_type(family, p: int | None, region, tol: float, **kwargs) -> ZeroSet:
    """Eigenvalues of finite type of I + T(.) in ``region`` with algebraic multiplicities.

    ``region`` is either a Box clear of the cut or a raw (x0, x1, y0, y1)
    rectangle, which is split around the cut first.
    """
    f = determinant_function(family, p)
    if isinstance(region, Box):
        return localize_zeros(f, region, tol, **kwargs)
    return localize_in_region(f, region, tol, **kwargs).zeros
