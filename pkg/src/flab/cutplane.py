"""Geometry of the slit plane C minus [0, inf).

Everything here is vectorized over numpy arrays where it makes sense; scalar
inputs give scalar outputs.  Points closer to the cut than the guard band
``GUARD_RTOL * (1 + |z|)`` are treated as lying on it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, CutError, RegimeError

GUARD_RTOL = 1e-9


def dist_to_cut(z):
    """Euclidean distance from ``z`` to the closed positive semi-axis."""
    z = np.asarray(z, dtype=complex)
    d = np.where(z.real >= 0, np.abs(z.imag), np.abs(z))
    return float(d) if d.ndim == 0 else d


def guard_width(z, rtol: float = GUARD_RTOL):
    return rtol * (1.0 + np.abs(z))


def is_off_cut(z, rtol: float = GUARD_RTOL):
    z = np.asarray(z, dtype=complex)
    ok = np.isfinite(z) & (np.asarray(dist_to_cut(z)) > guard_width(z, rtol))
    return bool(ok) if ok.ndim == 0 else ok


def check_off_cut(z, rtol: float = GUARD_RTOL) -> None:
    ok = np.asarray(is_off_cut(z, rtol))
    if not ok.all():
        bad = np.asarray(z, dtype=complex).reshape(-1)[~ok.reshape(-1)][0]
        raise CutError(f"point {bad!r} lies inside the guard band of the cut [0, inf)")


@dataclass(frozen=True)
class CutPoint:
    value: complex

    def __post_init__(self):
        object.__setattr__(self, "value", complex(self.value))
        check_off_cut(self.value)

    def __complex__(self) -> complex:
        return self.value


def _raw(z):
    return z.value if isinstance(z, CutPoint) else z


def sqrt_cut(z):
    """Square root with arg z taken in (0, 2pi); the image is the open upper half-plane."""
    z = _raw(z)
    check_off_cut(z)
    w = np.sqrt(np.asarray(z, dtype=complex))
    w = np.where(w.imag < 0, -w, w)
    return complex(w) if w.ndim == 0 else w


def invert_point(z):
    z = _raw(z)
    if np.any(np.asarray(z) == 0):
        raise CutError("cannot invert the origin")
    check_off_cut(z)
    return 1.0 / z


def scale_point(z, M: float, rho: float, sigma: float):
    """Map z to ``M**(1/(rho+sigma)) * z``."""
    if rho + sigma == 0:
        raise RegimeError("rho + sigma = 0 has no scaling exponent")
    if M <= 0:
        raise ValueError("M must be positive")
    return M ** (1.0 / (rho + sigma)) * _raw(z)


def _rect_dist_to_cut(xmin, xmax, ymin, ymax) -> float:
    dx = max(0.0, -xmax)
    dy = 0.0 if ymin <= 0.0 <= ymax else min(abs(ymin), abs(ymax))
    return math.hypot(dx, dy)


def _rect_max_modulus(xmin, xmax, ymin, ymax) -> float:
    return math.hypot(max(abs(xmin), abs(xmax)), max(abs(ymin), abs(ymax)))


@dataclass(frozen=True)
class Box:
    """Closed axis-aligned rectangle that stays clear of the cut's guard band."""

    xmin: float
    xmax: float
    ymin: float
    ymax: float

    def __post_init__(self):
        if not (self.xmin < self.xmax and self.ymin < self.ymax):
            raise ConfigError(f"degenerate box {self.as_tuple()}")
        d = _rect_dist_to_cut(*self.as_tuple())
        if d <= GUARD_RTOL * (1.0 + _rect_max_modulus(*self.as_tuple())):
            raise CutError(f"box {self.as_tuple()} intersects the guard band of the cut")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.xmin, self.xmax, self.ymin, self.ymax)

    @property
    def width(self) -> float:
        return self.xmax - self.xmin

    @property
    def height(self) -> float:
        return self.ymax - self.ymin

    @property
    def diameter(self) -> float:
        return math.hypot(self.width, self.height)

    @property
    def center(self) -> complex:
        return complex(0.5 * (self.xmin + self.xmax), 0.5 * (self.ymin + self.ymax))

    def corners(self) -> tuple[complex, complex, complex, complex]:
        """Counterclockwise, starting bottom-left."""
        return (
            complex(self.xmin, self.ymin),
            complex(self.xmax, self.ymin),
            complex(self.xmax, self.ymax),
            complex(self.xmin, self.ymax),
        )

    def contains(self, z: complex) -> bool:
        return self.xmin <= z.real <= self.xmax and self.ymin <= z.imag <= self.ymax

    def contains_box(self, other: "Box") -> bool:
        return (self.xmin <= other.xmin and other.xmax <= self.xmax
                and self.ymin <= other.ymin and other.ymax <= self.ymax)

    def split(self, fx: float = 0.5, fy: float = 0.5) -> tuple["Box", "Box", "Box", "Box"]:
        """Quadrisect at fractions ``fx``, ``fy`` of the width and height."""
        xm = self.xmin + fx * self.width
        ym = self.ymin + fy * self.height
        return (
            Box(self.xmin, xm, self.ymin, ym),
            Box(xm, self.xmax, self.ymin, ym),
            Box(xm, self.xmax, ym, self.ymax),
            Box(self.xmin, xm, ym, self.ymax),
        )

    def scaled(self, c: float) -> "Box":
        if c <= 0:
            raise ValueError("scale factor must be positive")
        return Box(c * self.xmin, c * self.xmax, c * self.ymin, c * self.ymax)


def default_gap(rect) -> float:
    return 1e-7 * (1.0 + _rect_max_modulus(*rect))


def split_region(rect, gap: float | None = None) -> list[Box]:
    """Cover ``rect`` minus a strip of half-width ``gap`` around [0, inf) by valid boxes.

    A rectangle already clear of the cut comes back unchanged.  Otherwise the
    result is the left part (Re < -gap) and the upper/lower parts (|Im| > gap);
    zeros inside the removed strip are not searched.
    """
    x0, x1, y0, y1 = map(float, rect)
    if not (x0 < x1 and y0 < y1):
        raise ConfigError(f"degenerate region {rect}")
    try:
        return [Box(x0, x1, y0, y1)]
    except CutError:
        pass
    g = default_gap(rect) if gap is None else float(gap)
    boxes = []
    if x0 < -g:
        boxes.append(Box(x0, min(x1, -g), y0, y1))
    if x1 > -g:
        xl = max(x0, -g)
        if y1 > g:
            boxes.append(Box(xl, x1, max(y0, g), y1))
        if y0 < -g:
            boxes.append(Box(xl, x1, y0, min(y1, -g)))
    return boxes


def cut_strip(rect, gap: float | None = None) -> tuple[float, float, float, float] | None:
    """The part of ``rect`` left unsearched by :func:`split_region`, or None."""
    x0, x1, y0, y1 = map(float, rect)
    try:
        Box(x0, x1, y0, y1)
        return None
    except CutError:
        pass
    g = default_gap(rect) if gap is None else float(gap)
    if x1 <= -g:
        return None
    return (max(x0, -g), x1, max(y0, -g), min(y1, g))
