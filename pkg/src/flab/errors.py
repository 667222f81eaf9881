"""Exception hierarchy.

Configuration and regime problems map to CLI exit code 2, numerical
failures (winding, subdivision budget, anchor search) to exit code 3.
"""

from __future__ import annotations


class FlabError(Exception):
    exit_code = 1


class ConfigError(FlabError, ValueError):
    exit_code = 2


class CutError(ConfigError):
    """A point or box touches the guard band around the positive semi-axis."""


class RegimeError(ConfigError):
    """Exponent regime is unsupported or incompatible with the requested sum."""


class NumericalError(FlabError, ArithmeticError):
    exit_code = 3


class BoundaryZeroError(NumericalError):
    """|f| collapsed on a contour, i.e. a zero sits on (or very near) the boundary."""


class NonIntegerWindingError(NumericalError):
    pass


class WindingAdditivityError(NumericalError):
    pass


class SubdivisionBudgetError(NumericalError):
    pass


class AnchorNotFoundError(NumericalError):
    pass
