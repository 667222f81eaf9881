"""Eigenvalues of finite type for analytic operator families on the slit plane.

Regularized determinants, argument-principle zero localization and the
weighted eigenvalue sums they are measured against.
"""

__version__ = "0.1.0"

from .cutplane import Box, CutPoint, dist_to_cut, sqrt_cut  # noqa: E402
from .detp import det_p, det_p_eigen_oracle, determinant_function  # noqa: E402
from .errors import ConfigError, CutError, FlabError, NumericalError, RegimeError  # noqa: E402
from .families import (OperatorFamily, family_inverse_sqrt, family_scalar, family_sqrt,  # noqa: E402
                       verify_envelope)
from .spectra import GrowthEnvelope, Regime, derive_bundle, regime_classify, sum_inequality  # noqa: E402
from .zerofind import ZeroSet, eigenvalues_of_finite_type, localize_zeros, winding_count  # noqa: E402

__all__ = [
    "Box", "CutPoint", "dist_to_cut", "sqrt_cut",
    "det_p", "det_p_eigen_oracle", "determinant_function",
    "ConfigError", "CutError", "FlabError", "NumericalError", "RegimeError",
    "OperatorFamily", "family_inverse_sqrt", "family_scalar", "family_sqrt", "verify_envelope",
    "GrowthEnvelope", "Regime", "derive_bundle", "regime_classify", "sum_inequality",
    "ZeroSet", "eigenvalues_of_finite_type", "localize_zeros", "winding_count",
]
