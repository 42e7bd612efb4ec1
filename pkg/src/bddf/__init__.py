"""Background driving distribution functions of selfdecomposable laws.

The usual entry points::

    from bddf import make_family, bddf
    bddf(make_family("gamma", alpha=2, lam=1), 1.0).value
"""

from .catalog import (
    FamilyDescriptor,
    FamilyId,
    ValidationError,
    bdcf_exponent,
    closed_form_bddf,
    family_names,
    log_cf,
    make_family,
)
from .inversion import CdfEstimate, QuadratureConfig, bddf, cdf_of_x, invert_cdf, invert_cdf_symmetric

__version__ = "0.1.0"

__all__ = [
    "FamilyDescriptor",
    "FamilyId",
    "ValidationError",
    "bdcf_exponent",
    "closed_form_bddf",
    "family_names",
    "log_cf",
    "make_family",
    "CdfEstimate",
    "QuadratureConfig",
    "bddf",
    "cdf_of_x",
    "invert_cdf",
    "invert_cdf_symmetric",
]
