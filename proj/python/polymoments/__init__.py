"""Moment engine for polynomial processes."""

from ._core import (
    ConfigError,
    DegreeIncrease,
    NumericalError,
    __version__,
    bergomi_vix_moment,
    build_dual_matrix,
    chen_signature,
    conditional_moment,
    config_hash,
    enumerate_basis,
    execute,
    expected_signature_bm,
    expm,
    moment_vector,
    rough_lognormal_bounds,
    rough_spot_moment,
    volterra_vix_moment_closed,
)

__all__ = [
    "ConfigError",
    "DegreeIncrease",
    "NumericalError",
    "__version__",
    "bergomi_vix_moment",
    "build_dual_matrix",
    "chen_signature",
    "conditional_moment",
    "config_hash",
    "enumerate_basis",
    "execute",
    "expected_signature_bm",
    "expm",
    "moment_vector",
    "rough_lognormal_bounds",
    "rough_spot_moment",
    "volterra_vix_moment_closed",
]
