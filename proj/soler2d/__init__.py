"""Pseudo-spectral simulator and verification suite for the 2d cubic
Dirac (Soler) equation.

Thin wrapper over the compiled extension; see the function docstrings in
``soler2d._soler2d`` for the full signatures.
"""

from ._soler2d import (
    dirac_exponential,
    fit_exponent,
    initial_data_norms,
    run_and_write,
    run_simulation,
    soler_density,
    verify_algebra,
)

__all__ = [
    "dirac_exponential",
    "fit_exponent",
    "initial_data_norms",
    "run_and_write",
    "run_simulation",
    "soler_density",
    "verify_algebra",
]
