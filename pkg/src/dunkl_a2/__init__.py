"""Dunkl kernel, generalized Bessel function and intertwining density for the root system A2."""

from .bessel import bessel_J, bessel_J_deriv
from .kernels import (
    ChamberError,
    DomainError,
    chamber_invariants,
    density_F,
    dunkl_E,
    dunkl_E_via_density,
    gen_bessel_J,
    vandermonde,
    verify_derivation_identities,
    weight_W,
)
from .poly_oracle import gamma_k, gamma_report, oracle_E, oracle_J

__version__ = "0.1.0"

__all__ = [
    "ChamberError",
    "DomainError",
    "bessel_J",
    "bessel_J_deriv",
    "chamber_invariants",
    "density_F",
    "dunkl_E",
    "dunkl_E_via_density",
    "gamma_k",
    "gamma_report",
    "gen_bessel_J",
    "oracle_E",
    "oracle_J",
    "vandermonde",
    "verify_derivation_identities",
    "weight_W",
]
