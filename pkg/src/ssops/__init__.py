"""Numerical toolkit for fractional integrals with kernels singular on the unit sphere."""

from .errors import AccuracyError, DomainError, PoleError, ResolutionError, SsopsError, ValidationError
from .fields import GridSpec, SampledField
from .kernels import Family, KernelSpec, kernel_value, multiplier
from .regions import RegionQuery, lemma_one, lemma_two, remark_one, theorem_one, theorem_two
from .specfun import BesselOrder, bessel_j, gamma_complex, normalized_bessel

__all__ = [
    "AccuracyError", "DomainError", "PoleError", "ResolutionError", "SsopsError", "ValidationError",
    "GridSpec", "SampledField", "Family", "KernelSpec", "kernel_value", "multiplier",
    "RegionQuery", "lemma_one", "lemma_two", "remark_one", "theorem_one", "theorem_two",
    "BesselOrder", "bessel_j", "gamma_complex", "normalized_bessel",
]
__version__ = "0.1.0"
