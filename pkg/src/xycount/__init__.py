"""Exact counting statistics for the 1D transverse asymmetric XY chain.

Counting distributions, moments and criticality diagnostics for the family
of quadratic fermion chains (equivalently, transverse XY spin chains)
parametrized by anisotropy gamma, reduced field g = h/J and detector
efficiency kappa, with small-system exact-diagonalization oracles backing
every analytic path.
"""

from .spectrum import (
    ANTIFERROMAGNETIC,
    FERROMAGNETIC,
    ModelParams,
    PairSpectrum,
    build_spectrum,
    pair_occupation,
    spectral_gap,
)
from .counting import (
    EVERY_SECOND,
    TOTAL,
    CountDistribution,
    PairDetection,
    distribution,
    distribution_from_polynomial,
    every_second_distribution,
    generating_polynomial,
    pair_probs,
    parity_product,
)
from .moments import (
    MomentSet,
    SweepRecord,
    classify_poissonian,
    cumulants_from_distribution,
    derivative_sweep,
    ferromagnetic_mean,
    mean_by_recurrence,
    parity_contrast,
    variance_exact,
    variance_by_recurrence,
)

__all__ = [
    "MomentSet",
    "SweepRecord",
    "classify_poissonian",
    "cumulants_from_distribution",
    "derivative_sweep",
    "ferromagnetic_mean",
    "mean_by_recurrence",
    "parity_contrast",
    "variance_exact",
    "variance_by_recurrence",
    "ANTIFERROMAGNETIC",
    "FERROMAGNETIC",
    "EVERY_SECOND",
    "TOTAL",
    "CountDistribution",
    "ModelParams",
    "PairDetection",
    "PairSpectrum",
    "build_spectrum",
    "distribution",
    "distribution_from_polynomial",
    "every_second_distribution",
    "generating_polynomial",
    "pair_occupation",
    "pair_probs",
    "parity_product",
    "spectral_gap",
]

__version__ = "0.1.0"
