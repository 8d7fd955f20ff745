"""Moments, cumulants and criticality diagnostics of counting distributions.

Means and variances follow from per-pair accumulation: the detection
trinomials of distinct pairs are independent, so their means and variances
add.  The per-pair variance used in production,

    var_pair = 2 kappa v^2 + 2 kappa^2 v^2 (1 - 2 v^2),

is the exact trinomial variance.  A simpler recurrence with increment
4 kappa^2 v^2 (1 - v^2) coincides with it only at kappa = 1 and is kept as
`variance_by_recurrence`; the gap between the two at kappa < 1 is
quantified rather than hidden.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import counting
from .counting import CountDistribution, EVERY_SECOND, TOTAL
from .spectrum import FERROMAGNETIC, ModelParams, PairSpectrum, build_spectrum

SUB_POISSONIAN = "sub_poissonian"
SUPER_POISSONIAN = "super_poissonian"
POISSONIAN = "poissonian_within_tol"

FANO_TOLERANCE = 1e-9
# Distributions with parity contrast above this count as even/odd split.
# Sits an order of magnitude between the two reference regimes (~0.37 for
# a split N=1000 chain at kappa = 0.999 vs ~0.018 for unsplit N=4000).
SPLIT_CONTRAST_THRESHOLD = 0.1


@dataclass(frozen=True)
class MomentSet:
    """Mean, variance, Fano factor, cumulants 2..4 and parity sum of a distribution."""

    mean: float
    variance: float
    fano: float          # NaN when the mean vanishes
    cumulant2: float
    cumulant3: float
    cumulant4: float
    parity_sum: float


@dataclass(frozen=True)
class SweepRecord:
    """One grid point of a field sweep: moments, derivatives, classification.

    d_mean_dg / d_var_dg are central finite differences of the per-site mean
    and variance with step fd_step; near_critical_warning marks points closer
    to g = 1 than ten steps, where the differences start chasing the
    log-divergent derivative.
    """

    params: ModelParams
    moments: MomentSet
    d_mean_dg: float
    d_var_dg: float
    fd_step: float
    classification: str
    near_critical_warning: bool
    count_mode: str = TOTAL

    @property
    def mean_per_site(self) -> float:
        m = self.moments.mean / self.params.n_sites
        if self.params.magnetic_sign == FERROMAGNETIC:
            return ferromagnetic_mean(m)
        return m

    @property
    def var_per_site(self) -> float:
        return self.moments.variance / self.params.n_sites

    @property
    def fano(self) -> float:
        mean = self.mean_per_site * self.params.n_sites
        return self.moments.variance / mean if mean > 0.0 else float("nan")

    @property
    def parity_contrast(self) -> float:
        return self.moments.parity_sum


def mean_by_recurrence(spectrum: PairSpectrum, kappa: float,
                       n_pairs: int | None = None) -> float:
    """Mean count from the per-pair increments: 2 kappa sum_k v_k^2."""
    v = counting._selected_occupations(spectrum, n_pairs)
    return float(2.0 * kappa * np.sum(v))


def variance_exact(spectrum: PairSpectrum, kappa: float,
                   n_pairs: int | None = None) -> float:
    """Variance from exact per-pair trinomial variances (independent pairs add)."""
    v = counting._selected_occupations(spectrum, n_pairs)
    return float(np.sum(2.0 * kappa * v + 2.0 * kappa * kappa * v * (1.0 - 2.0 * v)))


def variance_by_recurrence(spectrum: PairSpectrum, kappa: float,
                           n_pairs: int | None = None) -> float:
    """Variance accumulated with the rescaled pair increment 4 kappa^2 v^2 (1 - v^2).

    Exact only at kappa = 1, where it equals variance_exact; at kappa < 1 it
    misses the shot noise of undetected particles.  Kept alongside the exact
    form so the difference between the two treatments stays measurable.
    """
    v = counting._selected_occupations(spectrum, n_pairs)
    return float(np.sum(4.0 * kappa * kappa * v * (1.0 - v)))


def cumulants_from_distribution(dist: CountDistribution) -> MomentSet:
    """Central moments mu_2..mu_4 by direct summation; kappa_4 = mu_4 - 3 mu_2^2."""
    p = dist.probs
    m = np.arange(len(p), dtype=float)
    mean = float(np.dot(p, m))
    d = m - mean
    mu2 = float(np.dot(p, d ** 2))
    mu3 = float(np.dot(p, d ** 3))
    mu4 = float(np.dot(p, d ** 4))
    signs = np.where(np.arange(len(p)) % 2 == 0, 1.0, -1.0)
    parity = float(np.dot(p, signs))
    fano = mu2 / mean if mean > 0.0 else float("nan")
    return MomentSet(mean=mean, variance=mu2, fano=fano,
                     cumulant2=mu2, cumulant3=mu3, cumulant4=mu4 - 3.0 * mu2 * mu2,
                     parity_sum=parity)


def ferromagnetic_mean(mean_per_site: float) -> float:
    """Mean per site of the ferromagnetic mirror: 1/2 - mean_per_site.

    The mirror flips the magnetization offset and leaves the variance
    untouched.  Note the image can reach zero or below once the
    antiferromagnetic filling exceeds one half (e.g. any g > 0 at kappa = 1),
    where a Fano factor stops being meaningful; classification then falls
    back to the sign of variance - mean.
    """
    return 0.5 - mean_per_site


def parity_contrast(dist: CountDistribution) -> float:
    """Alternating sum sum_m (-1)^m p(m); compare SPLIT_CONTRAST_THRESHOLD."""
    return dist.parity_sum


def is_split(contrast: float, threshold: float = SPLIT_CONTRAST_THRESHOLD) -> bool:
    return contrast > threshold


def classify_poissonian(mean: float, variance: float,
                        tol: float = FANO_TOLERANCE) -> str:
    """Sub/super/Poissonian from the Fano factor with a tolerance band around 1.

    For mean <= 0 (possible for ferromagnetic-transformed means) the Fano
    factor is undefined; the comparison of variance against mean decides.
    """
    if mean > 0.0:
        fano = variance / mean
        if abs(fano - 1.0) <= tol:
            return POISSONIAN
        return SUB_POISSONIAN if fano < 1.0 else SUPER_POISSONIAN
    if abs(variance - mean) <= tol:
        return POISSONIAN
    return SUPER_POISSONIAN if variance > mean else SUB_POISSONIAN


def _mode_distribution(spectrum, kappa, count_mode):
    if count_mode == EVERY_SECOND:
        return counting.every_second_distribution(spectrum, kappa)
    return counting.distribution(spectrum, kappa)


def _mode_mean_variance(spectrum, kappa, count_mode):
    n_pairs = spectrum.n_pairs if count_mode == TOTAL else spectrum.n_pairs // 2
    return (mean_by_recurrence(spectrum, kappa, n_pairs),
            variance_exact(spectrum, kappa, n_pairs))


def derivative_sweep(params_template: ModelParams, g_grid, step: float = 1e-3,
                     count_mode: str = TOTAL) -> list[SweepRecord]:
    """Sweep the reduced field: moments, central-difference derivatives, classification.

    g_grid must be strictly increasing and step smaller than the minimum grid
    spacing.  Each grid point is independent of the others (callers may farm
    them out); records come back in grid order regardless.
    """
    g_grid = np.asarray(g_grid, dtype=float)
    if len(g_grid) == 0:
        raise ValueError("g_grid must be nonempty")
    if len(g_grid) > 1:
        spacing = np.diff(g_grid)
        if np.any(spacing <= 0.0):
            raise ValueError("g_grid must be strictly increasing")
        if step >= spacing.min():
            raise ValueError(f"fd step {step} must be below the minimum grid "
                             f"spacing {spacing.min()}")
    if step <= 0.0:
        raise ValueError("fd step must be positive")
    if count_mode == EVERY_SECOND and params_template.n_sites % 4:
        raise ValueError("every-second sweeps need n_sites divisible by 4")

    n = params_template.n_sites
    fm = params_template.magnetic_sign == FERROMAGNETIC

    def at(gv):
        return build_spectrum(replace(params_template, g=gv))

    records = []
    for g in g_grid:
        dist = _mode_distribution(at(g), params_template.kappa, count_mode)
        moments = cumulants_from_distribution(dist)

        mean_lo, var_lo = _mode_mean_variance(at(g - step), params_template.kappa, count_mode)
        mean_hi, var_hi = _mode_mean_variance(at(g + step), params_template.kappa, count_mode)
        d_mean = (mean_hi - mean_lo) / (2.0 * step * n)
        d_var = (var_hi - var_lo) / (2.0 * step * n)

        mean_site = moments.mean / n
        if fm:
            mean_site = ferromagnetic_mean(mean_site)
            d_mean = -d_mean
        label = classify_poissonian(mean_site * n, moments.variance)
        records.append(SweepRecord(
            params=replace(params_template, g=float(g)),
            moments=moments,
            d_mean_dg=d_mean,
            d_var_dg=d_var,
            fd_step=step,
            classification=label,
            near_critical_warning=abs(g - 1.0) < 10.0 * step,
            count_mode=count_mode,
        ))
    return records
