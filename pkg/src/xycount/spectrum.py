"""Bogoliubov pair spectrum of the 1D transverse asymmetric XY chain.

The quadratic fermion chain (tunneling J, pairing anisotropy gamma, reduced
transverse field g = h/J, periodic boundaries) decouples in momentum space
into independent mode pairs (k, N-k).  The ground state is a BCS product
over those pairs, and the only quantity the counting machinery ever needs
is the pair occupation probability v_k^2.  This module is the single source
of v_k^2 for the rest of the package.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Lambda below this is treated as an exact Fermi point (gapless mode).
DEGENERACY_CUT = 1e-14

ANTIFERROMAGNETIC = "afm"
FERROMAGNETIC = "fm"
MAGNETIC_SIGNS = (ANTIFERROMAGNETIC, FERROMAGNETIC)


@dataclass(frozen=True)
class ModelParams:
    """Chain parameters.

    n_sites must be even (the momentum pairing needs it), kappa is the
    detection efficiency in [0, 1], and magnetic_sign selects whether means
    are reported for the antiferromagnetic chain or its ferromagnetic
    mirror (see moments.ferromagnetic_mean).
    """

    n_sites: int
    gamma: float
    g: float
    kappa: float = 1.0
    magnetic_sign: str = ANTIFERROMAGNETIC

    def __post_init__(self):
        if self.n_sites < 2 or self.n_sites % 2 != 0:
            raise ValueError(f"n_sites must be even and >= 2, got {self.n_sites}")
        if not (np.isfinite(self.gamma) and np.isfinite(self.g)):
            raise ValueError("gamma and g must be finite")
        if not 0.0 <= self.kappa <= 1.0:
            raise ValueError(f"kappa must lie in [0, 1], got {self.kappa}")
        if self.magnetic_sign not in MAGNETIC_SIGNS:
            raise ValueError(f"magnetic_sign must be one of {MAGNETIC_SIGNS}")

    @property
    def n_pairs(self) -> int:
        return self.n_sites // 2


@dataclass(frozen=True)
class PairSpectrum:
    """Per-pair Bogoliubov data for k = 1..N/2, ordered by k.

    u_k^2 is derived as 1 - v_k^2 rather than stored, so the constraint
    u^2 + v^2 = 1 holds exactly.  `degenerate` marks gapless modes that sit
    on a Fermi point; their occupation is pinned to 1/2.
    """

    phi: np.ndarray
    v_sq: np.ndarray
    epsilon: np.ndarray
    degenerate: np.ndarray
    params: ModelParams | None = None

    @property
    def u_sq(self) -> np.ndarray:
        return 1.0 - self.v_sq

    @property
    def n_pairs(self) -> int:
        return len(self.v_sq)

    @classmethod
    def from_occupations(cls, v_sq) -> "PairSpectrum":
        """Synthetic spectrum from raw occupations (for tests and cross-checks).

        Angles and energies are not meaningful here and are filled with NaN.
        """
        v_sq = np.asarray(v_sq, dtype=float)
        if v_sq.ndim != 1 or len(v_sq) == 0:
            raise ValueError("v_sq must be a nonempty 1D array")
        if np.any((v_sq < 0.0) | (v_sq > 1.0)):
            raise ValueError("occupations must lie in [0, 1]")
        nan = np.full_like(v_sq, np.nan)
        return cls(phi=nan, v_sq=v_sq, epsilon=nan,
                   degenerate=np.zeros(len(v_sq), dtype=bool), params=None)


def pair_occupation(phi, gamma, g):
    """Ground-state occupation v^2 of the momentum pair at angle phi.

    v^2 = (1 - (cos phi - g)/Lambda) / 2,
    Lambda = sqrt((cos phi - g)^2 + gamma^2 sin^2 phi).

    The half-angle identity avoids the branch ambiguity of tan(theta) and is
    stable near phi = 0, pi.  The branch is the one with v^2 -> 1 as
    g -> inf: the field favours occupation, so the mean count approaches
    kappa*N in that limit.  Gapless modes (Lambda ~ 0, a Fermi point) get
    v^2 = 1/2, which keeps the mean continuous through gamma = 0.
    """
    phi = np.asarray(phi, dtype=float)
    x = np.cos(phi) - g
    lam = np.hypot(x, gamma * np.sin(phi))
    degenerate = lam < DEGENERACY_CUT
    safe = np.where(degenerate, 1.0, lam)
    v_sq = np.where(degenerate, 0.5, 0.5 * (1.0 - x / safe))
    # hypot can round Lambda a hair below |x|; keep occupations in range
    return np.clip(v_sq, 0.0, 1.0)


def build_spectrum(params: ModelParams) -> PairSpectrum:
    """Pair spectrum {phi_k, v_k^2, epsilon_k} for k = 1..N/2, phi_k = 2 pi k / N.

    epsilon_k = 2 Lambda_k is the quasiparticle energy in units of J; it only
    feeds gap diagnostics, counting consumes v_k^2 alone.  The k = N/2 mode
    (phi = pi) is kept as an ordinary pair entry and k = 0 is excluded, so the
    product structure downstream runs over exactly N/2 factors; the
    exact-diagonalization oracle bounds the O(1/N) boundary effect of that
    convention.
    """
    k = np.arange(1, params.n_pairs + 1)
    phi = 2.0 * np.pi * k / params.n_sites
    x = np.cos(phi) - params.g
    lam = np.hypot(x, params.gamma * np.sin(phi))
    degenerate = lam < DEGENERACY_CUT
    safe = np.where(degenerate, 1.0, lam)
    v_sq = np.where(degenerate, 0.5, 0.5 * (1.0 - x / safe))
    v_sq = np.clip(v_sq, 0.0, 1.0)
    return PairSpectrum(phi=phi, v_sq=v_sq, epsilon=2.0 * lam,
                        degenerate=degenerate, params=params)


def spectral_gap(params: ModelParams) -> float:
    """Minimum quasiparticle energy on the discrete momentum grid.

    For gamma > 0 this closes only as g -> 1 with N -> inf (the quantum
    critical point); for gamma = 0 it vanishes on the whole gapless
    segment -1 <= g <= 1 once the grid resolves the Fermi points.
    """
    return float(build_spectrum(params).epsilon.min())
