import numpy as np
import pytest

from xycount import (
    CountDistribution,
    ModelParams,
    PairSpectrum,
    build_spectrum,
    classify_poissonian,
    cumulants_from_distribution,
    derivative_sweep,
    distribution,
    ferromagnetic_mean,
    mean_by_recurrence,
    parity_contrast,
    parity_product,
    variance_exact,
    variance_by_recurrence,
)
from xycount.moments import (
    POISSONIAN,
    SUB_POISSONIAN,
    SUPER_POISSONIAN,
    is_split,
)


def random_cases(seed, n_cases, max_sites=600):
    rng = np.random.default_rng(seed)
    for _ in range(n_cases):
        n_sites = 2 * int(rng.integers(2, max_sites // 2 + 1))
        yield ModelParams(n_sites=n_sites, gamma=rng.uniform(0, 1),
                          g=rng.uniform(0, 3), kappa=rng.uniform(0, 1))


class TestMeanByRecurrence:
    def test_zero_efficiency(self):
        spectrum = build_spectrum(ModelParams(n_sites=32, gamma=1.0, g=1.0))
        assert mean_by_recurrence(spectrum, 0.0) == 0.0

    def test_ising_zero_field_filling(self):
        # exact lattice sum: (2/N) sum_k sin^2(pi k/N) over k=1..N/2 is 1/2 + 1/N
        for n in (100, 300):
            spectrum = build_spectrum(ModelParams(n_sites=n, gamma=1.0, g=0.0))
            assert mean_by_recurrence(spectrum, 1.0) / n == pytest.approx(0.5 + 1.0 / n, abs=1e-13)

    def test_strong_field_saturates_at_efficiency(self):
        spectrum = build_spectrum(ModelParams(n_sites=200, gamma=0.4, g=1e5))
        for kappa in (0.3, 1.0):
            assert mean_by_recurrence(spectrum, kappa) / 200 == pytest.approx(kappa, abs=1e-9)

    def test_matches_distribution_mean(self):
        for params in random_cases(seed=101, n_cases=25):
            spectrum = build_spectrum(params)
            d = distribution(spectrum, params.kappa)
            assert mean_by_recurrence(spectrum, params.kappa) == pytest.approx(d.mean, abs=1e-10)


class TestVariance:
    def test_perfect_detection_reduces_to_pair_term(self):
        rng = np.random.default_rng(8)
        v = rng.uniform(0, 1, 60)
        spectrum = PairSpectrum.from_occupations(v)
        assert variance_exact(spectrum, 1.0) == pytest.approx(np.sum(4 * v * (1 - v)), rel=1e-12)

    def test_deterministic_outcomes_have_zero_variance(self):
        assert variance_exact(PairSpectrum.from_occupations([0.0]), 0.7) == 0.0
        assert variance_exact(PairSpectrum.from_occupations([1.0]), 1.0) == 0.0

    def test_matches_distribution_variance(self):
        spectrum = build_spectrum(ModelParams(n_sites=300, gamma=1.0, g=0.5))
        d = distribution(spectrum, 0.9)
        assert variance_exact(spectrum, 0.9) == pytest.approx(d.variance, abs=1e-10)
        for params in random_cases(seed=202, n_cases=25):
            spectrum = build_spectrum(params)
            d = distribution(spectrum, params.kappa)
            assert variance_exact(spectrum, params.kappa) == pytest.approx(d.variance, abs=1e-10)

    def test_rescaled_recurrence_exact_only_at_full_efficiency(self):
        rng = np.random.default_rng(9)
        spectrum = PairSpectrum.from_occupations(rng.uniform(0, 1, 100))
        assert abs(variance_exact(spectrum, 1.0) - variance_by_recurrence(spectrum, 1.0)) < 1e-12
        # one fully occupied pair at half efficiency: binomial variance 1/2,
        # which the rescaled increment misses entirely
        one = PairSpectrum.from_occupations([1.0])
        assert variance_by_recurrence(one, 0.5) == 0.0
        assert variance_exact(one, 0.5) == pytest.approx(0.5, abs=1e-15)
        assert variance_exact(one, 0.0) == variance_by_recurrence(one, 0.0) == 0.0


class TestCumulants:
    def test_point_mass(self):
        ms = cumulants_from_distribution(CountDistribution(np.array([1.0, 0.0, 0.0])))
        assert (ms.mean, ms.variance, ms.cumulant2, ms.cumulant3, ms.cumulant4) == (0, 0, 0, 0, 0)
        assert ms.parity_sum == 1.0
        assert np.isnan(ms.fano)

    def test_single_binomial_pair(self):
        ms = cumulants_from_distribution(CountDistribution(np.array([0.25, 0.5, 0.25])))
        assert ms.mean == pytest.approx(1.0)
        assert ms.variance == pytest.approx(0.5)
        assert ms.parity_sum == pytest.approx(0.0)
        assert ms.fano == pytest.approx(0.5)

    def test_perfect_detection_parity_is_one(self):
        spectrum = build_spectrum(ModelParams(n_sites=60, gamma=0.7, g=1.3))
        ms = cumulants_from_distribution(distribution(spectrum, 1.0))
        assert ms.parity_sum == 1.0

    def test_poisson_reference_cumulants(self):
        # all cumulants of a Poisson law equal its rate
        import math
        rate = 2.5
        m = np.arange(80)
        probs = np.exp(-rate) * rate ** m / np.array([math.factorial(int(k)) for k in m])
        ms = cumulants_from_distribution(CountDistribution(probs / probs.sum()))
        assert ms.cumulant2 == pytest.approx(rate, abs=1e-8)
        assert ms.cumulant3 == pytest.approx(rate, abs=1e-6)
        assert ms.cumulant4 == pytest.approx(rate, abs=1e-4)


class TestFerromagneticMean:
    def test_fixed_point_and_saturation(self):
        assert ferromagnetic_mean(0.5) == 0.0
        assert ferromagnetic_mean(0.9) == pytest.approx(0.5 - 0.9)

    def test_classification_flips_at_moderate_efficiency(self):
        # kappa = 0.5 keeps the mirrored mean positive; the sweep must go
        # sub -> super across a g_t below the critical point
        params = ModelParams(n_sites=300, gamma=0.5, g=0.1, kappa=0.5, magnetic_sign="fm")
        recs = derivative_sweep(params, np.linspace(0.05, 1.5, 30), step=1e-4)
        labels = [r.classification for r in recs]
        assert labels[0] == SUB_POISSONIAN
        assert labels[-1] == SUPER_POISSONIAN
        flip = next(i for i in range(len(labels) - 1) if labels[i] != labels[i + 1])
        assert recs[flip].params.g < 1.0
        assert all(r.mean_per_site > 0 for r in recs)

    def test_full_efficiency_mirror_is_degenerate(self):
        # at kappa = 1 the antiferromagnetic filling exceeds 1/2 for any
        # g > 0, so the mirrored mean is negative and only the variance-mean
        # comparison remains meaningful
        params = ModelParams(n_sites=300, gamma=0.5, g=0.5, kappa=1.0, magnetic_sign="fm")
        recs = derivative_sweep(params, [0.5], step=1e-4)
        assert recs[0].mean_per_site < 0.0
        assert recs[0].classification == SUPER_POISSONIAN


class TestClassification:
    def test_bands(self):
        assert classify_poissonian(10.0, 5.0) == SUB_POISSONIAN
        assert classify_poissonian(10.0, 15.0) == SUPER_POISSONIAN
        assert classify_poissonian(10.0, 10.0 * (1 + 1e-12)) == POISSONIAN
        assert classify_poissonian(0.0, 0.0) == POISSONIAN

    def test_antiferromagnetic_total_counting_is_sub_poissonian(self):
        for kappa in (0.5, 0.9, 1.0):
            for g in np.linspace(0.0, 10.0, 25):
                spectrum = build_spectrum(ModelParams(n_sites=300, gamma=1.0, g=g, kappa=kappa))
                fano = variance_exact(spectrum, kappa) / mean_by_recurrence(spectrum, kappa)
                assert fano <= 1.0 + 1e-9


class TestParityContrast:
    def test_perfect_detection(self):
        spectrum = build_spectrum(ModelParams(n_sites=100, gamma=1.0, g=0.0))
        d = distribution(spectrum, 1.0)
        # odd entries vanish exactly, so the contrast is the full mass
        assert np.all(d.probs[1::2] == 0.0)
        assert parity_contrast(d) == pytest.approx(1.0, abs=1e-12)

    def test_splitting_regimes_match_closed_form(self):
        # near-ideal detection: visible splitting at N=1000 vanishes by N=4000
        expected = {1000: True, 4000: False}
        for n, split in expected.items():
            spectrum = build_spectrum(ModelParams(n_sites=n, gamma=1.0, g=0.0, kappa=0.999))
            contrast = parity_contrast(distribution(spectrum, 0.999))
            assert abs(contrast - parity_product(spectrum, 0.999)) < 1e-10
            assert is_split(contrast) is split


class TestDerivativeSweep:
    def test_validates_grid_and_step(self):
        params = ModelParams(n_sites=20, gamma=1.0, g=0.0)
        with pytest.raises(ValueError):
            derivative_sweep(params, [1.0, 0.5], step=1e-3)
        with pytest.raises(ValueError):
            derivative_sweep(params, [0.5, 1.0], step=0.6)
        with pytest.raises(ValueError):
            derivative_sweep(params, [], step=1e-3)

    def test_xx_mean_derivative_vanishes_above_critical_field(self):
        # gamma = 0, g > 1: every mode is full, the mean is pinned at kappa*N
        params = ModelParams(n_sites=200, gamma=0.0, g=2.0, kappa=1.0)
        recs = derivative_sweep(params, [1.5, 2.0, 2.5], step=1e-3)
        assert all(r.d_mean_dg == 0.0 for r in recs)

    def test_variance_derivative_jumps_at_the_critical_point(self):
        # kappa = 1, gamma = 1: var/N = 1/4 for g <= 1 and 1/(4 g^2) beyond,
        # so d(var/N)/dg jumps from 0 to -1/2 at g = 1
        params = ModelParams(n_sites=300, gamma=1.0, g=1.0, kappa=1.0)
        recs = derivative_sweep(params, [0.8, 0.9, 1.1, 1.2], step=1e-4)
        assert abs(recs[0].d_var_dg) < 1e-6
        assert abs(recs[1].d_var_dg) < 1e-6
        for rec in recs[2:]:
            g = rec.params.g
            assert rec.d_var_dg == pytest.approx(-1.0 / (2.0 * g ** 3), abs=2e-3)

    def test_near_critical_points_are_flagged(self):
        params = ModelParams(n_sites=100, gamma=1.0, g=1.0, kappa=1.0)
        recs = derivative_sweep(params, [0.5, 0.999, 1.5], step=1e-2)
        assert [r.near_critical_warning for r in recs] == [False, True, False]
        assert all(r.fd_step == 1e-2 for r in recs)

    def test_every_second_mode_uses_quarter_spectrum(self):
        params = ModelParams(n_sites=400, gamma=1.0, g=0.3, kappa=1.0)
        recs = derivative_sweep(params, [0.3], step=1e-4, count_mode="every_second")
        spectrum = build_spectrum(params)
        assert recs[0].moments.mean == pytest.approx(
            mean_by_recurrence(spectrum, 1.0, n_pairs=100), abs=1e-10)

    def test_records_come_back_in_grid_order(self):
        params = ModelParams(n_sites=60, gamma=0.8, g=0.0, kappa=0.9)
        grid = [0.2, 0.7, 1.9]
        recs = derivative_sweep(params, grid, step=1e-3)
        assert [r.params.g for r in recs] == grid
