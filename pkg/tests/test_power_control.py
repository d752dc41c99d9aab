import math

import numpy as np
import pytest
from scipy import stats
from scipy.integrate import cumulative_trapezoid

from models.power import SchemeFamily
from services.errors import DomainError
from services.network import sample_link_distance
from services.power_control import (
    build_scheme,
    compound_kernel,
    compound_moment,
    fpc_power,
    marginal_distribution,
    mean_power,
    moment_delta,
    reference_schemes,
    sample_power,
    scheme_from_parameters,
    total_mass,
)


class TestBuildScheme:
    def test_defaults_from_config(self, config):
        upc = build_scheme("upc", config)
        assert (upc.p_min, upc.p_max) == (0.2, 2.0)
        assert build_scheme(SchemeFamily.CPC, config).p_max == 2.0

    def test_fpc_needs_p_bar(self, config):
        with pytest.raises(DomainError, match="p_bar"):
            build_scheme(SchemeFamily.FPC, config)

    def test_apc_needs_xi(self, config):
        with pytest.raises(DomainError, match="xi"):
            build_scheme(SchemeFamily.APC, config)

    def test_peak_above_network_peak(self, config):
        with pytest.raises(DomainError):
            build_scheme(SchemeFamily.CPC, config, p_max=3.0)

    def test_upc_degenerate_range_rejected(self, config):
        with pytest.raises(ValueError):
            build_scheme(SchemeFamily.UPC, config, p_min=1.0, p_max=1.0)

    def test_from_parameters(self, config):
        scheme = scheme_from_parameters(SchemeFamily.APC, (1.0, 0.25), config)
        assert (scheme.p_bar, scheme.xi) == (1.0, 0.25)

    def test_reference_schemes_cover_every_family(self, config):
        assert [s.family for s in reference_schemes(config)] == list(SchemeFamily)


class TestSampling:
    def test_fpc_clips_at_peak(self, fpc):
        # 0.2 * 500^0.4 = 2.402 W
        assert fpc_power(fpc, 500.0, 4.0) == 2.0
        assert fpc_power(fpc, 100.0, 4.0) == pytest.approx(0.2 * 100.0 ** 0.4)

    def test_constant(self, cpc):
        rng = np.random.default_rng(0)
        assert np.all(sample_power(cpc, np.full(100, 300.0), rng, 4.0) == 2.0)

    def test_uniform_range(self, upc):
        rng = np.random.default_rng(0)
        powers = sample_power(upc, np.full(20000, 300.0), rng, 4.0)
        assert powers.min() >= 0.2 and powers.max() <= 2.0
        assert powers.mean() == pytest.approx(1.1, abs=0.02)

    def test_on_off_duty_cycle(self, apc):
        rng = np.random.default_rng(0)
        powers = sample_power(apc, np.full(20000, 300.0), rng, 4.0)
        assert set(np.unique(powers)) == {0.0, 2.0}
        assert np.mean(powers > 0) == pytest.approx(0.5, abs=0.02)

    def test_scalar_in_scalar_out(self, cpc):
        assert isinstance(sample_power(cpc, 100.0, np.random.default_rng(0), 4.0), float)

    def test_negative_distance(self, cpc):
        with pytest.raises(DomainError):
            sample_power(cpc, -1.0, np.random.default_rng(0), 4.0)

    def test_reduced_schemes_match_constant_draw_for_draw(self, config, cpc):
        distances = sample_link_distance(np.random.default_rng(3), config.lambda_bs, 500)
        reference = sample_power(cpc, distances, np.random.default_rng(5), config.alpha)
        for scheme in (
            build_scheme(SchemeFamily.APC, config, p_bar=2.0, xi=1.0),
            build_scheme(SchemeFamily.FPC, config, p_bar=2.0, epsilon=0.0),
        ):
            np.testing.assert_array_equal(sample_power(scheme, distances, np.random.default_rng(5), config.alpha), reference)

    def test_fpc_peak_share_matches_atom(self, config, fpc):
        rng = np.random.default_rng(9)
        distances = sample_link_distance(rng, config.lambda_bs, 100000)
        share = np.mean(sample_power(fpc, distances, rng, config.alpha) == fpc.p_max)
        assert share == pytest.approx(0.7304, abs=0.005)


class TestMarginalLaw:
    def test_fpc_atom_mass(self, config, fpc):
        dist = marginal_distribution(fpc, config.lambda_bs, config.alpha)
        assert dist.atoms == ((2.0, pytest.approx(math.exp(-math.pi * 1e-6 * 1e5))),)
        assert dist.atoms[0][1] == pytest.approx(0.7304, rel=1e-3)

    @pytest.mark.parametrize("name", ["cpc", "upc", "fpc", "apc"])
    def test_total_mass(self, config, schemes, name):
        dist = marginal_distribution(schemes[name], config.lambda_bs, config.alpha)
        assert total_mass(dist) == pytest.approx(1.0, abs=1e-7)

    def test_moments(self, config, cpc, upc, apc):
        delta = config.delta.value
        law = lambda s: marginal_distribution(s, config.lambda_bs, config.alpha)
        assert moment_delta(law(cpc), delta) == pytest.approx(math.sqrt(2.0))
        assert moment_delta(law(upc), delta) == pytest.approx(1.014438, rel=1e-6)
        assert mean_power(law(upc)) == pytest.approx(1.1)
        assert moment_delta(law(apc), delta) == pytest.approx(0.5 * math.sqrt(2.0))

    def test_fpc_epsilon_zero_is_constant(self, config):
        scheme = build_scheme(SchemeFamily.FPC, config, p_bar=1.0, epsilon=0.0)
        dist = marginal_distribution(scheme, config.lambda_bs, config.alpha)
        assert dist.atoms == ((1.0, 1.0),) and not dist.has_continuous_part

    def test_moment_rejects_bad_delta(self, config, cpc):
        with pytest.raises(DomainError):
            moment_delta(marginal_distribution(cpc, config.lambda_bs, config.alpha), 1.0)


class TestCompoundMoment:
    def test_constant_power(self, config, cpc):
        dist = marginal_distribution(cpc, config.lambda_bs, config.alpha)
        assert compound_moment(dist, config.p_ue, 0.5) == pytest.approx(1.521658, rel=1e-6)

    def test_kernel_continuous_at_ue_power(self):
        at = 1.5 * math.sqrt(0.2)
        for power in (0.2, 0.2 * (1 + 1e-6), 0.2 * (1 - 1e-5), 0.2 * (1 + 2e-4)):
            assert compound_kernel(power, 0.2, 0.5) == pytest.approx(at, rel=1e-3)
        assert compound_kernel(0.2, 0.2, 0.5) == pytest.approx(at, rel=1e-12)
        for power in (0.2 - 1e-9, 0.2 + 1e-9):
            assert compound_kernel(power, 0.2, 0.5) == pytest.approx(at, rel=1e-6)

    def test_sleeping_bs_keeps_its_ue(self, config, apc):
        dist = marginal_distribution(apc, config.lambda_bs, config.alpha)
        awake = compound_kernel(2.0, config.p_ue, 0.5)
        assert compound_moment(dist, config.p_ue, 0.5) == pytest.approx(0.5 * awake + 0.5 * math.sqrt(0.2))
        assert compound_moment(dist, config.p_ue, 0.5, ue_with_sleeping_bs=False) == pytest.approx(0.5 * awake)


def _continuous_cdf(dist, points=4001):
    lo, hi = dist.continuous_support
    grid = np.linspace(lo, hi, points)
    pdf = np.array([dist.continuous_density(x) for x in grid])
    cdf = cumulative_trapezoid(pdf, grid, initial=0.0)
    return lambda x: np.interp(x, grid, cdf / cdf[-1])


class TestSampledLaw:
    def test_uniform_draws_follow_marginal(self, config, upc):
        rng = np.random.default_rng(21)
        powers = sample_power(upc, np.full(5000, 300.0), rng, config.alpha)
        cdf = _continuous_cdf(marginal_distribution(upc, config.lambda_bs, config.alpha))
        assert stats.kstest(powers, cdf).pvalue > 1e-3

    def test_fractional_draws_below_peak_follow_marginal(self, config, fpc):
        rng = np.random.default_rng(22)
        distances = sample_link_distance(rng, config.lambda_bs, 20000)
        powers = sample_power(fpc, distances, rng, config.alpha)
        below = powers[powers < fpc.p_max]
        assert below.size > 4000
        cdf = _continuous_cdf(marginal_distribution(fpc, config.lambda_bs, config.alpha))
        assert stats.kstest(below, cdf).pvalue > 1e-3


class TestSmallCompensation:
    """Tiny epsilon pushes the clip radius far beyond any cell."""

    @pytest.fixture
    def scheme(self, config):
        return build_scheme(SchemeFamily.FPC, config, p_bar=0.5, epsilon=5e-4)

    def test_no_overflow(self, config, scheme):
        dist = marginal_distribution(scheme, config.lambda_bs, config.alpha)
        assert dist.atoms == ((2.0, 0.0),)
        assert total_mass(dist) == pytest.approx(1.0, abs=1e-6)

    def test_moments_match_closed_form(self, config, scheme):
        dist = marginal_distribution(scheme, config.lambda_bs, config.alpha)
        # P = p_bar (U / pi lambda)^(1/k), U ~ Exp(1), k = 1000
        scale = math.pi * config.lambda_bs
        expected_mean = 0.5 * scale ** -1e-3 * math.gamma(1.001)
        expected_moment = math.sqrt(0.5) * scale ** -5e-4 * math.gamma(1.0005)
        assert mean_power(dist) == pytest.approx(expected_mean, rel=1e-5)
        assert moment_delta(dist, config.delta.value) == pytest.approx(expected_moment, rel=1e-5)

    def test_samples_never_clip(self, config, scheme):
        rng = np.random.default_rng(4)
        distances = sample_link_distance(rng, config.lambda_bs, 10000)
        assert np.all(sample_power(scheme, distances, rng, config.alpha) < scheme.p_max)


class TestMonotoneMoments:
    def test_raising_floor_raises_moments(self, config, upc):
        raised = build_scheme(SchemeFamily.UPC, config, p_min=0.5, p_max=2.0)
        delta = config.delta.value
        low = marginal_distribution(upc, config.lambda_bs, config.alpha)
        high = marginal_distribution(raised, config.lambda_bs, config.alpha)
        assert moment_delta(high, delta) > moment_delta(low, delta)
        assert compound_moment(high, config.p_ue, delta) > compound_moment(low, config.p_ue, delta)
