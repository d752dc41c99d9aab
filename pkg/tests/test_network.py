import math

import numpy as np
import pytest
from pydantic import ValidationError
from scipy import stats

from models.network import NetworkConfig
from services.errors import DomainError
from services.network import (
    active_density,
    db_to_linear,
    dbm_to_watts,
    idle_probability,
    link_distance_cdf,
    link_distance_pdf,
    linear_to_db,
    mean_link_distance,
    sample_link_distance,
    watts_to_dbm,
)
from services.quadrature import integrate_semi_infinite


class TestIdleProbability:
    def test_default_densities(self, config):
        assert idle_probability(config.lambda_bs, config.lambda_ue) == pytest.approx(0.008873, rel=1e-3)

    def test_active_density(self, config):
        density = active_density(config)
        assert density.p0 == pytest.approx(0.008873, rel=1e-3)
        assert density.lambda_b == pytest.approx(0.991127e-6, rel=1e-5)

    def test_no_users_means_every_bs_idle(self):
        assert idle_probability(1e-6, 0.0) == 1.0
        assert active_density(NetworkConfig(lambda_ue=0.0)).lambda_b == 0.0

    def test_ratio_of_cell_shape(self):
        assert idle_probability(1e-6, 3.5e-6) == pytest.approx(2.0 ** -3.5, rel=1e-12)

    def test_equal_densities(self):
        assert idle_probability(1e-6, 1e-6) == pytest.approx(0.41496, rel=1e-4)

    def test_rejects_bad_densities(self):
        with pytest.raises(DomainError):
            idle_probability(0.0, 1e-5)
        with pytest.raises(DomainError):
            idle_probability(1e-6, -1.0)


class TestLinkDistance:
    def test_pdf_integrates_to_one(self):
        lam = 1e-6
        total = integrate_semi_infinite(lambda r: link_distance_pdf(r, lam), 0.0, 1.0 / math.sqrt(math.pi * lam))
        assert total == pytest.approx(1.0, abs=1e-8)

    def test_cdf_at_characteristic_radius(self):
        lam = 1e-6
        assert link_distance_cdf(1.0 / math.sqrt(math.pi * lam), lam) == pytest.approx(1.0 - math.exp(-1.0))
        assert link_distance_cdf(0.0, lam) == 0.0

    def test_negative_distance_rejected(self):
        with pytest.raises(DomainError):
            link_distance_pdf(-1.0, 1e-6)

    def test_mean(self):
        assert mean_link_distance(1e-6) == pytest.approx(500.0)

    def test_sampler_follows_the_law(self):
        rng = np.random.default_rng(11)
        samples = sample_link_distance(rng, 1e-6, 20000)
        assert np.all(samples >= 0)
        assert samples.mean() == pytest.approx(500.0, abs=10.0)
        result = stats.kstest(samples, lambda r: link_distance_cdf(r, 1e-6))
        assert result.pvalue > 1e-3


class TestUnits:
    def test_db(self):
        assert db_to_linear(-100.0) == pytest.approx(1e-10)
        assert linear_to_db(1e-10) == pytest.approx(-100.0)
        assert linear_to_db(0.0) == -math.inf

    def test_dbm(self):
        assert dbm_to_watts(33.0) == pytest.approx(2.0, rel=1e-2)
        assert dbm_to_watts(43.0) == pytest.approx(19.95, rel=1e-3)
        assert watts_to_dbm(1.0) == pytest.approx(30.0)


class TestNetworkConfig:
    def test_defaults(self, config):
        assert config.delta.value == 0.5
        assert config.delta.kernel == pytest.approx(4.934802, rel=1e-6)
        assert config.theta_b == pytest.approx(1.0)
        assert config.theta_u == pytest.approx(1.0)

    @pytest.mark.parametrize("alpha", [2.0, 1.5])
    def test_alpha_must_exceed_two(self, alpha):
        with pytest.raises(ValidationError):
            NetworkConfig(alpha=alpha)

    def test_power_range(self):
        with pytest.raises(ValidationError):
            NetworkConfig(p_min=3.0, p_max=2.0)

    def test_with_updates_validates(self, config):
        assert config.with_updates(beta=0.0).beta == 0.0
        with pytest.raises(ValidationError):
            config.with_updates(alpha=2.0)
