import pytest

from models.network import NetworkConfig
from models.power import SchemeFamily
from models.simulation import SimulationSpec
from services.power_control import build_scheme


@pytest.fixture
def config():
    """System parameters at their default values."""
    return NetworkConfig()


@pytest.fixture
def config_no_si(config):
    return config.with_updates(beta=0.0)


@pytest.fixture
def cpc(config):
    return build_scheme(SchemeFamily.CPC, config)


@pytest.fixture
def upc(config):
    return build_scheme(SchemeFamily.UPC, config)


@pytest.fixture
def fpc(config):
    return build_scheme(SchemeFamily.FPC, config, p_bar=0.2, epsilon=0.1)


@pytest.fixture
def apc(config):
    return build_scheme(SchemeFamily.APC, config, p_bar=2.0, xi=0.5)


@pytest.fixture
def schemes(cpc, upc, fpc, apc):
    return {"cpc": cpc, "upc": upc, "fpc": fpc, "apc": apc}


@pytest.fixture
def small_spec():
    return SimulationSpec(n_trials=4000, chunk_size=1000, seed=7)
