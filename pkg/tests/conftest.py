import pytest

from baker_lab import Model, ModelParams


@pytest.fixture(scope="session")
def default_params():
    return ModelParams.from_rho(2.0)


@pytest.fixture(scope="session")
def default_model(default_params):
    """rho = 2, K = 1.5, j_max = 8, all levels built (a few seconds)."""
    return Model(default_params).build_all()


@pytest.fixture(scope="session")
def small_model():
    return Model(ModelParams.from_rho(2.0, j_max=3)).build_all()
