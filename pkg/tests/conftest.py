import numpy as np
import pytest

from nlslab import fock, kernels


@pytest.fixture(autouse=True, scope="session")
def _physicality_checks():
    previous = fock.checks_enabled()
    fock.enable_checks(True)
    yield
    fock.enable_checks(previous)


@pytest.fixture(params=kernels.available_backends())
def backend(request):
    previous = kernels.use_backend(request.param)
    yield request.param
    kernels.use_backend(previous)


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


def random_density(rng, dim, rank=None):
    rank = rank or dim
    a = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real
