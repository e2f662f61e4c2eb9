import numpy as np
import pytest

from fockbench.bench import builtin_figure1


@pytest.fixture
def bench():
    return builtin_figure1()


@pytest.fixture
def rng():
    return np.random.default_rng(20020927)


def haar_unitary(rng: np.random.Generator, n: int = 2) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))
