import numpy as np
import pytest

from mimo_cvqkd.gaussian import CovarianceMatrix


def unitary_embedding(u: np.ndarray) -> np.ndarray:
    """Symplectic orthogonal matrix of an n x n complex unitary."""
    n = u.shape[0]
    s = np.zeros((2 * n, 2 * n))
    for m in range(n):
        for k in range(n):
            re, im = u[m, k].real, u[m, k].imag
            s[2 * m : 2 * m + 2, 2 * k : 2 * k + 2] = [[re, -im], [im, re]]
    return s


def random_unitary(rng, n: int) -> np.ndarray:
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_symplectic(rng, n_modes: int) -> np.ndarray:
    """Random symplectic via Euler decomposition: passive-squeeze-passive."""
    o1 = unitary_embedding(random_unitary(rng, n_modes))
    o2 = unitary_embedding(random_unitary(rng, n_modes))
    r = rng.uniform(-0.8, 0.8, size=n_modes)
    z = np.diag(np.repeat(np.exp(r), 2) ** np.tile([1.0, -1.0], n_modes))
    return o1 @ z @ o2


def random_physical_cov(rng, n_modes: int, mixed: bool = True) -> CovarianceMatrix:
    s = random_symplectic(rng, n_modes)
    nu = rng.uniform(1.0, 3.0, size=n_modes) if mixed else np.ones(n_modes)
    d = np.diag(np.repeat(nu, 2))
    labels = tuple(f"m{i}" for i in range(n_modes))
    return CovarianceMatrix(labels, s @ d @ s.T)


def random_contraction(rng) -> np.ndarray:
    """Random 2x2 complex matrix with largest singular value < 1."""
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    return z / (np.linalg.norm(z, 2) * rng.uniform(1.05, 2.0))


@pytest.fixture
def rng():
    return np.random.default_rng(20260826)
