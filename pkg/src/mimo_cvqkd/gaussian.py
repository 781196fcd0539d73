"""Symplectic linear algebra for multimode Gaussian states.

All covariance matrices are expressed in shot-noise units (SNU), i.e. the
vacuum quadrature variance is 1, and use the per-mode quadrature ordering
(x_1, p_1, ..., x_N, p_N). Entropies are in bits.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

# Absolute symmetry tolerance for covariance matrices.
SYMMETRY_ATOL = 1e-12
# Symplectic eigenvalues in [1 - PURITY_TOL, 1) are clamped to 1; below that
# the state is rejected as unphysical.
PURITY_TOL = 1e-9


class UnphysicalStateError(ValueError):
    """A symplectic eigenvalue lies below the vacuum limit."""


@dataclass(frozen=True)
class CovarianceMatrix:
    """Real symmetric 2N x 2N quadrature covariance matrix with mode labels."""

    modes: tuple
    mat: np.ndarray

    def __post_init__(self):
        modes = tuple(self.modes)
        mat = np.array(self.mat, dtype=float)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError("covariance matrix must be square")
        if mat.shape[0] != 2 * len(modes):
            raise ValueError(
                f"{len(modes)} mode labels for a {mat.shape[0]}x{mat.shape[1]} matrix"
            )
        if len(set(modes)) != len(modes):
            raise ValueError("duplicate mode label")
        if not np.allclose(mat, mat.T, rtol=0.0, atol=SYMMETRY_ATOL):
            raise ValueError("covariance matrix is not symmetric")
        mat = 0.5 * (mat + mat.T)
        mat.flags.writeable = False
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "mat", mat)

    @property
    def n_modes(self) -> int:
        return len(self.modes)

    def quad_indices(self, labels: Iterable) -> np.ndarray:
        """Quadrature (row/column) indices of the given modes, in given order."""
        idx = []
        for lab in labels:
            try:
                i = self.modes.index(lab)
            except ValueError:
                raise KeyError(f"unknown mode label {lab!r}") from None
            idx.extend((2 * i, 2 * i + 1))
        return np.asarray(idx, dtype=int)

    def block(self, rows: Iterable, cols: Iterable) -> np.ndarray:
        """Submatrix coupling one group of modes to another."""
        ri = self.quad_indices(rows)
        ci = self.quad_indices(cols)
        return self.mat[np.ix_(ri, ci)]


def symplectic_form(n_modes: int) -> np.ndarray:
    """Direct sum of n copies of [[0, 1], [-1, 0]]."""
    omega = np.zeros((2 * n_modes, 2 * n_modes))
    for i in range(n_modes):
        omega[2 * i, 2 * i + 1] = 1.0
        omega[2 * i + 1, 2 * i] = -1.0
    return omega


def tmsv_covariance(v: float, modes: Sequence = ("a", "a'")) -> CovarianceMatrix:
    """Two-mode squeezed vacuum with quadrature variance v (SNU)."""
    if v < 1.0:
        raise ValueError(f"sub-shot-noise variance {v}")
    if len(modes) != 2:
        raise ValueError("a TMSV state has exactly two modes")
    k = np.sqrt(v * v - 1.0)
    mat = np.array(
        [
            [v, 0.0, k, 0.0],
            [0.0, v, 0.0, -k],
            [k, 0.0, v, 0.0],
            [0.0, -k, 0.0, v],
        ]
    )
    return CovarianceMatrix(tuple(modes), mat)


def thermal_covariance(v: float, mode="a") -> CovarianceMatrix:
    """Single thermal mode with quadrature variance v (SNU)."""
    if v < 1.0:
        raise ValueError(f"sub-shot-noise variance {v}")
    return CovarianceMatrix((mode,), v * np.eye(2))


def direct_sum(a: CovarianceMatrix, b: CovarianceMatrix) -> CovarianceMatrix:
    """Block-diagonal concatenation; mode lists must be disjoint."""
    if set(a.modes) & set(b.modes):
        raise ValueError("duplicate mode label in direct sum")
    na, nb = a.mat.shape[0], b.mat.shape[0]
    mat = np.zeros((na + nb, na + nb))
    mat[:na, :na] = a.mat
    mat[na:, na:] = b.mat
    return CovarianceMatrix(a.modes + b.modes, mat)


def reduce_to_modes(gamma: CovarianceMatrix, keep: Sequence) -> CovarianceMatrix:
    """Partial trace: keep only the listed modes, in the listed order."""
    keep = tuple(keep)
    idx = gamma.quad_indices(keep)
    return CovarianceMatrix(keep, gamma.mat[np.ix_(idx, idx)])


def symplectic_eigenvalues(gamma: CovarianceMatrix) -> np.ndarray:
    """The N positive eigenvalues of i*Omega*gamma, sorted descending."""
    n = gamma.n_modes
    omega = symplectic_form(n)
    ev = np.linalg.eigvals(1j * omega @ gamma.mat)
    pos = np.sort(ev.real)[::-1][:n]
    return pos


def thermal_entropy(lam):
    """Entropy (bits) of a thermal mode with symplectic eigenvalue lam >= 1."""
    lam = np.asarray(lam, dtype=float)
    hi = (lam + 1.0) / 2.0
    lo = (lam - 1.0) / 2.0
    with np.errstate(divide="ignore", invalid="ignore"):
        out = hi * np.log2(np.maximum(hi, 1e-300)) - np.where(
            lo > 0.0, lo * np.log2(np.maximum(lo, 1e-300)), 0.0
        )
    return out if out.ndim else float(out)


def entropy(gamma: CovarianceMatrix) -> float:
    """Von Neumann entropy (bits) of a Gaussian state."""
    lam = symplectic_eigenvalues(gamma)
    if np.any(lam < 1.0 - PURITY_TOL):
        raise UnphysicalStateError(
            f"symplectic eigenvalue {lam.min():.12g} below vacuum limit"
        )
    lam = np.clip(lam, 1.0, None)
    return float(np.sum(thermal_entropy(lam)))


def heterodyne_covariance(gamma: CovarianceMatrix) -> CovarianceMatrix:
    """Covariance of the classical heterodyne outcomes, (gamma + 1)/2."""
    return CovarianceMatrix(
        gamma.modes, (gamma.mat + np.eye(gamma.mat.shape[0])) / 2.0
    )


def condition_on_heterodyne(gamma: CovarianceMatrix, measured) -> CovarianceMatrix:
    """Conditional covariance after heterodyning one mode.

    Returns gamma_A - gamma_AB (gamma_B + 1)^-1 gamma_AB^T on the remaining
    modes, where B is the measured mode.
    """
    if measured not in gamma.modes:
        raise KeyError(f"unknown mode label {measured!r}")
    keep = tuple(m for m in gamma.modes if m != measured)
    if not keep:
        raise ValueError("conditioning would leave no modes")
    a = gamma.block(keep, keep)
    c = gamma.block(keep, (measured,))
    b = gamma.block((measured,), (measured,)) + np.eye(2)
    try:
        x = np.linalg.solve(b, c.T)
    except np.linalg.LinAlgError as exc:
        raise ArithmeticError("singular heterodyne conditioning block") from exc
    return CovarianceMatrix(keep, a - c @ x)
