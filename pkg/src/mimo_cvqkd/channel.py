"""2x2 passive channel models and Alice-Bob covariance assembly.

A channel is described by a 2x2 complex matrix of amplitude gains acting on
annihilation operators. Embedding it as the upper-left block of a 4x4
unitary (two environment modes) gives the symplectic picture used to build
the joint Alice-Bob covariance matrix, either from an explicit dilation or
directly from the observable excess-noise parameters.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .gaussian import (
    PURITY_TOL,
    CovarianceMatrix,
    direct_sum,
    reduce_to_modes,
    symplectic_eigenvalues,
    thermal_covariance,
    tmsv_covariance,
)

# Largest singular value may exceed 1 by at most this much (passivity).
PASSIVITY_ATOL = 1e-12
UNITARITY_ATOL = 1e-10

# Mode labels of the assembled Alice-Bob state, in matrix order.
AB_MODES = ("a1", "b1", "a2", "b2")


@dataclass(frozen=True)
class ChannelMatrix:
    """2x2 complex amplitude-gain matrix of a passive channel."""

    h: np.ndarray

    def __post_init__(self):
        h = np.array(self.h, dtype=complex)
        if h.shape != (2, 2):
            raise ValueError("channel matrix must be 2x2")
        smax = np.linalg.norm(h, 2)
        if smax > 1.0 + PASSIVITY_ATOL:
            raise ValueError(f"active channel: largest singular value {smax:.12g} > 1")
        h.flags.writeable = False
        object.__setattr__(self, "h", h)


@dataclass(frozen=True)
class ChannelUnitary:
    """4x4 unitary mapping (signal_1, signal_2, env_1, env_2) inputs to outputs."""

    u: np.ndarray

    def __post_init__(self):
        u = np.array(self.u, dtype=complex)
        if u.shape != (4, 4):
            raise ValueError("channel unitary must be 4x4")
        if not np.allclose(u.conj().T @ u, np.eye(4), rtol=0.0, atol=UNITARITY_ATOL):
            raise ValueError("matrix is not unitary")
        u.flags.writeable = False
        object.__setattr__(self, "u", u)

    @property
    def h(self) -> ChannelMatrix:
        return ChannelMatrix(self.u[:2, :2])


@dataclass(frozen=True)
class NoiseModel:
    """Receiver excess noises in SNU.

    xi_b1 and xi_b2 are the per-receiver excess noises; xi_b1b2 is the
    complex cross-correlation between the two receivers' noise.
    """

    xi_b1: float
    xi_b2: float
    xi_b1b2: complex = 0j

    def __post_init__(self):
        if not (np.isfinite(self.xi_b1) and self.xi_b1 >= 0.0):
            raise ValueError(f"xi_b1 must be finite and >= 0, got {self.xi_b1}")
        if not (np.isfinite(self.xi_b2) and self.xi_b2 >= 0.0):
            raise ValueError(f"xi_b2 must be finite and >= 0, got {self.xi_b2}")
        if not np.isfinite(complex(self.xi_b1b2)):
            raise ValueError("xi_b1b2 must be finite")
        object.__setattr__(self, "xi_b1b2", complex(self.xi_b1b2))


@dataclass(frozen=True)
class EveModel:
    """Variances of the two thermal environment inputs (>= 1 SNU each)."""

    v_e1: float = 1.0
    v_e2: float = 1.0

    def __post_init__(self):
        if self.v_e1 < 1.0 or self.v_e2 < 1.0:
            raise ValueError("environment variances must be >= 1 SNU")


class AdmissibilityFlags(NamedTuple):
    physical: bool
    cauchy_schwarz: bool

    @property
    def admissible(self) -> bool:
        return self.physical and self.cauchy_schwarz


def uniform_crosstalk_channel(transmissivity: float) -> ChannelMatrix:
    """Channel whose line-of-sight and crosstalk paths carry equal power.

    sqrt(T/2) * [[1, i], [i, 1]]; satisfies H^dag H = T * I.
    """
    t = transmissivity
    if not (0.0 < t <= 1.0):
        raise ValueError(f"transmissivity must be in (0, 1], got {t}")
    return ChannelMatrix(np.sqrt(t / 2.0) * np.array([[1.0, 1j], [1j, 1.0]]))


def unitary_dilation(h: ChannelMatrix) -> ChannelUnitary:
    """Embed a contraction H as [[H, (1-HH+)^1/2], [(1-H+H)^1/2, -H+]]."""
    hm = h.h
    w, s, vh = np.linalg.svd(hm)
    d = np.sqrt(np.clip(1.0 - np.clip(s, 0.0, 1.0) ** 2, 0.0, None))
    upper_right = w @ np.diag(d) @ w.conj().T
    lower_left = vh.conj().T @ np.diag(d) @ vh
    u = np.block([[hm, upper_right], [lower_left, -hm.conj().T]])
    return ChannelUnitary(u)


def symplectic_from_unitary(u: ChannelUnitary) -> np.ndarray:
    """8x8 orthogonal symplectic matrix acting on the quadratures.

    Each complex entry u_mn becomes the 2x2 block [[Re, -Im], [Im, Re]].
    """
    um = u.u
    s = np.zeros((8, 8))
    for m in range(4):
        for n in range(4):
            re, im = um[m, n].real, um[m, n].imag
            s[2 * m : 2 * m + 2, 2 * n : 2 * n + 2] = [[re, -im], [im, re]]
    return s


def gain_block(u: complex) -> np.ndarray:
    """Quadrature correlation block [[Re u, Im u], [Im u, -Re u]]."""
    re, im = complex(u).real, complex(u).imag
    return np.array([[re, im], [im, -re]])


def covariance_from_dilation(
    u: ChannelUnitary, v_a1: float, v_a2: float, eve: EveModel
) -> CovarianceMatrix:
    """Alice-Bob covariance from the channel unitary and thermal environment.

    Propagates the two TMSV signal modes and the two environment modes
    through the symplectic embedding of u and traces out the environment
    outputs. Mode order of the result is (a1, b1, a2, b2).
    """
    if v_a1 < 1.0 or v_a2 < 1.0:
        raise ValueError("modulation variances must be >= 1 SNU")
    initial = direct_sum(
        direct_sum(tmsv_covariance(v_a1, ("a1", "s1")), tmsv_covariance(v_a2, ("a2", "s2"))),
        direct_sum(thermal_covariance(eve.v_e1, "e1"), thermal_covariance(eve.v_e2, "e2")),
    )
    # Reorder so the channel acts on the trailing (s1, s2, e1, e2) block.
    initial = reduce_to_modes(initial, ("a1", "a2", "s1", "s2", "e1", "e2"))
    s_full = np.eye(12)
    s_full[4:, 4:] = symplectic_from_unitary(u)
    out = CovarianceMatrix(
        ("a1", "a2", "b1", "b2", "e1'", "e2'"),
        s_full @ initial.mat @ s_full.T,
    )
    return reduce_to_modes(out, AB_MODES)


def covariance_from_noise_params(
    h: ChannelMatrix, v_a1: float, v_a2: float, noise: NoiseModel
) -> CovarianceMatrix:
    """Alice-Bob covariance from the observable channel and noise parameters.

    Mode order of the result is (a1, b1, a2, b2).
    """
    if v_a1 < 1.0 or v_a2 < 1.0:
        raise ValueError("modulation variances must be >= 1 SNU")
    u11, u12 = h.h[0, 0], h.h[0, 1]
    u21, u22 = h.h[1, 0], h.h[1, 1]
    k = np.sqrt(v_a1 * v_a1 - 1.0)
    el = np.sqrt(v_a2 * v_a2 - 1.0)
    f1, f2 = v_a1 - 1.0, v_a2 - 1.0
    delta1 = abs(u11) ** 2 * f1 + abs(u12) ** 2 * f2 + 1.0 + noise.xi_b1
    mu1 = abs(u21) ** 2 * f1 + abs(u22) ** 2 * f2 + 1.0 + noise.xi_b2
    nu = np.conj(u11) * u21 * f1 + np.conj(u12) * u22 * f2 + noise.xi_b1b2
    nu1, nu3 = nu.real, nu.imag

    mat = np.zeros((8, 8))
    eye2 = np.eye(2)

    def put(i, j, blk):
        mat[2 * i : 2 * i + 2, 2 * j : 2 * j + 2] = blk
        if i != j:
            mat[2 * j : 2 * j + 2, 2 * i : 2 * i + 2] = np.transpose(blk)

    # mode order: a1=0, b1=1, a2=2, b2=3
    put(0, 0, v_a1 * eye2)
    put(2, 2, v_a2 * eye2)
    put(1, 1, delta1 * eye2)
    put(3, 3, mu1 * eye2)
    put(0, 1, k * gain_block(u11))
    put(0, 3, k * gain_block(u21))
    put(2, 1, el * gain_block(u12))
    put(2, 3, el * gain_block(u22))
    put(1, 3, np.array([[nu1, nu3], [-nu3, nu1]]))
    return CovarianceMatrix(AB_MODES, mat)


def excess_noise_from_eve(u: ChannelUnitary, eve: EveModel) -> NoiseModel:
    """Receiver excess noise produced by thermal environment inputs.

    Vanishes when both environment variances equal 1 (vacuum).
    """
    um = u.u
    e1, e2 = eve.v_e1 - 1.0, eve.v_e2 - 1.0
    xi_b1 = e1 * abs(um[0, 2]) ** 2 + e2 * abs(um[0, 3]) ** 2
    xi_b2 = e1 * abs(um[1, 2]) ** 2 + e2 * abs(um[1, 3]) ** 2
    xi_b1b2 = e1 * np.conj(um[0, 2]) * um[1, 2] + e2 * np.conj(um[0, 3]) * um[1, 3]
    return NoiseModel(xi_b1, xi_b2, xi_b1b2)


def noise_admissibility(
    gamma: CovarianceMatrix,
    noise: NoiseModel,
    h: ChannelMatrix,
    v_a1: float,
    v_a2: float,
) -> AdmissibilityFlags:
    """Check whether a noise model is compatible with a physical attack.

    physical: gamma is positive definite and all its symplectic eigenvalues
    are >= 1 (within tolerance). Without positive definiteness the magnitudes
    of the eigenvalues of i*Omega*gamma are not symplectic eigenvalues, so
    both conditions are required.
    cauchy_schwarz: nu1^2 + nu3^2 <= delta1 * mu1 for the receiver blocks.
    """
    lam_min = symplectic_eigenvalues(gamma).min()
    positive = bool(np.linalg.eigvalsh(gamma.mat).min() > 0.0)
    physical = positive and bool(lam_min >= 1.0 - PURITY_TOL)
    delta1 = gamma.block(("b1",), ("b1",))[0, 0]
    mu1 = gamma.block(("b2",), ("b2",))[0, 0]
    cross = gamma.block(("b1",), ("b2",))
    nu_sq = cross[0, 0] ** 2 + cross[0, 1] ** 2
    cs = bool(nu_sq <= delta1 * mu1 * (1.0 + 1e-12))
    return AdmissibilityFlags(physical, cs)


def estimate_channel(
    gamma: CovarianceMatrix, v_a1: float, v_a2: float
) -> ChannelMatrix:
    """Recover the channel matrix from the Alice-Bob correlation blocks."""
    if v_a1 <= 1.0 or v_a2 <= 1.0:
        raise ValueError("unidentifiable channel column: modulation variance <= 1")
    k = np.sqrt(v_a1 * v_a1 - 1.0)
    el = np.sqrt(v_a2 * v_a2 - 1.0)

    def gain(alice, bob, scale):
        blk = gamma.block((alice,), (bob,))
        return (blk[0, 0] + 1j * blk[1, 0]) / scale

    h = np.array(
        [
            [gain("a1", "b1", k), gain("a2", "b1", el)],
            [gain("a1", "b2", k), gain("a2", "b2", el)],
        ]
    )
    return ChannelMatrix(h)
