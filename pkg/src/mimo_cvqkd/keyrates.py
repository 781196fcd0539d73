"""Mutual information, Holevo bounds and secret key rates.

All rates are asymptotic, in bits per channel use, for reverse
reconciliation with heterodyne detection: K = max(0, beta * I - chi).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .channel import AB_MODES, gain_block
from .gaussian import (
    CovarianceMatrix,
    condition_on_heterodyne,
    entropy,
    heterodyne_covariance,
    reduce_to_modes,
)


@dataclass(frozen=True)
class ProtocolParams:
    """Modulation variances (SNU) and reconciliation efficiency."""

    v_a1: float
    v_a2: float
    beta: float = 0.95

    def __post_init__(self):
        if self.v_a1 < 1.0 or self.v_a2 < 1.0:
            raise ValueError("modulation variances must be >= 1 SNU")
        if not (0.0 < self.beta <= 1.0):
            raise ValueError(f"beta must be in (0, 1], got {self.beta}")


@dataclass(frozen=True)
class KeyRateBreakdown:
    """Mutual information, Holevo bound and clamped key rate (bits/use)."""

    mutual_info: float
    holevo: float
    skr: float


def _breakdown(mi: float, chi: float, beta: float) -> KeyRateBreakdown:
    return KeyRateBreakdown(mi, chi, max(0.0, beta * mi - chi))


def mutual_information(
    gamma: CovarianceMatrix, alice_modes: Sequence, bob_modes: Sequence
) -> float:
    """Heterodyne mutual information between two disjoint mode groups.

    (1/2) log2( Det V_A Det V_B / Det V_AB ) evaluated on the classical
    heterodyne-outcome covariance of the reduced state.
    """
    alice_modes, bob_modes = tuple(alice_modes), tuple(bob_modes)
    if set(alice_modes) & set(bob_modes):
        raise ValueError("alice and bob mode groups must be disjoint")
    het = heterodyne_covariance(reduce_to_modes(gamma, alice_modes + bob_modes))
    det_a = np.linalg.det(het.block(alice_modes, alice_modes))
    det_b = np.linalg.det(het.block(bob_modes, bob_modes))
    det_ab = np.linalg.det(het.mat)
    ratio = det_a * det_b / det_ab
    if not (det_ab > 0.0 and ratio > 0.0):
        raise ArithmeticError("non-positive determinant in mutual information")
    return 0.5 * np.log2(ratio)


def holevo_bound(gamma: CovarianceMatrix, measured_bob_modes: Sequence) -> float:
    """Holevo bound on the eavesdropper's information about Bob's outcomes.

    Uses purification: chi = S(gamma) - S(gamma | heterodyne outcomes on the
    measured modes), conditioning sequentially on each measured mode.
    """
    measured = tuple(measured_bob_modes)
    if not measured:
        raise ValueError("at least one measured mode required")
    conditional = gamma
    for mode in measured:
        conditional = condition_on_heterodyne(conditional, mode)
    return entropy(gamma) - entropy(conditional)


def skr_selection(
    gamma: CovarianceMatrix, pair: Tuple, beta: float
) -> KeyRateBreakdown:
    """Key rate for a single transmit-receive pair (selection diversity).

    The Holevo term conditions on the announced receiver mode only; the
    other modes stay in the conditional state.
    """
    alice, bob = pair
    mi = mutual_information(gamma, (alice,), (bob,))
    chi = holevo_bound(gamma, (bob,))
    return _breakdown(mi, chi, beta)


def skr_selection_best(
    gamma: CovarianceMatrix, beta: float
) -> Tuple[Tuple, KeyRateBreakdown]:
    """Best pair among the four transmit-receive combinations."""
    pairs = [("a1", "b1"), ("a1", "b2"), ("a2", "b1"), ("a2", "b2")]
    results = [(p, skr_selection(gamma, p, beta)) for p in pairs]
    return max(results, key=lambda item: item[1].skr)


def skr_multiplexed(gamma: CovarianceMatrix, beta: float) -> float:
    """Total rate of two independently reconciled pairs.

    Returns the larger of the direct pairing (a1,b1)+(a2,b2) and the
    crossed pairing (a1,b2)+(a2,b1); each term is individually clamped.
    """
    direct = (
        skr_selection(gamma, ("a1", "b1"), beta).skr
        + skr_selection(gamma, ("a2", "b2"), beta).skr
    )
    crossed = (
        skr_selection(gamma, ("a1", "b2"), beta).skr
        + skr_selection(gamma, ("a2", "b1"), beta).skr
    )
    return max(direct, crossed)


def skr_full_mimo(gamma: CovarianceMatrix, beta: float) -> KeyRateBreakdown:
    """Key rate with joint processing of both transmit and receive modes."""
    mi = mutual_information(gamma, ("a1", "a2"), ("b1", "b2"))
    chi = holevo_bound(gamma, ("b1", "b2"))
    return _breakdown(mi, chi, beta)


def siso_covariance(amplitude_gain: complex, v: float, xi: float) -> CovarianceMatrix:
    """Two-mode Alice-Bob covariance of a single-channel link."""
    if abs(amplitude_gain) > 1.0 + 1e-12:
        raise ValueError("amplitude gain must satisfy |g| <= 1")
    if v < 1.0:
        raise ValueError("modulation variance must be >= 1 SNU")
    if xi < 0.0:
        raise ValueError("excess noise must be >= 0")
    k = np.sqrt(v * v - 1.0)
    vb = abs(amplitude_gain) ** 2 * (v - 1.0) + 1.0 + xi
    mat = np.zeros((4, 4))
    mat[:2, :2] = v * np.eye(2)
    mat[2:, 2:] = vb * np.eye(2)
    mat[:2, 2:] = k * gain_block(amplitude_gain)
    mat[2:, :2] = mat[:2, 2:].T
    return CovarianceMatrix(("a", "b"), mat)


def skr_siso(
    amplitude_gain: complex, v: float, xi: float, beta: float
) -> KeyRateBreakdown:
    """Single-channel key rate, the 1x1 reduction of the same pipeline."""
    gamma = siso_covariance(amplitude_gain, v, xi)
    mi = mutual_information(gamma, ("a",), ("b",))
    chi = holevo_bound(gamma, ("b",))
    return _breakdown(mi, chi, beta)


__all__ = [
    "AB_MODES",
    "KeyRateBreakdown",
    "ProtocolParams",
    "holevo_bound",
    "mutual_information",
    "siso_covariance",
    "skr_full_mimo",
    "skr_multiplexed",
    "skr_selection",
    "skr_selection_best",
    "skr_siso",
]
