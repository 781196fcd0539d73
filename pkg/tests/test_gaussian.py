import numpy as np
import pytest

from mimo_cvqkd.gaussian import (
    CovarianceMatrix,
    UnphysicalStateError,
    condition_on_heterodyne,
    direct_sum,
    entropy,
    heterodyne_covariance,
    reduce_to_modes,
    symplectic_eigenvalues,
    symplectic_form,
    thermal_covariance,
    tmsv_covariance,
)

from conftest import random_physical_cov


def sympl_eig_oracle(gamma):
    """|eigenvalues of Omega @ gamma| come in pairs; one of each pair."""
    omega = symplectic_form(gamma.n_modes)
    mags = np.sort(np.abs(np.linalg.eigvals(omega @ gamma.mat)))
    return mags[::2][::-1]


class TestCovarianceMatrix:
    def test_rejects_nonsymmetric(self):
        mat = np.eye(2)
        mat = mat.copy()
        mat[0, 1] = 1e-6
        with pytest.raises(ValueError, match="symmetric"):
            CovarianceMatrix(("a",), mat)

    def test_rejects_label_mismatch(self):
        with pytest.raises(ValueError):
            CovarianceMatrix(("a", "b"), np.eye(2))

    def test_rejects_duplicate_labels(self):
        with pytest.raises(ValueError):
            CovarianceMatrix(("a", "a"), np.eye(4))

    def test_immutable(self):
        g = tmsv_covariance(2.0)
        with pytest.raises(ValueError):
            g.mat[0, 0] = 7.0


class TestTmsv:
    def test_vacuum_pair(self):
        g = tmsv_covariance(1.0)
        assert np.allclose(g.mat, np.eye(4))

    def test_structure_v5(self):
        g = tmsv_covariance(5.0, ("m1", "m2"))
        k = np.sqrt(24.0)
        assert g.mat[0, 2] == pytest.approx(k)
        assert g.mat[1, 3] == pytest.approx(-k)
        assert np.allclose(symplectic_eigenvalues(g), [1.0, 1.0], atol=1e-10)

    def test_sub_shot_noise_rejected(self):
        with pytest.raises(ValueError, match="sub-shot-noise"):
            tmsv_covariance(0.999)


class TestDirectSum:
    def test_identity_blocks(self):
        g = direct_sum(thermal_covariance(1.0, "a"), thermal_covariance(1.0, "b"))
        assert np.allclose(g.mat, np.eye(4))
        assert g.modes == ("a", "b")

    def test_two_tmsv_layout(self):
        g1 = tmsv_covariance(4.7, ("a1", "s1"))
        g2 = tmsv_covariance(2.3, ("a2", "s2"))
        g = direct_sum(g1, g2)
        assert g.mat.shape == (8, 8)
        assert np.allclose(g.mat[:4, :4], g1.mat)
        assert np.allclose(g.mat[4:, 4:], g2.mat)
        assert np.allclose(g.mat[:4, 4:], 0.0)

    def test_dimension_mix(self):
        g = direct_sum(tmsv_covariance(2.0, ("a", "b")), thermal_covariance(1.5, "c"))
        assert g.n_modes == 3 and g.mat.shape == (6, 6)

    def test_duplicate_label_rejected(self):
        with pytest.raises(ValueError, match="duplicate"):
            direct_sum(thermal_covariance(1.0, "a"), thermal_covariance(1.0, "a"))


class TestReduce:
    def test_thermal_reduction_of_tmsv(self):
        g = reduce_to_modes(tmsv_covariance(3.0, ("a", "b")), ("a",))
        assert np.allclose(g.mat, 3.0 * np.eye(2))

    def test_identity_reduction(self):
        g = tmsv_covariance(3.0, ("a", "b"))
        assert np.allclose(reduce_to_modes(g, g.modes).mat, g.mat)

    def test_reorders(self):
        g = tmsv_covariance(3.0, ("a", "b"))
        swapped = reduce_to_modes(g, ("b", "a"))
        assert swapped.modes == ("b", "a")
        assert np.allclose(swapped.mat[:2, 2:], g.mat[2:, :2])

    def test_unknown_label(self):
        with pytest.raises(KeyError):
            reduce_to_modes(tmsv_covariance(2.0), ("nope",))


class TestSymplecticEigenvalues:
    def test_vacuum(self):
        g = CovarianceMatrix(("a", "b", "c"), np.eye(6))
        assert np.allclose(symplectic_eigenvalues(g), 1.0)

    def test_thermal(self):
        assert symplectic_eigenvalues(thermal_covariance(4.2)) == pytest.approx([4.2])

    def test_tmsv_pure(self):
        g = tmsv_covariance(7.5)
        assert np.allclose(symplectic_eigenvalues(g), [1.0, 1.0], atol=1e-9)

    def test_matches_oracle_random(self, rng):
        for _ in range(50):
            g = random_physical_cov(rng, rng.integers(1, 5))
            got = symplectic_eigenvalues(g)
            assert np.allclose(got, sympl_eig_oracle(g), atol=1e-10)

    def test_invariant_under_symplectic(self, rng):
        from conftest import random_symplectic

        for _ in range(20):
            g = random_physical_cov(rng, 3)
            s = random_symplectic(rng, 3)
            transformed = CovarianceMatrix(g.modes, s @ g.mat @ s.T)
            assert np.allclose(
                symplectic_eigenvalues(g),
                symplectic_eigenvalues(transformed),
                atol=1e-8,
            )


class TestEntropy:
    def test_pure_tmsv_zero(self):
        assert entropy(tmsv_covariance(6.0)) == pytest.approx(0.0, abs=1e-9)

    def test_thermal_three(self):
        # g(3) = 2 log2 2 - 1 log2 1 = 2 bits
        assert entropy(thermal_covariance(3.0)) == pytest.approx(2.0, abs=1e-12)

    def test_clamping_near_purity(self):
        assert entropy(thermal_covariance(1.0 + 1e-12)) == pytest.approx(0.0, abs=1e-9)

    def test_unphysical_rejected(self):
        g = CovarianceMatrix(("a",), 0.5 * np.eye(2))
        with pytest.raises(UnphysicalStateError):
            entropy(g)

    def test_nonnegative_and_additive(self, rng):
        for _ in range(20):
            a = random_physical_cov(rng, 2)
            b = random_physical_cov(rng, 1)
            b = CovarianceMatrix(("x9",), b.mat)
            total = direct_sum(a, b)
            ea, eb, et = entropy(a), entropy(b), entropy(total)
            assert ea >= 0.0 and eb >= 0.0
            assert et == pytest.approx(ea + eb, abs=1e-8)


class TestHeterodyne:
    def test_identity_fixed_point(self):
        g = CovarianceMatrix(("a",), np.eye(2))
        assert np.allclose(heterodyne_covariance(g).mat, np.eye(2))

    def test_thermal(self):
        g = heterodyne_covariance(thermal_covariance(5.0))
        assert np.allclose(g.mat, 3.0 * np.eye(2))

    def test_elementwise(self, rng):
        g = random_physical_cov(rng, 2)
        assert np.allclose(
            heterodyne_covariance(g).mat, (g.mat + np.eye(4)) / 2.0
        )


class TestConditioning:
    def test_tmsv_conditions_to_vacuum(self):
        g = tmsv_covariance(4.0, ("a", "b"))
        cond = condition_on_heterodyne(g, "b")
        # V - (V^2 - 1)/(V + 1) = 1
        assert np.allclose(cond.mat, np.eye(2), atol=1e-12)

    def test_uncorrelated_block_unchanged(self):
        g = direct_sum(thermal_covariance(2.0, "a"), thermal_covariance(3.0, "b"))
        cond = condition_on_heterodyne(g, "b")
        assert np.allclose(cond.mat, 2.0 * np.eye(2))

    def test_order_independent(self, rng):
        for _ in range(20):
            g = random_physical_cov(rng, 4)
            m1, m2 = g.modes[1], g.modes[3]
            ab = condition_on_heterodyne(condition_on_heterodyne(g, m1), m2)
            ba = condition_on_heterodyne(condition_on_heterodyne(g, m2), m1)
            assert np.allclose(ab.mat, ba.mat, atol=1e-10)
            assert ab.modes == ba.modes

    def test_last_mode_rejected(self):
        with pytest.raises(ValueError):
            condition_on_heterodyne(thermal_covariance(2.0, "a"), "a")
