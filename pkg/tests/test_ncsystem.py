import numpy as np
import pytest

from wwergodic.ncsystem import (
    InvalidSystem,
    MatrixSystem,
    Projection,
    apply_power,
    au_convergence_diagnostic,
    bernoulli_stream,
    classical_sample_average,
    classical_twist_grid,
    classical_uniform_sup,
    ergodic_average,
    kronecker_decomposition,
    matrix_unit,
    op_norm,
    operator_correlation,
    operator_spectral_coeff,
    operator_spectral_coeff_density,
    random_commuting_system,
    random_operator,
    superoperator,
    tau,
    twisted_average,
    uniform_ww_sup,
    uniform_ww_sup_naive,
    unitary_power,
    weighted_average,
)
from wwergodic.weights import TrigPolynomial, WeightSequence

E12 = matrix_unit(2, 0, 1)


@pytest.fixture
def rotation():
    return MatrixSystem((np.diag([1, 1j]),))


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


class TestSystem:
    def test_rejects_non_unitary(self):
        with pytest.raises(InvalidSystem):
            MatrixSystem((np.array([[1, 1], [0, 1]]),))

    def test_rejects_non_commuting(self):
        X = np.array([[0, 1], [1, 0]])
        with pytest.raises(InvalidSystem):
            MatrixSystem((np.diag([1, -1]), X))

    def test_random_system_commutes(self, rng):
        s = random_commuting_system(5, 3, rng)
        for u in s.unitaries:
            for v in s.unitaries:
                assert op_norm(u @ v - v @ u) < 1e-12

    def test_projection_validation(self):
        with pytest.raises(ValueError):
            Projection(np.array([[1, 1], [0, 0]]))
        assert Projection.identity(3).tau_perp() == pytest.approx(0.0)


class TestPowers:
    def test_zero_power(self, rng):
        s = random_commuting_system(3, 2, rng)
        x = random_operator(3, rng)
        np.testing.assert_allclose(apply_power(s, x, (0, 0)), x)

    def test_rotation(self, rotation):
        for k in range(-5, 6):
            np.testing.assert_allclose(apply_power(rotation, E12, k), (-1j) ** k * E12, atol=1e-15)

    def test_trace_and_automorphism(self, rng):
        s = random_commuting_system(4, 2, rng)
        x, y = random_operator(4, rng), random_operator(4, rng)
        for k in [(1, 0), (3, -2), (-4, 5)]:
            Tx, Ty = apply_power(s, x, k), apply_power(s, y, k)
            assert tau(Tx) == pytest.approx(tau(x), abs=1e-12)
            np.testing.assert_allclose(apply_power(s, x @ y, k), Tx @ Ty, atol=1e-12)
            np.testing.assert_allclose(apply_power(s, x.conj().T, k), Tx.conj().T, atol=1e-12)

    def test_negative_power_is_inverse(self, rng):
        s = random_commuting_system(3, 1, rng)
        np.testing.assert_allclose(unitary_power(s, -3) @ unitary_power(s, 3), np.eye(3), atol=1e-12)


class TestAverages:
    def test_identity_system(self, rng):
        x = random_operator(3, rng)
        np.testing.assert_allclose(ergodic_average(MatrixSystem.identity(3, 2), x, (4, 7)), x, atol=1e-14)

    def test_alternating_cancels(self):
        s = MatrixSystem((np.diag([1, -1]),))
        for n in (1, 3, 9):
            assert np.max(np.abs(ergodic_average(s, E12, n))) == 0.0

    def test_mean_ergodic_limit(self, rng):
        s = MatrixSystem.diagonal([[0.0, 0.0, np.sqrt(2) - 1]])
        x = random_operator(3, rng)
        K = kronecker_decomposition(s)
        gap = np.max(np.abs(ergodic_average(s, x, 20_000) - K.fixed_point_projection(x)))
        assert gap < 1e-3

    def test_weighted_constant_is_ergodic(self, rng):
        s = random_commuting_system(3, 2, rng)
        x = random_operator(3, rng)
        a = WeightSequence.constant(1.0, (5, 5))
        np.testing.assert_allclose(weighted_average(s, x, a, (5, 4)), ergodic_average(s, x, (5, 4)), atol=1e-14)

    def test_weighted_identity_system(self, rng):
        x = random_operator(2, rng)
        vals = rng.standard_normal(8) + 0j
        a = WeightSequence(vals)
        np.testing.assert_allclose(weighted_average(MatrixSystem.identity(2), x, a, 7), vals.mean() * x, atol=1e-14)

    def test_twist_cancels_rotation(self, rotation):
        a = WeightSequence.from_generator(TrigPolynomial.from_terms([((0.25,), 1.0)]), 40)
        for n in (0, 5, 40):
            np.testing.assert_allclose(weighted_average(rotation, E12, a, n), E12, atol=1e-12)
            np.testing.assert_allclose(twisted_average(rotation, E12, 0.25, n), E12, atol=1e-12)

    def test_twisted_trivial_twist(self, rng):
        s = random_commuting_system(3, 2, rng)
        x = random_operator(3, rng)
        np.testing.assert_allclose(twisted_average(s, x, (0, 0), (6, 3)), ergodic_average(s, x, (6, 3)), atol=1e-13)

    def test_twisted_matches_weight(self, rng):
        s = random_commuting_system(3, 2, rng)
        x = random_operator(3, rng)
        lam = (0.13, 0.71)
        a = WeightSequence.from_generator(TrigPolynomial.from_terms([(lam, 1.0)], d=2), (6, 6))
        np.testing.assert_allclose(twisted_average(s, x, lam, (6, 5)), weighted_average(s, x, a, (6, 5)), atol=1e-13)
        assert op_norm(twisted_average(s, x, lam, (6, 5))) <= op_norm(x) + 1e-12


class TestCorrelation:
    def test_lag_zero(self, rng):
        s = random_commuting_system(3, 1, rng)
        x = random_operator(3, rng)
        assert operator_correlation(s, x, 0) == pytest.approx(tau(x.conj().T @ x))

    def test_rotation(self, rotation):
        for m in range(-4, 5):
            assert operator_correlation(rotation, E12, m) == pytest.approx(1j**m / 2)

    def test_gram_psd(self, rng):
        s = random_commuting_system(4, 2, rng)
        x = random_operator(4, rng)
        ms = [tuple(v) for v in rng.integers(-5, 6, size=(8, 2))]
        G = np.array([[operator_correlation(s, x, np.subtract(a, b)) for b in ms] for a in ms])
        assert np.min(np.linalg.eigvalsh((G + G.conj().T) / 2)) >= -1e-9


class TestSpectralCoefficient:
    def test_lag_zero_positive(self, rng):
        s = random_commuting_system(3, 2, rng)
        x = random_operator(3, rng)
        A = operator_spectral_coeff(s, x, (0, 0), (3, 4))
        assert np.min(np.linalg.eigvalsh((A + A.conj().T) / 2)) >= -1e-12
        np.testing.assert_allclose(A, A.conj().T, atol=1e-13)

    def test_two_paths_agree(self, rng):
        for _ in range(20):
            s = random_commuting_system(int(rng.integers(1, 5)), 2, rng)
            x = random_operator(s.N, rng)
            n = tuple(int(v) for v in rng.integers(1, 7, size=2))
            m = tuple(int(rng.integers(-min(3, v), min(3, v) + 1)) for v in n)
            A = operator_spectral_coeff(s, x, m, n)
            B = operator_spectral_coeff_density(s, x, m, n)
            assert np.max(np.abs(A - B)) <= 1e-10 * np.max(np.abs(A))

    def test_lag_beyond_window(self, rng):
        s = random_commuting_system(3, 2, rng)
        x = random_operator(3, rng)
        A = operator_spectral_coeff(s, x, (3, 0), (2, 2))
        B = operator_spectral_coeff_density(s, x, (3, 0), (2, 2))
        assert not np.any(A)
        assert np.max(np.abs(B)) <= 1e-12 * np.max(np.abs(operator_spectral_coeff(s, x, (0, 0), (2, 2))))

    @pytest.mark.parametrize("m", [-3, -1, 0, 2, 4])
    def test_rotation_hand_expansion(self, rotation, m):
        n = 6
        A = operator_spectral_coeff(rotation, E12, m, n)
        # T^{k+m}(x)^* T^k(x) = conj((-i)^{k+m}) (-i)^k E21 E12 = i^m E22
        expect = (n + 1 - abs(m)) / (n + 1) * 1j**m * matrix_unit(2, 1, 1)
        np.testing.assert_allclose(A, expect, atol=1e-14)


class TestKronecker:
    def test_identity_system(self):
        K = kronecker_decomposition(MatrixSystem.identity(3))
        np.testing.assert_allclose(K.eigenvalues, 1.0)
        assert K.in_K.all()

    def test_two_angle_diagonal(self):
        a, b = 0.1, 0.35
        K = kronecker_decomposition(MatrixSystem.diagonal([[a, b]]))
        got = np.sort(np.round(K.eigen_angles()[0], 12))
        assert got == pytest.approx(np.sort(np.mod([0, 0, a - b, b - a], 1.0)))

    def test_eigen_operators(self, rng):
        s = random_commuting_system(3, 2, rng)
        K = kronecker_decomposition(s)
        for b, mu in zip(K.basis, K.eigenvalues.T):
            for j in range(2):
                np.testing.assert_allclose(apply_power(s, b, tuple(int(i == j) for i in range(2))), mu[j] * b, atol=1e-12)

    def test_projectors_and_degeneracy(self, rng):
        for N in range(1, 7):
            K = kronecker_decomposition(random_commuting_system(N, 2, rng))
            assert max(K.checks().values()) <= 1e-10
            assert K.to_dict()["dim_Kperp"] == 0

    def test_superoperator(self, rng):
        u = random_commuting_system(3, 1, rng).unitaries[0]
        x = random_operator(3, rng)
        np.testing.assert_allclose((superoperator(u) @ x.reshape(-1)).reshape(3, 3), u @ x @ u.conj().T, atol=1e-13)


class TestAUDiagnostic:
    def test_zero_tail(self):
        rep = au_convergence_diagnostic([np.zeros((3, 3))] * 4, 0.2)
        assert rep.achieved == 0.0 and rep.tau_perp == pytest.approx(0.0)

    def test_constant_rank_one(self):
        rep = au_convergence_diagnostic([2.0 * matrix_unit(2, 0, 0)] * 3, 0.5)
        assert rep.achieved == pytest.approx(0.0, abs=1e-15)
        assert rep.tau_perp == pytest.approx(0.5)
        np.testing.assert_allclose(rep.projection.p, matrix_unit(2, 1, 1), atol=1e-14)

    def test_one_sided_mode(self):
        rep = au_convergence_diagnostic([matrix_unit(2, 1, 0)], 0.5, mode="one-sided")
        assert rep.achieved == pytest.approx(0.0, abs=1e-15)

    def test_tail_moving_outward(self, rng):
        s = MatrixSystem.diagonal([[0.0, 0.31, 0.77, np.sqrt(3) - 1]])
        x = random_operator(4, rng)
        x = x - kronecker_decomposition(s).fixed_point_projection(x)
        sups = []
        for start in (10, 100, 1000):
            tail = [ergodic_average(s, x, n) for n in range(start, 2 * start, max(1, start // 10))]
            sups.append(au_convergence_diagnostic(tail, 0.25).achieved)
        assert sups[0] > sups[1] > sups[2]

    def test_bad_epsilon(self):
        with pytest.raises(ValueError):
            au_convergence_diagnostic([np.eye(2)], 1.0)


class TestUniformSup:
    def test_zero(self, rng):
        s = random_commuting_system(2, 2, rng)
        assert uniform_ww_sup(s, np.zeros((2, 2)), None, (7, 7), (8, 8)).sup == 0.0

    def test_fixed_point(self, rng):
        s = random_commuting_system(3, 2, rng)
        rep = uniform_ww_sup(s, np.eye(3), Projection.identity(3), (9, 9), (16, 16))
        assert rep.sup == pytest.approx(1.0)
        assert rep.argmax == (0.0, 0.0)

    def test_dft_matches_naive(self, rng):
        for _ in range(5):
            s = random_commuting_system(3, 2, rng)
            x = random_operator(3, rng)
            e = Projection.onto(np.linalg.qr(rng.standard_normal((3, 2)))[0])
            fast = uniform_ww_sup(s, x, e, (11, 6), (8, 5)).sup
            assert fast == pytest.approx(uniform_ww_sup_naive(s, x, e, (11, 6), (8, 5)), abs=1e-10)


class TestClassicalChannel:
    def test_constant_stream(self):
        f = np.full((5, 6), 2 - 1j)
        assert classical_sample_average(f) == pytest.approx(2 - 1j)

    def test_twist_cancels(self):
        k = np.arange(100)
        f = np.exp(-2j * np.pi * 0.3 * k)
        assert classical_sample_average(f, lam=0.3) == pytest.approx(1.0)

    def test_weight_and_twist_exclusive(self):
        with pytest.raises(ValueError):
            classical_sample_average(np.ones(4), WeightSequence.constant(1.0, 3), 0.2)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            classical_sample_average(np.ones(4), n=10)

    def test_grid_matches_pointwise(self, rng):
        f = rng.standard_normal((9, 7))
        g = classical_twist_grid(f, (4, 3))
        assert g[1, 2] == pytest.approx(classical_sample_average(f, lam=(1 / 4, 2 / 3)))

    def test_zero_stream(self):
        assert classical_uniform_sup(np.zeros((10, 10)), (8, 8)).sup == 0.0

    def test_one_dimensional_decay(self):
        f = bernoulli_stream(65_535, np.random.default_rng(42))
        assert classical_uniform_sup(f, 256).sup < 0.02

    def test_bernoulli_is_seeded(self):
        a = bernoulli_stream((3, 3), np.random.default_rng(1))
        b = bernoulli_stream((3, 3), np.random.default_rng(1))
        assert np.array_equal(a, b) and set(np.unique(a.real)) <= {-1.0, 1.0}
