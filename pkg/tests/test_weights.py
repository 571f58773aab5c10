import math

import numpy as np
import pytest

from wwergodic.weights import (
    BochnerFejerParams,
    DimensionError,
    TorusPoint,
    TrigPolynomial,
    WeightSequence,
    amplitude_estimate,
    amplitude_grid,
    bochner_fejer_convolve,
    bochner_fejer_kernel_eval,
    correlation_estimate,
    correlation_lags,
    correlation_table,
    default_ladder,
    example59,
    marcinkiewicz_seminorm,
    semi_inner_product,
    translate,
)


def power_seq(theta, box, d=1):
    return WeightSequence.from_generator(TrigPolynomial.from_terms([((theta,) * d, 1.0)], d=d), box)


class TestTorusPoint:
    def test_angles_reduced_mod_one(self):
        assert TorusPoint((1.25, -0.5)).angles == pytest.approx((0.25, 0.5))

    def test_equality_needs_explicit_tolerance(self):
        p, q = TorusPoint((0.1,)), TorusPoint((0.1 + 1e-7,))
        assert not p.isclose(q)
        assert p.isclose(q, tol=1e-6)

    def test_wraparound_is_close(self):
        assert TorusPoint((0.9999999999,)).isclose(TorusPoint((0.0,)))


class TestWeightSequence:
    def test_zero_extension(self):
        a = WeightSequence.constant(1.0, 4)
        w = a.window((-3,), (7,))
        assert np.array_equal(w, np.r_[np.zeros(3), np.ones(5), np.zeros(3)])

    def test_generator_agrees_with_values(self):
        psi = TrigPolynomial.from_terms([((0.3, 0.1), 0.5 - 0.2j), ((0.7, 0.4), 1j)], d=2)
        a = WeightSequence.from_generator(psi, (5, 6))
        k = np.stack(np.meshgrid(np.arange(6), np.arange(7), indexing="ij"), axis=-1)
        np.testing.assert_allclose(a.values, psi(k), atol=1e-13)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            WeightSequence(np.array([1.0, np.nan]))


class TestCorrelationEstimate:
    def test_constant(self):
        assert correlation_estimate(WeightSequence.constant(1.0, 20), 2, 10) == 1.0

    @pytest.mark.parametrize("m", [0, 1, 2, 3, 7])
    @pytest.mark.parametrize("n", [0, 5, 31])
    def test_single_atom_quarter_turn(self, m, n):
        a = power_seq(0.25, n + m)
        assert correlation_estimate(a, m, n) == pytest.approx(1j**m, abs=1e-13)

    def test_log_blocks_lag_three(self):
        a = WeightSequence.from_generator(example59(1), 100_003)
        assert abs(correlation_estimate(a, 3, 100_000) - 1.0) < 0.05

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            correlation_estimate(WeightSequence.constant(1.0, 5), (1, 1), 3)

    def test_fft_matches_direct(self):
        rng = np.random.default_rng(3)
        a = WeightSequence(rng.standard_normal((20, 17)) + 1j * rng.standard_normal((20, 17)))
        fast = correlation_lags(a, (12, 10), (4, 3))
        slow = correlation_lags(a, (12, 10), (4, 3), method="direct")
        np.testing.assert_allclose(fast, slow, atol=1e-12)
        assert fast[4 + 2, 3 - 1] == pytest.approx(correlation_estimate(a, (2, -1), (12, 10)), abs=1e-12)


class TestCorrelationTable:
    def test_two_atoms(self):
        psi = TrigPolynomial.from_terms([((0.0,), 0.6), ((0.3,), 0.8j)])
        n = 8000
        a = WeightSequence.from_generator(psi, n + 8)
        t = correlation_table(a, 8, default_ladder(n, 4))
        for m in range(0, 9):
            expect = 0.36 + 0.64 * np.exp(2j * np.pi * 0.3 * m)
            assert abs(t.at(m) - expect) < 10.0 / n

    def test_zero_sequence(self):
        t = correlation_table(WeightSequence.zeros(200), 4, default_ladder(200, 3))
        assert not np.any(t.entries)
        assert t.appears_in_S

    @pytest.mark.slow
    def test_log_blocks_two_dim(self):
        a = WeightSequence.from_generator(example59(2), (2002, 2002))
        t = correlation_table(a, 2, default_ladder((2000, 2000), 3), tolerance=0.1)
        assert t.appears_in_S
        assert np.all(np.abs(t.entries - 1.0) < 0.1)

    def test_empty_ladder(self):
        with pytest.raises(ValueError):
            correlation_table(WeightSequence.zeros(10), 1, [])

    def test_rows_for_csv(self):
        t = correlation_table(WeightSequence.constant(1.0, 30), 1, [(10,), (20,)])
        rows = list(t.rows())
        assert [r[0] for r in rows] == [(-1,), (0,), (1,)]


class TestSeminorms:
    def test_one_sided_ones(self):
        assert marcinkiewicz_seminorm(WeightSequence.constant(1.0, 9), 1, 9) == 1.0

    def test_two_sided_ones(self):
        A = WeightSequence(np.ones(19), origin=(-9,))
        assert marcinkiewicz_seminorm(A, 1, 9) == pytest.approx(1.9)

    def test_sup(self):
        assert marcinkiewicz_seminorm(WeightSequence.from_generator(example59(1), 500), math.inf, 500) == 1.0

    def test_p_below_one(self):
        with pytest.raises(ValueError):
            marcinkiewicz_seminorm(WeightSequence.constant(1.0, 3), 0.5, 3)

    def test_semi_inner_product_self(self):
        A = power_seq(0.25, 7)
        assert semi_inner_product(A, A, 7) == pytest.approx(1.0, abs=1e-15)

    def test_semi_inner_product_orthogonal_roots(self):
        A, B = power_seq(1 / 6, 11), power_seq(2 / 6, 11)
        assert abs(semi_inner_product(A, B, 11)) < 1e-14

    def test_translation_moves_across_inner_product(self):
        rng = np.random.default_rng(0)
        A = WeightSequence(np.exp(2j * np.pi * rng.random(300)))
        B = WeightSequence(np.exp(2j * np.pi * rng.random(300)))
        n, m = 200, 5
        lhs = semi_inner_product(translate(A, m), B, n)
        rhs = semi_inner_product(A, translate(B, -m), n)
        # the two windows differ by 2|m| boundary terms of modulus <= 1
        assert abs(lhs - rhs) <= 2 * m / (n + 1)


class TestTranslate:
    def test_identity(self):
        A = WeightSequence(np.arange(5.0))
        assert np.array_equal(translate(A, 0).window((-2,), (6,)), A.window((-2,), (6,)))

    def test_inverse(self):
        A = WeightSequence(np.arange(1.0, 6.0))
        B = translate(translate(A, 3), -3)
        assert np.array_equal(B.window((-4,), (9,)), A.window((-4,), (9,)))

    def test_values(self):
        A = WeightSequence(np.arange(1.0, 6.0))
        assert translate(A, 2).window((0,), (4,)).tolist() == [3, 4, 5, 0, 0]

    def test_seminorm_boundary(self):
        A = WeightSequence.from_generator(example59(1), 1000)
        n, m = 500, 7
        diff = abs(marcinkiewicz_seminorm(translate(A, m), 2, n) ** 2 - marcinkiewicz_seminorm(A, 2, n) ** 2)
        assert diff <= m / (n + 1)


class TestAmplitude:
    def test_on_atom(self):
        a = power_seq(0.37, 50)
        for n in (0, 9, 50):
            assert amplitude_estimate(a, 0.37, n) == pytest.approx(1.0, abs=1e-13)

    def test_off_atom_roots_of_unity(self):
        a = power_seq(1 / 5, 19)
        assert abs(amplitude_estimate(a, 3 / 5, 19)) < 1e-14

    def test_log_blocks_oscillates(self):
        a = WeightSequence.from_generator(example59(1), 60_000)
        vals = [amplitude_estimate(a, 0.0, int(round(math.exp(J))) - 1).real for J in (8, 9, 10, 11)]
        assert all(abs(abs(v) - 0.46) < 0.03 for v in vals)
        assert all(np.sign(x) != np.sign(y) for x, y in zip(vals, vals[1:]))

    def test_grid_matches_pointwise(self):
        rng = np.random.default_rng(1)
        a = WeightSequence(rng.standard_normal((9, 8)) + 0j)
        pts = rng.random((5, 2))
        g = amplitude_grid(a, pts, (7, 6))
        for p, v in zip(pts, g):
            assert v == pytest.approx(amplitude_estimate(a, p, (7, 6)), abs=1e-12)

    def test_linear_in_scaling(self):
        a = WeightSequence.from_generator(example59(1), 300)
        c = 0.3 - 2j
        assert amplitude_estimate(a.scaled(c), 0.2, 300) == pytest.approx(c * amplitude_estimate(a, 0.2, 300), abs=1e-13)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            amplitude_estimate(WeightSequence.zeros(4), (0.1, 0.2), 3)


class TestBochnerFejer:
    def test_order_one_is_constant(self):
        p = BochnerFejerParams.single(1, math.sqrt(2))
        for t in (0, 1, 5, -3):
            assert bochner_fejer_kernel_eval(p, t) == pytest.approx(1.0)

    def test_order_two_at_zero(self):
        assert bochner_fejer_kernel_eval(BochnerFejerParams.single(2, 0.3), 0) == pytest.approx(2.0)

    def test_weights_on_lattice(self):
        freqs, weights = BochnerFejerParams.single(3, 0.1).axis_lattice(0)
        np.testing.assert_allclose(weights, [1 / 3, 2 / 3, 1, 2 / 3, 1 / 3])
        np.testing.assert_allclose(freqs, [-0.2, -0.1, 0.0, 0.1, 0.2], atol=1e-15)

    def test_convolve_single_exponential(self):
        beta = math.sqrt(2) - 1
        a = power_seq(beta, 20_000)
        out = bochner_fejer_convolve(BochnerFejerParams.single(2, beta), a)
        assert out.amplitude(beta) == pytest.approx(0.5, abs=1e-3)
        assert max(abs(c) for _, c in out.terms()) == pytest.approx(0.5, abs=1e-3)

    def test_convolve_trig_polynomial_exact(self):
        beta = 0.1
        psi = TrigPolynomial.from_terms([((0.1,), 2.0), ((0.2,), -1.0), ((0.55,), 3.0)])
        out = bochner_fejer_convolve(BochnerFejerParams.single(3, beta), psi)
        got = {round(t.angles[0], 9): c for t, c in out.terms()}
        assert got == pytest.approx({0.1: 2.0 * 2 / 3, 0.2: -1.0 / 3})

    def test_convolve_zero(self):
        out = bochner_fejer_convolve(BochnerFejerParams.single(2, 0.3), WeightSequence.zeros(50))
        assert not out.terms() or all(c == 0 for _, c in out.terms())

    def test_sup_not_increased(self):
        rng = np.random.default_rng(4)
        beta = 1 / math.pi
        for _ in range(10):
            psi = TrigPolynomial.from_terms(
                [((k * beta % 1,), complex(*rng.standard_normal(2))) for k in rng.choice(9, 3, replace=False) - 4]
            )
            out = bochner_fejer_convolve(BochnerFejerParams.single(4, beta), psi)
            k = np.arange(5000)[:, None]
            assert np.max(np.abs(out(k))) <= np.max(np.abs(psi(k))) + 1e-9


class TestLogBlockSigns:
    @pytest.mark.parametrize("d,k,expected", [(1, (0,), 1), (1, (2,), -1), (2, (1, 1), -1), (1, (6,), -1), (1, (7,), 1)])
    def test_values(self, d, k, expected):
        a = WeightSequence.from_generator(example59(d), (8,) * d)
        assert a.values[k] == expected

    def test_base_is_configurable(self):
        a = WeightSequence.from_generator(example59(1, base=10), 20)
        assert a.values[8] == 1 and a.values[9] == -1

    def test_bad_base(self):
        with pytest.raises(ValueError):
            example59(1, base=1.0)


@pytest.mark.parametrize("seed", range(4))
def test_translate_gram_matrix_is_positive(seed):
    rng = np.random.default_rng(seed)
    A = WeightSequence(np.exp(2j * np.pi * rng.random(80)), origin=(-20,))
    shifts = rng.integers(-6, 7, size=5)
    n = 40
    G = np.array([[semi_inner_product(translate(A, int(p)), translate(A, int(q)), n) for q in shifts] for p in shifts])
    np.testing.assert_allclose(G, G.conj().T, atol=1e-13)
    assert np.linalg.eigvalsh(G).min() >= -1e-9
