import numpy as np
import pytest

from wwergodic.ncsystem import MatrixSystem, Projection, random_commuting_system, random_operator
from wwergodic.vandercorput import (
    GROUPS,
    OperatorArray2D,
    formula1_check,
    formula2_check,
    vdc_all_h,
    vdc_apply_wwproof,
    vdc_bound,
    vdc_fuzz,
)


class TestIdentities:
    def test_formula1_scalar_example(self):
        r = formula1_check([1.0, 2.0, 3.0], 1)
        assert r.lhs == pytest.approx(12.0)
        assert r.deviation < 1e-15 and r.supported

    def test_formula2_ones(self):
        r = formula2_check(np.ones((3, 3)), 2)
        # every (j, j') with |j - j'| <= h is counted (h + 1 - |j - j'|) times
        assert r.lhs == pytest.approx(3 * 3 + 2 * 2 * 2 + 1 * 1 * 2)
        assert r.deviation < 1e-15

    @pytest.mark.parametrize("h", [0, 1, 4, 6])
    def test_operator_valued(self, h):
        rng = np.random.default_rng(h)
        v = rng.standard_normal((6, 3, 3)) + 1j * rng.standard_normal((6, 3, 3))
        assert formula1_check(v, h).deviation < 1e-13
        arr = rng.standard_normal((6, 6, 2, 2))
        assert formula2_check(arr, h).deviation < 1e-13

    def test_h_beyond_n_flagged(self):
        assert not formula1_check([1.0, 1.0], 5).supported

    def test_bad_inputs(self):
        with pytest.raises(ValueError):
            formula1_check([], 1)
        with pytest.raises(ValueError):
            formula2_check(np.ones((2, 3)), 1)


class TestOperatorArray:
    def test_zero_outside_extent(self):
        arr = OperatorArray2D.constant(np.eye(2), (2, 2))
        assert not arr(-1, 0).any() and not arr(2, 0).any()
        assert np.array_equal(arr(1, 1), np.eye(2))

    def test_extent_must_cover_n(self):
        with pytest.raises(ValueError):
            OperatorArray2D(np.zeros((2, 2, 1, 1)), (3, 2))

    def test_round_trip(self):
        arr = OperatorArray2D.constant(np.array([[1, 2j], [0, 1]]), (2, 3), extent=(3, 3))
        back = OperatorArray2D.from_dict(arr.to_dict())
        assert back.n == arr.n and np.array_equal(back.entries, arr.entries)


class TestBound:
    def test_identity_extended(self):
        r = vdc_bound(OperatorArray2D.constant(np.eye(2), (4, 4), extent=(5, 5)), 1, 1)
        assert r.lhs == 1.0 and r.rhs == 9.0
        assert set(r.groups) == set(GROUPS)

    def test_identity_padded(self):
        r = vdc_bound(OperatorArray2D.constant(np.eye(2), (4, 4)), 1, 1)
        assert r.rhs == pytest.approx(6.25)
        assert r.padded and r.holds()

    def test_zero_array(self):
        r = vdc_bound(OperatorArray2D.padded(np.zeros((3, 3, 2, 2))), 2, 2)
        assert r.lhs == 0.0 and r.rhs == 0.0 and r.holds()

    def test_h_beyond_n_flagged(self):
        r = vdc_bound(OperatorArray2D.constant(np.eye(1), (2, 2)), 3, 0)
        assert r.outside_hypothesis

    def test_negative_h(self):
        with pytest.raises(ValueError):
            vdc_bound(OperatorArray2D.constant(np.eye(1), (2, 2)), -1, 0)

    def test_all_h_matches_single(self):
        rng = np.random.default_rng(8)
        arr = OperatorArray2D.padded(rng.standard_normal((3, 4, 2, 2)) + 0j)
        every = vdc_all_h(arr)
        assert len(every) == 4 * 5
        for r in every:
            single = vdc_bound(arr, *r.h)
            assert r.rhs == pytest.approx(single.rhs, rel=1e-12)

    def test_h_zero_is_four_times_diagonal(self):
        rng = np.random.default_rng(2)
        arr = OperatorArray2D.padded(rng.standard_normal((3, 3, 2, 2)) + 0j)
        r = vdc_bound(arr, 0, 0)
        assert r.rhs == pytest.approx(4 * r.groups["diagonal"])


class TestFuzz:
    def test_small_campaign_no_violations(self):
        rep = vdc_fuzz(1, trials=30, max_dim=3, max_n=5)
        assert rep.cases > 30 and not rep.violations
        assert rep.min_margin >= -1e-10

    def test_beyond_policy_counts(self):
        rep = vdc_fuzz(2, trials=10, h_policy="beyond")
        assert rep.outside_hypothesis == 10

    def test_seeded(self):
        assert vdc_fuzz(5, trials=5).to_dict() == vdc_fuzz(5, trials=5).to_dict()

    def test_bad_policy(self):
        with pytest.raises(ValueError):
            vdc_fuzz(0, trials=1, h_policy="some")


class TestWWProof:
    def test_zero_operator(self):
        sys = MatrixSystem.identity(2, d=2)
        rep = vdc_apply_wwproof(sys, np.zeros((2, 2)), None, (4, 4), (1, 1), grid=(8, 8))
        assert rep.grid_sup_sq == 0.0 and rep.padded_bound == 0.0

    def test_identity_operator(self):
        sys = MatrixSystem.identity(2, d=2)
        rep = vdc_apply_wwproof(sys, np.eye(2), None, (4, 4), (1, 1), grid=(8, 8))
        # lambda = 1 is on the grid and the average of the identity is the identity
        assert rep.grid_sup_sq == pytest.approx(1.0)
        assert rep.padded_holds
        assert rep.display_bound == pytest.approx(9.0)

    @pytest.mark.parametrize("seed", range(5))
    def test_random_padded_bound_holds(self, seed):
        rng = np.random.default_rng(seed)
        sys = random_commuting_system(3, 2, rng)
        x = random_operator(3, rng)
        v = rng.standard_normal((3, 1)) + 0j
        e = Projection.onto(v / np.linalg.norm(v))
        rep = vdc_apply_wwproof(sys, x, e, (5, 4), (2, 1), grid=(16, 16))
        assert rep.padded_holds
        assert rep.wiener_tail >= 0

    def test_needs_two_parameters(self):
        with pytest.raises(ValueError):
            vdc_apply_wwproof(MatrixSystem.identity(2, d=1), np.eye(2), None, (3,), (1,))
