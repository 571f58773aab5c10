"""Randomised invariants checked with hypothesis."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from wwergodic.spectral import TorusMeasure, fourier_stieltjes, measure_coefficients, wiener_continuity
from wwergodic.vandercorput import OperatorArray2D, formula1_check, formula2_check, vdc_bound
from wwergodic.weights import WeightSequence, circular_distance, correlation_estimate, translate

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
complexes = st.builds(complex, finite, finite)
angles = st.floats(0, 1, exclude_max=True)
# distinct atoms on a 1/256 grid, well apart from the atom-merging tolerance
atom_sets = st.sets(st.integers(0, 255), min_size=1, max_size=4).map(lambda s: [k / 256 for k in sorted(s)])


@settings(max_examples=60, deadline=None)
@given(arrays(complex, st.integers(1, 9), elements=complexes), st.integers(0, 12))
def test_formula1(values, h):
    assert formula1_check(values, h).deviation < 1e-12


@settings(max_examples=40, deadline=None)
@given(arrays(complex, st.tuples(st.integers(1, 6), st.integers(1, 6), st.integers(1, 3)).map(
    lambda s: (s[0], s[0], s[2], s[2])), elements=complexes), st.integers(0, 7))
def test_formula2(arr, h):
    assert formula2_check(arr, h).deviation < 1e-12


@settings(max_examples=60, deadline=None)
@given(arrays(complex, st.tuples(st.integers(1, 5), st.integers(1, 5), st.integers(1, 3)).map(
    lambda s: s + (s[2],)), elements=complexes), st.integers(0, 5), st.integers(0, 5))
def test_padded_vdc_holds(entries, h1, h2):
    arr = OperatorArray2D.padded(entries)
    h1, h2 = min(h1, arr.n[0]), min(h2, arr.n[1])
    r = vdc_bound(arr, h1, h2)
    assert r.lhs <= r.rhs * (1 + 1e-10) + 1e-10


@settings(max_examples=60, deadline=None)
@given(atom_sets, st.integers(-20, 20))
def test_fourier_stieltjes_conjugate_symmetry(pts, m):
    mu = TorusMeasure.atomic([[p] for p in pts], [1.0 / len(pts)] * len(pts))
    assert fourier_stieltjes(mu, -m) == np.conj(fourier_stieltjes(mu, m))


@settings(max_examples=40, deadline=None)
@given(atom_sets, st.integers(0, 30))
def test_wiener_value_in_unit_interval(pts, h):
    mu = TorusMeasure.atomic([[p] for p in pts], [1.0 / len(pts)] * len(pts))
    v = wiener_continuity(measure_coefficients(mu, (h,)), (h,))
    assert -1e-12 <= v <= 1.0 + 1e-12


@settings(max_examples=60, deadline=None)
@given(arrays(complex, st.integers(2, 40), elements=complexes), st.integers(0, 10))
def test_correlation_hermitian_at_lag_zero(vals, n):
    a = WeightSequence(vals)
    g = correlation_estimate(a, 0, n)
    assert abs(g.imag) <= 1e-12 * max(1.0, abs(g)) and g.real >= 0


@settings(max_examples=60, deadline=None)
@given(arrays(complex, st.integers(1, 30), elements=complexes), st.integers(-10, 10))
def test_translate_round_trip(vals, m):
    a = WeightSequence(vals)
    back = translate(translate(a, m), -m)
    assert np.array_equal(back.window((-12,), (45,)), a.window((-12,), (45,)))


@given(angles, angles)
def test_circular_distance_symmetric_and_bounded(x, y):
    d = float(np.max(circular_distance([x], [y])))
    assert d == float(np.max(circular_distance([y], [x])))
    assert 0 <= d <= 0.5
