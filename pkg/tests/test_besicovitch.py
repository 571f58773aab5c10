import numpy as np
import pytest

from wwergodic.besicovitch import (
    CONSISTENT,
    FAILS_1,
    FAILS_3,
    INCONCLUSIVE,
    INCONCLUSIVE_2,
    ClassifyConfig,
    classify_besicovitch,
)
from wwergodic.weights import TrigPolynomial, WeightSequence, default_ladder, example59

GRID = np.linspace(0, 1, 16, endpoint=False)[:, None]


def _config(n, H=256, rungs=4, **kw):
    return ClassifyConfig(ladder=default_ladder(n, rungs), candidates=GRID, halfwidth=(H,), **kw)


def test_trig_polynomial_is_consistent():
    psi = TrigPolynomial.from_terms([((0.0,), 0.6), ((0.3,), 0.8j)])
    n, H = 20_000, 256
    rep = classify_besicovitch(WeightSequence.from_generator(psi, n + H), _config(n, H))
    assert rep.verdict == CONSISTENT
    assert rep.appears_in_S and rep.discrete
    assert rep.total_mass == pytest.approx(1.0, abs=0.01)
    found = sorted(round(e.angles[0], 2) % 1.0 for e in rep.atoms)
    assert found == [0.0, 0.3]
    assert all(e.stable for e in rep.atoms)


@pytest.mark.slow
def test_log_blocks_not_consistent():
    n, H = 100_000, 1024
    a = WeightSequence.from_generator(example59(1), n + H)
    rep = classify_besicovitch(a, _config(n, H, rungs=5))
    assert rep.verdict in (FAILS_3, INCONCLUSIVE_2)
    at_one = [e for e in rep.atoms if abs(e.angles[0]) < 1e-3 or abs(e.angles[0] - 1) < 1e-3]
    assert at_one and at_one[0].mass > 0.8
    assert at_one[0].limsup_sq < 0.5


def test_noise_fails_condition_one():
    rng = np.random.default_rng(11)
    n, H = 20_000, 256
    a = WeightSequence(rng.choice([-1.0, 1.0], size=n + H))
    rep = classify_besicovitch(a, _config(n, H))
    assert rep.verdict == FAILS_1
    assert not rep.discrete
    assert rep.reasons


def test_zero_sequence_is_consistent():
    rep = classify_besicovitch(WeightSequence.zeros(2000), _config(1000, 64, rungs=3))
    assert rep.verdict == CONSISTENT
    assert rep.total_mass == 0.0 and rep.atoms == []


def test_single_rung_is_inconclusive():
    cfg = ClassifyConfig(ladder=[(500,)], candidates=GRID, halfwidth=(32,))
    rep = classify_besicovitch(WeightSequence.constant(1.0, 600), cfg)
    assert rep.verdict == INCONCLUSIVE


def test_empty_candidate_grid_rejected():
    cfg = ClassifyConfig(ladder=default_ladder(100, 2), candidates=np.zeros((0, 1)))
    with pytest.raises(ValueError):
        classify_besicovitch(WeightSequence.constant(1.0, 200), cfg)


def test_candidate_dimension_checked():
    cfg = ClassifyConfig(ladder=default_ladder(100, 2), candidates=np.zeros((3, 2)))
    with pytest.raises(ValueError):
        classify_besicovitch(WeightSequence.constant(1.0, 200), cfg)


def test_report_serializes():
    rep = classify_besicovitch(WeightSequence.constant(1.0, 1200), _config(1000, 64, rungs=3))
    d = rep.to_dict()
    assert d["verdict"] == rep.verdict
    assert isinstance(d["atoms"], list)
