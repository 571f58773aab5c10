"""Empirical test of the three bounded-Besicovitch conditions.

A bounded sequence is in the bounded Besicovitch class exactly when

1. it has a correlation and its spectral measure is discrete,
2. the amplitude ``Gamma_a(z)`` exists at every ``z``,
3. ``sigma_a({z}) = |Gamma_a(z)|^2`` at every ``z``.

Each condition is a limit statement, so the classifier only reports ladder
evidence and a verdict drawn from a fixed vocabulary.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import optimize

from .spectral import debias_lags, detect_atoms, point_mass, wiener_continuity
from .weights import (
    TorusPoint,
    WeightSequence,
    _check_ladder,
    amplitude_grid,
    as_index,
    circular_distance,
    correlation_lags,
    correlation_table,
)

CONSISTENT = "consistent-with-bounded-Besicovitch"
FAILS_1 = "fails-(1)"
FAILS_2 = "fails-(2)"
FAILS_3 = "fails-(3)"
INCONCLUSIVE_2 = "inconclusive-(2)"
INCONCLUSIVE = "inconclusive"

VERDICTS = (CONSISTENT, FAILS_1, FAILS_2, FAILS_3, INCONCLUSIVE_2, INCONCLUSIVE)


@dataclass
class ClassifyConfig:
    """Knobs for :func:`classify_besicovitch`.

    ``candidates`` is an ``(r, d)`` array of angle fractions that are always
    examined in addition to detected spectral peaks.  ``halfwidth`` is the lag
    window used for peak detection and point masses at the top rung; the
    sequence must be stored up to ``ladder[-1] + halfwidth`` for those lags to
    be unbiased.  Ladder stability of the correlation is judged on the smaller
    window ``s_halfwidth``: long lags converge at rate ``|m| / n`` and would
    swamp the low rungs.
    """

    ladder: Sequence
    candidates: np.ndarray
    halfwidth: Optional[Sequence[int]] = None
    s_halfwidth: Optional[Sequence[int]] = None
    s_tol: float = 0.05
    discrete_tol: float = 0.1
    amp_tol: float = 0.05
    cond3_tol: float = 0.1
    peak_threshold: float = 0.01


@dataclass
class AtomEvidence:
    angles: tuple
    mass: float
    mass_imag: float
    amplitudes: list  # complex, one per rung
    stable: bool
    liminf_sq: float
    limsup_sq: float
    discrepancy: float

    def to_dict(self) -> dict:
        return {
            "angles": list(self.angles),
            "point_mass": self.mass,
            "point_mass_imag": self.mass_imag,
            "amplitude_ladder": [[v.real, v.imag] for v in self.amplitudes],
            "amplitude_sq_ladder": [abs(v) ** 2 for v in self.amplitudes],
            "amplitude_stable": self.stable,
            "liminf_amplitude_sq": self.liminf_sq,
            "limsup_amplitude_sq": self.limsup_sq,
            "discrepancy": self.discrepancy,
        }


@dataclass
class ClassificationReport:
    verdict: str
    reasons: list
    ladder: list
    halfwidth: tuple
    appears_in_S: bool
    correlation_spread: float
    hermitian_defect: float
    total_mass: float
    atom_mass: float
    discrete: bool
    wiener_value: float
    atoms: list = field(default_factory=list)
    grid_max_spread: float = 0.0
    grid_unstable: list = field(default_factory=list)

    def to_dict(self) -> dict:
        out = {k: v for k, v in asdict(self).items() if k not in ("atoms",)}
        out["ladder"] = [list(n) for n in self.ladder]
        out["halfwidth"] = list(self.halfwidth)
        out["atoms"] = [a.to_dict() for a in self.atoms]
        return out


def _amplitude_ladder(a: WeightSequence, angles: np.ndarray, ladder) -> np.ndarray:
    """``(rungs, points)`` array of amplitude estimates."""
    return np.stack([amplitude_grid(a, angles, n) for n in ladder])


def _polish(a: WeightSequence, angle: np.ndarray, n: tuple, width: float) -> np.ndarray:
    """Move a detected atom to the nearby maximum of ``|Gamma_n|``.

    Moment-based locations are only good to about ``1/H``; at the top rung a
    residual offset of that size rotates the amplitude by ``2 pi n offset``.
    """
    neg = lambda t: -abs(amplitude_grid(a, np.atleast_2d(t), n)[0])  # noqa: E731
    if a.d == 1:
        step = 1.0 / (4 * n[0])
        k = min(4097, int(np.ceil(width / step)) * 2 + 1)
        ts = angle[0] + np.linspace(-width, width, k)
        best = ts[np.argmax(np.abs(amplitude_grid(a, ts[:, None], n)))]
        res = optimize.minimize_scalar(
            lambda t: neg([t]), bounds=(best - step, best + step), method="bounded", options={"xatol": 1e-13}
        )
        out = np.array([res.x])
    else:
        res = optimize.minimize(neg, angle, method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-15})
        out = np.asarray(res.x)
    return np.mod(out, 1.0) if -neg(out) >= -neg(angle) else np.asarray(angle)


def _stable(trace: np.ndarray, tol: float) -> bool:
    if trace.shape[0] < 2:
        return True
    return bool(np.max(np.abs(np.diff(trace))) < tol)


def _shrinking(trace: np.ndarray) -> bool:
    """Do successive jumps decrease over the second half of the ladder?"""
    jumps = np.abs(np.diff(trace))
    if jumps.size < 2:
        return False
    return bool(jumps[-1] < 0.5 * jumps[0])


def classify_besicovitch(a: WeightSequence, config: ClassifyConfig) -> ClassificationReport:
    cand = np.atleast_2d(np.asarray(config.candidates, dtype=float))
    if cand.size == 0:
        raise ValueError("candidate grid must be non-empty")
    if cand.shape[1] != a.d:
        raise ValueError("candidate grid dimension differs from the sequence")
    ladder = _check_ladder(config.ladder, a.d)
    H = (
        as_index(config.halfwidth, a.d)
        if config.halfwidth is not None
        else tuple(max(1, min(v // 8, 1024)) for v in ladder[-1])
    )
    Hs = (
        as_index(config.s_halfwidth, a.d)
        if config.s_halfwidth is not None
        else tuple(min(16, h) for h in H)
    )
    table = correlation_table(a, Hs, ladder, tolerance=config.s_tol)
    # negative lags of a one-sided sequence drift with n by |m|/(n+1) unless rescaled
    completed = np.stack([debias_lags(t, n) for t, n in zip(table.trace, ladder)])
    spread = np.max(np.abs(np.diff(completed, axis=0))) if len(ladder) > 1 else 0.0
    in_S = bool(spread < config.s_tol)
    raw = correlation_lags(a, ladder[-1], H)
    coeffs = debias_lags(raw, ladder[-1])
    total = float(coeffs[tuple(H)].real)
    reasons: list[str] = []

    if total <= 1e-14:
        measure_atoms = np.zeros((0, a.d))
        masses = np.zeros(0)
    else:
        mu = detect_atoms(coeffs, H, candidates=cand, threshold=config.peak_threshold)
        measure_atoms, masses = mu.atom_angles, mu.atom_masses
        on_grid = [any(np.all(circular_distance(p, c) < 1e-12) for c in cand) for p in measure_atoms]
        width = 1.0 / (2 * max(H) + 1)
        measure_atoms = np.array(
            [p if g else _polish(a, p, ladder[-1], width) for p, g in zip(measure_atoms, on_grid)]
        ).reshape(-1, a.d)
    atom_mass = float(np.sum(masses))
    discrete = atom_mass >= (1.0 - config.discrete_tol) * total - 1e-12
    wiener = wiener_continuity(coeffs, H)

    points = np.vstack([measure_atoms, cand]) if measure_atoms.size else cand
    amps = _amplitude_ladder(a, points, ladder)
    r = measure_atoms.shape[0]

    atoms = []
    for i in range(r):
        trace = amps[:, i]
        sq = np.abs(trace) ** 2
        pm = point_mass(coeffs, measure_atoms[i], H)
        atoms.append(
            AtomEvidence(
                angles=TorusPoint(measure_atoms[i]).angles,
                mass=pm.mass,
                mass_imag=pm.imag,
                amplitudes=[complex(v) for v in trace],
                stable=_stable(trace, config.amp_tol),
                liminf_sq=float(sq.min()),
                limsup_sq=float(sq.max()),
                discrepancy=float(abs(pm.mass - sq[-1])),
            )
        )
    grid = amps[:, r:]
    grid_spread = np.max(np.abs(np.diff(grid, axis=0)), axis=0) if len(ladder) > 1 else np.zeros(grid.shape[1])
    grid_unstable = [list(map(float, cand[j])) for j in np.flatnonzero(grid_spread >= config.amp_tol)]

    if len(ladder) < 2:
        verdict = INCONCLUSIVE
        reasons.append("a single rung gives no stability evidence")
    elif not (in_S and discrete):
        verdict = FAILS_1
        if not discrete:
            reasons.append(f"atoms carry {atom_mass:.4g} of total mass {total:.4g}")
        if not in_S:
            reasons.append("correlation estimates not stable along the ladder")
    else:
        gap_everywhere = [e for e in atoms if e.limsup_sq < e.mass - config.cond3_tol]
        unstable = [e for e in atoms if not e.stable]
        if gap_everywhere:
            verdict = FAILS_3
            reasons.append(
                f"|Gamma|^2 stays below the point mass along the whole ladder at {len(gap_everywhere)} atom(s)"
            )
        elif unstable or grid_unstable:
            persistent = [e for e in unstable if not _shrinking(np.asarray(e.amplitudes))]
            if persistent:
                verdict = FAILS_2
                reasons.append("amplitude oscillation does not shrink along the ladder")
            else:
                verdict = INCONCLUSIVE_2
                reasons.append("amplitude estimates still moving at the top rung")
        elif any(e.discrepancy > config.cond3_tol for e in atoms):
            verdict = FAILS_3
            reasons.append("point mass and |Gamma|^2 disagree at the top rung")
        else:
            verdict = CONSISTENT
    return ClassificationReport(
        verdict=verdict,
        reasons=reasons,
        ladder=ladder,
        halfwidth=H,
        appears_in_S=in_S,
        correlation_spread=float(spread),
        hermitian_defect=float(np.max(np.abs(raw - raw[tuple(slice(None, None, -1) for _ in H)].conj()))),
        total_mass=total,
        atom_mass=atom_mass,
        discrete=bool(discrete),
        wiener_value=wiener,
        atoms=atoms,
        grid_max_spread=float(np.max(grid_spread)) if grid_spread.size else 0.0,
        grid_unstable=grid_unstable,
    )
