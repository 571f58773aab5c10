"""Measures on the d-torus and finite-window spectral estimates.

Conventions used throughout:

* Fourier-Stieltjes coefficients are moments, ``mu_hat(m) = int z^m dmu``.
  With this convention a sequence ``a(k) = z0^k`` has correlation ``z0^m`` and
  spectral measure ``delta_{z0}``.
* A density part ``f`` is stored through its Fourier series coefficients
  ``f_hat(k) = int f(z) conj(z)^k dz`` so that ``f = sum f_hat(k) z^k``.
  Its moments are therefore ``f_hat(-m)``.
* Coefficient arrays on a box ``[-H, H]^d`` are centred: entry ``[m + H]``
  holds index ``m``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np
from scipy import optimize
from scipy.signal import windows

from . import _kernels
from .weights import (
    TORUS_TOL,
    CorrelationTable,
    DimensionError,
    IndexLike,
    TrigPolynomial,
    WeightSequence,
    _as_angles,
    _check_dims,
    _check_ladder,
    amplitude_estimate,
    as_index,
    box_volume,
    circular_distance,
    correlation_lags,
)


class InsufficientBox(ValueError):
    """Coefficients requested beyond the available box."""


# ---------------------------------------------------------------------------
# measures


@dataclass(frozen=True, eq=False)
class TorusMeasure:
    """Atoms plus an optional trigonometric-polynomial density w.r.t. Haar measure."""

    atom_angles: np.ndarray  # (r, d)
    atom_masses: np.ndarray  # (r,)
    density: Optional[np.ndarray] = None  # centred f_hat on [-h, h]^d
    d: int = field(default=None)
    tol: float = TORUS_TOL

    def __post_init__(self):
        ang = np.mod(np.asarray(self.atom_angles, dtype=float), 1.0)
        masses = np.asarray(self.atom_masses, dtype=float).ravel()
        d = self.d
        if ang.ndim == 1:
            ang = ang.reshape(-1, 1) if d in (None, 1) else ang.reshape(-1, d)
        if d is None:
            if ang.shape[0]:
                d = ang.shape[1]
            elif self.density is not None:
                d = np.asarray(self.density).ndim
            else:
                raise DimensionError("cannot infer dimension of an empty measure")
        if ang.shape[0] == 0:
            ang = np.zeros((0, d))
        if ang.shape[1] != d or ang.shape[0] != masses.shape[0]:
            raise ValueError("atom angles and masses disagree in shape")
        if np.any(masses <= 0):
            raise ValueError("atom masses must be strictly positive")
        for i, j in itertools.combinations(range(ang.shape[0]), 2):
            if np.all(circular_distance(ang[i], ang[j]) <= self.tol):
                raise ValueError("atoms coincide within tolerance")
        dens = None
        if self.density is not None:
            dens = np.asarray(self.density, dtype=complex)
            if dens.ndim != d or any(s % 2 == 0 for s in dens.shape):
                raise ValueError("density coefficients must be centred on an odd box of dimension d")
            flipped = dens[tuple(slice(None, None, -1) for _ in range(d))]
            scale = max(1.0, float(np.max(np.abs(dens))))
            if np.max(np.abs(dens - flipped.conj())) > 1e-9 * scale:
                raise ValueError("density must be real-valued (Hermitian coefficients)")
            dens.setflags(write=False)
        ang.setflags(write=False)
        masses.setflags(write=False)
        object.__setattr__(self, "atom_angles", ang)
        object.__setattr__(self, "atom_masses", masses)
        object.__setattr__(self, "density", dens)
        object.__setattr__(self, "d", int(d))

    # constructors ------------------------------------------------------------

    @classmethod
    def dirac(cls, z, mass: float = 1.0) -> "TorusMeasure":
        ang = np.atleast_2d(_as_angles(z))
        return cls(ang, [mass])

    @classmethod
    def atomic(cls, points, masses, d: Optional[int] = None) -> "TorusMeasure":
        pts = [_as_angles(p) for p in points]
        if not pts:
            return cls(np.zeros((0, d or 1)), [], d=d)
        return cls(np.array(pts), masses)

    @classmethod
    def haar(cls, d: int = 1, mass: float = 1.0) -> "TorusMeasure":
        dens = np.full((1,) * d, mass, dtype=complex)
        return cls(np.zeros((0, d)), [], dens, d=d)

    @classmethod
    def zero(cls, d: int = 1) -> "TorusMeasure":
        return cls(np.zeros((0, d)), [], d=d)

    @classmethod
    def from_trig_polynomial(cls, psi: TrigPolynomial) -> "TorusMeasure":
        """Limit spectral measure ``sum |c|^2 delta_z`` of a trigonometric polynomial."""
        ang, masses = psi.atoms()
        keep = masses > 0
        return cls(ang[keep], masses[keep], d=psi.d)

    # queries -----------------------------------------------------------------

    @property
    def density_halfwidth(self) -> tuple[int, ...]:
        if self.density is None:
            return (0,) * self.d
        return tuple((s - 1) // 2 for s in self.density.shape)

    def total_mass(self) -> float:
        dens = 0.0
        if self.density is not None:
            dens = float(self.density[tuple(h for h in self.density_halfwidth)].real)
        return float(np.sum(self.atom_masses)) + dens

    def density_at(self, angles) -> np.ndarray:
        """Density values at points of shape ``(p, d)``."""
        angles = np.atleast_2d(np.asarray(angles, dtype=float))
        if self.density is None:
            return np.zeros(angles.shape[0])
        H = self.density_halfwidth
        lags = np.array(list(np.ndindex(*self.density.shape))) - np.asarray(H)
        ph = np.exp(2j * np.pi * np.mod(angles @ lags.T, 1.0))
        return (ph @ self.density.ravel()).real

    def density_on_grid(self, L: Sequence[int]) -> np.ndarray:
        """Density sampled on the uniform grid ``theta_j = i / L_j`` via FFT."""
        L = as_index(L, self.d)
        if self.density is None:
            return np.zeros(L)
        H = self.density_halfwidth
        if any(l < 2 * h + 1 for l, h in zip(L, H)):
            raise InsufficientBox("grid too coarse for the density degree")
        buf = np.zeros(L, dtype=complex)
        for idx in np.ndindex(*self.density.shape):
            pos = tuple((i - h) % l for i, h, l in zip(idx, H, L))
            buf[pos] += self.density[idx]
        return (np.fft.ifftn(buf) * np.prod(L)).real

    def with_atoms(self, angles, masses) -> "TorusMeasure":
        return TorusMeasure(angles, masses, self.density, d=self.d, tol=self.tol)

    def to_dict(self) -> dict:
        out = {
            "atoms": [
                {"angles": [float(v) for v in a], "mass": float(m)}
                for a, m in zip(self.atom_angles, self.atom_masses)
            ]
        }
        if self.density is not None:
            out["density_fourier"] = {
                "box": list(self.density_halfwidth),
                "coeffs": [[float(c.real), float(c.imag)] for c in self.density.ravel()],
            }
        return out

    @classmethod
    def from_dict(cls, data: dict, d: Optional[int] = None) -> "TorusMeasure":
        atoms = data.get("atoms", [])
        dens = None
        if "density_fourier" in data:
            box = [int(v) for v in data["density_fourier"]["box"]]
            raw = np.array(data["density_fourier"]["coeffs"], dtype=float)
            dens = (raw[:, 0] + 1j * raw[:, 1]).reshape(tuple(2 * h + 1 for h in box))
            d = len(box)
        if atoms:
            ang = np.array([a["angles"] for a in atoms], dtype=float)
            d = ang.shape[1]
        else:
            ang = np.zeros((0, d or 1))
        return cls(ang, [a["mass"] for a in atoms], dens, d=d)


def _phase(x) -> np.ndarray:
    # centred reduction keeps e(-x) the exact conjugate of e(x)
    x = np.asarray(x, dtype=float)
    return np.exp(2j * np.pi * (x - np.round(x)))


def fourier_stieltjes(mu: TorusMeasure, m: IndexLike) -> complex:
    """``int z^m dmu``: atoms contribute ``mass * z^m``, the density ``f_hat(-m)``."""
    m = as_index(m, mu.d)
    ph = _phase(mu.atom_angles @ np.asarray(m, dtype=float))
    out = complex(np.sum(mu.atom_masses * ph))
    if mu.density is not None:
        H = mu.density_halfwidth
        idx = tuple(-v + h for v, h in zip(m, H))
        if all(0 <= i <= 2 * h for i, h in zip(idx, H)):
            out += complex(mu.density[idx])
    return out


def measure_coefficients(mu: TorusMeasure, halfwidth: IndexLike) -> np.ndarray:
    """Centred array of ``fourier_stieltjes(mu, m)`` for ``m`` in ``[-H, H]^d``."""
    H = as_index(halfwidth, mu.d)
    axes = [np.arange(-h, h + 1) for h in H]
    out = np.zeros(tuple(len(a) for a in axes), dtype=complex)
    for ang, mass in zip(mu.atom_angles, mu.atom_masses):
        term = np.array(mass, dtype=complex)
        for j, a in enumerate(axes):
            term = np.multiply.outer(term, _phase(ang[j] * a))
        out += term
    if mu.density is not None:
        Hd = mu.density_halfwidth
        # moments are the reversed density coefficients
        rev = mu.density[tuple(slice(None, None, -1) for _ in range(mu.d))]
        src, dst = [], []
        for h, hd in zip(H, Hd):
            w = min(h, hd)
            src.append(slice(hd - w, hd + w + 1))
            dst.append(slice(h - w, h + w + 1))
        out[tuple(dst)] += rev[tuple(src)]
    return out


# ---------------------------------------------------------------------------
# empirical spectral densities


@dataclass(frozen=True, eq=False)
class EmpiricalDensity:
    """The measure with density ``|sum_{k<=n} a(k) conj(z)^k|^2 / |n+1|``.

    ``fourier`` is the centred array of moments on ``[-n, n]^d``.
    """

    n: tuple[int, ...]
    fourier: np.ndarray
    window: np.ndarray = field(repr=False)

    @property
    def d(self) -> int:
        return len(self.n)

    @property
    def mass(self) -> float:
        return float(self.fourier[tuple(self.n)].real)

    def coefficient(self, m: IndexLike) -> complex:
        m = as_index(m, self.d)
        if any(abs(v) > h for v, h in zip(m, self.n)):
            return 0j
        return complex(self.fourier[tuple(v + h for v, h in zip(m, self.n))])

    def evaluate(self, angles) -> np.ndarray:
        """Density values at points of shape ``(p, d)`` straight from the window sum."""
        angles = np.atleast_2d(np.asarray(angles, dtype=float))
        out = np.empty(angles.shape[0])
        vol = box_volume(self.n)
        for i, th in enumerate(angles):
            out[i] = abs(_kernels.twisted_sum(self.window, th)) ** 2 / vol
        return out

    def as_measure(self) -> TorusMeasure:
        rev = self.fourier[tuple(slice(None, None, -1) for _ in range(self.d))]
        return TorusMeasure(np.zeros((0, self.d)), [], rev, d=self.d)


def empirical_density(a: WeightSequence, n: IndexLike, method: str = "fft") -> EmpiricalDensity:
    """Empirical spectral measure of ``a`` truncated at ``n``.

    Moments are ``(1/|n+1|) sum conj(a(k)) a(k+m)`` over ``k, k+m`` in ``[0, n]``;
    ``method="direct"`` evaluates the lattice double loop instead of the FFT.
    """
    n = as_index(n, a.d)
    if any(v < 0 for v in n):
        raise ValueError("n must be non-negative")
    if any(v > b for v, b in zip(n, a.hi)):
        raise InsufficientBox(f"truncation {n} exceeds the stored box {a.hi}")
    w = a.window((0,) * a.d, n)
    if method == "fft":
        shape = tuple(2 * s - 1 for s in w.shape)
        F = np.fft.fftn(w, shape, axes=tuple(range(w.ndim)))
        ac = np.fft.ifftn(np.abs(F) ** 2)
        # ac[l] = sum_k w[k+l] conj(w[k]); lag -l sits at index shape - l
        ac = np.fft.fftshift(ac)
    elif method == "direct":
        ac = _kernels.autocorr_direct(w, n)
    else:
        raise ValueError(f"unknown method {method!r}")
    return EmpiricalDensity(n, ac / box_volume(n), w)


# ---------------------------------------------------------------------------
# point masses and Wiener's criterion


class PointMass(NamedTuple):
    mass: float
    imag: float


def _centred_block(coeffs: np.ndarray, h: Sequence[int]) -> np.ndarray:
    coeffs = np.asarray(coeffs)
    H = [(s - 1) // 2 for s in coeffs.shape]
    if any(s % 2 == 0 for s in coeffs.shape):
        raise ValueError("coefficient array must be centred on an odd box")
    if any(v > Hj for v, Hj in zip(h, H)):
        raise InsufficientBox(f"need coefficients on [-{list(h)}, {list(h)}], have halfwidth {H}")
    return coeffs[tuple(slice(Hj - v, Hj + v + 1) for v, Hj in zip(h, H))]


def hermitian_completion(coeffs) -> np.ndarray:
    """Overwrite the lexicographically negative half of a centred array with ``conj(c(-m))``.

    Truncated correlations of sequences supported on N^d lose ``|m_j|/(n_j+1)``
    of their terms at negative lags; mirroring the non-negative half removes
    that bias in d=1 and for the lexicographic half-space in general.
    """
    c = np.array(coeffs, dtype=complex)
    H = [(s - 1) // 2 for s in c.shape]
    lags = np.indices(c.shape).reshape(c.ndim, -1).T - np.asarray(H)
    neg = np.zeros(len(lags), dtype=bool)
    decided = np.zeros(len(lags), dtype=bool)
    for j in range(c.ndim):
        neg |= ~decided & (lags[:, j] < 0)
        decided |= lags[:, j] != 0
    flipped = c[tuple(slice(None, None, -1) for _ in range(c.ndim))].conj()
    flat = c.reshape(-1)
    flat[neg] = flipped.reshape(-1)[neg]
    return flat.reshape(c.shape)


def debias_lags(coeffs, n: IndexLike) -> np.ndarray:
    """Rescale truncated correlations of a sequence supported on N^d.

    At lag ``m`` only ``prod(n_j + 1 - max(0, -m_j))`` of the ``|n+1|`` terms
    can be non-zero; dividing by that fraction removes the bias, and the
    Hermitian completion then makes the array exactly conjugate-symmetric.
    """
    c = np.array(coeffs, dtype=complex)
    n = as_index(n, c.ndim)
    for j, nj in enumerate(n):
        H = (c.shape[j] - 1) // 2
        m = np.arange(-H, H + 1)
        keep = nj + 1 - np.maximum(0, -m)
        frac = np.where(keep > 0, keep / (nj + 1), 1.0)
        shape = [1] * c.ndim
        shape[j] = -1
        c = c / frac.reshape(shape)
    return hermitian_completion(c)


def spectral_lags(a: WeightSequence, n: IndexLike, halfwidth: IndexLike) -> np.ndarray:
    """Centred moment estimates of ``sigma_a`` on ``[-halfwidth, halfwidth]`` at truncation ``n``."""
    n = as_index(n, a.d)
    return debias_lags(correlation_lags(a, n, halfwidth), n)


def coefficients_of(source, halfwidth: Optional[IndexLike] = None) -> np.ndarray:
    """Centred moment array from a table, density, measure or raw array."""
    if isinstance(source, CorrelationTable):
        return source.entries
    if isinstance(source, EmpiricalDensity):
        return source.fourier
    if isinstance(source, TorusMeasure):
        if halfwidth is None:
            raise ValueError("halfwidth required to expand a TorusMeasure")
        return measure_coefficients(source, halfwidth)
    return np.asarray(source, dtype=complex)


def point_mass(coeffs, z, n: IndexLike) -> PointMass:
    """``(1/prod(2n_j+1)) sum_{k=-n}^{n} conj(z)^k mu_hat(k)``.

    Converges to ``mu({z})``.  The imaginary part is returned as a diagnostic
    (it vanishes in the limit for positive measures).
    """
    ang = np.asarray(_as_angles(z))
    n = as_index(n, len(ang))
    block = _centred_block(coefficients_of(coeffs, n), n)
    if block.ndim != len(ang):
        raise DimensionError("coefficient array dimension differs from the point")
    t = block
    for j in range(len(ang)):
        k = np.arange(-n[j], n[j] + 1)
        t = np.tensordot(t, np.exp(-2j * np.pi * np.mod(ang[j] * k, 1.0)), axes=([0], [0]))
    val = complex(t) / math.prod(2 * v + 1 for v in n)
    return PointMass(val.real, val.imag)


def point_mass_grid(coeffs, n: IndexLike, grid: IndexLike) -> np.ndarray:
    """Dirichlet point-mass average at every point ``i / L`` of a uniform grid (FFT)."""
    coeffs = coefficients_of(coeffs)
    d = coeffs.ndim
    n = as_index(n, d)
    L = as_index(grid, d)
    block = _centred_block(coeffs, n)
    buf = np.zeros(L, dtype=complex)
    for idx in np.ndindex(*block.shape):
        pos = tuple((i - v) % l for i, v, l in zip(idx, n, L))
        buf[pos] += block[idx]
    return np.fft.fftn(buf).real / math.prod(2 * v + 1 for v in n)


def wiener_continuity(coeffs, h: IndexLike) -> float:
    """``(1/prod(2h_j+1)) sum_{|l|<=h} |mu_hat(l)|^2``.

    Normalised by the number of lags, so a point mass gives exactly 1 and the
    value tends to ``sum_z mu({z})^2``.
    """
    coeffs = coefficients_of(coeffs, h)
    h = as_index(h, coeffs.ndim)
    block = _centred_block(coeffs, h)
    return math.fsum((np.abs(block) ** 2).ravel().tolist()) / math.prod(2 * v + 1 for v in h)


@dataclass
class WienerReport:
    ladder: list
    values: list
    tolerance: float
    normalization: str = "1/prod(2h+1)"

    @property
    def empirically_continuous(self) -> bool:
        return self.values[-1] < self.tolerance

    def to_dict(self) -> dict:
        return {
            "ladder": [list(h) for h in self.ladder],
            "values": list(self.values),
            "tolerance": self.tolerance,
            "normalization": self.normalization,
            "empirically_continuous": self.empirically_continuous,
        }


def wiener_ladder(coeffs, ladder: Sequence[IndexLike], tolerance: float = 0.01) -> WienerReport:
    coeffs = coefficients_of(coeffs)
    ladder = _check_ladder(ladder, coeffs.ndim)
    return WienerReport(ladder, [wiener_continuity(coeffs, h) for h in ladder], tolerance)


# ---------------------------------------------------------------------------
# atom extraction


def _blackman_spectrum(coeffs: np.ndarray, H: Sequence[int], L: Sequence[int]) -> np.ndarray:
    """Blackman-tapered lag sum on a uniform grid; an atom of mass c peaks near c."""
    block = _centred_block(coeffs, H)
    taper = np.array(1.0)
    for h in H:
        w = windows.blackman(2 * h + 3)[1:-1] if h > 0 else np.ones(1)
        taper = np.multiply.outer(taper, w / w.sum())
    return point_mass_grid(block * taper * math.prod(2 * v + 1 for v in H), H, L)


def _local_maxima(P: np.ndarray, threshold: float) -> list[tuple[int, ...]]:
    mask = P > threshold
    for ax in range(P.ndim):
        mask &= P >= np.roll(P, 1, axis=ax)
        mask &= P >= np.roll(P, -1, axis=ax)
    idx = [tuple(int(i) for i in v) for v in np.argwhere(mask)]
    return sorted(idx, key=lambda i: -P[i])


def detect_atoms(
    coeffs,
    halfwidth: IndexLike,
    candidates: Optional[np.ndarray] = None,
    threshold: float = 0.01,
    oversample: int = 4,
    refine: bool = True,
) -> TorusMeasure:
    """Estimate the atomic part of a measure from its moments on ``[-H, H]^d``.

    Peaks of a tapered spectrum above ``threshold`` (relative to the total
    mass) are refined locally; ``candidates`` are always measured.  Masses are
    the Dirichlet point-mass averages at the located points; atoms below
    ``threshold * total`` are discarded.
    """
    coeffs = coefficients_of(coeffs)
    d = coeffs.ndim
    H = as_index(halfwidth, d)
    block = _centred_block(coeffs, H)
    total = float(block[tuple(H)].real)
    if total <= 0:
        return TorusMeasure.zero(d)
    abs_thr = threshold * total
    L = tuple(max(16, oversample * (2 * h + 1)) for h in H)
    power = _blackman_spectrum(block, H, L)
    found = []
    sep = np.array([3.0 / (2 * h + 1) for h in H])
    for idx in _local_maxima(power, abs_thr):
        ang = np.array([i / l for i, l in zip(idx, L)])
        if any(np.all(circular_distance(ang, f) < sep) for f in found):
            continue
        if refine:
            ang = _refine_peak(block, H, ang, 1.0 / np.asarray(L))
        found.append(np.mod(ang, 1.0))
    pts, masses = [], []
    for ang in found:
        pm = point_mass(block, ang, H).mass
        if pm > abs_thr:
            pts.append(ang)
            masses.append(pm)
    if candidates is not None:
        # candidates are measured against what the detected atoms leave over,
        # so their sidelobes do not register as extra atoms
        resid = block - measure_coefficients(TorusMeasure(np.array(pts), masses), H) if pts else block
        for c in np.atleast_2d(np.asarray(candidates, dtype=float)):
            if c.shape[0] != d:
                raise DimensionError("candidate dimension differs")
            if any(np.all(circular_distance(c, f) < sep) for f in found):
                continue
            pm = point_mass(resid, c, H).mass
            if pm > abs_thr:
                pts.append(np.mod(c, 1.0))
                masses.append(point_mass(block, c, H).mass)
    if not pts:
        return TorusMeasure.zero(d)
    return TorusMeasure(np.array(pts), masses)


def _refine_peak(block, H, ang, step):
    def neg(th):
        return -point_mass(block, th, H).mass

    if len(H) == 1:
        res = optimize.minimize_scalar(
            lambda t: neg([t]), bounds=(ang[0] - step[0], ang[0] + step[0]), method="bounded",
            options={"xatol": 1e-12},
        )
        return np.array([res.x])
    res = optimize.minimize(neg, ang, method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-14})
    return np.asarray(res.x)


# ---------------------------------------------------------------------------
# affinity


def _match_atoms(P: TorusMeasure, Q: TorusMeasure, tol: float):
    pairs = []
    used = set()
    for i, a in enumerate(P.atom_angles):
        for j, b in enumerate(Q.atom_angles):
            if j not in used and np.all(circular_distance(a, b) <= tol):
                pairs.append((i, j))
                used.add(j)
                break
    return pairs


def affinity(
    P: TorusMeasure,
    Q: TorusMeasure,
    tol: float = TORUS_TOL,
    rtol: float = 1e-6,
    max_level: int = 12,
) -> float:
    """Hellinger affinity ``int sqrt(dP/dnu) sqrt(dQ/dnu) dnu``.

    Atomic parts pair up on matched atoms; atoms never meet a density; two
    densities are integrated on a uniform periodic grid refined dyadically
    until the relative change is below ``rtol`` (negative density values are
    clipped to zero).
    """
    _check_dims(P, Q)
    atomic = math.fsum(
        math.sqrt(P.atom_masses[i] * Q.atom_masses[j]) for i, j in _match_atoms(P, Q, tol)
    )
    if P.density is None or Q.density is None:
        return atomic
    H = np.maximum(P.density_halfwidth, Q.density_halfwidth)
    base = [int(2 ** math.ceil(math.log2(2 * h + 2))) for h in H]
    prev = None
    cont = 0.0
    for level in range(max_level):
        L = [b * 2 ** level for b in base]
        if math.prod(L) > 2 ** 24:
            break
        f = np.clip(P.density_on_grid(L), 0, None)
        g = np.clip(Q.density_on_grid(L), 0, None)
        cont = float(np.mean(np.sqrt(f * g)))
        if prev is not None and abs(cont - prev) <= rtol * max(abs(cont), 1e-300):
            break
        prev = cont
    return atomic + cont


@dataclass
class AffinityReport:
    n: tuple
    value: float
    affinity: Optional[float]
    tolerance: float

    @property
    def violation(self) -> bool:
        return self.affinity is not None and self.value > self.affinity + self.tolerance

    def to_dict(self) -> dict:
        return {
            "n": list(self.n),
            "value": self.value,
            "affinity": self.affinity,
            "tolerance": self.tolerance,
            "violation": self.violation,
        }


def affinity_sequences(
    a: WeightSequence,
    b: WeightSequence,
    n: IndexLike,
    sigma_a: Optional[TorusMeasure] = None,
    sigma_b: Optional[TorusMeasure] = None,
    tolerance: float = 0.02,
    atom_tol: float = TORUS_TOL,
) -> AffinityReport:
    """``(1/|n+1|) |sum_{k<=n} a(k) conj(b(k))|`` against the spectral affinity."""
    d = _check_dims(a, b)
    n = as_index(n, d)
    wa = a.window((0,) * d, n)
    wb = b.window((0,) * d, n)
    value = abs(_kernels.neumaier_sum((wa * wb.conj()).ravel())) / box_volume(n)
    aff = None
    if sigma_a is not None and sigma_b is not None:
        aff = affinity(sigma_a, sigma_b, tol=atom_tol)
    return AffinityReport(n, float(value), aff, tolerance)


@dataclass
class PointBoundReport:
    z: tuple
    ladder: list
    amplitudes: list
    bounds: list
    tolerance: float

    @property
    def violation(self) -> bool:
        return self.amplitudes[-1] > self.bounds[-1] + self.tolerance

    def to_dict(self) -> dict:
        return {
            "z": list(self.z),
            "ladder": [list(n) for n in self.ladder],
            "amplitude_abs": list(self.amplitudes),
            "sqrt_point_mass": list(self.bounds),
            "tolerance": self.tolerance,
            "violation": self.violation,
        }


def ww_pointbound(
    a: WeightSequence,
    z,
    ladder: Sequence[IndexLike],
    halfwidth: Optional[IndexLike] = None,
    tolerance: float = 0.02,
) -> PointBoundReport:
    """Ladder of ``|amplitude(a, z, n)|`` next to ``sqrt(point mass of sigma_a at z)``.

    The point mass at rung ``n`` is the Dirichlet average of the correlation
    estimates at ``n`` over lags ``[-H, H]^d`` (default ``H = n // 4``).
    """
    ang = _as_angles(z)
    ladder = _check_ladder(ladder, a.d)
    amps, bounds = [], []
    for n in ladder:
        H = as_index(halfwidth, a.d) if halfwidth is not None else tuple(max(v // 4, 1) for v in n)
        amps.append(abs(amplitude_estimate(a, ang, n)))
        pm = point_mass(spectral_lags(a, n, H), ang, H).mass
        bounds.append(math.sqrt(max(pm, 0.0)))
    return PointBoundReport(ang, ladder, amps, bounds, tolerance)


# ---------------------------------------------------------------------------
# weak convergence against trigonometric test functions


@dataclass(frozen=True, eq=False)
class TorusPolynomial:
    """Test function ``f(z) = sum_j c_j z^{m_j}`` with integer exponents."""

    exponents: np.ndarray  # (r, d) int
    coefficients: np.ndarray  # (r,)

    def __post_init__(self):
        e = np.atleast_2d(np.asarray(self.exponents, dtype=np.int64))
        c = np.asarray(self.coefficients, dtype=complex).ravel()
        if e.shape[0] != c.shape[0]:
            raise ValueError("one coefficient per exponent required")
        object.__setattr__(self, "exponents", e)
        object.__setattr__(self, "coefficients", c)

    @classmethod
    def monomial(cls, m: IndexLike, c: complex = 1.0) -> "TorusPolynomial":
        return cls([as_index(m)], [c])

    @property
    def d(self) -> int:
        return self.exponents.shape[1]

    @property
    def degree(self) -> tuple[int, ...]:
        if self.exponents.shape[0] == 0:
            return (0,) * self.d
        return tuple(int(v) for v in np.max(np.abs(self.exponents), axis=0))

    def __call__(self, angles) -> np.ndarray:
        angles = np.atleast_2d(np.asarray(angles, dtype=float))
        return np.exp(2j * np.pi * (angles @ self.exponents.T)) @ self.coefficients


def integrate(f: TorusPolynomial, mu) -> complex:
    """``int f dmu`` for a :class:`TorusMeasure` or :class:`EmpiricalDensity`."""
    total = 0j
    for m, c in zip(f.exponents, f.coefficients):
        if isinstance(mu, EmpiricalDensity):
            total += c * mu.coefficient(m)
        else:
            total += c * fourier_stieltjes(mu, m)
    return total


@dataclass
class WeakConvergenceReport:
    ladder: list
    pairings: list  # per test function: list over rungs
    targets: list
    tolerance: Optional[float] = None

    @property
    def discrepancies(self) -> list:
        return [abs(p[-1] - t) for p, t in zip(self.pairings, self.targets)]

    @property
    def max_discrepancy(self) -> float:
        return max(self.discrepancies, default=0.0)

    def to_dict(self) -> dict:
        return {
            "ladder": [list(n) for n in self.ladder],
            "pairings": [[[v.real, v.imag] for v in p] for p in self.pairings],
            "targets": [[t.real, t.imag] for t in self.targets],
            "max_discrepancy": self.max_discrepancy,
        }


def weak_convergence_check(
    a: WeightSequence,
    target: TorusMeasure,
    testfns: Sequence[TorusPolynomial],
    ladder: Sequence[IndexLike],
) -> WeakConvergenceReport:
    """Pair each test function with the empirical measures along ``ladder``."""
    _check_dims(a, target)
    ladder = _check_ladder(ladder, a.d)
    for f in testfns:
        if f.d != a.d:
            raise DimensionError("test function dimension differs")
        if any(g > v for g, v in zip(f.degree, ladder[0])):
            raise InsufficientBox(f"test function degree {f.degree} exceeds the first rung {ladder[0]}")
    dens = [empirical_density(a, n) for n in ladder]
    pairings = [[integrate(f, q) for q in dens] for f in testfns]
    targets = [integrate(f, target) for f in testfns]
    return WeakConvergenceReport(ladder, pairings, targets)


def estimate_spectral_measure(
    a: WeightSequence,
    n: IndexLike,
    halfwidth: IndexLike,
    threshold: float = 0.01,
    candidates: Optional[np.ndarray] = None,
) -> TorusMeasure:
    """Atomic part of ``sigma_a`` from the truncated correlations at ``n``."""
    coeffs = spectral_lags(a, n, halfwidth)
    return detect_atoms(coeffs, halfwidth, candidates=candidates, threshold=threshold)
