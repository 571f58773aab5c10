"""Weight sequences on the integer lattice and their finite-window statistics.

A :class:`WeightSequence` is a complex table on a rectangular box of Z^d and is
identically zero outside that box.  Sequences "on N^d" simply have their box
origin at 0, so negative indices read as zero.  All averages use the
``1/|n+1| = 1/prod(n_j + 1)`` normalisation regardless of how many lattice
points the sum actually covers.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
from scipy import signal

from . import _kernels

TORUS_TOL = 1e-9

IndexLike = Union[int, Sequence[int], np.ndarray]


class DimensionError(ValueError):
    """Raised when lattice objects of different dimension are combined."""


def as_index(k: IndexLike, d: Optional[int] = None) -> tuple[int, ...]:
    """Normalise an int or sequence to a tuple of ints, optionally checking ``d``."""
    if np.isscalar(k):
        out = (int(k),) if d is None else (int(k),) * d
    else:
        out = tuple(int(v) for v in np.asarray(k).ravel())
    if not out:
        raise DimensionError("multi-index must have at least one component")
    if d is not None and len(out) != d:
        raise DimensionError(f"expected a {d}-dimensional index, got {out}")
    return out


def box_volume(n: Sequence[int]) -> int:
    """``|n+1|``: the number of points of the box [0, n]."""
    return int(np.prod([v + 1 for v in n]))


def circular_distance(a, b):
    """Distance between angles on R/Z, componentwise."""
    # |a - b| rather than a - b keeps the result exactly symmetric
    diff = np.mod(np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)), 1.0)
    return np.minimum(diff, 1.0 - diff)


# ---------------------------------------------------------------------------
# torus points and trigonometric polynomials


@dataclass(frozen=True)
class TorusPoint:
    """A point ``(e^{2 pi i theta_1}, ..., e^{2 pi i theta_d})`` of T^d.

    Angles are stored reduced to [0, 1).  Equality with another point needs an
    explicit tolerance, see :meth:`isclose`.
    """

    angles: tuple[float, ...]

    def __post_init__(self):
        ang = np.mod(np.atleast_1d(np.asarray(self.angles, dtype=float)), 1.0)
        # mod can return exactly 1.0 for tiny negative inputs
        ang[ang >= 1.0] = 0.0
        object.__setattr__(self, "angles", tuple(float(v) for v in ang))

    @classmethod
    def from_complex(cls, z) -> "TorusPoint":
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        return cls(tuple(np.angle(z) / (2 * np.pi)))

    @classmethod
    def one(cls, d: int) -> "TorusPoint":
        return cls((0.0,) * d)

    @property
    def d(self) -> int:
        return len(self.angles)

    @property
    def value(self) -> np.ndarray:
        return np.exp(2j * np.pi * np.asarray(self.angles))

    def power(self, k: IndexLike) -> complex:
        """``z^k = prod_j z_j^{k_j}`` for a signed multi-index."""
        k = np.asarray(as_index(k, self.d), dtype=float)
        return complex(np.exp(2j * np.pi * np.mod(np.dot(self.angles, k), 1.0)))

    def conj(self) -> "TorusPoint":
        return TorusPoint(tuple(-v for v in self.angles))

    def isclose(self, other: "TorusPoint", tol: float = TORUS_TOL) -> bool:
        if other.d != self.d:
            raise DimensionError("torus points of different dimension")
        return bool(np.all(circular_distance(self.angles, other.angles) <= tol))


def _as_angles(z) -> tuple[float, ...]:
    if isinstance(z, TorusPoint):
        return z.angles
    return TorusPoint(tuple(np.atleast_1d(np.asarray(z, dtype=float)))).angles


@dataclass(frozen=True, eq=False)
class TrigPolynomial:
    """``P(k) = sum_alpha c_alpha z_alpha^k`` with finitely many distinct frequencies."""

    frequencies: np.ndarray  # (r, d) angles in [0, 1)
    coefficients: np.ndarray  # (r,) complex
    tol: float = TORUS_TOL

    def __post_init__(self):
        freqs = np.mod(np.asarray(self.frequencies, dtype=float), 1.0)
        if freqs.ndim == 1:
            freqs = freqs[:, None]
        coeffs = np.asarray(self.coefficients, dtype=complex).ravel()
        if freqs.shape[0] != coeffs.shape[0]:
            raise ValueError("one coefficient per frequency required")
        if freqs.shape[1] < 1:
            raise DimensionError("dimension must be >= 1")
        for i, j in itertools.combinations(range(freqs.shape[0]), 2):
            if np.all(circular_distance(freqs[i], freqs[j]) <= self.tol):
                raise ValueError(f"frequencies {i} and {j} coincide within tolerance")
        freqs.setflags(write=False)
        coeffs.setflags(write=False)
        object.__setattr__(self, "frequencies", freqs)
        object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def from_terms(cls, terms, d: Optional[int] = None) -> "TrigPolynomial":
        """Build from ``[(angles or TorusPoint, coefficient), ...]``."""
        terms = list(terms)
        if not terms:
            if d is None:
                raise DimensionError("empty polynomial needs an explicit dimension")
            return cls(np.zeros((0, d)), np.zeros(0, dtype=complex))
        freqs = np.array([_as_angles(z) for z, _ in terms], dtype=float)
        return cls(freqs, np.array([c for _, c in terms], dtype=complex))

    @classmethod
    def zero(cls, d: int) -> "TrigPolynomial":
        return cls.from_terms([], d=d)

    @property
    def d(self) -> int:
        return self.frequencies.shape[1]

    def __len__(self) -> int:
        return self.coefficients.shape[0]

    def terms(self):
        return [(TorusPoint(tuple(f)), complex(c)) for f, c in zip(self.frequencies, self.coefficients)]

    def __call__(self, k) -> np.ndarray:
        """Evaluate at integer points ``k`` of shape ``(..., d)``."""
        k = np.asarray(k, dtype=float)
        if k.shape[-1] != self.d:
            raise DimensionError("index dimension mismatch")
        ph = np.mod(k @ self.frequencies.T, 1.0)
        return np.exp(2j * np.pi * ph) @ self.coefficients

    def on_box(self, lo: Sequence[int], hi: Sequence[int]) -> np.ndarray:
        """Dense values on the box ``[lo, hi]`` via per-axis outer products."""
        shape = tuple(h - l + 1 for l, h in zip(lo, hi))
        out = np.zeros(shape, dtype=complex)
        for f, c in zip(self.frequencies, self.coefficients):
            term = np.array(c, dtype=complex)
            for ax in range(self.d):
                k = np.arange(lo[ax], hi[ax] + 1)
                term = np.multiply.outer(term, np.exp(2j * np.pi * np.mod(f[ax] * k, 1.0)))
            out += term
        return out

    def correlation(self, m: IndexLike) -> complex:
        """Limit correlation ``sum |c_alpha|^2 z_alpha^m``."""
        m = np.asarray(as_index(m, self.d), dtype=float)
        ph = np.exp(2j * np.pi * np.mod(self.frequencies @ m, 1.0))
        return complex(np.sum(np.abs(self.coefficients) ** 2 * ph))

    def amplitude(self, z, tol: float = TORUS_TOL) -> complex:
        """Limit amplitude: the coefficient at ``z`` (0 if ``z`` is not a frequency)."""
        ang = np.asarray(_as_angles(z))
        for f, c in zip(self.frequencies, self.coefficients):
            if np.all(circular_distance(f, ang) <= tol):
                return complex(c)
        return 0j

    def atoms(self) -> tuple[np.ndarray, np.ndarray]:
        """Atoms and masses of the limit spectral measure ``sum |c|^2 delta_z``."""
        return self.frequencies.copy(), np.abs(self.coefficients) ** 2

    def scaled(self, factor: complex) -> "TrigPolynomial":
        return TrigPolynomial(self.frequencies, self.coefficients * factor, self.tol)


# ---------------------------------------------------------------------------
# generators


@dataclass(frozen=True)
class Example59:
    """``a(k) = (-1)^floor(log(k_1 + ... + k_d + 1))`` on N^d, zero elsewhere.

    ``base`` selects the logarithm; natural log by default.
    """

    d: int = 1
    base: float = math.e

    def __post_init__(self):
        if self.d < 1:
            raise DimensionError("dimension must be >= 1")
        if self.base <= 1:
            raise ValueError("logarithm base must exceed 1")

    def __call__(self, k) -> np.ndarray:
        k = np.asarray(k)
        if k.shape[-1] != self.d:
            raise DimensionError("index dimension mismatch")
        s = k.sum(axis=-1)
        band = _log_band(np.maximum(s, 0) + 1, self.base)
        out = np.where(band % 2 == 0, 1.0, -1.0)
        return np.where(np.all(k >= 0, axis=-1), out, 0.0).astype(complex)

    def on_box(self, lo: Sequence[int], hi: Sequence[int]) -> np.ndarray:
        axes = [np.arange(l, h + 1) for l, h in zip(lo, hi)]
        s = np.zeros(tuple(len(a) for a in axes), dtype=np.int64)
        mask = np.ones(s.shape, dtype=bool)
        for i, a in enumerate(axes):
            shape = [1] * self.d
            shape[i] = len(a)
            s = s + a.reshape(shape)
            mask = mask & (a.reshape(shape) >= 0)
        band = _log_band(np.maximum(s, 0) + 1, self.base)
        out = np.where(band % 2 == 0, 1.0, -1.0)
        return np.where(mask, out, 0.0).astype(complex)


def _log_band(x, base: float) -> np.ndarray:
    """floor(log_base(x)) for integers x >= 1, corrected for rounding at powers."""
    x = np.asarray(x, dtype=np.int64)
    j = np.floor(np.log(x.astype(float)) / math.log(base)).astype(np.int64)
    # guard floating error next to exact powers (only matters for integer bases)
    hi = np.power(float(base), (j + 1).astype(float))
    j = np.where(x >= np.round(hi) if float(base).is_integer() else x >= hi, j + 1, j)
    lo = np.power(float(base), j.astype(float))
    j = np.where(x < (np.round(lo) if float(base).is_integer() else lo), j - 1, j)
    return j


def example59(d: int = 1, base: float = math.e) -> Example59:
    """Generator for the sign sequence that alternates on logarithmic bands."""
    return Example59(d=d, base=base)


Generator = Union[TrigPolynomial, Example59]


# ---------------------------------------------------------------------------
# weight sequences


@dataclass(frozen=True, eq=False)
class WeightSequence:
    """Bounded complex function on Z^d stored on the box ``[origin, origin + shape - 1]``.

    Reads outside the stored box return exactly 0.  ``generator`` (if any)
    records where the values came from; it is not consulted outside the box.
    """

    values: np.ndarray
    origin: tuple[int, ...] = None
    generator: Optional[Generator] = field(default=None, compare=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=complex)
        if vals.ndim < 1:
            raise DimensionError("weight table must be at least 1-dimensional")
        if not np.all(np.isfinite(vals)):
            raise ValueError("weight values must be finite")
        origin = (0,) * vals.ndim if self.origin is None else as_index(self.origin, vals.ndim)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "origin", origin)

    # construction -----------------------------------------------------------

    @classmethod
    def from_generator(cls, gen: Generator, box: IndexLike, origin: IndexLike = 0) -> "WeightSequence":
        """Materialise ``gen`` on ``[origin, origin + box]`` (``box`` holds the N_j)."""
        d = gen.d
        box = as_index(box, d)
        lo = as_index(origin, d)
        if any(b < 0 for b in box):
            raise ValueError("box extents must be non-negative")
        hi = tuple(l + b for l, b in zip(lo, box))
        return cls(gen.on_box(lo, hi), lo, gen)

    @classmethod
    def constant(cls, c: complex, box: IndexLike, origin: IndexLike = 0, d: Optional[int] = None) -> "WeightSequence":
        box = as_index(box, d)
        return cls(np.full(tuple(b + 1 for b in box), c, dtype=complex), as_index(origin, len(box)))

    @classmethod
    def zeros(cls, box: IndexLike, d: Optional[int] = None) -> "WeightSequence":
        return cls.constant(0.0, box, d=d)

    # basic properties ----------------------------------------------------------

    @property
    def d(self) -> int:
        return self.values.ndim

    @property
    def box(self) -> tuple[int, ...]:
        """Per-axis extents N_j (values stored for N_j + 1 points)."""
        return tuple(s - 1 for s in self.values.shape)

    @property
    def lo(self) -> tuple[int, ...]:
        return self.origin

    @property
    def hi(self) -> tuple[int, ...]:
        return tuple(o + s - 1 for o, s in zip(self.origin, self.values.shape))

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0

    def __call__(self, k) -> np.ndarray:
        """Zero-extended evaluation at integer points of shape ``(..., d)``."""
        k = np.asarray(k, dtype=np.int64)
        if k.shape[-1] != self.d:
            raise DimensionError("index dimension mismatch")
        rel = k - np.asarray(self.origin)
        inside = np.all((rel >= 0) & (rel < np.asarray(self.values.shape)), axis=-1)
        out = np.zeros(k.shape[:-1], dtype=complex)
        if np.any(inside):
            idx = tuple(np.moveaxis(rel[inside], -1, 0))
            out[inside] = self.values[idx]
        return out

    def window(self, lo: Sequence[int], hi: Sequence[int]) -> np.ndarray:
        """Dense zero-extended copy of the values on the box ``[lo, hi]``."""
        lo = as_index(lo, self.d)
        hi = as_index(hi, self.d)
        shape = tuple(max(h - l + 1, 0) for l, h in zip(lo, hi))
        out = np.zeros(shape, dtype=complex)
        src, dst = [], []
        for ax in range(self.d):
            a = max(lo[ax], self.lo[ax])
            b = min(hi[ax], self.hi[ax])
            if b < a:
                return out
            src.append(slice(a - self.lo[ax], b - self.lo[ax] + 1))
            dst.append(slice(a - lo[ax], b - lo[ax] + 1))
        out[tuple(dst)] = self.values[tuple(src)]
        return out

    def scaled(self, c: complex) -> "WeightSequence":
        gen = self.generator.scaled(c) if isinstance(self.generator, TrigPolynomial) else None
        return WeightSequence(self.values * c, self.origin, gen)

    def materialized(self, lo: Sequence[int], hi: Sequence[int]) -> "WeightSequence":
        """Same function with the zeros on ``[lo, hi]`` stored explicitly."""
        lo = tuple(min(a, b) for a, b in zip(as_index(lo, self.d), self.lo))
        hi = tuple(max(a, b) for a, b in zip(as_index(hi, self.d), self.hi))
        return WeightSequence(self.window(lo, hi), lo, self.generator)


def _check_dims(*objs):
    ds = {o.d for o in objs}
    if len(ds) != 1:
        raise DimensionError(f"dimension mismatch: {sorted(ds)}")
    return ds.pop()


# ---------------------------------------------------------------------------
# correlations


def correlation_estimate(a: WeightSequence, m: IndexLike, n: IndexLike) -> complex:
    """``(1/|n+1|) sum_{k=-n}^{n} conj(a(k)) a(k+m)``.

    For sequences supported on N^d this is the sum over
    ``max(0, -m_j) <= k_j <= n_j``; values of ``a`` beyond ``n`` are read when
    ``m`` has positive components.
    """
    d = a.d
    m = as_index(m, d)
    n = as_index(n, d)
    if any(v < 0 for v in n):
        raise ValueError("truncation n must be componentwise >= 0")
    lo = [max(-nj, aj, aj - mj) for nj, aj, mj in zip(n, a.lo, m)]
    hi = [min(nj, bj, bj - mj) for nj, bj, mj in zip(n, a.hi, m)]
    if any(h < l for l, h in zip(lo, hi)):
        return 0j
    x = a.window(lo, hi)
    y = a.window([l + mj for l, mj in zip(lo, m)], [h + mj for h, mj in zip(hi, m)])
    return complex(_kernels.neumaier_sum((x.conj() * y).ravel())) / box_volume(n)


def correlation_lags(a: WeightSequence, n: IndexLike, halfwidth: IndexLike, method: str = "fft") -> np.ndarray:
    """All ``correlation_estimate(a, m, n)`` for ``m`` in ``[-M, M]^d``.

    Returned array is centred: entry ``[m + M]`` holds lag ``m``.  ``method`` is
    ``"fft"`` (default) or ``"direct"`` (lattice loop kernel).
    """
    d = a.d
    n = as_index(n, d)
    M = as_index(halfwidth, d)
    if any(v < 0 for v in n) or any(v < 0 for v in M):
        raise ValueError("n and halfwidth must be non-negative")
    xlo = [max(-nj, lj) for nj, lj in zip(n, a.lo)]
    xhi = [min(nj, hj) for nj, hj in zip(n, a.hi)]
    out_shape = tuple(2 * v + 1 for v in M)
    if any(h < l for l, h in zip(xlo, xhi)):
        return np.zeros(out_shape, dtype=complex)
    x = a.window(xlo, xhi)
    y = a.window([l - v for l, v in zip(xlo, M)], [h + v for h, v in zip(xhi, M)])
    if method == "fft":
        raw = signal.correlate(y, x, mode="valid", method="fft")
    elif method == "direct":
        raw = _direct_cross(x, y, M)
    else:
        raise ValueError(f"unknown method {method!r}")
    return raw / box_volume(n)


def _direct_cross(x, y, M):
    # out[l] = sum_k conj(x[k]) y[k + l + M], one compensated sum per lag
    if np.all(x == 0):
        return np.zeros(tuple(2 * v + 1 for v in M), dtype=complex)
    out = np.zeros(tuple(2 * v + 1 for v in M), dtype=complex)
    for idx in np.ndindex(*out.shape):
        sl = tuple(slice(i, i + s) for i, s in zip(idx, x.shape))
        out[idx] = _kernels.neumaier_sum((x.conj() * y[sl]).ravel())
    return out


def default_ladder(top: IndexLike, rungs: int = 5, ratio: float = 2.0, d: Optional[int] = None) -> list[tuple[int, ...]]:
    """Geometric ladder of truncation boxes ending at ``top``."""
    top = as_index(top, d)
    if rungs < 1:
        raise ValueError("need at least one rung")
    ladder = []
    for r in range(rungs - 1, -1, -1):
        ladder.append(tuple(max(int(round(t / ratio ** r)), 0) for t in top))
    out = []
    for b in ladder:
        if not out or all(x > y for x, y in zip(b, out[-1])):
            out.append(b)
    return out


def _check_ladder(ladder, d):
    if not ladder:
        raise ValueError("empty ladder")
    ladder = [as_index(n, d) for n in ladder]
    for a, b in zip(ladder, ladder[1:]):
        if not all(y > x for x, y in zip(a, b)):
            raise ValueError("ladder must be strictly increasing componentwise")
    return ladder


@dataclass(frozen=True, eq=False)
class CorrelationTable:
    """Correlation estimates on ``[-M, M]^d`` with their convergence ladder."""

    d: int
    halfwidth: tuple[int, ...]
    ladder: tuple[tuple[int, ...], ...]
    trace: np.ndarray  # (rungs, 2M+1, ...) estimates per rung
    tolerance: float

    @property
    def entries(self) -> np.ndarray:
        return self.trace[-1]

    @property
    def spread(self) -> np.ndarray:
        """Largest jump between successive rungs, per lag."""
        if self.trace.shape[0] < 2:
            return np.zeros(self.entries.shape)
        return np.max(np.abs(np.diff(self.trace, axis=0)), axis=0)

    @property
    def appears_in_S(self) -> bool:
        return bool(np.all(self.spread < self.tolerance))

    def at(self, m: IndexLike) -> complex:
        m = as_index(m, self.d)
        idx = tuple(v + M for v, M in zip(m, self.halfwidth))
        if any(i < 0 or i > 2 * M for i, M in zip(idx, self.halfwidth)):
            raise IndexError(f"lag {m} outside table halfwidth {self.halfwidth}")
        return complex(self.entries[idx])

    def hermitian_defect(self) -> float:
        e = self.entries
        flipped = e[tuple(slice(None, None, -1) for _ in range(self.d))]
        return float(np.max(np.abs(e - flipped.conj()))) if e.size else 0.0

    def rows(self):
        """``(m, estimate, spread)`` triples in row-major lag order."""
        spread = self.spread
        for idx in np.ndindex(*self.entries.shape):
            m = tuple(i - M for i, M in zip(idx, self.halfwidth))
            yield m, complex(self.entries[idx]), float(spread[idx])

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "halfwidth": list(self.halfwidth),
            "ladder": [list(n) for n in self.ladder],
            "tolerance": self.tolerance,
            "appears_in_S": self.appears_in_S,
            "entries": [
                {"m": list(m), "re": v.real, "im": v.imag, "ladder_spread": s}
                for m, v, s in self.rows()
            ],
        }


def correlation_table(
    a: WeightSequence,
    halfwidth: IndexLike,
    ladder: Sequence[IndexLike],
    tolerance: float = 0.05,
    method: str = "fft",
) -> CorrelationTable:
    """Correlation estimates at every rung of ``ladder`` for lags in ``[-M, M]^d``."""
    d = a.d
    ladder = _check_ladder(ladder, d)
    M = as_index(halfwidth, d)
    trace = np.stack([correlation_lags(a, n, M, method=method) for n in ladder])
    return CorrelationTable(d, M, tuple(ladder), trace, float(tolerance))


# ---------------------------------------------------------------------------
# Marcinkiewicz seminorms, semi-inner product, translation


def _two_sided(A: WeightSequence, n):
    n = as_index(n, A.d)
    if any(v < 0 for v in n):
        raise ValueError("truncation n must be componentwise >= 0")
    return n, A.window([-v for v in n], n)


def marcinkiewicz_seminorm(A: WeightSequence, p: float, n: IndexLike) -> float:
    """Truncated Marcinkiewicz p-seminorm ``((1/|n+1|) sum_{-n}^{n} |A|^p)^{1/p}``.

    ``p = inf`` gives the sup over the stored box.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    if math.isinf(p):
        return A.sup_norm()
    n, w = _two_sided(A, n)
    total = math.fsum((np.abs(w) ** p).ravel().tolist())
    return (total / box_volume(n)) ** (1.0 / p)


def semi_inner_product(A: WeightSequence, B: WeightSequence, n: IndexLike) -> complex:
    """``(1/|n+1|) sum_{k=-n}^{n} conj(A(k)) B(k)``."""
    _check_dims(A, B)
    n, wa = _two_sided(A, n)
    _, wb = _two_sided(B, n)
    return complex(_kernels.neumaier_sum((wa.conj() * wb).ravel())) / box_volume(n)


def translate(A: WeightSequence, m: IndexLike) -> WeightSequence:
    """The sequence ``k -> A(k + m)``; zero extension is preserved exactly."""
    m = as_index(m, A.d)
    return WeightSequence(A.values, tuple(o - v for o, v in zip(A.origin, m)), None)


# ---------------------------------------------------------------------------
# amplitudes


def amplitude_estimate(a: WeightSequence, z, n: IndexLike) -> complex:
    """``(1/|n+1|) sum_{k=0}^{n} a(k) conj(z)^k``."""
    ang = _as_angles(z)
    if len(ang) != a.d:
        raise DimensionError("torus point dimension differs from the sequence")
    n = as_index(n, a.d)
    if any(v < 0 for v in n):
        raise ValueError("truncation n must be componentwise >= 0")
    w = a.window((0,) * a.d, n)
    return _kernels.twisted_sum(w, ang) / box_volume(n)


def amplitude_grid(a: WeightSequence, angles: np.ndarray, n: IndexLike) -> np.ndarray:
    """Vectorised :func:`amplitude_estimate` over many points, ``angles`` of shape (p, d)."""
    angles = np.atleast_2d(np.asarray(angles, dtype=float))
    if angles.shape[1] != a.d:
        raise DimensionError("torus point dimension differs from the sequence")
    n = as_index(n, a.d)
    w = a.window((0,) * a.d, n)
    out = np.empty(angles.shape[0], dtype=complex)
    # per-axis phase matrices keep this at O(p * |box|) without Python loops over k
    for i, th in enumerate(angles):
        t = w
        for ax in range(a.d):
            t = np.tensordot(t, _kernels.phase_vector(th[ax], w.shape[ax]), axes=([0], [0]))
        out[i] = t
    return out / box_volume(n)


# ---------------------------------------------------------------------------
# Bochner-Fejer kernels


@dataclass(frozen=True)
class BochnerFejerParams:
    """Per-axis ``(orders, bases)``; bases are assumed rationally independent."""

    axes: tuple[tuple[tuple[int, ...], tuple[float, ...]], ...]

    def __post_init__(self):
        axes = []
        for orders, bases in self.axes:
            orders = tuple(int(o) for o in np.atleast_1d(orders))
            bases = tuple(float(b) for b in np.atleast_1d(bases))
            if len(orders) != len(bases):
                raise ValueError("one base per order required")
            if not orders or any(o < 1 for o in orders):
                raise ValueError("orders must be positive integers")
            axes.append((orders, bases))
        if not axes:
            raise DimensionError("at least one axis required")
        object.__setattr__(self, "axes", tuple(axes))

    @classmethod
    def single(cls, order: int, base: float, d: int = 1) -> "BochnerFejerParams":
        return cls(tuple(((order,), (base,)) for _ in range(d)))

    @property
    def d(self) -> int:
        return len(self.axes)

    def axis_lattice(self, j: int) -> tuple[np.ndarray, np.ndarray]:
        """Frequencies ``nu . beta`` and weights ``d_B(nu)`` on axis ``j`` (zero weights dropped)."""
        orders, bases = self.axes[j]
        freqs, weights = [], []
        for nu in itertools.product(*[range(-o, o + 1) for o in orders]):
            w = math.prod(1.0 - abs(v) / o for v, o in zip(nu, orders))
            if w > 0:
                freqs.append(float(np.dot(nu, bases)))
                weights.append(w)
        return np.array(freqs), np.array(weights)


def bochner_fejer_kernel_eval(params: BochnerFejerParams, t) -> complex:
    """``prod_j K_{B_j}(t_j)`` with ``K_B(t) = sum_nu d_B(nu) e^{2 pi i (nu . beta) t}``."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if t.shape[0] != params.d:
        raise DimensionError("argument dimension differs from the kernel")
    out = 1.0 + 0j
    for j in range(params.d):
        freqs, weights = params.axis_lattice(j)
        out *= complex(np.sum(weights * np.exp(2j * np.pi * freqs * t[j])))
    return out


def _bf_terms(params: BochnerFejerParams):
    per_axis = [params.axis_lattice(j) for j in range(params.d)]
    for combo in itertools.product(*[range(len(f)) for f, _ in per_axis]):
        freq = tuple(per_axis[j][0][i] for j, i in enumerate(combo))
        weight = math.prod(per_axis[j][1][i] for j, i in enumerate(combo))
        yield freq, weight


def _merge_terms(freqs, coeffs, tol):
    out_f, out_c = [], []
    for f, c in zip(freqs, coeffs):
        f = np.mod(np.asarray(f, dtype=float), 1.0)
        for i, g in enumerate(out_f):
            if np.all(circular_distance(f, g) <= tol):
                out_c[i] += c
                break
        else:
            out_f.append(f)
            out_c.append(complex(c))
    return out_f, out_c


def bochner_fejer_convolve(
    params: BochnerFejerParams,
    a: Union[WeightSequence, TrigPolynomial],
    n: Optional[IndexLike] = None,
    tol: float = TORUS_TOL,
    drop_below: float = 0.0,
) -> TrigPolynomial:
    """The Bochner-Fejer polynomial ``K_B * a``.

    The coefficient at frequency ``nu . beta`` is ``d_B(nu)`` times the
    amplitude of ``a`` there.  A :class:`TrigPolynomial` input uses its exact
    limit amplitudes; a :class:`WeightSequence` uses the truncated amplitude at
    ``n`` (default: its whole box from the origin).
    """
    if a.d != params.d:
        raise DimensionError("kernel and sequence dimensions differ")
    freqs, coeffs = [], []
    if isinstance(a, TrigPolynomial):
        for f, w in _bf_terms(params):
            c = a.amplitude(f, tol)
            if c != 0:
                freqs.append(f)
                coeffs.append(w * c)
    else:
        n = a.hi if n is None else as_index(n, a.d)
        lattice = list(_bf_terms(params))
        if lattice:
            amps = amplitude_grid(a, np.array([f for f, _ in lattice]), n)
            for (f, w), amp in zip(lattice, amps):
                freqs.append(f)
                coeffs.append(w * amp)
    freqs, coeffs = _merge_terms(freqs, coeffs, tol)
    keep = [i for i, c in enumerate(coeffs) if abs(c) > drop_below]
    if not keep:
        return TrigPolynomial.zero(params.d)
    return TrigPolynomial(np.array([freqs[i] for i in keep]), np.array([coeffs[i] for i in keep]), tol)
