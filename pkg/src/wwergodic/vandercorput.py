"""Two-parameter Van der Corput inequality for operator arrays.

For an array ``a_j`` (``0 <= j < n`` per axis, C*-algebra valued) and
``H = (h1+1)(h2+1)``::

    ||avg a||^2  <=  4/H ||avg a^*a||
                   + 8/H ( sum_d1 ||avg a_j^* a_{j+(d1,0)}||
                         + sum_d2 ||avg a_j^* a_{j+(0,d2)}||
                         + sum_{d1,d2} ||avg a_j^* a_{j+(d1,d2)}||
                         + sum_{d1,d2} ||avg a_{j+(d1,0)}^* a_{j+(0,d2)}|| )

where every average is ``(1/(n1 n2)) sum_{j<n}`` and ``d_i`` runs over
``1..h_i``.  Shifted entries beyond ``n`` are read from the array's stored
extent, and are zero beyond that.  With the extent equal to ``n`` (zero
padding) the inequality always holds; a larger extent models arrays that
continue past the averaging window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .ncsystem import (
    MatrixSystem,
    Projection,
    matrix_from_json,
    matrix_to_json,
    op_norms,
    operator_correlation,
    orbit,
    random_commuting_system,
    random_operator,
    uniform_ww_sup,
)
from .weights import as_index

GROUPS = ("diagonal", "shift1", "shift2", "shift12", "mixed")


# ---------------------------------------------------------------------------
# summation identities


@dataclass
class IdentityCheck:
    lhs: np.ndarray
    rhs: np.ndarray
    deviation: float  # relative to the summed magnitudes
    supported: bool  # 0 <= h <= n

    def to_dict(self) -> dict:
        return {"deviation": self.deviation, "supported": self.supported}


def _as_stack(values) -> np.ndarray:
    arr = np.asarray(values, dtype=complex)
    return arr


def _relative(diff: np.ndarray, scale: float) -> float:
    err = float(np.max(np.abs(diff))) if diff.size else 0.0
    return err / scale if scale > 0 else err


def formula1_check(values, h: int) -> IdentityCheck:
    """``(h+1) sum_j a_j`` against ``sum_{k=1}^{n+h} sum_{j=k-h}^{k} a_j`` (zero padded).

    ``values`` is a sequence of scalars or equal-shape operators ``a_1..a_n``.
    """
    a = _as_stack(values)
    n = a.shape[0]
    if n < 1 or h < 0:
        raise ValueError("need n >= 1 and h >= 0")
    lhs = (h + 1) * a.sum(axis=0)
    rhs = np.zeros(a.shape[1:], dtype=complex)
    for k in range(1, n + h + 1):
        for j in range(k - h, k + 1):
            if 1 <= j <= n:
                rhs = rhs + a[j - 1]
    scale = (h + 1) * float(np.sum(np.max(np.abs(a.reshape(n, -1)), axis=1)))
    return IdentityCheck(lhs, rhs, _relative(lhs - rhs, scale), h <= n)


def formula2_check(array, h: int) -> IdentityCheck:
    """Window double sum against the diagonal/off-diagonal expansion (zero padded).

    ``array[j-1, j'-1]`` holds ``a_{j,j'}`` (scalar or operator).
    """
    a = _as_stack(array)
    n = a.shape[0]
    if a.shape[1] != n:
        raise ValueError("array must be square in its first two axes")
    if n < 1 or h < 0:
        raise ValueError("need n >= 1 and h >= 0")

    def at(j, jp):
        if 1 <= j <= n and 1 <= jp <= n:
            return a[j - 1, jp - 1]
        return 0

    lhs = np.zeros(a.shape[2:], dtype=complex)
    for k in range(1, n + h + 1):
        for j in range(k - h, k + 1):
            for jp in range(k - h, k + 1):
                lhs = lhs + at(j, jp)
    rhs = (h + 1) * sum(at(j, j) for j in range(1, n + 1))
    for d in range(1, h + 1):
        rhs = rhs + (h - d + 1) * sum(at(j, j + d) + at(j + d, j) for j in range(1, n + 1))
    rhs = np.asarray(rhs, dtype=complex) + np.zeros_like(lhs)
    mags = np.max(np.abs(a.reshape(n, n, -1)), axis=2)
    scale = (h + 1) ** 2 * float(mags.sum())
    return IdentityCheck(lhs, rhs, _relative(lhs - rhs, scale), h <= n)


# ---------------------------------------------------------------------------
# operator arrays


@dataclass(frozen=True, eq=False)
class OperatorArray2D:
    """Operators ``a_j`` for ``0 <= j < extent``, averaged over ``0 <= j < n``.

    Access outside the stored extent (including negative indices) returns
    the zero operator.
    """

    entries: np.ndarray  # (E1, E2, N, N)
    n: tuple[int, int]

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=complex)
        if e.ndim != 4 or e.shape[2] != e.shape[3]:
            raise ValueError("entries must have shape (E1, E2, N, N)")
        n = as_index(self.n, 2)
        if any(v < 1 for v in n) or any(v > s for v, s in zip(n, e.shape[:2])):
            raise ValueError("need 1 <= n <= extent on both axes")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)
        object.__setattr__(self, "n", n)

    @classmethod
    def padded(cls, entries) -> "OperatorArray2D":
        e = np.asarray(entries, dtype=complex)
        return cls(e, e.shape[:2])

    @classmethod
    def constant(cls, op, n: Sequence[int], extent: Optional[Sequence[int]] = None) -> "OperatorArray2D":
        op = np.atleast_2d(np.asarray(op, dtype=complex))
        ext = as_index(extent if extent is not None else n, 2)
        return cls(np.broadcast_to(op, ext + op.shape).copy(), n)

    @property
    def N(self) -> int:
        return self.entries.shape[2]

    @property
    def extent(self) -> tuple[int, int]:
        return self.entries.shape[:2]

    @property
    def is_padded(self) -> bool:
        return tuple(self.extent) == tuple(self.n)

    def __call__(self, j1: int, j2: int) -> np.ndarray:
        if 0 <= j1 < self.extent[0] and 0 <= j2 < self.extent[1]:
            return self.entries[j1, j2]
        return np.zeros((self.N, self.N), dtype=complex)

    def to_dict(self) -> dict:
        return {
            "n": list(self.n),
            "extent": list(self.extent),
            "N": self.N,
            "entries": [[matrix_to_json(m) for m in row] for row in self.entries],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "OperatorArray2D":
        rows = data["entries"]
        ent = np.array([[matrix_from_json(m) for m in row] for row in rows])
        if ent.shape[2] != data["N"] or list(ent.shape[:2]) != list(data.get("extent", ent.shape[:2])):
            raise ValueError("entry shapes disagree with the header")
        return cls(ent, data["n"])


@dataclass
class VdcResult:
    lhs: float
    rhs: float
    groups: dict
    H: int
    h: tuple
    n: tuple
    padded: bool
    outside_hypothesis: bool

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    def holds(self, tol: float = 1e-10) -> bool:
        return self.lhs <= self.rhs + tol

    def to_dict(self) -> dict:
        return {
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "groups": dict(self.groups),
            "H": self.H,
            "h": list(self.h),
            "n": list(self.n),
            "padded": self.padded,
            "outside_hypothesis": self.outside_hypothesis,
        }


@dataclass
class _NormTables:
    lhs: float
    shift: np.ndarray  # ||avg a_j^* a_{j+d}||, (D1+1, D2+1)
    mixed: np.ndarray  # ||avg a_{j+(d1,0)}^* a_{j+(0,d2)}||


def _norm_tables(arr: OperatorArray2D, D1: int, D2: int) -> _NormTables:
    n1, n2 = arr.n
    scale = 1.0 / (n1 * n2)
    out, mixed = _kernels.shift_products(arr.entries, n1, n2, D1, D2)
    avg = arr.entries[:n1, :n2].sum(axis=(0, 1)) * scale
    lhs = float(op_norms(avg)) ** 2
    return _NormTables(lhs, op_norms(out * scale), op_norms(mixed * scale))


def _rhs_from_tables(t: _NormTables, h1: int, h2: int) -> tuple[float, dict]:
    H = (h1 + 1) * (h2 + 1)
    g = {
        "diagonal": float(t.shift[0, 0]),
        "shift1": math.fsum(t.shift[1 : h1 + 1, 0]),
        "shift2": math.fsum(t.shift[0, 1 : h2 + 1]),
        "shift12": math.fsum(t.shift[1 : h1 + 1, 1 : h2 + 1].ravel()),
        "mixed": math.fsum(t.mixed[1 : h1 + 1, 1 : h2 + 1].ravel()),
    }
    rhs = 4.0 / H * g["diagonal"] + 8.0 / H * (g["shift1"] + g["shift2"] + g["shift12"] + g["mixed"])
    return rhs, g


def vdc_bound(arr: OperatorArray2D, h1: int, h2: int) -> VdcResult:
    """Both sides of the inequality with per-group subtotals.

    ``h_i > n_i`` is computed but flagged as outside the hypothesis.
    """
    if h1 < 0 or h2 < 0:
        raise ValueError("h must be non-negative")
    t = _norm_tables(arr, h1, h2)
    rhs, g = _rhs_from_tables(t, h1, h2)
    return VdcResult(
        t.lhs, rhs, g, (h1 + 1) * (h2 + 1), (h1, h2), arr.n, arr.is_padded, h1 > arr.n[0] or h2 > arr.n[1]
    )


def vdc_all_h(arr: OperatorArray2D) -> list[VdcResult]:
    """Results for every admissible ``0 <= h_i <= n_i`` from one set of norm tables."""
    n1, n2 = arr.n
    t = _norm_tables(arr, n1, n2)
    out = []
    for h1 in range(n1 + 1):
        for h2 in range(n2 + 1):
            rhs, g = _rhs_from_tables(t, h1, h2)
            out.append(VdcResult(t.lhs, rhs, g, (h1 + 1) * (h2 + 1), (h1, h2), arr.n, arr.is_padded, False))
    return out


# ---------------------------------------------------------------------------
# fuzzing campaign


def random_array(rng: np.random.Generator, max_dim: int = 4, max_n: int = 8) -> OperatorArray2D:
    """Zero-padded random array from a mix of generic and near-extremal families."""
    N = int(rng.integers(1, max_dim + 1))
    n = tuple(int(v) for v in rng.integers(1, max_n + 1, size=2))
    kind = int(rng.integers(0, 4))
    shape = n + (N, N)
    if kind == 0:  # complex Gaussian
        e = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    elif kind == 1:  # nearly constant: makes the average large
        base = random_operator(N, rng)
        e = base + 0.1 * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    elif kind == 2:  # twisted orbit of a commuting unitary system
        sys = random_commuting_system(N, 2, rng)
        x = random_operator(N, rng)
        lam = np.exp(2j * np.pi * rng.random(2))
        orb = orbit(sys, x, (n[0] - 1, n[1] - 1))
        tw = np.multiply.outer(lam[0] ** np.arange(n[0]), lam[1] ** np.arange(n[1]))
        e = orb * tw[..., None, None]
    else:  # rank one
        u = rng.standard_normal(shape[:-1]) + 1j * rng.standard_normal(shape[:-1])
        v = rng.standard_normal(N) + 1j * rng.standard_normal(N)
        e = u[..., :, None] * v.conj()[None, :]
    e = e * float(rng.lognormal(0.0, 1.0))
    return OperatorArray2D.padded(e)


@dataclass
class FuzzReport:
    seed: int
    trials: int
    cases: int
    violations: list = field(default_factory=list)
    min_margin: float = math.inf
    min_relative_margin: float = math.inf
    outside_hypothesis: int = 0

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "trials": self.trials,
            "cases": self.cases,
            "violations": self.violations,
            "violation_count": len(self.violations),
            "min_margin": self.min_margin,
            "min_relative_margin": self.min_relative_margin,
            "outside_hypothesis": self.outside_hypothesis,
        }


def vdc_fuzz(
    seed: int,
    trials: int = 1000,
    max_dim: int = 4,
    max_n: int = 8,
    h_policy: str = "all",
    tol: float = 1e-10,
) -> FuzzReport:
    """Seeded campaign over random padded arrays.

    ``h_policy`` is ``"all"`` (every admissible ``h``), ``"random"`` (one
    admissible ``h`` per trial) or ``"beyond"`` (one ``h`` with some
    ``h_i > n_i``, flagged as outside the hypothesis).
    """
    if h_policy not in ("all", "random", "beyond"):
        raise ValueError("h_policy is 'all', 'random' or 'beyond'")
    rng = np.random.default_rng(seed)
    rep = FuzzReport(seed, trials, 0)
    for trial in range(trials):
        arr = random_array(rng, max_dim, max_n)
        if h_policy == "all":
            results = vdc_all_h(arr)
        elif h_policy == "random":
            h = [int(rng.integers(0, v + 1)) for v in arr.n]
            results = [vdc_bound(arr, *h)]
        else:
            h = [int(rng.integers(v + 1, 2 * v + 2)) for v in arr.n]
            results = [vdc_bound(arr, *h)]
        for r in results:
            rep.cases += 1
            rep.outside_hypothesis += int(r.outside_hypothesis)
            rep.min_margin = min(rep.min_margin, r.margin)
            if r.rhs > 0:
                rep.min_relative_margin = min(rep.min_relative_margin, r.margin / r.rhs)
            if not r.holds(tol) and not r.outside_hypothesis:
                rep.violations.append({"trial": trial, **r.to_dict()})
    return rep


# ---------------------------------------------------------------------------
# the uniform-in-lambda bound for twisted averages


@dataclass
class WWProofReport:
    n: tuple
    h: tuple
    grid: tuple
    grid_sup_sq: float
    padded_bound: float
    display_bound: float
    limit_bound: float
    wiener_tail: float
    groups: dict

    @property
    def padded_holds(self) -> bool:
        return self.grid_sup_sq <= self.padded_bound + 1e-8

    def to_dict(self) -> dict:
        return {
            "n": list(self.n),
            "h": list(self.h),
            "grid": list(self.grid),
            "grid_sup_sq": self.grid_sup_sq,
            "padded_bound": self.padded_bound,
            "padded_holds": self.padded_holds,
            "display_bound": self.display_bound,
            "limit_bound": self.limit_bound,
            "wiener_tail": self.wiener_tail,
            "groups": dict(self.groups),
        }


def vdc_apply_wwproof(
    sys: MatrixSystem,
    x: np.ndarray,
    e: Optional[Projection],
    n: Sequence[int],
    h: Sequence[int],
    grid: Sequence[int] = (64, 64),
) -> WWProofReport:
    """Compare ``max_lambda ||M_n(x, lambda) e||^2`` with lambda-free bounds.

    The array is ``a_j = lambda^j T^j(x) e`` for ``0 <= j <= n``; every group
    norm is independent of ``lambda``, so one array with ``lambda = 1`` gives
    the bound for the whole torus.

    * ``padded_bound``: array zero beyond ``n`` (the inequality always holds).
    * ``display_bound``: groups written as ``||e M_n(x^* T^d x) e||``, i.e. the
      orbit continued past ``n``.
    * ``limit_bound``: ``4/H ||x||_2^2 + 8/H sum_{|l|<=h} |gamma_x(l)|``.
    * ``wiener_tail``: ``sum_{|l|<=h} |gamma_x(l)| / prod(2h_j+1)``.
    """
    if sys.d != 2:
        raise ValueError("the two-parameter bound needs a d=2 system")
    n = as_index(n, 2)
    h = as_index(h, 2)
    if any(v < 0 for v in h):
        raise ValueError("h must be non-negative")
    x = np.asarray(x, dtype=complex)
    ep = np.eye(sys.N) if e is None else e.p
    orb = orbit(sys, x, (n[0] + h[0], n[1] + h[1])) @ ep
    m = (n[0] + 1, n[1] + 1)
    padded = OperatorArray2D.padded(orb[: m[0], : m[1]])
    extended = OperatorArray2D(orb, m)
    padded_rep = vdc_bound(padded, *h)
    display = vdc_bound(extended, *h)
    sup = uniform_ww_sup(sys, x, e, n, grid)
    H = (h[0] + 1) * (h[1] + 1)
    gammas = [abs(operator_correlation(sys, x, (l1, l2))) for l1 in range(-h[0], h[0] + 1) for l2 in range(-h[1], h[1] + 1)]
    gsum = math.fsum(gammas)
    x2 = operator_correlation(sys, x, (0, 0)).real
    return WWProofReport(
        n,
        h,
        as_index(grid, 2),
        sup.sup**2,
        padded_rep.rhs,
        display.rhs,
        4.0 / H * x2 + 8.0 / H * gsum,
        gsum / ((2 * h[0] + 1) * (2 * h[1] + 1)),
        padded_rep.groups,
    )
