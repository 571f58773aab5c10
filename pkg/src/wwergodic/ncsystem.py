"""Matrix algebras with normalised trace and commuting inner automorphisms.

Operators are plain ``(N, N)`` complex ndarrays.  A system carries commuting
unitaries ``U_1..U_d`` acting by ``T_j(x) = U_j x U_j^*``; all averages use the
normalisation ``1/|n+1|`` over the box ``0 <= k <= n``.

A classical sample-path channel (scalar streams ``f(T^k w)`` on a box) lives
at the end of the module: in finite matrix algebras the orthocomplement of the
Kronecker factor is always trivial, so the uniform twisted-average decay is
exercised on streams instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import linalg

from .weights import IndexLike, WeightSequence, _as_angles, as_index, box_volume

POWER_ITERATION_ABOVE = 64


class InvalidSystem(ValueError):
    """Unitaries that are not unitary or do not commute."""


# ---------------------------------------------------------------------------
# operator helpers


def tau(x: np.ndarray) -> complex:
    """Normalised trace ``tr(x) / N``."""
    return complex(np.trace(x)) / x.shape[-1]


def tau_inner(x: np.ndarray, y: np.ndarray) -> complex:
    """``tau(x^* y)``."""
    return complex(np.vdot(x, y)) / x.shape[-1]


def l2_norm(x: np.ndarray) -> float:
    return math.sqrt(max(tau_inner(x, x).real, 0.0))


def op_norm(x: np.ndarray, tol: float = 1e-13, max_iter: int = 10_000) -> float:
    """Largest singular value; power iteration on ``x^* x`` for large ``N``."""
    x = np.asarray(x)
    if x.shape[-1] <= POWER_ITERATION_ABOVE:
        return float(np.linalg.norm(x, 2))
    rng = np.random.default_rng(0)
    v = rng.standard_normal(x.shape[1]) + 1j * rng.standard_normal(x.shape[1])
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(max_iter):
        w = x.conj().T @ (x @ v)
        nw = np.linalg.norm(w)
        if nw == 0:
            return 0.0
        v = w / nw
        if abs(nw - lam) <= tol * nw:
            lam = nw
            break
        lam = nw
    return math.sqrt(lam)


def op_norms(batch: np.ndarray) -> np.ndarray:
    """Operator norms of a stack ``(..., N, N)``."""
    return np.linalg.norm(batch, ord=2, axis=(-2, -1))


def matrix_unit(N: int, i: int, j: int) -> np.ndarray:
    e = np.zeros((N, N), dtype=complex)
    e[i, j] = 1.0
    return e


@dataclass(frozen=True, eq=False)
class Projection:
    p: np.ndarray
    tol: float = 1e-9

    def __post_init__(self):
        p = np.asarray(self.p, dtype=complex)
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise ValueError("projection must be square")
        if np.max(np.abs(p - p.conj().T), initial=0) > self.tol or np.max(np.abs(p @ p - p), initial=0) > self.tol:
            raise ValueError("not an orthogonal projection within tolerance")
        object.__setattr__(self, "p", p)

    @classmethod
    def identity(cls, N: int) -> "Projection":
        return cls(np.eye(N, dtype=complex))

    @classmethod
    def onto(cls, vectors: np.ndarray) -> "Projection":
        """Projection onto the span of orthonormal columns."""
        v = np.asarray(vectors, dtype=complex)
        return cls(v @ v.conj().T)

    @property
    def N(self) -> int:
        return self.p.shape[0]

    def tau_perp(self) -> float:
        return 1.0 - tau(self.p).real


# ---------------------------------------------------------------------------
# systems


@dataclass(frozen=True, eq=False)
class MatrixSystem:
    """``(M_N, tau, T)`` with ``T_j = Ad(U_j)`` for pairwise commuting unitaries."""

    unitaries: tuple
    tol: float = 1e-10

    def __post_init__(self):
        us = tuple(np.array(u, dtype=complex) for u in self.unitaries)
        if not us:
            raise InvalidSystem("need at least one unitary")
        N = us[0].shape[0]
        eye = np.eye(N)
        for u in us:
            if u.shape != (N, N):
                raise InvalidSystem("unitaries must share one square shape")
            if op_norm(u @ u.conj().T - eye) > self.tol:
                raise InvalidSystem("matrix is not unitary within tolerance")
        for i in range(len(us)):
            for j in range(i + 1, len(us)):
                if op_norm(us[i] @ us[j] - us[j] @ us[i]) > self.tol:
                    raise InvalidSystem(f"U_{i + 1} and U_{j + 1} do not commute")
        for u in us:
            u.setflags(write=False)
        object.__setattr__(self, "unitaries", us)

    @property
    def N(self) -> int:
        return self.unitaries[0].shape[0]

    @property
    def d(self) -> int:
        return len(self.unitaries)

    @classmethod
    def identity(cls, N: int, d: int = 1) -> "MatrixSystem":
        return cls(tuple(np.eye(N, dtype=complex) for _ in range(d)))

    @classmethod
    def diagonal(cls, eigenangles: Sequence[Sequence[float]], basis: Optional[np.ndarray] = None) -> "MatrixSystem":
        """``U_j = W diag(exp(2 pi i theta_j)) W^*``; ``W`` defaults to the identity."""
        th = np.atleast_2d(np.asarray(eigenangles, dtype=float))
        W = np.eye(th.shape[1], dtype=complex) if basis is None else np.asarray(basis, dtype=complex)
        us = tuple(W @ np.diag(np.exp(2j * np.pi * t)) @ W.conj().T for t in th)
        return cls(us)

    def to_dict(self) -> dict:
        return {"N": self.N, "unitaries": [matrix_to_json(u) for u in self.unitaries]}

    @classmethod
    def from_dict(cls, data: dict, tol: float = 1e-10) -> "MatrixSystem":
        us = [matrix_from_json(u) for u in data["unitaries"]]
        if any(u.shape != (data["N"], data["N"]) for u in us):
            raise InvalidSystem("unitary shape disagrees with N")
        return cls(tuple(us), tol=tol)


def matrix_to_json(x: np.ndarray) -> list:
    return [[[float(v.real), float(v.imag)] for v in row] for row in np.asarray(x, dtype=complex)]


def matrix_from_json(rows) -> np.ndarray:
    arr = np.asarray(rows, dtype=float)
    if arr.ndim != 3 or arr.shape[2] != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError("matrix must be a square nested array of [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def random_unitary(N: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_commuting_system(N: int, d: int, rng: np.random.Generator) -> MatrixSystem:
    """Simultaneously diagonalisable unitaries with uniform eigenangles in a random basis."""
    W = random_unitary(N, rng)
    return MatrixSystem.diagonal(rng.random((d, N)), W)


def random_operator(N: int, rng: np.random.Generator) -> np.ndarray:
    return (rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))) / math.sqrt(2)


# ---------------------------------------------------------------------------
# dynamics and averages


def unitary_power(sys: MatrixSystem, k: IndexLike) -> np.ndarray:
    k = as_index(k, sys.d)
    out = np.eye(sys.N, dtype=complex)
    for u, kj in zip(sys.unitaries, k):
        base = u if kj >= 0 else u.conj().T
        out = out @ np.linalg.matrix_power(base, abs(kj))
    return out


def apply_power(sys: MatrixSystem, x: np.ndarray, k: IndexLike) -> np.ndarray:
    """``T^k(x) = U^k x (U^k)^*``; negative components use adjoints."""
    u = unitary_power(sys, k)
    return u @ np.asarray(x, dtype=complex) @ u.conj().T


def orbit(sys: MatrixSystem, x: np.ndarray, n: IndexLike) -> np.ndarray:
    """All ``T^k(x)`` for ``0 <= k <= n`` as an array ``(n_1+1, ..., n_d+1, N, N)``.

    Built axis by axis: each step conjugates the whole block obtained so far,
    so the cost is one batched product per lattice point.
    """
    n = as_index(n, sys.d)
    if any(v < 0 for v in n):
        raise ValueError("n must be non-negative")
    block = np.asarray(x, dtype=complex)[None]  # (points so far, N, N)
    for u, nj in zip(sys.unitaries, n):
        uh = u.conj().T
        layers = [block]
        for _ in range(nj):
            layers.append(u @ layers[-1] @ uh)
        block = np.stack(layers, axis=1).reshape(-1, sys.N, sys.N)
    return block.reshape(tuple(v + 1 for v in n) + (sys.N, sys.N))


def _horner_axis(sys: MatrixSystem, y: np.ndarray, j: int, lam: complex, nj: int) -> np.ndarray:
    # sum_{k=0}^{nj} lam^k T_j^k(y) = y + lam T_j(y + lam T_j(...))
    u = sys.unitaries[j]
    uh = u.conj().T
    r = y.copy()
    for _ in range(nj):
        r = y + lam * (u @ r @ uh)
    return r


def twisted_average(sys: MatrixSystem, x: np.ndarray, lam, n: IndexLike) -> np.ndarray:
    """``(1/|n+1|) sum_{k<=n} lam^k T^k(x)`` by per-axis Horner accumulation."""
    n = as_index(n, sys.d)
    ang = _as_angles(lam)
    if len(ang) != sys.d:
        raise ValueError("twist dimension differs from the system")
    r = np.asarray(x, dtype=complex)
    for j in range(sys.d - 1, -1, -1):
        r = _horner_axis(sys, r, j, np.exp(2j * np.pi * ang[j]), n[j])
    return r / box_volume(n)


def ergodic_average(sys: MatrixSystem, x: np.ndarray, n: IndexLike) -> np.ndarray:
    return twisted_average(sys, x, (0.0,) * sys.d, n)


def weighted_average(sys: MatrixSystem, x: np.ndarray, a: WeightSequence, n: IndexLike) -> np.ndarray:
    """``(1/|n+1|) sum_{k<=n} a(k) T^k(x)``."""
    if a.d != sys.d:
        raise ValueError("weight dimension differs from the system")
    n = as_index(n, sys.d)
    w = a.window((0,) * sys.d, n)
    orb = orbit(sys, x, n)
    return np.tensordot(w, orb, axes=(tuple(range(sys.d)), tuple(range(sys.d)))) / box_volume(n)


def operator_correlation(sys: MatrixSystem, x: np.ndarray, m: IndexLike) -> complex:
    """``tau((T^m x)^* x)``."""
    return tau_inner(apply_power(sys, x, m), np.asarray(x, dtype=complex))


def operator_spectral_coeff(sys: MatrixSystem, x: np.ndarray, m: IndexLike, n: IndexLike) -> np.ndarray:
    """``(1/|n+1|) sum (T^{k+m} x)^* T^k x`` over ``k`` with ``k`` and ``k+m`` in ``[0, n]``."""
    m = as_index(m, sys.d)
    n = as_index(n, sys.d)
    orb = orbit(sys, x, n)
    lo = [max(0, -v) for v in m]
    hi = [min(nj, nj - v) for nj, v in zip(n, m)]
    if any(h < l for l, h in zip(lo, hi)):
        return np.zeros((sys.N, sys.N), dtype=complex)
    base = orb[tuple(slice(l, h + 1) for l, h in zip(lo, hi))]
    shifted = orb[tuple(slice(l + v, h + v + 1) for l, h, v in zip(lo, hi, m))]
    ax = "abcdefgh"[: sys.d]
    out = np.einsum(f"{ax}ji,{ax}jk->ik", shifted.conj(), base)
    return out / box_volume(n)


def operator_spectral_coeff_density(sys: MatrixSystem, x: np.ndarray, m: IndexLike, n: IndexLike) -> np.ndarray:
    """Same coefficient by integrating ``z^m Y(z)^* Y(z) / |n+1|``, ``Y(z) = sum T^k(x) z^k``.

    The integrand is a trigonometric polynomial of degree ``n_j + |m_j|`` per
    axis, so the root-of-unity rule with ``L_j = n_j + |m_j| + 1`` nodes is exact.
    """
    m = as_index(m, sys.d)
    n = as_index(n, sys.d)
    orb = orbit(sys, x, n)
    L = [nj + abs(v) + 1 for nj, v in zip(n, m)]
    axes = tuple(range(sys.d))
    # Y at z_t = exp(2 pi i t / L): sum_k O[k] exp(+2 pi i k t / L)
    Y = np.fft.ifftn(orb, s=L, axes=axes) * math.prod(L)
    zm = np.ones(L, dtype=complex)
    for j, (v, Lj) in enumerate(zip(m, L)):
        shape = [1] * sys.d
        shape[j] = Lj
        zm = zm * np.exp(2j * np.pi * v * np.arange(Lj) / Lj).reshape(shape)
    ax = "abcdefgh"[: sys.d]
    out = np.einsum(f"{ax},{ax}ji,{ax}jk->ik", zm, Y.conj(), Y)
    return out / (math.prod(L) * box_volume(n))


# ---------------------------------------------------------------------------
# Kronecker factor


def _joint_eigenbasis(sys: MatrixSystem) -> tuple[np.ndarray, np.ndarray]:
    """Unitary ``W`` and eigenvalues ``u[j, p]`` with ``U_j = W diag(u_j) W^*``."""
    # a fixed generic combination separates joint eigenspaces
    coeffs = [math.cos(1.0 + j * math.sqrt(2.0)) + 1j * math.sin(0.5 + j * math.sqrt(3.0)) for j in range(sys.d)]
    C = sum(c * u for c, u in zip(coeffs, sys.unitaries))
    _, W = linalg.schur(C, output="complex")
    diag = np.array([np.diag(W.conj().T @ u @ W) for u in sys.unitaries])
    return W, diag


@dataclass
class KroneckerDecomposition:
    """Joint eigen-operators of ``Ad(U_j)`` and the projectors onto ``K`` and its complement.

    Projectors act on row-major vectorised operators; the tau inner product is
    ``vec(x)^* vec(y) / N``, so tau-self-adjointness is ordinary hermiticity.
    """

    N: int
    basis: np.ndarray  # (N*N, N, N), tau-orthonormal
    eigenvalues: np.ndarray  # (d, N*N) with T_j(basis[i]) = eigenvalues[j, i] basis[i]
    in_K: np.ndarray  # bool mask: all |mu_j| = 1 within tol
    P_K: np.ndarray
    P_Kperp: np.ndarray
    tol: float

    def project(self, x: np.ndarray, onto: str = "K") -> np.ndarray:
        P = self.P_K if onto == "K" else self.P_Kperp
        return (P @ np.asarray(x, dtype=complex).reshape(-1)).reshape(self.N, self.N)

    def fixed_point_projection(self, x: np.ndarray) -> np.ndarray:
        """tau-orthogonal projection onto ``{y : T_j(y) = y for all j}``."""
        mask = np.all(np.abs(self.eigenvalues - 1.0) <= self.tol, axis=0)
        out = np.zeros((self.N, self.N), dtype=complex)
        for b in self.basis[mask]:
            out += tau_inner(b, x) * b
        return out

    def eigen_angles(self) -> np.ndarray:
        """``(d, N*N)`` angle fractions of the eigenvalue lattice."""
        return np.mod(np.angle(self.eigenvalues) / (2 * np.pi), 1.0)

    def checks(self) -> dict:
        I = np.eye(self.N * self.N)
        P, Q = self.P_K, self.P_Kperp
        return {
            "idempotent_K": float(np.max(np.abs(P @ P - P))),
            "idempotent_Kperp": float(np.max(np.abs(Q @ Q - Q))),
            "selfadjoint_K": float(np.max(np.abs(P - P.conj().T))),
            "selfadjoint_Kperp": float(np.max(np.abs(Q - Q.conj().T))),
            "sum_to_identity": float(np.max(np.abs(P + Q - I))),
            "Kperp_norm": float(np.max(np.abs(Q))),
        }

    def to_dict(self) -> dict:
        ang = self.eigen_angles()
        return {
            "N": self.N,
            "dim_K": int(self.in_K.sum()),
            "dim_Kperp": int((~self.in_K).sum()),
            "eigen_angles": [[float(v) for v in row] for row in ang],
            "max_modulus_defect": float(np.max(np.abs(np.abs(self.eigenvalues) - 1.0))),
            "checks": self.checks(),
        }


def kronecker_decomposition(sys: MatrixSystem, tol: float = 1e-9) -> KroneckerDecomposition:
    W, u = _joint_eigenbasis(sys)
    N = sys.N
    sq = math.sqrt(N)
    basis = np.empty((N * N, N, N), dtype=complex)
    eig = np.empty((sys.d, N * N), dtype=complex)
    for p in range(N):
        for q in range(N):
            i = p * N + q
            basis[i] = sq * np.outer(W[:, p], W[:, q].conj())
            eig[:, i] = u[:, p] * u[:, q].conj()
    in_K = np.all(np.abs(np.abs(eig) - 1.0) <= tol, axis=0)
    B = basis.reshape(N * N, N * N).T  # columns are vec(basis element)
    BK = B[:, in_K]
    P_K = BK @ BK.conj().T / N
    P_Kperp = np.eye(N * N) - P_K
    return KroneckerDecomposition(N, basis, eig, in_K, P_K, P_Kperp, tol)


def superoperator(u: np.ndarray) -> np.ndarray:
    """Matrix of ``x -> u x u^*`` on row-major vectorised operators."""
    return np.kron(u, u.conj())


# ---------------------------------------------------------------------------
# almost-uniform diagnostics


@dataclass
class AUReport:
    projection: Projection
    achieved: float
    tau_perp: float
    mode: str
    rank: int
    candidates: list = field(default_factory=list)  # (rank, sup) pairs tried

    def to_dict(self) -> dict:
        return {
            "achieved_sup": self.achieved,
            "tau_perp": self.tau_perp,
            "mode": self.mode,
            "rank": self.rank,
            "candidates": [{"rank": r, "sup": s} for r, s in self.candidates],
        }


def au_convergence_diagnostic(
    tail: Sequence[np.ndarray],
    epsilon: float,
    mode: str = "bilateral",
    weights: Optional[Sequence[float]] = None,
) -> AUReport:
    """Search spectral projections of the tail energy for a small uniform tail.

    The energy is ``S = sum w A^* A`` (one-sided) or ``sum w (A^* A + A A^*)``
    (bilateral).  Every projection onto the span of the ``r`` lowest-energy
    eigenvectors with ``tau(e_perp) <= epsilon`` is tried and the one with
    the smallest ``max ||e A e||`` (or ``max ||A e||``) is returned.  This is
    a heuristic upper bound.
    """
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    if mode not in ("bilateral", "one-sided"):
        raise ValueError("mode is 'bilateral' or 'one-sided'")
    tail = [np.asarray(A, dtype=complex) for A in tail]
    if not tail:
        raise ValueError("empty tail")
    N = tail[0].shape[0]
    if any(A.shape != (N, N) for A in tail):
        raise ValueError("tail operators must share one shape")
    w = np.ones(len(tail)) if weights is None else np.asarray(weights, dtype=float)
    S = np.zeros((N, N), dtype=complex)
    for wi, A in zip(w, tail):
        S += wi * (A.conj().T @ A)
        if mode == "bilateral":
            S += wi * (A @ A.conj().T)
    _, V = np.linalg.eigh((S + S.conj().T) / 2)
    stack = np.stack(tail)
    best = None
    tried = []
    for r in range(N, math.ceil(N * (1 - epsilon) - 1e-12) - 1, -1):
        if r <= 0:
            break
        e = V[:, :r] @ V[:, :r].conj().T
        prod = e @ stack @ e if mode == "bilateral" else stack @ e
        sup = float(np.max(op_norms(prod)))
        tried.append((r, sup))
        if best is None or sup < best[1] - 1e-15:
            best = (r, sup, e)
    r, sup, e = best
    proj = Projection((e + e.conj().T) / 2)
    return AUReport(proj, sup, proj.tau_perp(), mode, r, tried)


# ---------------------------------------------------------------------------
# uniform twisted averages


def _fold(arr: np.ndarray, G: Sequence[int], d: int) -> np.ndarray:
    """Sum entries whose lattice index agrees modulo ``G`` on the first ``d`` axes."""
    out = np.zeros(tuple(G) + arr.shape[d:], dtype=complex)
    for start in np.ndindex(*[math.ceil(s / g) for s, g in zip(arr.shape[:d], G)]):
        sl = tuple(slice(b * g, min((b + 1) * g, s)) for b, g, s in zip(start, G, arr.shape[:d]))
        chunk = arr[sl]
        out[tuple(slice(0, c) for c in chunk.shape[:d])] += chunk
    return out


def twist_grid_sums(arr: np.ndarray, G: Sequence[int], d: int) -> np.ndarray:
    """``sum_k exp(2 pi i t.k / G) arr[k]`` for every grid point ``t``."""
    folded = _fold(arr, G, d)
    return np.fft.ifftn(folded, axes=tuple(range(d))) * math.prod(G)


@dataclass
class UniformSupReport:
    n: tuple
    grid: tuple
    sup: float
    argmax: tuple

    def to_dict(self) -> dict:
        return {"n": list(self.n), "grid": list(self.grid), "sup": self.sup, "argmax_angles": list(self.argmax)}


def uniform_ww_sup(
    sys: MatrixSystem, x: np.ndarray, e: Optional[Projection], n: IndexLike, grid: IndexLike
) -> UniformSupReport:
    """``max_t ||twisted_average(x, t/G, n) e||`` over the root-of-unity lattice."""
    n = as_index(n, sys.d)
    G = as_index(grid, sys.d)
    if any(g < 1 for g in G):
        raise ValueError("grid resolution must be >= 1")
    orb = orbit(sys, x, n)
    sums = twist_grid_sums(orb, G, sys.d) / box_volume(n)
    if e is not None:
        sums = sums @ e.p
    norms = op_norms(sums)
    idx = np.unravel_index(int(np.argmax(norms)), norms.shape)
    return UniformSupReport(n, G, float(norms[idx]), tuple(i / g for i, g in zip(idx, G)))


def uniform_ww_sup_naive(sys: MatrixSystem, x: np.ndarray, e: Optional[Projection], n: IndexLike, grid: IndexLike) -> float:
    G = as_index(grid, sys.d)
    best = 0.0
    for t in np.ndindex(*G):
        A = twisted_average(sys, x, tuple(i / g for i, g in zip(t, G)), n)
        if e is not None:
            A = A @ e.p
        best = max(best, op_norm(A))
    return best


# ---------------------------------------------------------------------------
# classical sample-path channel


def _check_stream(stream: np.ndarray, n: Optional[IndexLike]) -> tuple[np.ndarray, tuple[int, ...]]:
    stream = np.asarray(stream)
    d = stream.ndim
    if n is None:
        return stream, tuple(s - 1 for s in stream.shape)
    n = as_index(n, d)
    if any(v + 1 > s for v, s in zip(n, stream.shape)):
        raise ValueError(f"stream shape {stream.shape} too small for box {n}")
    return stream[tuple(slice(0, v + 1) for v in n)], n


def classical_sample_average(
    stream: np.ndarray,
    weight: Optional[WeightSequence] = None,
    lam=None,
    n: Optional[IndexLike] = None,
) -> complex:
    """``(1/|n+1|) sum a(k) f_k`` with ``a`` a weight or ``a(k) = lam^k``; ``a = 1`` if neither."""
    f, n = _check_stream(stream, n)
    if weight is not None and lam is not None:
        raise ValueError("give a weight or a twist, not both")
    if weight is not None:
        if weight.d != f.ndim:
            raise ValueError("weight dimension differs from the stream")
        a = weight.window((0,) * f.ndim, n)
    elif lam is not None:
        ang = _as_angles(lam)
        if len(ang) != f.ndim:
            raise ValueError("twist dimension differs from the stream")
        a = np.array(1.0 + 0j)
        for j, t in enumerate(ang):
            a = np.multiply.outer(a, np.exp(2j * np.pi * np.mod(t * np.arange(n[j] + 1), 1.0)))
    else:
        a = np.ones(f.shape)
    return complex(np.sum(a * f)) / box_volume(n)


def classical_twist_grid(stream: np.ndarray, grid: IndexLike, n: Optional[IndexLike] = None) -> np.ndarray:
    """Twisted averages at every ``t / G`` of the root-of-unity lattice."""
    f, n = _check_stream(stream, n)
    G = as_index(grid, f.ndim)
    return twist_grid_sums(f.astype(complex), G, f.ndim) / box_volume(n)


def classical_uniform_sup(stream: np.ndarray, grid: IndexLike, n: Optional[IndexLike] = None) -> UniformSupReport:
    f, n = _check_stream(stream, n)
    G = as_index(grid, f.ndim)
    vals = np.abs(classical_twist_grid(f, G))
    idx = np.unravel_index(int(np.argmax(vals)), vals.shape)
    return UniformSupReport(n, G, float(vals[idx]), tuple(i / g for i, g in zip(idx, G)))


def bernoulli_stream(box: IndexLike, rng: np.random.Generator) -> np.ndarray:
    """i.i.d. +-1 samples on ``[0, box]``."""
    box = as_index(box)
    return rng.choice(np.array([-1.0, 1.0]), size=tuple(v + 1 for v in box)).astype(np.complex64)
