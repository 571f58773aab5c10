"""Hot lattice loops, compiled with numba when available.

Every kernel has a pure-numpy twin with the same signature.  Setting the
environment variable ``WWERGODIC_DISABLE_NUMBA=1`` (before import) routes all
public entry points to the numpy versions; the ``*_numba`` / ``*_numpy``
names stay importable either way so tests and benchmarks can compare them.
"""

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

DISABLED = os.environ.get("WWERGODIC_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes"}
USE_NUMBA = numba is not None and not DISABLED

if numba is not None:
    njit = numba.njit(cache=True, nogil=True)
else:  # pragma: no cover
    def njit(fn):
        return fn


# ---------------------------------------------------------------------------
# compensated summation


@njit
def _neumaier_sum_numba(x):
    sr = 0.0
    cr = 0.0
    si = 0.0
    ci = 0.0
    for i in range(x.shape[0]):
        v = x[i]
        a = v.real
        t = sr + a
        if abs(sr) >= abs(a):
            cr += (sr - t) + a
        else:
            cr += (a - t) + sr
        sr = t
        b = v.imag
        t = si + b
        if abs(si) >= abs(b):
            ci += (si - t) + b
        else:
            ci += (b - t) + si
        si = t
    return complex(sr + cr, si + ci)


def _neumaier_sum_numpy(x):
    # math.fsum is exactly rounded, which is at least as good as Neumaier
    import math

    x = np.asarray(x, dtype=complex).ravel()
    return complex(math.fsum(x.real.tolist()), math.fsum(x.imag.tolist()))


# ---------------------------------------------------------------------------
# direct windowed autocorrelation:  out[l] = sum_k conj(x[k]) x[k+l],
# l in [-L, L] per axis, both indices inside the array.


@njit
def _autocorr_1d_numba(x, maxlag):
    n = x.shape[0]
    out = np.zeros(2 * maxlag + 1, dtype=np.complex128)
    for li in range(2 * maxlag + 1):
        lag = li - maxlag
        lo = max(0, -lag)
        hi = min(n, n - lag)
        acc = 0j
        for k in range(lo, hi):
            acc += np.conj(x[k]) * x[k + lag]
        out[li] = acc
    return out


@njit
def _autocorr_2d_numba(x, maxlag1, maxlag2):
    n1 = x.shape[0]
    n2 = x.shape[1]
    out = np.zeros((2 * maxlag1 + 1, 2 * maxlag2 + 1), dtype=np.complex128)
    for a in range(2 * maxlag1 + 1):
        l1 = a - maxlag1
        lo1 = max(0, -l1)
        hi1 = min(n1, n1 - l1)
        for b in range(2 * maxlag2 + 1):
            l2 = b - maxlag2
            lo2 = max(0, -l2)
            hi2 = min(n2, n2 - l2)
            acc = 0j
            for k1 in range(lo1, hi1):
                for k2 in range(lo2, hi2):
                    acc += np.conj(x[k1, k2]) * x[k1 + l1, k2 + l2]
            out[a, b] = acc
    return out


def _autocorr_numpy(x, maxlag):
    x = np.asarray(x, dtype=complex)
    maxlag = tuple(int(v) for v in maxlag)
    out = np.zeros(tuple(2 * L + 1 for L in maxlag), dtype=complex)
    for idx in np.ndindex(*out.shape):
        lag = [i - L for i, L in zip(idx, maxlag)]
        src = []
        dst = []
        for ax, l in enumerate(lag):
            n = x.shape[ax]
            lo, hi = max(0, -l), min(n, n - l)
            if hi <= lo:
                break
            src.append(slice(lo, hi))
            dst.append(slice(lo + l, hi + l))
        else:
            out[idx] = np.vdot(x[tuple(src)], x[tuple(dst)])
    return out


def _autocorr_numba(x, maxlag):
    x = np.ascontiguousarray(x, dtype=np.complex128)
    if x.ndim == 1:
        return _autocorr_1d_numba(x, int(maxlag[0]))
    if x.ndim == 2:
        return _autocorr_2d_numba(x, int(maxlag[0]), int(maxlag[1]))
    return _autocorr_numpy(x, maxlag)


# ---------------------------------------------------------------------------
# twisted sums:  sum_k x[k] exp(-2 pi i theta . k)


@njit
def _twisted_1d_numba(x, theta):
    n = x.shape[0]
    buf = np.empty(n, dtype=np.complex128)
    for k in range(n):
        ph = -2.0 * np.pi * ((theta * k) % 1.0)
        buf[k] = x[k] * complex(np.cos(ph), np.sin(ph))
    return _neumaier_sum_numba(buf)


@njit
def _twisted_2d_numba(x, t1, t2):
    n1 = x.shape[0]
    n2 = x.shape[1]
    e2 = np.empty(n2, dtype=np.complex128)
    for k in range(n2):
        ph = -2.0 * np.pi * ((t2 * k) % 1.0)
        e2[k] = complex(np.cos(ph), np.sin(ph))
    rows = np.empty(n1, dtype=np.complex128)
    row = np.empty(n2, dtype=np.complex128)
    for k1 in range(n1):
        ph = -2.0 * np.pi * ((t1 * k1) % 1.0)
        c = complex(np.cos(ph), np.sin(ph))
        for k2 in range(n2):
            row[k2] = x[k1, k2] * e2[k2]
        rows[k1] = c * _neumaier_sum_numba(row)
    return _neumaier_sum_numba(rows)


def phase_vector(theta, length, sign=-1):
    """``exp(sign * 2 pi i theta k)`` for ``k = 0..length-1``, reduced mod 1 first."""
    k = np.arange(length)
    return np.exp(sign * 2j * np.pi * np.mod(theta * k, 1.0))


def _twisted_numpy(x, theta):
    x = np.asarray(x, dtype=complex)
    out = x
    for ax in range(x.ndim):
        out = np.tensordot(out, phase_vector(theta[ax], x.shape[ax]), axes=([0], [0]))
    return complex(out)


def _twisted_numba(x, theta):
    x = np.ascontiguousarray(x, dtype=np.complex128)
    if x.ndim == 1:
        return _twisted_1d_numba(x, float(theta[0]))
    if x.ndim == 2:
        return _twisted_2d_numba(x, float(theta[0]), float(theta[1]))
    return _twisted_numpy(x, theta)


# ---------------------------------------------------------------------------
# shifted products for the Van der Corput groups:
#   out[d1, d2] = sum_{j < n} P[j]^* P[j + d],  P zero beyond its extent.
#   mixed[d1, d2] = sum_{j < n} P[j1 + d1, j2]^* P[j1, j2 + d2]


@njit
def _shift_products_numba(P, n1, n2, D1, D2):
    R1, R2, N, _ = P.shape
    out = np.zeros((D1 + 1, D2 + 1, N, N), dtype=np.complex128)
    mixed = np.zeros((D1 + 1, D2 + 1, N, N), dtype=np.complex128)
    for d1 in range(D1 + 1):
        for d2 in range(D2 + 1):
            for j1 in range(n1):
                for j2 in range(n2):
                    s1 = j1 + d1
                    s2 = j2 + d2
                    if s1 < R1 and s2 < R2:
                        A = P[j1, j2]
                        B = P[s1, s2]
                        for r in range(N):
                            for c in range(N):
                                acc = 0j
                                for t in range(N):
                                    acc += np.conj(A[t, r]) * B[t, c]
                                out[d1, d2, r, c] += acc
                        A = P[s1, j2]
                        B = P[j1, s2]
                        for r in range(N):
                            for c in range(N):
                                acc = 0j
                                for t in range(N):
                                    acc += np.conj(A[t, r]) * B[t, c]
                                mixed[d1, d2, r, c] += acc
    return out, mixed


def _shift_products_numpy(P, n1, n2, D1, D2):
    P = np.asarray(P, dtype=complex)
    R1, R2, N, _ = P.shape
    pad = np.zeros((max(R1, n1 + D1), max(R2, n2 + D2), N, N), dtype=complex)
    pad[:R1, :R2] = P
    base = pad[:n1, :n2]
    out = np.zeros((D1 + 1, D2 + 1, N, N), dtype=complex)
    mixed = np.zeros_like(out)
    for d1 in range(D1 + 1):
        for d2 in range(D2 + 1):
            out[d1, d2] = np.einsum("abji,abjk->ik", base.conj(), pad[d1:d1 + n1, d2:d2 + n2])
            mixed[d1, d2] = np.einsum(
                "abji,abjk->ik", pad[d1:d1 + n1, :n2].conj(), pad[:n1, d2:d2 + n2]
            )
    return out, mixed


def _shift_products_numba_entry(P, n1, n2, D1, D2):
    P = np.ascontiguousarray(P, dtype=np.complex128)
    return _shift_products_numba(P, int(n1), int(n2), int(D1), int(D2))


if USE_NUMBA:
    neumaier_sum = _neumaier_sum_numba
    autocorr_direct = _autocorr_numba
    twisted_sum = _twisted_numba
    shift_products = _shift_products_numba_entry
else:
    neumaier_sum = _neumaier_sum_numpy
    autocorr_direct = _autocorr_numpy
    twisted_sum = _twisted_numpy
    shift_products = _shift_products_numpy

BACKENDS = {
    "numpy": {
        "neumaier_sum": _neumaier_sum_numpy,
        "autocorr_direct": _autocorr_numpy,
        "twisted_sum": _twisted_numpy,
        "shift_products": _shift_products_numpy,
    },
}
if numba is not None:
    BACKENDS["numba"] = {
        "neumaier_sum": _neumaier_sum_numba,
        "autocorr_direct": _autocorr_numba,
        "twisted_sum": _twisted_numba,
        "shift_products": _shift_products_numba_entry,
    }
