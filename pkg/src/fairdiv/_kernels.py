"""Hot numeric loops: brute-force assignment evaluation and Floyd-Warshall.

Each kernel has a numba implementation and a vectorised numpy fallback with
identical outputs. ``backend=None`` picks numba when it is importable and not
disabled through ``FAIRDIV_DISABLE_NUMBA``.
"""
import numpy as np

from . import _jit
from ._jit import njit

# rows per numpy chunk; bounds peak memory of the fallback
_CHUNK = 1 << 16


def _resolve(backend):
    if backend is None:
        return "numba" if _jit.USE_NUMBA else "numpy"
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and not _jit.HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    return backend


@njit(cache=True)
def _assign_nb(R, m, base, offset):
    n = R.shape[0]
    K = base**m
    vals = np.zeros((K, n), np.int16)
    sizes = np.zeros((K, n), np.int16)
    masks = np.zeros(n, np.int64)
    for c in range(K):
        x = c
        for k in range(n):
            masks[k] = 0
        for t in range(m):
            k = x % base - offset
            x //= base
            if k >= 0:
                masks[k] |= 1 << t
                sizes[c, k] += 1
        for k in range(n):
            vals[c, k] = R[k, masks[k]]
    return vals, sizes


def _assign_np(R, m, base, offset):
    n = R.shape[0]
    K = base**m
    vals = np.zeros((K, n), np.int16)
    sizes = np.zeros((K, n), np.int16)
    weights = (np.int64(1) << np.arange(m, dtype=np.int64)) if m else np.zeros(0, np.int64)
    powers = base ** np.arange(m, dtype=np.int64)
    for start in range(0, K, _CHUNK):
        codes = np.arange(start, min(K, start + _CHUNK), dtype=np.int64)
        owners = (codes[:, None] // powers[None, :]) % base - offset
        for k in range(n):
            hit = owners == k
            mask = hit.astype(np.int64) @ weights
            vals[start : start + len(codes), k] = R[k, mask]
            sizes[start : start + len(codes), k] = hit.sum(axis=1)
    return vals, sizes


def assignment_tables(R, m, pool=True, backend=None):
    """Evaluate every assignment of ``m`` items to agents (and the pool).

    Row ``c`` encodes owners in base ``n+1`` (``n`` when ``pool`` is false),
    least significant digit first; digit 0 means "unallocated" when ``pool``.
    Returns ``(values, sizes)``, both ``(K, n)`` int16 arrays.
    """
    R = np.ascontiguousarray(R, dtype=np.int64)
    n = R.shape[0]
    base = n + 1 if pool else n
    offset = 1 if pool else 0
    if _resolve(backend) == "numba":
        return _assign_nb(R, m, base, offset)
    return _assign_np(R, m, base, offset)


def decode_assignment(code, n, m, pool=True):
    """Owners list for a row index of :func:`assignment_tables` (-1 = unallocated)."""
    base = n + 1 if pool else n
    offset = 1 if pool else 0
    out = []
    for _ in range(m):
        out.append(code % base - offset)
        code //= base
    return out


@njit(cache=True)
def _fw_nb(W):
    D = W.copy()
    n = D.shape[0]
    for k in range(n):
        for i in range(n):
            dik = D[i, k]
            for j in range(n):
                cand = dik + D[k, j]
                if cand > D[i, j]:
                    D[i, j] = cand
    return D


def _fw_np(W):
    D = W.copy()
    n = D.shape[0]
    for k in range(n):
        D = np.maximum(D, D[:, k : k + 1] + D[k : k + 1, :])
    return D


def longest_walks(W, backend=None):
    """Floyd-Warshall for maximum walk weights; ``W`` must have a zero diagonal.

    A positive diagonal entry in the result signals a positive-weight cycle.
    Integer matrices may use the numba kernel; object (Fraction) matrices
    always go through numpy.
    """
    W = np.asarray(W)
    if W.dtype != object and _resolve(backend) == "numba":
        return _fw_nb(np.ascontiguousarray(W, dtype=np.int64))
    return _fw_np(W)
