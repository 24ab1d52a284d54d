"""Batched O(n log n) pair counts for latent vectors.

For each row z of a batch the experiments need two pair counts:

* ``inv_plus``  = #{i < j : z_i > z_j}          (merge-sort inversion count)
* ``inv_minus`` = #{i < j : z_i + z_j < 0}      (two-pointer on the sorted row)

Backends, fastest first: a numba kernel (parallel across rows), a scipy
fallback (kendalltau recovers the discordant-pair count exactly; counts stay
far below 2^53 so the float round-trip is lossless), and a brute-force
O(n^2) numpy reference used for cross-checks and tiny ranks.  All backends
treat exact ties as non-inversions (probability zero under the sampling
model) and are pinned against each other in the tests.
"""
from __future__ import annotations

import numpy as np

try:  # pragma: no cover - environment probe
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False

try:  # pragma: no cover - environment probe
    from scipy.stats import kendalltau

    HAVE_SCIPY = True
except ImportError:  # pragma: no cover
    kendalltau = None
    HAVE_SCIPY = False


def _pair_counts_brute(batch: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Reference O(n^2) implementation, vectorized over modest batches."""
    z = np.asarray(batch, dtype=float)
    m, n = z.shape
    iu = np.triu_indices(n, k=1)
    left = z[:, iu[0]]
    right = z[:, iu[1]]
    inv_plus = (left > right).sum(axis=1).astype(np.int64)
    inv_minus = (left + right < 0).sum(axis=1).astype(np.int64)
    return inv_plus, inv_minus


def _pair_counts_scipy(batch: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    z = np.asarray(batch, dtype=float)
    m, n = z.shape
    pairs = n * (n - 1) // 2
    idx = np.arange(n)
    inv_plus = np.empty(m, dtype=np.int64)
    inv_minus = np.empty(m, dtype=np.int64)
    for r in range(m):
        tau = kendalltau(idx, z[r]).statistic
        inv_plus[r] = round((1.0 - tau) * pairs / 2.0)
        srt = np.sort(z[r])
        # for each a: partners b > a with srt[b] < -srt[a]
        pos = np.searchsorted(srt, -srt, side="left")
        inv_minus[r] = int(np.maximum(pos - idx - 1, 0).sum())
    return inv_plus, inv_minus


if HAVE_NUMBA:

    @numba.njit(cache=True)
    def _row_counts(row, buf):  # pragma: no cover - exercised via wrapper
        n = row.shape[0]
        src = row.copy()
        dst = buf
        count = 0
        # insertion-sorted base blocks (shift distance = inversions), then
        # bottom-up merging with select-style inner loops (no data-dependent
        # branches, which roughly halves the merge cost on random input)
        base = 32
        for lo in range(0, n, base):
            hi = min(lo + base, n)
            for i in range(lo + 1, hi):
                v = src[i]
                j = i - 1
                while j >= lo and src[j] > v:
                    src[j + 1] = src[j]
                    j -= 1
                count += i - 1 - j
                src[j + 1] = v
        width = base
        while width < n:
            for lo in range(0, n, 2 * width):
                mid = min(lo + width, n)
                hi = min(lo + 2 * width, n)
                i, j, k = lo, mid, lo
                while i < mid and j < hi:
                    a = src[i]
                    b = src[j]
                    left = a <= b
                    dst[k] = a if left else b
                    count += 0 if left else mid - i
                    i += 1 if left else 0
                    j += 0 if left else 1
                    k += 1
                while i < mid:
                    dst[k] = src[i]
                    i += 1
                    k += 1
                while j < hi:
                    dst[k] = src[j]
                    j += 1
                    k += 1
            src, dst = dst, src
            width *= 2
        # src is now sorted; two-pointer count of pairs with z_a + z_b < 0
        minus = 0
        a2 = 0
        b2 = n - 1
        while a2 < b2:
            if src[a2] + src[b2] < 0.0:
                minus += b2 - a2
                a2 += 1
            else:
                b2 -= 1
        return count, minus

    @numba.njit(parallel=True, cache=True)
    def _pair_counts_numba_impl(batch):  # pragma: no cover - exercised via wrapper
        m, n = batch.shape
        inv_plus = np.empty(m, dtype=np.int64)
        inv_minus = np.empty(m, dtype=np.int64)
        for r in numba.prange(m):
            buf = np.empty(n, dtype=batch.dtype)
            plus, minus = _row_counts(batch[r], buf)
            inv_plus[r] = plus
            inv_minus[r] = minus
        return inv_plus, inv_minus

    def _pair_counts_numba(batch: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        z = np.ascontiguousarray(batch, dtype=np.float64)
        return _pair_counts_numba_impl(z)


_BACKENDS = {"brute": _pair_counts_brute}
if HAVE_SCIPY:
    _BACKENDS["scipy"] = _pair_counts_scipy
if HAVE_NUMBA:
    _BACKENDS["numba"] = _pair_counts_numba

DEFAULT_BACKEND = "numba" if HAVE_NUMBA else ("scipy" if HAVE_SCIPY else "brute")
_active_backend = DEFAULT_BACKEND

#: small ranks where the vectorized brute count beats per-row dispatch
_BRUTE_CUTOFF = 16


def set_backend(name: str) -> None:
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; have {sorted(_BACKENDS)}")
    global _active_backend
    _active_backend = name


def active_backend() -> str:
    return _active_backend


def pair_counts(batch: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(inv_plus, inv_minus) per row of a 2-d latent batch."""
    z = np.asarray(batch, dtype=float)
    if z.ndim != 2:
        raise ValueError("expected a 2-d batch of latent rows")
    if z.shape[1] <= _BRUTE_CUTOFF and _active_backend != "brute":
        return _pair_counts_brute(z)
    return _BACKENDS[_active_backend](z)


def set_num_threads(threads: int) -> None:
    """Bound the numba worker count; no-op for the other backends."""
    if HAVE_NUMBA and threads >= 1:
        numba.set_num_threads(min(threads, numba.config.NUMBA_NUM_THREADS))
