"""Exact permanents of small non-negative integer matrices.

Three engines with identical results: literal permutation enumeration
(`perm_naive`, the reference), Ryser inclusion-exclusion (`perm_ryser`),
and a structural pre-reduction that peels singleton rows/columns before
dispatching the irreducible core to Ryser (`perm_reduced`).

All results are exact.  Fast vectorized paths run in int64 only when a
proven a-priori bound on every intermediate value fits; otherwise the
engines fall back to arbitrary-precision Python integers.
"""

from __future__ import annotations

import math
from itertools import permutations

import numpy as np

NAIVE_MAX = 9  # factorial enumeration guard
RYSER_MAX = 30  # 2**l guard
_INT64_SAFE = 1 << 62

_PERM_CACHE: dict[int, np.ndarray] = {}


def _as_matrix(m) -> np.ndarray:
    arr = np.asarray(m)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise ValueError(f"need a square matrix with l >= 1, got shape {arr.shape}")
    if not np.issubdtype(arr.dtype, np.integer):
        if not np.issubdtype(arr.dtype, np.number) or (arr != np.floor(arr)).any():
            raise ValueError("matrix entries must be non-negative integers")
        arr = arr.astype(np.int64)
    if (arr < 0).any():
        raise ValueError("matrix entries must be non-negative")
    return arr


def _perm_indices(l: int) -> np.ndarray:
    if l not in _PERM_CACHE:
        _PERM_CACHE[l] = np.array(list(permutations(range(l))), dtype=np.intp)
    return _PERM_CACHE[l]


def perm_naive(m) -> int:
    """Permanent by direct summation over all l! permutations."""
    a = _as_matrix(m)
    l = a.shape[0]
    if l > NAIVE_MAX:
        raise ValueError(f"perm_naive limited to l <= {NAIVE_MAX}, got {l}")
    # The permanent is at most the product of row sums; every partial sum and
    # per-permutation product is bounded by it, so int64 is safe below 2**62.
    row_sums = [max(int(s), 1) for s in a.sum(axis=1)]
    if math.prod(row_sums) < _INT64_SAFE:
        perms = _perm_indices(l)
        prods = a[np.arange(l)[None, :], perms].prod(axis=1)
        return int(prods.sum())
    total = 0
    rows = [[int(v) for v in row] for row in a]
    for sigma in permutations(range(l)):
        p = 1
        for i, j in enumerate(sigma):
            p *= rows[i][j]
            if p == 0:
                break
        total += p
    return total


def perm_ryser(m) -> int:
    """Permanent by Ryser inclusion-exclusion, Theta(l * 2**l).

    perm(A) = (-1)^l * sum over non-empty column subsets S of
    (-1)^|S| * prod_i sum_{j in S} a[i, j].
    """
    a = _as_matrix(m)
    l = a.shape[0]
    if l > RYSER_MAX:
        raise ValueError(f"perm_ryser limited to l <= {RYSER_MAX}, got {l}")
    row_sums = [max(int(s), 1) for s in a.sum(axis=1)]
    if l <= 16 and (1 << l) * math.prod(row_sums) < _INT64_SAFE:
        return _ryser_vec(a, l)
    return _ryser_gray(a, l)


def _ryser_vec(a: np.ndarray, l: int) -> int:
    # Subset row sums built by doubling: after column j the first 2**(j+1)
    # rows of `sums` cover all subsets of columns 0..j in bitmask order.
    sums = np.zeros((1, l), dtype=np.int64)
    for j in range(l):
        sums = np.vstack([sums, sums + a[:, j]])
    prods = sums[1:].prod(axis=1)
    sizes = np.bitwise_count(np.arange(1, 1 << l, dtype=np.uint64)).astype(np.int64)
    signs = np.where((l - sizes) % 2 == 0, 1, -1)
    return int((signs * prods).sum())


def _ryser_gray(a: np.ndarray, l: int) -> int:
    # Gray-code walk: one column enters or leaves the subset per step, so
    # each row-sum update is O(l).  Arbitrary-precision arithmetic.
    cols = [[int(a[i, j]) for i in range(l)] for j in range(l)]
    row_sums = [0] * l
    total = 0
    prev_gray = 0
    for k in range(1, 1 << l):
        gray = k ^ (k >> 1)
        changed = (gray ^ prev_gray).bit_length() - 1
        col = cols[changed]
        if gray & (1 << changed):
            for i in range(l):
                row_sums[i] += col[i]
        else:
            for i in range(l):
                row_sums[i] -= col[i]
        prev_gray = gray
        prod = 1
        for s in row_sums:
            prod *= s
            if prod == 0:
                break
        total += prod if (l - gray.bit_count()) % 2 == 0 else -prod
    return total


def perm_reduced(m) -> int:
    """Permanent via singleton peeling, then Ryser on the irreducible core.

    Repeatedly: a zero row or column gives 0; a column (preferred, scanned
    left to right) or row with a single non-zero entry v contributes the
    factor v and removes its row and column.  The remaining core goes to
    `perm_ryser`.
    """
    a = _as_matrix(m)
    factor = 1
    while True:
        l = a.shape[0]
        if l == 0:
            return factor
        nz = a != 0
        col_counts = nz.sum(axis=0)
        row_counts = nz.sum(axis=1)
        if (col_counts == 0).any() or (row_counts == 0).any():
            return 0
        singles = np.flatnonzero(col_counts == 1)
        if singles.size:
            j = int(singles[0])
            i = int(np.flatnonzero(nz[:, j])[0])
        else:
            singles = np.flatnonzero(row_counts == 1)
            if not singles.size:
                return factor * perm_ryser(a)
            i = int(singles[0])
            j = int(np.flatnonzero(nz[i, :])[0])
        factor *= int(a[i, j])
        a = np.delete(np.delete(a, i, axis=0), j, axis=1)
