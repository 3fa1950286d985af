"""Minimum-distance upper bounds for protomatrices.

Every quasi-cyclic code lifted from a protomatrix has minimum distance at
most the smallest non-zero value, over all column subsets S of size
n_c + 1, of the sum of the n_c x n_c sub-matrix permanents obtained by
dropping one column of S at a time.  With punctured variable nodes the sum
skips the permanents whose dropped column is punctured.

`full_bound` enumerates every subset (the brute-force oracle).  For
raptor-like protomatrices `reduced_bound` computes the same value from a
far smaller family of subsets: every subset that contains all degree-1
extension columns, plus (in the punctured case only) the subsets that
contain a punctured column but not the complete extension block.  Each
permanent then peels down to a core no larger than the high-rate block.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import permanent
from .protomatrix import Protomatrix, RatePoint, prefix, rate

INFINITE = math.inf

# A bound is a positive int, or INFINITE when every subset sum is zero.
BoundValue = int | float

FULL_ENUM_CAP = 10_000_000


class EnumerationCapError(RuntimeError):
    """Brute-force subset enumeration would exceed the configured cap."""


def is_finite(b: BoundValue) -> bool:
    return b != INFINITE


def min_star(values) -> BoundValue:
    """Smallest strictly positive element; INFINITE if all are zero."""
    best = INFINITE
    n = 0
    for v in values:
        n += 1
        if v < 0:
            raise ValueError("min_star requires non-negative values")
        if v and v < best:
            best = v
    if n == 0:
        raise ValueError("min_star of an empty collection")
    return best


@dataclass
class BoundStats:
    """Instrumentation counters filled in by the bound computations."""

    subsets: int = 0
    group2_subsets: int = 0
    permanents: int = 0


@dataclass
class SubsetSum:
    """Permanent sum of one column subset S with |S| = n_c + 1."""

    columns: tuple[int, ...]  # 1-based, sorted
    value: int


def subset_sum(p: Protomatrix, S, *, engine=permanent.perm_reduced) -> SubsetSum:
    """Sum of perm(P with columns S minus {i}) over transmitted i in S."""
    cols = tuple(sorted(S))
    if len(cols) != p.n_c + 1:
        raise ValueError(f"|S| must be n_c+1 = {p.n_c + 1}, got {len(cols)}")
    if not all(1 <= c <= p.n_v for c in cols):
        raise ValueError(f"columns out of range: {cols}")
    value = _subset_sum_value(p.entries, cols, p.punctured, engine)
    return SubsetSum(cols, value)


def _subset_sum_value(entries, cols, punctured, engine, memo=None, stats=None):
    if memo is not None:
        sub = entries[:, [c - 1 for c in cols]]
        key = (sub.tobytes(), tuple(c in punctured for c in cols))
        hit = memo.get(key)
        if hit is not None:
            return hit
    total = 0
    for drop in cols:
        if drop in punctured:
            continue
        keep = [c - 1 for c in cols if c != drop]
        total += engine(entries[:, keep])
        if stats is not None:
            stats.permanents += 1
    if memo is not None:
        memo[key] = total
    return total


def full_bound(
    p: Protomatrix,
    *,
    cap: int = FULL_ENUM_CAP,
    stats: BoundStats | None = None,
) -> BoundValue:
    """Brute-force bound over all C(n_v, n_c+1) column subsets."""
    n_subsets = math.comb(p.n_v, p.n_c + 1)
    if n_subsets > cap:
        raise EnumerationCapError(
            f"{n_subsets} subsets exceed the cap {cap}; use reduced_bound"
        )
    best = INFINITE
    for cols in combinations(range(1, p.n_v + 1), p.n_c + 1):
        if stats is not None:
            stats.subsets += 1
        v = _subset_sum_value(p.entries, cols, p.punctured, permanent.perm_ryser,
                              stats=stats)
        if v and v < best:
            best = v
    return best


def reduced_bound(
    p: Protomatrix,
    *,
    stats: BoundStats | None = None,
    memo: dict | None = None,
) -> BoundValue:
    """Structure-exploiting bound for raptor-like protomatrices.

    Equals `full_bound` whenever the latter is finite and positive (the
    designer guarantees this by starting from a core with a finite positive
    bound: adding extension rows never lowers the bound below the core's).

    Enumerates C(n_vh, n_ch+1) subsets containing the whole extension
    block; with punctures, additionally the subsets holding at least one
    punctured column and not the whole extension block.
    """
    if p.hrc_shape is None:
        raise ValueError("reduced_bound requires raptor-like structure")
    n_ch, n_vh = p.hrc_shape
    ext_cols = tuple(range(n_vh + 1, p.n_v + 1))
    engine = permanent.perm_reduced

    best = INFINITE
    # Group 1: all extension columns plus any n_ch+1 core columns.
    for core in combinations(range(1, n_vh + 1), n_ch + 1):
        cols = core + ext_cols
        if stats is not None:
            stats.subsets += 1
        v = _subset_sum_value(p.entries, cols, p.punctured, engine, memo, stats)
        if v and v < best:
            best = v

    if p.punctured:
        punct = tuple(sorted(p.punctured))
        clear = tuple(c for c in range(1, n_vh + 1) if c not in p.punctured)
        # Group 2: >= 1 punctured column, not the whole extension block.
        for n_punct in range(1, len(punct) + 1):
            for n_ext in range(0, len(ext_cols)):
                n_clear = p.n_c + 1 - n_punct - n_ext
                if n_clear < 0 or n_clear > len(clear):
                    continue
                for pc in combinations(punct, n_punct):
                    for ec in combinations(ext_cols, n_ext):
                        for cc in combinations(clear, n_clear):
                            cols = tuple(sorted(pc + cc + ec))
                            if stats is not None:
                                stats.subsets += 1
                                stats.group2_subsets += 1
                            v = _subset_sum_value(
                                p.entries, cols, p.punctured, engine, memo, stats
                            )
                            if v and v < best:
                                best = v
    return best


def count_punctured_subsets(p: Protomatrix) -> int:
    """Closed-form size of the punctured path's second subset group.

    sum over i = 1..n_p and j = 0..n_ext-1 of
    C(n_p, i) * C(n_vh - n_p, n_c + 1 - i - j) * C(n_ext, j),
    with C(n, k) = 0 outside 0 <= k <= n.
    """
    if p.hrc_shape is None:
        raise ValueError("count_punctured_subsets requires raptor-like structure")
    n_ch, n_vh = p.hrc_shape
    n_ext = p.n_v - n_vh
    n_p = p.n_p
    total = 0
    for i in range(1, n_p + 1):
        for j in range(0, n_ext):
            k = p.n_c + 1 - i - j
            if 0 <= k <= n_vh - n_p:
                total += math.comb(n_p, i) * math.comb(n_vh - n_p, k) * math.comb(n_ext, j)
    return total


def bound_profile(
    p: Protomatrix, *, memo: dict | None = None
) -> list[tuple[RatePoint, BoundValue]]:
    """(rate, reduced bound) for every rate-compatible prefix."""
    if p.hrc_shape is None:
        raise ValueError("bound_profile requires raptor-like structure")
    out = []
    for rows in range(p.hrc_shape[0], p.n_c + 1):
        q = prefix(p, rows)
        out.append((rate(q), reduced_bound(q, memo=memo)))
    return out
