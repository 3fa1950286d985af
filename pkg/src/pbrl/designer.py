"""Greedy construction of rate-compatible extension rows.

Rows are added one at a time.  Each round scores every admissible row and
keeps the best, breaking ties uniformly at random with a seeded PCG64
generator.  Two objectives are available: maximize the permanent-based
minimum-distance upper bound (`design_pbd`), or minimize the iterative
decoding threshold (`design_threshold`, the classic approach, kept for
building comparison ensembles).
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from . import bound as bound_mod
from . import threshold as threshold_mod
from .protomatrix import Protomatrix, serialize


class UnsatisfiableConstraintsError(ValueError):
    """No candidate row can satisfy the design constraints."""


@dataclass(frozen=True)
class DesignConstraints:
    """Admissible-row description for extension design.

    row_weight counts every edge of the full protomatrix row, including the
    degree-1 identity entry; None lifts the weight cap.  forced_columns are
    1-based core columns every row must connect to (typically the punctured
    node).
    """

    num_irc_rows: int
    row_weight: int | None = 4
    max_entry: int = 1
    forced_columns: frozenset[int] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "forced_columns", frozenset(self.forced_columns))
        if self.num_irc_rows < 0:
            raise UnsatisfiableConstraintsError("num_irc_rows must be >= 0")
        if self.max_entry < 1:
            raise UnsatisfiableConstraintsError("max_entry must be >= 1")
        if self.row_weight is not None and self.row_weight < 1 + len(self.forced_columns):
            raise UnsatisfiableConstraintsError(
                f"row_weight {self.row_weight} cannot cover the identity entry "
                f"plus {len(self.forced_columns)} forced columns"
            )


@dataclass(frozen=True)
class DesignStep:
    """One greedy round: the chosen row and how it was selected."""

    row: tuple[int, ...]  # entries over the core columns
    score: float  # bound value (possibly inf) or threshold in dB
    num_tied: int
    rng_seed: tuple[int, int]  # (seed, round)


@dataclass
class DesignRecord:
    """Full history of a greedy design run."""

    objective: str  # "pbd" | "threshold"
    seed: int
    constraints: DesignConstraints
    steps: list[DesignStep]
    final: Protomatrix

    def scores(self) -> list[float]:
        return [s.score for s in self.steps]

    def to_json(self) -> str:
        doc = {
            "schema": 1,
            "objective": self.objective,
            "seed": self.seed,
            "constraints": {
                "num_irc_rows": self.constraints.num_irc_rows,
                "row_weight": self.constraints.row_weight,
                "max_entry": self.constraints.max_entry,
                "forced_columns": sorted(self.constraints.forced_columns),
            },
            "steps": [
                {
                    "row": list(s.row),
                    "score": s.score if s.score not in (float("inf"),) else "infinite",
                    "num_tied": s.num_tied,
                    "rng_seed": list(s.rng_seed),
                }
                for s in self.steps
            ],
            "final_protomatrix": serialize(self.final),
        }
        return json.dumps(doc, indent=2)


def candidate_rows(c: DesignConstraints, n_vh: int) -> list[tuple[int, ...]]:
    """All admissible rows over the core columns, lexicographically ordered.

    The identity entry is implicit: a row of total weight w carries w - 1
    edges over the core columns.
    """
    for col in c.forced_columns:
        if not 1 <= col <= n_vh:
            raise UnsatisfiableConstraintsError(
                f"forced column {col} outside the {n_vh} core columns"
            )
    want = None if c.row_weight is None else c.row_weight - 1
    if want is not None and want > n_vh * c.max_entry:
        raise UnsatisfiableConstraintsError(
            f"row weight {c.row_weight} unreachable over {n_vh} columns"
        )
    out = []
    for row in product(range(c.max_entry + 1), repeat=n_vh):
        w = sum(row)
        if want is not None and w != want:
            continue
        if w == 0:  # a row with no core edges leaves the new check isolated
            continue
        if any(row[col - 1] == 0 for col in c.forced_columns):
            continue
        out.append(row)
    if not out:
        raise UnsatisfiableConstraintsError(f"no admissible rows: {c}")
    return out


def extend(p: Protomatrix, row: tuple[int, ...]) -> Protomatrix:
    """Append one extension row plus its degree-1 identity column."""
    n_ch, n_vh = p.hrc_shape
    if len(row) != n_vh:
        raise ValueError(f"row must span the {n_vh} core columns")
    top = np.hstack([p.entries, np.zeros((p.n_c, 1), dtype=np.int64)])
    bottom = np.zeros((1, p.n_v + 1), dtype=np.int64)
    bottom[0, :n_vh] = row
    bottom[0, -1] = 1
    return Protomatrix(np.vstack([top, bottom]), p.punctured, p.hrc_shape)


# Permanent-sum memo shared across candidates and rounds: scoring variants
# of the same prefix hits many identical column sub-matrices.  Worker
# processes each grow their own copy.
_MEMO: dict = {}


def _score_pbd(args):
    p, row = args
    b = bound_mod.reduced_bound(extend(p, row), memo=_MEMO)
    return float(b)


def _score_threshold(args):
    p, row, tol_db, max_iter = args
    res = threshold_mod.threshold(extend(p, row), tol_db=tol_db, max_iter=max_iter)
    return res.eb_n0_db if res.converged else float("inf")


def _greedy(hrc, c, seed, objective, score_one, better, workers):
    if hrc.hrc_shape is None:
        raise ValueError("design requires a raptor-like core")
    cur = hrc
    steps: list[DesignStep] = []
    cands = candidate_rows(c, hrc.hrc_shape[1])
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for rnd in range(c.num_irc_rows):
            args = [score_one(cur, row) for row in cands]
            if pool is None:
                scores = [_SCORERS[objective](a) for a in args]
            else:
                chunk = max(1, len(args) // (4 * workers))
                scores = list(pool.map(_SCORERS[objective], args, chunksize=chunk))
            best = scores[0]
            for s in scores[1:]:
                if better(s, best):
                    best = s
            tied = [i for i, s in enumerate(scores) if s == best]
            rng = np.random.default_rng([seed, rnd])
            pick = tied[int(rng.integers(len(tied)))]
            cur = extend(cur, cands[pick])
            steps.append(DesignStep(cands[pick], best, len(tied), (seed, rnd)))
    finally:
        if pool is not None:
            pool.shutdown()
    return DesignRecord(objective, seed, c, steps, cur)


_SCORERS = {"pbd": _score_pbd, "threshold": _score_threshold}


def design_pbd(
    hrc: Protomatrix, c: DesignConstraints, seed: int, *, workers: int = 1
) -> DesignRecord:
    """Greedy extension design maximizing the minimum-distance upper bound.

    The core must have a finite positive bound; every extension then keeps
    the bound finite and never below the core's, so the reduced computation
    applies throughout.
    """
    b = bound_mod.reduced_bound(hrc)
    if not bound_mod.is_finite(b):
        raise ValueError("core bound is infinite; greedy bound design undefined")
    _MEMO.clear()
    return _greedy(
        hrc, c, seed, "pbd",
        lambda p, row: (p, row),
        lambda a, b_: a > b_,
        workers,
    )


def design_threshold(
    hrc: Protomatrix,
    c: DesignConstraints,
    seed: int,
    *,
    tol_db: float = 0.01,
    max_iter: int = 1000,
    workers: int = 1,
) -> DesignRecord:
    """Greedy extension design minimizing the decoding threshold."""
    rec = _greedy(
        hrc, c, seed, "threshold",
        lambda p, row: (p, row, tol_db, max_iter),
        lambda a, b_: a < b_,
        workers,
    )
    if rec.steps and rec.steps[-1].score == float("inf"):
        raise RuntimeError("threshold search failed to converge for every candidate")
    return rec
