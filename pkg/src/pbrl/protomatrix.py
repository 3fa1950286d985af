"""Protomatrix data model: validation, parsing, prefixes, rate accounting.

A protomatrix is a small matrix of non-negative integers (edge
multiplicities of a protograph).  Raptor-like protomatrices carry an extra
block structure: a high-rate core (HRC) in the top-left, an all-zero block
top-right, and one degree-1 incremental-redundancy variable node per
extension row, forming an identity block bottom-right.  Rate-compatible
prefixes are obtained by truncating extension rows together with their
identity columns.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

# Parser rejects edge multiplicities above this; real designs stay <= 2.
MAX_ENTRY = 15

RatePoint = Fraction


class ProtomatrixFormatError(ValueError):
    """Malformed protomatrix text or invalid constructor input."""


@dataclass(frozen=True, eq=False)
class Protomatrix:
    """Immutable protograph base matrix.

    entries[i, j] counts edges between check node i and variable node j.
    `punctured` holds 1-based indices of variable nodes that are never
    transmitted.  `hrc_shape = (n_ch, n_vh)` declares the raptor-like block
    split; when present the structure is validated exactly.
    """

    entries: np.ndarray
    punctured: frozenset[int] = frozenset()
    hrc_shape: tuple[int, int] | None = None

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=np.int64)
        if arr.ndim != 2 or arr.size == 0:
            raise ProtomatrixFormatError("entries must be a non-empty 2-D matrix")
        if (arr < 0).any():
            raise ProtomatrixFormatError("negative edge multiplicity")
        if (arr > MAX_ENTRY).any():
            raise ProtomatrixFormatError(
                f"edge multiplicity above sanity cap {MAX_ENTRY}"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)
        object.__setattr__(self, "punctured", frozenset(self.punctured))

        n_c, n_v = arr.shape
        if n_v <= n_c:
            raise ProtomatrixFormatError(
                f"need more variable nodes than check nodes for a positive "
                f"rate, got {n_c}x{n_v}"
            )
        for idx in self.punctured:
            if not 1 <= idx <= n_v:
                raise ProtomatrixFormatError(f"punctured index {idx} out of range")
        if self.hrc_shape is not None:
            self._check_block_structure()

    def _check_block_structure(self):
        n_c, n_v = self.entries.shape
        n_ch, n_vh = self.hrc_shape
        if not (1 <= n_ch <= n_c and 1 <= n_vh <= n_v):
            raise ProtomatrixFormatError(f"hrc_shape {self.hrc_shape} out of range")
        if n_v - n_vh != n_c - n_ch:
            raise ProtomatrixFormatError(
                "extension must add one variable node per check node "
                f"(n_v-n_vh={n_v - n_vh}, n_c-n_ch={n_c - n_ch})"
            )
        n_ext = n_c - n_ch
        if n_ext:
            if self.entries[:n_ch, n_vh:].any():
                raise ProtomatrixFormatError(
                    "top-right block must be all-zero for raptor-like structure"
                )
            ident = self.entries[n_ch:, n_vh:]
            if not np.array_equal(ident, np.eye(n_ext, dtype=np.int64)):
                raise ProtomatrixFormatError(
                    "bottom-right block must be the identity"
                )
        for idx in self.punctured:
            if idx > n_vh:
                raise ProtomatrixFormatError(
                    f"punctured column {idx} must lie in the high-rate core "
                    "(incremental-redundancy nodes are always transmitted)"
                )

    # -- shape accessors ---------------------------------------------------

    @property
    def n_c(self) -> int:
        return self.entries.shape[0]

    @property
    def n_v(self) -> int:
        return self.entries.shape[1]

    @property
    def n_p(self) -> int:
        return len(self.punctured)

    @property
    def n_t(self) -> int:
        """Number of transmitted variable nodes."""
        return self.n_v - self.n_p

    @property
    def is_pbrl(self) -> bool:
        return self.hrc_shape is not None

    def key(self) -> bytes:
        """Canonical byte key (used for memoization)."""
        punct = ",".join(str(i) for i in sorted(self.punctured))
        return b"%dx%d;%s;" % (self.n_c, self.n_v, punct.encode()) + self.entries.tobytes()

    def __eq__(self, other) -> bool:
        if not isinstance(other, Protomatrix):
            return NotImplemented
        return (
            np.array_equal(self.entries, other.entries)
            and self.punctured == other.punctured
            and self.hrc_shape == other.hrc_shape
        )

    def __repr__(self) -> str:
        tag = f", hrc={self.hrc_shape}" if self.hrc_shape else ""
        punct = f", punctured={sorted(self.punctured)}" if self.punctured else ""
        return f"Protomatrix({self.n_c}x{self.n_v}{tag}{punct})"


def parse(text: str) -> Protomatrix:
    """Parse the line-oriented protomatrix format.

    Format ('#' starts a comment, blank lines ignored)::

        pbrl <n_c> <n_v> <n_ch> <n_vh>     # or: proto <n_c> <n_v>
        punctured <i1> <i2> ...            # optional, 1-based
        <n_v space-separated non-negative integers>   (n_c such rows)
    """
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if not lines:
        raise ProtomatrixFormatError("empty protomatrix file")

    head = lines[0].split()
    if head[0] == "pbrl":
        if len(head) != 5:
            raise ProtomatrixFormatError(f"bad header: {lines[0]!r}")
        n_c, n_v, n_ch, n_vh = (_int(tok) for tok in head[1:])
        hrc_shape = (n_ch, n_vh)
    elif head[0] == "proto":
        if len(head) != 3:
            raise ProtomatrixFormatError(f"bad header: {lines[0]!r}")
        n_c, n_v = _int(head[1]), _int(head[2])
        hrc_shape = None
    else:
        raise ProtomatrixFormatError(f"unknown header keyword {head[0]!r}")

    body = lines[1:]
    punctured: frozenset[int] = frozenset()
    if body and body[0].split()[0] == "punctured":
        punctured = frozenset(_int(tok) for tok in body[0].split()[1:])
        body = body[1:]

    if len(body) != n_c:
        raise ProtomatrixFormatError(f"expected {n_c} rows, found {len(body)}")
    rows = []
    for line in body:
        row = [_int(tok) for tok in line.split()]
        if len(row) != n_v:
            raise ProtomatrixFormatError(
                f"ragged row: expected {n_v} entries, got {len(row)}"
            )
        rows.append(row)
    return Protomatrix(np.array(rows, dtype=np.int64), punctured, hrc_shape)


def _int(tok: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ProtomatrixFormatError(f"not an integer: {tok!r}") from None


def serialize(p: Protomatrix) -> str:
    """Inverse of :func:`parse`; round-trips exactly."""
    if p.hrc_shape is not None:
        lines = [f"pbrl {p.n_c} {p.n_v} {p.hrc_shape[0]} {p.hrc_shape[1]}"]
    else:
        lines = [f"proto {p.n_c} {p.n_v}"]
    if p.punctured:
        lines.append("punctured " + " ".join(str(i) for i in sorted(p.punctured)))
    for row in p.entries:
        lines.append(" ".join(str(v) for v in row))
    return "\n".join(lines) + "\n"


def load(path) -> Protomatrix:
    with open(path, "r", encoding="utf-8") as fh:
        return parse(fh.read())


def save(p: Protomatrix, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize(p))


def prefix(p: Protomatrix, rows: int) -> Protomatrix:
    """Rate-compatible prefix: first `rows` check rows plus their columns.

    Keeps the high-rate core and the first rows - n_ch extension rows with
    their identity columns.  Punctured columns always survive (they live in
    the core).
    """
    if p.hrc_shape is None:
        raise ProtomatrixFormatError("prefix requires raptor-like structure")
    n_ch, n_vh = p.hrc_shape
    if not n_ch <= rows <= p.n_c:
        raise ProtomatrixFormatError(
            f"prefix rows {rows} outside [{n_ch}, {p.n_c}]"
        )
    cols = n_vh + (rows - n_ch)
    return Protomatrix(p.entries[:rows, :cols].copy(), p.punctured, (n_ch, n_vh))


def rate(p: Protomatrix) -> RatePoint:
    """Design rate (n_v - n_c) / n_t as an exact rational."""
    r = Fraction(p.n_v - p.n_c, p.n_t)
    if not 0 < r < 1:
        raise ProtomatrixFormatError(f"design rate {r} outside (0, 1)")
    return r


def rate_label(p: Protomatrix) -> str:
    """Unreduced rate string, e.g. '6/15'."""
    return f"{p.n_v - p.n_c}/{p.n_t}"
