"""Finite operation tables and deficiency classification of small subsets.

A table of order n and arity d stores its n^d Cayley entries densely in
row-major order: entry(i_1, ..., i_d) sits at flat index
sum_t i_t * n^(d-1-t). Elements are 0-based everywhere, including files.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

__all__ = [
    "PairType",
    "OperationTable",
    "CellSignature",
    "SubsetQuery",
    "TableFormatError",
    "TYPE_PATTERNS",
    "TYPE_FROM_CODE",
    "DIAGONAL_EQUAL_TYPES",
    "DIAGONAL_UNEQUAL_TYPES",
    "parse_table",
    "serialize_table",
    "image",
    "exceedance",
    "classify_pair",
    "cell_signature",
    "pair_type_of_signature",
    "deficient_subsets",
]


class PairType(enum.IntEnum):
    """The eight value patterns a 2-element subset's 2x2 block can take.

    T0 is the constant block; T1..T7 are the seven two-value patterns,
    one per two-block partition of the four cells ({4 brace 2} = 7).
    """

    T0 = 0
    T1 = 1
    T2 = 2
    T3 = 3
    T4 = 4
    T5 = 5
    T6 = 6
    T7 = 7


# Cell order is (ii, ij, ji, jj); 0 marks the x slot, 1 the y slot,
# normalized so the first cell carrying the first-seen value is 0.
TYPE_PATTERNS: dict[PairType, tuple[int, int, int, int]] = {
    PairType.T0: (0, 0, 0, 0),
    PairType.T1: (0, 1, 1, 1),
    PairType.T2: (0, 1, 0, 0),
    PairType.T3: (0, 0, 1, 0),
    PairType.T4: (0, 0, 0, 1),
    PairType.T5: (0, 0, 1, 1),
    PairType.T6: (0, 1, 0, 1),
    PairType.T7: (0, 1, 1, 0),
}

# code = (ij != ii) + 2*(ji != ii) + 4*(jj != ii), valid when <= 2 distinct values
TYPE_FROM_CODE: tuple[PairType, ...] = (
    PairType.T0,
    PairType.T2,
    PairType.T3,
    PairType.T7,
    PairType.T4,
    PairType.T6,
    PairType.T5,
    PairType.T1,
)

# Types whose pattern puts the two diagonal cells in the same block.
DIAGONAL_EQUAL_TYPES = frozenset({PairType.T2, PairType.T3, PairType.T7})
DIAGONAL_UNEQUAL_TYPES = frozenset(
    {PairType.T1, PairType.T4, PairType.T5, PairType.T6}
)


class TableFormatError(ValueError):
    """Malformed table file; message carries the offending line number."""


@dataclass(frozen=True)
class OperationTable:
    """An order-n, arity-d finite operation given by its dense Cayley table."""

    order: int
    arity: int
    entries: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        n, d = self.order, self.arity
        if n < 1:
            raise ValueError(f"order must be positive, got {n}")
        if d < 2:
            raise ValueError(f"arity must be >= 2, got {d}")
        arr = np.ascontiguousarray(self.entries, dtype=np.int64)
        if arr.shape != (n**d,):
            raise ValueError(
                f"expected {n**d} entries for order {n}, arity {d}, got {arr.size}"
            )
        if arr.size and (arr.min() < 0 or arr.max() >= n):
            bad = int(arr[(arr < 0) | (arr >= n)][0])
            raise ValueError(f"entry {bad} out of range [0, {n})")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], arity: int = 2) -> "OperationTable":
        flat = [v for row in rows for v in row]
        n = len(rows[0]) if rows else 0
        return cls(order=n, arity=arity, entries=np.asarray(flat, dtype=np.int64))

    def flat_index(self, coords: Sequence[int]) -> int:
        if len(coords) != self.arity:
            raise ValueError(f"expected {self.arity} coordinates, got {len(coords)}")
        idx = 0
        for c in coords:
            if not 0 <= c < self.order:
                raise ValueError(f"coordinate {c} out of range [0, {self.order})")
            idx = idx * self.order + c
        return idx

    def value(self, *coords: int) -> int:
        return int(self.entries[self.flat_index(coords)])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OperationTable):
            return NotImplemented
        return (
            self.order == other.order
            and self.arity == other.arity
            and bool(np.array_equal(self.entries, other.entries))
        )

    def __hash__(self) -> int:
        return hash((self.order, self.arity, self.entries.tobytes()))


@dataclass(frozen=True)
class CellSignature:
    """Canonical set-partition of a subset's cells by equal value.

    codes[c] is the block id of cell c, blocks numbered by first
    appearance, so two sub-tables get the same signature exactly when
    their cells are partitioned identically.
    """

    codes: tuple[int, ...]

    def __post_init__(self) -> None:
        seen = 0
        for c in self.codes:
            if c > seen:
                raise ValueError("signature codes must be first-occurrence canonical")
            seen = max(seen, c + 1)

    @property
    def block_count(self) -> int:
        return max(self.codes) + 1 if self.codes else 0

    def blocks(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in range(self.block_count)]
        for cell, code in enumerate(self.codes):
            out[code].append(cell)
        return tuple(tuple(b) for b in out)


@dataclass(frozen=True)
class SubsetQuery:
    """A subset census question: size s, exceedance cap, optional type filter."""

    subset_size: int = 2
    max_exceedance: int = 0
    type_filter: Optional[PairType] = None

    def __post_init__(self) -> None:
        if self.subset_size < 2:
            raise ValueError(f"subset size must be >= 2, got {self.subset_size}")
        if self.type_filter is not None and self.subset_size != 2:
            raise ValueError("type filter only applies to 2-element subsets")


def parse_table(text: str) -> OperationTable:
    """Parse the table file format.

    Line 1 is ``n`` or ``n d`` (d defaults to 2); then n^(d-1) data lines
    of n space-separated integers in [0, n), row-major over the first d-1
    indices. Lines starting with ``#`` are ignored.
    """
    header: Optional[tuple[int, int]] = None
    values: list[int] = []
    data_lines = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if header is None:
            if len(fields) not in (1, 2):
                raise TableFormatError(
                    f"line {lineno}: header must be 'n' or 'n d', got {line!r}"
                )
            try:
                n = int(fields[0])
                d = int(fields[1]) if len(fields) == 2 else 2
            except ValueError:
                raise TableFormatError(f"line {lineno}: non-integer header {line!r}") from None
            if n < 1:
                raise TableFormatError(f"line {lineno}: order must be positive, got {n}")
            if d < 2:
                raise TableFormatError(f"line {lineno}: arity must be >= 2, got {d}")
            header = (n, d)
            continue
        n, d = header
        data_lines += 1
        if data_lines > n ** (d - 1):
            raise TableFormatError(
                f"line {lineno}: expected {n ** (d - 1)} data lines, found more"
            )
        if len(fields) != n:
            raise TableFormatError(
                f"line {lineno}: expected {n} entries, got {len(fields)}"
            )
        for f in fields:
            try:
                v = int(f)
            except ValueError:
                raise TableFormatError(f"line {lineno}: non-integer entry {f!r}") from None
            if not 0 <= v < n:
                raise TableFormatError(f"line {lineno}: entry {v} out of range [0, {n})")
            values.append(v)
    if header is None:
        raise TableFormatError("line 1: empty input, expected a header line")
    n, d = header
    if data_lines != n ** (d - 1):
        raise TableFormatError(
            f"expected {n ** (d - 1)} data lines for order {n}, arity {d}, got {data_lines}"
        )
    return OperationTable(order=n, arity=d, entries=np.asarray(values, dtype=np.int64))


def serialize_table(table: OperationTable) -> str:
    """Emit the canonical file form: no comments, single spaces, trailing newline."""
    n, d = table.order, table.arity
    header = f"{n}\n" if d == 2 else f"{n} {d}\n"
    rows = table.entries.reshape(n ** (d - 1), n)
    body = "\n".join(" ".join(str(int(v)) for v in row) for row in rows)
    return header + body + "\n"


def _check_subset(table: OperationTable, X: Iterable[int]) -> tuple[int, ...]:
    xs = tuple(sorted(set(X)))
    if not xs:
        raise ValueError("subset must be nonempty")
    if xs[0] < 0 or xs[-1] >= table.order:
        bad = xs[0] if xs[0] < 0 else xs[-1]
        raise ValueError(f"element {bad} out of range [0, {table.order})")
    return xs


def _subset_cells(table: OperationTable, xs: Sequence[int]) -> Iterator[int]:
    """Values of all |xs|^d cells of the sub-table, in row-major coord order."""
    ent = table.entries
    n, d = table.order, table.arity
    for coords in product(xs, repeat=d):
        idx = 0
        for c in coords:
            idx = idx * n + c
        yield int(ent[idx])


def image(table: OperationTable, X: Iterable[int]) -> set[int]:
    """The value set { f(x_1, ..., x_d) : all x_t in X }."""
    xs = _check_subset(table, X)
    return set(_subset_cells(table, xs))


def exceedance(table: OperationTable, X: Iterable[int]) -> int:
    """|image(X)| - |X|; X is deficient iff this is <= 0."""
    xs = _check_subset(table, X)
    return len(image(table, xs)) - len(xs)


def classify_pair(table: OperationTable, i: int, j: int) -> Optional[PairType]:
    """Type of the pair {i, j}, or None if its block has >= 3 distinct values."""
    if table.arity != 2:
        raise ValueError(f"pair classification needs arity 2, got {table.arity}")
    if i >= j:
        raise ValueError(f"need i < j, got i={i}, j={j}")
    n = table.order
    if i < 0 or j >= n:
        raise ValueError(f"indices ({i}, {j}) out of range [0, {n})")
    ent = table.entries
    a = int(ent[i * n + i])
    b = int(ent[i * n + j])
    c = int(ent[j * n + i])
    d = int(ent[j * n + j])
    distinct = len({a, b, c, d})
    if distinct > 2:
        return None
    code = (b != a) + 2 * (c != a) + 4 * (d != a)
    return TYPE_FROM_CODE[code]


def cell_signature(table: OperationTable, X: Iterable[int]) -> CellSignature:
    """Canonical partition of the subset's s^d cells by equal value."""
    xs = _check_subset(table, X)
    if len(xs) < 2:
        raise ValueError("cell signature needs a subset of size >= 2")
    codes: list[int] = []
    block_of: dict[int, int] = {}
    for v in _subset_cells(table, xs):
        if v not in block_of:
            block_of[v] = len(block_of)
        codes.append(block_of[v])
    return CellSignature(codes=tuple(codes))


def pair_type_of_signature(sig: CellSignature) -> Optional[PairType]:
    """Map a 4-cell signature back to its pair type; None above two blocks."""
    if len(sig.codes) != 4:
        raise ValueError("pair signatures have exactly 4 cells")
    if sig.block_count > 2:
        return None
    code = sig.codes[1] + 2 * sig.codes[2] + 4 * sig.codes[3]
    return TYPE_FROM_CODE[code]


def deficient_subsets(
    table: OperationTable, query: SubsetQuery
) -> list[tuple[tuple[int, ...], CellSignature]]:
    """All s-subsets with exceedance <= the query cap, in lexicographic order.

    With a type filter (s=2, arity 2 only) keeps exactly the pairs of that
    type; T0 is a legitimate filter value here.
    """
    s = query.subset_size
    if s > table.order:
        raise ValueError(f"subset size {s} exceeds table order {table.order}")
    if query.type_filter is not None and table.arity != 2:
        raise ValueError("type filter only applies to arity-2 tables")
    out: list[tuple[tuple[int, ...], CellSignature]] = []
    for xs in combinations(range(table.order), s):
        sig = cell_signature(table, xs)
        if query.type_filter is not None:
            if pair_type_of_signature(sig) == query.type_filter:
                out.append((xs, sig))
            continue
        if sig.block_count - s <= query.max_exceedance:
            out.append((xs, sig))
    return out
