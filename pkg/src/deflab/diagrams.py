"""Configuration diagrams: canonical forms, realizability, and invariants.

A configuration is a set of typed deficient pairs inside one groupoid; its
diagram is the labeled graph on the participating elements, with vertex
labels compressed order-preservingly to 1..v. Two diagrams are equivalent
iff their canonical forms coincide, which for totally ordered vertices is
exactly order-preserving label compression.

Realizability is decided by closure: each edge's pattern unions its 2x2
block cells into an x class and a y class and records one x != y
disequality; a diagram is the diagram of some configuration iff no
disequality collapses. The brute-force model search used to validate this
lives with the tests, not here.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Iterator, Optional

import numpy as np

from .core import (
    OperationTable,
    PairType,
    TYPE_PATTERNS,
    classify_pair,
)

__all__ = [
    "Configuration",
    "Diagram",
    "ConstraintSystem",
    "DiagramStats",
    "Lemma3Report",
    "config_of_table",
    "diagram_of",
    "canonicalize",
    "equivalent",
    "compile_constraints",
    "realizable",
    "stats",
    "enumerate_diagrams",
    "count_diagrams",
    "verify_lemma3",
    "witness_groupoid",
]

EDGE_LABELS = tuple(PairType(t) for t in range(1, 8))


@dataclass(frozen=True)
class Configuration:
    """A set of typed 2-element deficient sets of one groupoid.

    Edges are (i, j, type) with 0 <= i < j over groupoid elements. Labels
    are T1..T7; T0 edges are admitted only with allow_t0 (they never enter
    diagrams).
    """

    edges: tuple[tuple[int, int, PairType], ...]
    source_order: Optional[int] = None
    allow_t0: bool = field(default=False, compare=False)

    def __post_init__(self) -> None:
        seen: set[tuple[int, int]] = set()
        norm = []
        for i, j, t in self.edges:
            if not 0 <= i < j:
                raise ValueError(f"edge ({i}, {j}) needs 0 <= i < j")
            if self.source_order is not None and j >= self.source_order:
                raise ValueError(f"element {j} outside order {self.source_order}")
            t = PairType(t)
            if t == PairType.T0 and not self.allow_t0:
                raise ValueError("T0 edges need allow_t0=True")
            if (i, j) in seen:
                raise ValueError(f"duplicate pair ({i}, {j})")
            seen.add((i, j))
            norm.append((i, j, t))
        object.__setattr__(self, "edges", tuple(sorted(norm)))

    def is_disjoint(self) -> bool:
        used: set[int] = set()
        for i, j, _ in self.edges:
            if i in used or j in used:
                return False
            used.update((i, j))
        return True


@dataclass(frozen=True)
class Diagram:
    """Edge-labeled graph on totally ordered vertices, min degree 1.

    Canonical diagrams use vertex labels exactly 1..v; construction accepts
    any positive labels so that canonicalize has something to do.
    """

    edges: tuple[tuple[int, int, PairType], ...]

    def __post_init__(self) -> None:
        if not self.edges:
            raise ValueError("diagram needs at least one edge")
        seen: set[tuple[int, int]] = set()
        norm = []
        for a, b, t in self.edges:
            if not 1 <= a < b:
                raise ValueError(f"edge ({a}, {b}) needs 1 <= a < b")
            t = PairType(t)
            if t == PairType.T0:
                raise ValueError("diagram labels range over T1..T7")
            if (a, b) in seen:
                raise ValueError(f"duplicate edge ({a}, {b})")
            seen.add((a, b))
            norm.append((a, b, t))
        object.__setattr__(self, "edges", tuple(sorted(norm)))

    @property
    def vertices(self) -> tuple[int, ...]:
        vs: set[int] = set()
        for a, b, _ in self.edges:
            vs.update((a, b))
        return tuple(sorted(vs))

    @property
    def v(self) -> int:
        return len(self.vertices)

    @property
    def k(self) -> int:
        return len(self.edges)

    def is_canonical(self) -> bool:
        vs = self.vertices
        return vs == tuple(range(1, len(vs) + 1))

    def degrees(self) -> dict[int, int]:
        deg: dict[int, int] = {}
        for a, b, _ in self.edges:
            deg[a] = deg.get(a, 0) + 1
            deg[b] = deg.get(b, 0) + 1
        return deg

    def is_perfect_matching(self) -> bool:
        return all(d == 1 for d in self.degrees().values())

    def component_count(self) -> int:
        parent = {u: u for u in self.vertices}

        def find(u: int) -> int:
            while parent[u] != u:
                parent[u] = parent[parent[u]]
                u = parent[u]
            return u

        for a, b, _ in self.edges:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
        return len({find(u) for u in parent})

    def is_path(self) -> bool:
        deg = self.degrees()
        return (
            self.component_count() == 1
            and max(deg.values()) <= 2
            and self.k == self.v - 1
        )

    def to_json_dict(self) -> dict:
        d = canonicalize(self)
        return {"v": d.v, "edges": [[a, b, t.name] for a, b, t in d.edges]}

    @classmethod
    def from_json_dict(cls, data: dict) -> "Diagram":
        edges = tuple(
            (int(a), int(b), PairType[str(t)]) for a, b, t in data["edges"]
        )
        diagram = cls(edges=edges)
        if "v" in data and int(data["v"]) != diagram.v:
            raise ValueError(
                f"declared v={data['v']} but edges span {diagram.v} vertices"
            )
        return diagram


def config_of_table(table: OperationTable, include_t0: bool = False) -> Configuration:
    """Extract the configuration of all typed deficient pairs of a groupoid.

    T0 pairs are dropped unless include_t0 is set; they never matter for
    the limit and are excluded from diagrams either way.
    """
    if table.arity != 2:
        raise ValueError(f"configurations need arity 2, got {table.arity}")
    edges = []
    for i in range(table.order - 1):
        for j in range(i + 1, table.order):
            t = classify_pair(table, i, j)
            if t is None:
                continue
            if t == PairType.T0 and not include_t0:
                continue
            edges.append((i, j, t))
    return Configuration(
        edges=tuple(edges), source_order=table.order, allow_t0=include_t0
    )


def diagram_of(config: Configuration) -> Diagram:
    """The diagram of a configuration: endpoints compressed to 1..v."""
    if not config.edges:
        raise ValueError("cannot take the diagram of an empty configuration")
    if any(t == PairType.T0 for _, _, t in config.edges):
        raise ValueError("T0 edges do not enter diagrams")
    verts = sorted({u for i, j, _ in config.edges for u in (i, j)})
    relabel = {u: r + 1 for r, u in enumerate(verts)}
    return Diagram(
        edges=tuple((relabel[i], relabel[j], t) for i, j, t in config.edges)
    )


def canonicalize(diagram: Diagram) -> Diagram:
    """Compress vertex labels order-preservingly to 1..v. Idempotent."""
    verts = diagram.vertices
    relabel = {u: r + 1 for r, u in enumerate(verts)}
    return Diagram(
        edges=tuple((relabel[a], relabel[b], t) for a, b, t in diagram.edges)
    )


def equivalent(d1: Diagram, d2: Diagram) -> bool:
    """Order- and label-preserving isomorphism, via canonical forms."""
    return canonicalize(d1) == canonicalize(d2)


@dataclass
class ConstraintSystem:
    """Equality classes plus disequalities over the constrained Cayley cells.

    cells lists the (row, col) coordinates over diagram vertices that some
    edge's 2x2 block touches; parent is the closed union-find over cell
    ids; neq holds one (x-cell, y-cell) id pair per edge.
    """

    cells: tuple[tuple[int, int], ...]
    parent: list[int]
    neq: tuple[tuple[int, int], ...]

    def find(self, cid: int) -> int:
        p = self.parent
        while p[cid] != cid:
            p[cid] = p[p[cid]]
            cid = p[cid]
        return cid

    def class_count(self) -> int:
        return len({self.find(i) for i in range(len(self.cells))})

    def classes(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """Cell coordinates grouped by equality class, ordered by first cell."""
        groups: dict[int, list[tuple[int, int]]] = {}
        for cid, cell in enumerate(self.cells):
            groups.setdefault(self.find(cid), []).append(cell)
        return tuple(tuple(g) for _, g in sorted(groups.items()))

    def consistent(self) -> bool:
        return all(self.find(a) != self.find(b) for a, b in self.neq)


def compile_constraints(diagram: Diagram) -> ConstraintSystem:
    """Assemble the cell equality/disequality system induced by the labels.

    Each edge (a, b, t) contributes cells (a,a), (a,b), (b,a), (b,b); the
    pattern of t unions the cells within its x block and within its y
    block and records the x/y disequality. Distinct edges interact only
    through shared diagonal cells.
    """
    cell_id: dict[tuple[int, int], int] = {}

    def cid(cell: tuple[int, int]) -> int:
        if cell not in cell_id:
            cell_id[cell] = len(cell_id)
        return cell_id[cell]

    parent: list[int] = []

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x: int, y: int) -> None:
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[max(rx, ry)] = min(rx, ry)

    neq: list[tuple[int, int]] = []
    for a, b, t in diagram.edges:
        block = ((a, a), (a, b), (b, a), (b, b))
        ids = []
        for cell in block:
            i = cid(cell)
            if i == len(parent):
                parent.append(i)
            ids.append(i)
        pattern = TYPE_PATTERNS[t]
        x_cells = [ids[s] for s in range(4) if pattern[s] == 0]
        y_cells = [ids[s] for s in range(4) if pattern[s] == 1]
        for other in x_cells[1:]:
            union(x_cells[0], other)
        for other in y_cells[1:]:
            union(y_cells[0], other)
        neq.append((x_cells[0], y_cells[0]))
    cells = tuple(sorted(cell_id, key=cell_id.__getitem__))
    return ConstraintSystem(cells=cells, parent=parent, neq=tuple(neq))


def realizable(diagram: Diagram) -> bool:
    """True iff some configuration in some groupoid has this diagram."""
    return compile_constraints(diagram).consistent()


@dataclass(frozen=True)
class DiagramStats:
    """The configuration invariants: parameters, cells, elements, edges, parts."""

    alpha: int
    beta: int
    gamma: int
    k: int
    c: int


def stats(diagram: Diagram) -> DiagramStats:
    """alpha = equality-class count, beta = constrained cells, gamma = v."""
    system = compile_constraints(diagram)
    return DiagramStats(
        alpha=system.class_count(),
        beta=len(system.cells),
        gamma=diagram.v,
        k=diagram.k,
        c=diagram.component_count(),
    )


def _base_graphs(k: int) -> Iterator[tuple[tuple[int, int], ...]]:
    """All k-edge graphs on vertex set {1..v} using every vertex, v <= 2k."""
    v_min = next(v for v in range(2, 2 * k + 1) if v * (v - 1) // 2 >= k)
    for v in range(v_min, 2 * k + 1):
        all_pairs = list(combinations(range(1, v + 1), 2))
        for edge_set in combinations(all_pairs, k):
            used = {u for e in edge_set for u in e}
            if len(used) == v:
                yield edge_set


MAX_ENUM_EDGES = 4


def enumerate_diagrams(k: int, realizable_only: bool = False) -> list[Diagram]:
    """All canonical k-edge diagrams, optionally filtered to realizable ones.

    Deterministic order: vertex count ascending, then edge set, then label
    assignment. Guarded at k <= 4; the label space alone is 7^k per base
    graph.
    """
    if not 1 <= k <= MAX_ENUM_EDGES:
        raise ValueError(f"k must be in [1, {MAX_ENUM_EDGES}], got {k}")
    out = []
    for edge_set in _base_graphs(k):
        for labels in product(EDGE_LABELS, repeat=k):
            d = Diagram(
                edges=tuple((a, b, t) for (a, b), t in zip(edge_set, labels))
            )
            if realizable_only and not realizable(d):
                continue
            out.append(d)
    return out


def count_diagrams(k: int, realizable_only: bool = False) -> int:
    """Count of enumerate_diagrams(k, ...) without materializing the labels.

    Realizability depends only on which edges carry a diagonal-EQUAL label
    ({T2,T3,T7}) versus a diagonal-UNEQUAL one, so each base graph needs
    only 2^k closure runs, each weighted 3^(#equal) * 4^(#unequal). The
    enumeration path cross-checks this for k <= 3 in the tests.
    """
    if not 1 <= k <= MAX_ENUM_EDGES:
        raise ValueError(f"k must be in [1, {MAX_ENUM_EDGES}], got {k}")
    total = 0
    for edge_set in _base_graphs(k):
        if not realizable_only:
            total += 7**k
            continue
        for unequal_mask in range(2**k):
            labels = tuple(
                PairType.T5 if unequal_mask >> e & 1 else PairType.T7
                for e in range(k)
            )
            d = Diagram(edges=tuple((a, b, t) for (a, b), t in zip(edge_set, labels)))
            if realizable(d):
                n_unequal = bin(unequal_mask).count("1")
                total += 4**n_unequal * 3 ** (k - n_unequal)
    return total


@dataclass(frozen=True)
class Lemma3Report:
    checked: int
    violations: tuple[dict, ...]

    def ok(self) -> bool:
        return not self.violations

    def to_json_dict(self) -> dict:
        return {"checked": self.checked, "violations": list(self.violations)}


def check_stats_relations(diagram: Diagram) -> list[str]:
    """Names of the invariant relations a (realizable) diagram violates."""
    st = stats(diagram)
    matching = diagram.is_perfect_matching()
    failures = []
    if st.alpha > st.k + st.c:
        failures.append("alpha <= k + c")
    if matching and st.alpha != 2 * st.k:
        failures.append("matching => alpha = 2k")
    if st.beta != 2 * st.k + diagram.v:
        failures.append("beta = 2k + v")
    if st.gamma != diagram.v:
        failures.append("gamma = v")
    if st.c > st.k:
        failures.append("c <= k")
    if (st.c == st.k) != matching:
        failures.append("c = k <=> matching")
    if diagram.is_path() and st.alpha != diagram.v:
        failures.append("path => alpha = v")
    return failures


def verify_lemma3(k_max: int) -> Lemma3Report:
    """Check the invariant relations over all realizable diagrams with <= k_max edges."""
    if not 1 <= k_max <= 3:
        raise ValueError(f"k_max must be in [1, 3], got {k_max}")
    checked = 0
    violations: list[dict] = []
    for k in range(1, k_max + 1):
        for d in enumerate_diagrams(k, realizable_only=True):
            checked += 1
            failed = check_stats_relations(d)
            if failed:
                violations.append({"diagram": d.to_json_dict(), "failed": failed})
    return Lemma3Report(checked=checked, violations=tuple(violations))


def witness_groupoid(diagram: Diagram) -> OperationTable:
    """A smallest-order groupoid whose deficient pairs include this diagram.

    Vertices 1..v map to elements 0..v-1; every equality class of the
    constraint system gets its own value, so each edge's pair comes out
    with exactly its label. Order is max(v, alpha); unconstrained cells
    are filled with 0.
    """
    d = canonicalize(diagram)
    system = compile_constraints(d)
    if not system.consistent():
        raise ValueError("diagram is not realizable by any configuration")
    class_value: dict[int, int] = {}
    for cid in range(len(system.cells)):
        root = system.find(cid)
        if root not in class_value:
            class_value[root] = len(class_value)
    alpha = len(class_value)
    n = max(d.v, alpha)
    entries = np.zeros(n * n, dtype=np.int64)
    for cid, (u, w) in enumerate(system.cells):
        entries[(u - 1) * n + (w - 1)] = class_value[system.find(cid)]
    return OperationTable(order=n, arity=2, entries=entries)
