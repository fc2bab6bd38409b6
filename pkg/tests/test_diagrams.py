from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from deflab.combinatorics import (
    disjoint_pair_class_count,
    nondisjoint_class_bound,
)
from deflab.core import (
    DIAGONAL_UNEQUAL_TYPES,
    OperationTable,
    PairType,
    parse_table,
)
from deflab.diagrams import (
    Configuration,
    Diagram,
    canonicalize,
    check_stats_relations,
    compile_constraints,
    config_of_table,
    count_diagrams,
    diagram_of,
    enumerate_diagrams,
    equivalent,
    realizable,
    stats,
    verify_lemma3,
    witness_groupoid,
)

from oracles import brute_force_equivalent, brute_force_realizable

T = PairType


def edge_labels(*names):
    return tuple(PairType[n] for n in names)


@st.composite
def small_diagrams(draw):
    k = draw(st.integers(1, 3))
    pool = [(a, b) for a in range(1, 7) for b in range(a + 1, 8)]
    pairs = draw(st.lists(st.sampled_from(pool), min_size=k, max_size=k, unique=True))
    labels = draw(st.lists(st.sampled_from(list(range(1, 8))), min_size=k, max_size=k))
    return Diagram(edges=tuple((a, b, PairType(t)) for (a, b), t in zip(pairs, labels)))


class TestDiagramOf:
    def test_single_edge_compression(self):
        cfg = Configuration(edges=((2, 5, T.T1),))
        d = diagram_of(cfg)
        assert d.edges == ((1, 2, T.T1),)
        assert d.v == 2

    def test_disjoint_is_matching(self):
        cfg = Configuration(edges=((1, 2, T.T1), (3, 4, T.T7)))
        d = diagram_of(cfg)
        assert d.is_perfect_matching()
        assert cfg.is_disjoint()

    def test_shared_vertex_path(self):
        cfg = Configuration(edges=((1, 2, T.T1), (2, 3, T.T4)))
        d = diagram_of(cfg)
        assert not d.is_perfect_matching()
        assert not cfg.is_disjoint()
        assert (d.component_count(), d.k, d.v) == (1, 2, 3)

    @given(small_diagrams())
    @settings(max_examples=60)
    def test_matching_iff_disjoint(self, d):
        cfg = Configuration(edges=tuple((a - 1, b - 1, t) for a, b, t in d.edges))
        assert diagram_of(cfg).is_perfect_matching() == cfg.is_disjoint()

    def test_empty_config_rejected(self):
        with pytest.raises(ValueError):
            diagram_of(Configuration(edges=()))


class TestCanonical:
    def test_gap_compression_equivalent(self):
        assert equivalent(
            Diagram(edges=((1, 3, T.T2),)), Diagram(edges=((1, 2, T.T2),))
        )

    def test_labels_distinguish(self):
        assert not equivalent(
            Diagram(edges=((1, 2, T.T1),)), Diagram(edges=((1, 2, T.T2),))
        )

    def test_shared_vertex_position_matters(self):
        a = Diagram(edges=((1, 2, T.T1), (2, 3, T.T4)))
        b = Diagram(edges=((1, 3, T.T1), (2, 3, T.T4)))
        assert not equivalent(a, b)
        assert not brute_force_equivalent(a, b)

    @given(small_diagrams())
    @settings(max_examples=80)
    def test_canonicalize_idempotent(self, d):
        c = canonicalize(d)
        assert canonicalize(c) == c
        assert c.is_canonical()
        assert equivalent(d, c)

    @given(small_diagrams(), small_diagrams())
    @settings(max_examples=80)
    def test_equivalence_matches_brute_force(self, d1, d2):
        assert equivalent(d1, d2) == brute_force_equivalent(d1, d2)

    def test_validation(self):
        with pytest.raises(ValueError):
            Diagram(edges=())
        with pytest.raises(ValueError):
            Diagram(edges=((2, 1, T.T1),))
        with pytest.raises(ValueError):
            Diagram(edges=((1, 2, T.T0),))
        with pytest.raises(ValueError):
            Diagram(edges=((1, 2, T.T1), (1, 2, T.T2)))


class TestConstraints:
    def test_single_t1(self):
        sys_ = compile_constraints(Diagram(edges=((1, 2, T.T1),)))
        assert len(sys_.cells) == 4
        assert sys_.class_count() == 2
        assert sys_.classes() == (((1, 1),), ((1, 2), (2, 1), (2, 2)))
        assert len(sys_.neq) == 1

    def test_t7_classes(self):
        sys_ = compile_constraints(Diagram(edges=((1, 2, T.T7),)))
        assert sys_.classes() == (((1, 1), (2, 2)), ((1, 2), (2, 1)))

    def test_t1_path(self):
        sys_ = compile_constraints(Diagram(edges=((1, 2, T.T1), (2, 3, T.T1))))
        assert len(sys_.cells) == 7
        assert sys_.class_count() == 3


class TestRealizability:
    def test_single_edges(self):
        for t in range(1, 8):
            assert realizable(Diagram(edges=((1, 2, PairType(t)),)))

    def test_unrealizable_triangle(self):
        d = Diagram(edges=((1, 2, T.T7), (2, 3, T.T7), (1, 3, T.T1)))
        assert not realizable(d)
        assert not brute_force_realizable(d)

    def test_remark_triangle_t1_t4_t7(self):
        d = Diagram(edges=((1, 2, T.T1), (2, 3, T.T4), (1, 3, T.T7)))
        assert realizable(d)
        assert brute_force_realizable(d)

    def test_oracle_agreement_all_k2(self):
        for d in enumerate_diagrams(2):
            assert realizable(d) == brute_force_realizable(d)

    def test_oracle_agreement_all_triangles(self):
        unrealizable = 0
        for labels in product(range(1, 8), repeat=3):
            d = Diagram(
                edges=(
                    (1, 2, PairType(labels[0])),
                    (2, 3, PairType(labels[1])),
                    (1, 3, PairType(labels[2])),
                )
            )
            fast = realizable(d)
            assert fast == brute_force_realizable(d)
            if not fast:
                unrealizable += 1
                # exactly one diagonal-UNEQUAL edge
            parity = sum(1 for t in labels if PairType(t) in DIAGONAL_UNEQUAL_TYPES)
            assert fast == (parity != 1)
        assert unrealizable == 108  # = 3 * 4 * 9


class TestStats:
    def test_single_edge(self):
        st_ = stats(Diagram(edges=((1, 2, T.T3),)))
        assert (st_.alpha, st_.beta, st_.gamma, st_.k, st_.c) == (2, 4, 2, 1, 1)

    def test_disjoint_matching(self):
        st_ = stats(Diagram(edges=((1, 2, T.T1), (3, 4, T.T7))))
        assert (st_.alpha, st_.beta, st_.gamma) == (4, 8, 4)

    def test_three_vertex_path(self):
        st_ = stats(Diagram(edges=((1, 2, T.T1), (2, 3, T.T4))))
        assert (st_.alpha, st_.beta, st_.gamma, st_.c, st_.k) == (3, 7, 3, 1, 2)

    def test_alpha_can_exceed_v(self):
        d = Diagram(edges=((1, 2, T.T7), (2, 3, T.T7), (1, 3, T.T7)))
        assert stats(d).alpha == 4


class TestEnumeration:
    def test_k1(self):
        got = enumerate_diagrams(1)
        assert len(got) == 7
        assert {d.edges[0][2] for d in got} == set(PairType) - {T.T0}

    def test_k2_census(self):
        got = enumerate_diagrams(2)
        assert len(got) == 294
        bases = {tuple((a, b) for a, b, _ in d.edges) for d in got}
        assert len(bases) == 6
        matchings = [d for d in got if d.is_perfect_matching()]
        assert len(matchings) == 147 == disjoint_pair_class_count(2)

    def test_k2_all_realizable(self):
        assert len(enumerate_diagrams(2, realizable_only=True)) == 294

    def test_k3_unrealizable_count(self):
        assert len(enumerate_diagrams(3)) - len(
            enumerate_diagrams(3, realizable_only=True)
        ) == 108

    def test_deterministic_order(self):
        assert enumerate_diagrams(2) == enumerate_diagrams(2)

    def test_guard(self):
        with pytest.raises(ValueError):
            enumerate_diagrams(0)
        with pytest.raises(ValueError):
            enumerate_diagrams(5)

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_count_matches_enumeration(self, k):
        assert count_diagrams(k) == len(enumerate_diagrams(k))
        assert count_diagrams(k, realizable_only=True) == len(
            enumerate_diagrams(k, realizable_only=True)
        )

    def test_bound_dominates(self):
        for k in (1, 2, 3):
            assert nondisjoint_class_bound(k) >= count_diagrams(k)


class TestLemma3:
    def test_k1(self):
        rep = verify_lemma3(1)
        assert rep.checked == 7 and rep.ok()

    def test_k2(self):
        rep = verify_lemma3(2)
        assert rep.checked == 7 + 294 and rep.ok()

    def test_k3(self):
        rep = verify_lemma3(3)
        assert rep.checked == 7 + 294 + count_diagrams(3, realizable_only=True)
        assert rep.ok()

    def test_relation_checker_flags_nothing_on_paths(self):
        d = Diagram(edges=((1, 2, T.T5), (2, 3, T.T6), (3, 4, T.T1)))
        assert d.is_path()
        assert check_stats_relations(d) == []
        assert stats(d).alpha == d.v

    def test_guard(self):
        with pytest.raises(ValueError):
            verify_lemma3(4)


class TestWitness:
    def test_t5_projection(self):
        t = witness_groupoid(Diagram(edges=((1, 2, T.T5),)))
        assert t.order == 2
        assert list(t.entries) == [0, 0, 1, 1]

    def test_t7_xor(self):
        t = witness_groupoid(Diagram(edges=((1, 2, T.T7),)))
        assert list(t.entries) == [0, 1, 1, 0]

    def test_unrealizable_rejected(self):
        with pytest.raises(ValueError, match="not realizable"):
            witness_groupoid(
                Diagram(edges=((1, 2, T.T7), (2, 3, T.T7), (1, 3, T.T1)))
            )

    @pytest.mark.parametrize("k", [1, 2])
    def test_witness_contains_diagram(self, k):
        for d in enumerate_diagrams(k, realizable_only=True):
            table = witness_groupoid(d)
            cfg = config_of_table(table)
            present = {(i + 1, j + 1, t) for i, j, t in cfg.edges}
            assert set(d.edges) <= present

    def test_witness_triangle_needs_four_elements(self):
        d = Diagram(edges=((1, 2, T.T7), (2, 3, T.T7), (1, 3, T.T7)))
        table = witness_groupoid(d)
        assert table.order == 4
        present = {(i + 1, j + 1, t) for i, j, t in config_of_table(table).edges}
        assert set(d.edges) <= present


class TestConfigOfTable:
    def test_xor(self):
        cfg = config_of_table(parse_table("2\n0 1\n1 0"))
        assert cfg.edges == ((0, 1, T.T7),)

    def test_constant_empty_by_default(self):
        t = OperationTable(order=3, arity=2, entries=np.zeros(9, dtype=np.int64))
        assert config_of_table(t).edges == ()
        with_t0 = config_of_table(t, include_t0=True)
        assert len(with_t0.edges) == 3
        assert all(t_ == T.T0 for _, _, t_ in with_t0.edges)

    def test_projection_order3(self):
        ent = np.array([[i] * 3 for i in range(3)], dtype=np.int64).ravel()
        cfg = config_of_table(OperationTable(order=3, arity=2, entries=ent))
        assert len(cfg.edges) == 3
        assert all(t_ == T.T5 for _, _, t_ in cfg.edges)

    def test_arity_guard(self):
        t = OperationTable(order=2, arity=3, entries=np.zeros(8, dtype=np.int64))
        with pytest.raises(ValueError):
            config_of_table(t)


def test_exhaustive_order3_lemma3_and_realizability():
    """Every configuration of every order-3 groupoid obeys the invariants."""
    verdicts = {}
    checked_tables = 0
    for flat in product(range(3), repeat=9):
        table = OperationTable(order=3, arity=2, entries=np.array(flat, dtype=np.int64))
        cfg = config_of_table(table)
        checked_tables += 1
        if not cfg.edges:
            continue
        key = cfg.edges
        if key not in verdicts:
            d = diagram_of(cfg)
            verdicts[key] = realizable(d) and not check_stats_relations(d)
        assert verdicts[key]
    assert checked_tables == 3**9
    assert len(verdicts) > 50  # plenty of distinct configurations exercised


def test_diagram_json_round_trip():
    d = Diagram(edges=((1, 2, T.T1), (2, 3, T.T4)))
    data = d.to_json_dict()
    assert data == {"v": 3, "edges": [[1, 2, "T1"], [2, 3, "T4"]]}
    assert Diagram.from_json_dict(data) == d
    with pytest.raises(ValueError):
        Diagram.from_json_dict({"v": 9, "edges": [[1, 2, "T1"]]})
