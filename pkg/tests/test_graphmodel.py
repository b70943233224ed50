import pytest
from hypothesis import given, settings

from graphmodel import (
    enumerate_perfect_matchings,
    graph_from_matrix,
    matching_weight,
    pfaffian_via_matchings,
    require_matching,
    superimpose_and_orient,
    superimposition_permutation_sign,
)
from model import PerfectMatching, PreconditionError, SkewMatrix
from skewmatrix import permutation_sign, pfaffian_by_elimination, principal_submatrix
from helpers import zero_sum_instances


def test_graph_from_matrix_reads_the_support(canonical_graph):
    assert canonical_graph.neighbours(4) == [1, 2, 3, 5]
    assert canonical_graph.neighbours(5) == [3, 4]
    assert not canonical_graph.has_edge(1, 5)
    assert list(canonical_graph.roots()) == [5]

def test_matchings_of_k4_in_smallest_first_order(canonical_graph):
    labels = [m.label() for m in enumerate_perfect_matchings(canonical_graph)]
    assert labels == ["1-2,3-4", "1-3,2-4", "1-4,2-3"]

def test_graph_without_perfect_matching():
    m = SkewMatrix([[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]])
    g = graph_from_matrix(m)
    assert enumerate_perfect_matchings(g) == []

def test_matching_text():
    m = PerfectMatching.from_text("2-3, 1-4")
    assert m.label() == "1-4,2-3"
    assert m.partner(3) == 2
    assert m.contains(4, 1)
    with pytest.raises(PreconditionError):
        PerfectMatching.from_text("1-2,2-3")
    with pytest.raises(PreconditionError):
        PerfectMatching.from_text("1:2")

def test_overlapping_pairs_are_named_in_the_error():
    with pytest.raises(PreconditionError, match=r"pair 2-3 is not disjoint from \[\(1, 2\)\]"):
        PerfectMatching(pair for pair in [(1, 2), (2, 3)])
    with pytest.raises(PreconditionError, match="itself"):
        PerfectMatching([(4, 4)])

def test_require_matching(canonical_graph):
    require_matching(canonical_graph, PerfectMatching.from_text("1-2,3-4"))
    with pytest.raises(PreconditionError):
        require_matching(canonical_graph, PerfectMatching.from_text("1-2"))
    with pytest.raises(PreconditionError):
        require_matching(canonical_graph, PerfectMatching.from_text("1-2,3-5"))


def test_superimposing_a_matching_on_itself_doubles_every_edge(m0):
    s = superimpose_and_orient(m0, m0)
    assert s.doubled == m0.pairs
    assert s.cycles == []
    assert s.oriented_m0 == [(1, 4), (2, 3)]
    assert s.oriented_m == [(4, 1), (3, 2)]

def test_alternating_cycle_leaves_its_minimum_along_m0(m0):
    s = superimpose_and_orient(m0, PerfectMatching.from_text("1-3,2-4"))
    assert not s.doubled
    assert s.cycles == [(1, 4, 2, 3)]
    assert s.oriented_m0 == [(1, 4), (2, 3)]
    assert s.oriented_m == [(4, 2), (3, 1)]
    assert s.out_map() == {1: 4, 4: 2, 2: 3, 3: 1}

def test_weight_of_the_doubled_configuration(canonical_matrix, canonical_graph, m0):
    weight = matching_weight(superimpose_and_orient(m0, m0), canonical_graph)
    assert weight == canonical_matrix.a(4, 1) * canonical_matrix.a(3, 2)

def test_superimposition_signs(canonical_graph):
    matchings = enumerate_perfect_matchings(canonical_graph)
    for reference in matchings:
        for m in matchings:
            s = superimpose_and_orient(reference, m)
            again = superimpose_and_orient(reference, m)
            assert (again.doubled, again.cycles, again.oriented_m0, again.oriented_m) == (
                s.doubled, s.cycles, s.oriented_m0, s.oriented_m)
            covered = [v for pair in s.doubled for v in pair] + [v for cycle in s.cycles for v in cycle]
            assert sorted(covered) == list(canonical_graph.core())
            assert sorted(s.out_map().values()) == list(canonical_graph.core())
            union_sign = superimposition_permutation_sign(s)
            assert union_sign == (-1) ** (len(s.doubled) + len(s.cycles))
            m0_sign = permutation_sign([v for edge in s.oriented_m0 for v in edge])
            m_sign = permutation_sign([v for edge in s.oriented_m for v in edge])
            assert m_sign == m0_sign * union_sign

def test_matching_sum_is_the_pfaffian_for_every_reference(canonical_matrix, canonical_graph):
    pf = pfaffian_by_elimination(principal_submatrix(canonical_matrix, 1))
    for reference in enumerate_perfect_matchings(canonical_graph):
        assert pfaffian_via_matchings(canonical_graph, reference) == pf

@settings(max_examples=50, deadline=None)
@given(zero_sum_instances(sizes=(2, 4, 6)))
def test_matching_sum_on_random_instances(m):
    g = graph_from_matrix(m)
    pf = pfaffian_by_elimination(principal_submatrix(m, m.r))
    matchings = enumerate_perfect_matchings(g)
    if not matchings:
        assert pf == 0
    for reference in matchings:
        assert pfaffian_via_matchings(g, reference) == pf
