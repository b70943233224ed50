import logging
from fractions import Fraction

from sympy.combinatorics import Permutation

from model import *
from skewmatrix import permutation_sign

logger = logging.getLogger(__name__)


def graph_from_matrix(m: SkewMatrix) -> RootedGraph:
    weights = {}
    for i in range(m.size):
        for j in range(m.size):
            if i != j and m.entries[i, j] != 0:
                weights[(i + 1, j + 1)] = m.entries[i, j]
    return RootedGraph(m.n, m.r, weights)

def require_matching(g: RootedGraph, m0: PerfectMatching) -> None:
    if m0.covers() != set(g.core()):
        raise PreconditionError(f"{m0.label()} does not cover the vertices 1..{g.n}")
    missing = [pair for pair in m0.sorted_pairs() if not g.has_edge(*pair)]
    if missing:
        raise PreconditionError(f"pairs {missing} of {m0.label()} are not edges of the graph")

def enumerate_perfect_matchings(g: RootedGraph) -> list[PerfectMatching]:
    def extend(unmatched: list[int]):
        if not unmatched:
            yield []
            return
        first = unmatched[0]
        for partner in unmatched[1:]:
            if g.has_edge(first, partner):
                rest = [v for v in unmatched if v != first and v != partner]
                for tail in extend(rest):
                    yield [(first, partner)] + tail

    matchings = [PerfectMatching(pairs) for pairs in extend(list(g.core()))]
    logger.debug("%d perfect matchings on %d vertices", len(matchings), g.n)
    return matchings

def superimpose_and_orient(m0: PerfectMatching, m: PerfectMatching) -> OrientedSuperimposition:
    """Splits M0 ∪ M into doubled edges and alternating cycles.

    A doubled edge is oriented from its smaller vertex in M0 and back in M.
    A cycle starts at its smallest vertex and leaves it along its M0 edge.
    """
    s = OrientedSuperimposition(m0, m)
    visited: set[int] = set()
    for v in sorted(m0.covers()):
        if v in visited:
            continue
        partner = m0.partner(v)
        if m.partner(v) == partner:
            s.oriented_m0.append((v, partner))
            s.oriented_m.append((partner, v))
            visited.update((v, partner))
            continue
        cycle = [v]
        x = partner
        use_m = True
        while x != v:
            cycle.append(x)
            x = m.partner(x) if use_m else m0.partner(x)
            use_m = not use_m
        for k in range(len(cycle)):
            edge = (cycle[k], cycle[(k + 1) % len(cycle)])
            (s.oriented_m0 if k % 2 == 0 else s.oriented_m).append(edge)
        s.cycles.append(tuple(cycle))
        visited.update(cycle)
    return s

def superimposition_permutation_sign(s: OrientedSuperimposition) -> int:
    """Sign of the permutation whose cycles are those of M0 ∪ M, doubled edges as transpositions."""
    cycles = [[v - 1 for v in cycle] for cycle in s.cycles]
    cycles += [[v - 1 for v in sorted(pair)] for pair in s.doubled]
    size = len(s.m0.covers())
    if size == 0:
        return 1
    return Permutation(cycles, size=size).signature()

def matching_weight(s: OrientedSuperimposition, g: RootedGraph) -> Fraction:
    sign = permutation_sign([v for edge in s.oriented_m0 for v in edge])
    sign *= (-1) ** (len(s.doubled) + len(s.cycles))
    return sign * g.product(s.oriented_m)

def pfaffian_via_matchings(g: RootedGraph, m0: PerfectMatching) -> Fraction:
    require_matching(g, m0)
    total = Fraction(0)
    for m in enumerate_perfect_matchings(g):
        total += matching_weight(superimpose_and_orient(m0, m), g)
    return total
