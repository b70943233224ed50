import logging
from fractions import Fraction
from itertools import product
from typing import Iterator

from algorithms import iter_out_maps, strip_paths
from graphmodel import enumerate_perfect_matchings, require_matching
from model import *
from skewmatrix import permutation_sign

logger = logging.getLogger(__name__)


def enumerate_spanning_forests(g: RootedGraph) -> list[SpanningForest]:
    if g.r < 1:
        raise PreconditionError("spanning forests need at least one root")
    choices = {v: g.neighbours(v) for v in g.core()}
    forests = [SpanningForest(out, g.n) for out in iter_out_maps(choices, acyclic=True)]
    logger.debug("%d spanning forests", len(forests))
    return forests

def iter_compatible_assignments(g: RootedGraph, m0: PerfectMatching, acyclic: bool) -> Iterator[dict[int, int]]:
    """Out-maps containing every pair of m0.

    Each pair picks the endpoint carrying the m0 edge; the other endpoint
    leaves along any edge except back to its partner.
    """
    for tails in product(*m0.sorted_pairs()):
        choices = {}
        for tail in tails:
            head = m0.partner(tail)
            choices[tail] = [head]
            choices[head] = [w for w in g.neighbours(head) if w != tail]
        yield from iter_out_maps(choices, acyclic)

def compatible_forests(g: RootedGraph, m0: PerfectMatching) -> list[SpanningForest]:
    require_matching(g, m0)
    return [SpanningForest(out, g.n) for out in iter_compatible_assignments(g, m0, acyclic=True)]

def is_compatible(f: Configuration, m0: PerfectMatching) -> bool:
    return m0.pairs <= f.undirected_edges()

def trim(f: Configuration, m0: PerfectMatching | None = None) -> PathDecomposition:
    paths = strip_paths(f.out)
    flags = None if m0 is None else [m0.contains(path[0], path[1]) for path in paths]
    return PathDecomposition(paths, flags)

def paths_satisfy_condition_C(decomposition: PathDecomposition, m0: PerfectMatching | None) -> bool:
    if not decomposition.all_even():
        return False
    if m0 is None:
        return True
    if not all(decomposition.starts_with_m0):
        return False
    for path in decomposition.paths:
        kinds = [m0.contains(path[k], path[k + 1]) for k in range(len(path) - 1)]
        if kinds != [k % 2 == 0 for k in range(len(kinds))]:
            raise InvariantError(f"trimmed path {path} is not alternating", {"path": list(path)})
    return True

def satisfies_condition_C(f: Configuration, m0: PerfectMatching | None = None) -> bool:
    return paths_satisfy_condition_C(trim(f, m0), m0)

def forest_sign(f: Configuration, m0: PerfectMatching) -> int:
    description = []
    for i, j in m0.sorted_pairs():
        description += [i, j] if f.out.get(i) == j else [j, i]
    return permutation_sign(description)

def half_edges(f: Configuration, m0: PerfectMatching) -> list[tuple[int, int]]:
    return [(v, w) for v, w in f.out.items() if not m0.contains(v, w)]

def half_forest_family(g: RootedGraph, m0: PerfectMatching) -> list[SpanningForest]:
    family = [f for f in compatible_forests(g, m0) if satisfies_condition_C(f, m0)]
    logger.debug("%d half-forests for %s", len(family), m0.label())
    return family

def half_forest_weight(f: Configuration, m0: PerfectMatching, g: RootedGraph) -> Fraction:
    return forest_sign(f, m0) * g.product(half_edges(f, m0))

def pfaffian_via_half_forests(g: RootedGraph, m0: PerfectMatching) -> Fraction:
    return sum((half_forest_weight(f, m0, g) for f in half_forest_family(g, m0)), Fraction(0))

def reconstruct_matching(f: Configuration) -> PerfectMatching | None:
    """Matching read off the edges at even positions of the trimmed paths, when they are all even."""
    decomposition = trim(f)
    if not decomposition.all_even():
        return None
    pairs = [(path[k], path[k + 1]) for path in decomposition.paths for k in range(0, len(path) - 1, 2)]
    try:
        matching = PerfectMatching(pairs)
    except PreconditionError:
        return None
    if matching.covers() != set(f.out):
        return None
    return matching

def intrinsic_family(g: RootedGraph) -> list[SpanningForest]:
    return [f for f in enumerate_spanning_forests(g) if satisfies_condition_C(f)]

def determinant_via_forests(g: RootedGraph) -> Fraction:
    """det(A) from the half-forest families of every reference matching and from the intrinsic family.

    Both sums must agree and the families must partition the intrinsic one.
    """
    owner: dict[SpanningForest, PerfectMatching] = {}
    for m0 in enumerate_perfect_matchings(g):
        for f in half_forest_family(g, m0):
            if f in owner:
                raise InvariantError(
                    f"{f!r} lies in the families of {owner[f].label()} and {m0.label()}",
                    {"forest": f.to_dict(), "matchings": [owner[f].label(), m0.label()]},
                )
            owner[f] = m0
    by_matchings = sum((g.product(f.edges()) for f in owner), Fraction(0))

    intrinsic = intrinsic_family(g)
    if set(intrinsic) != set(owner):
        raise InvariantError(
            "intrinsic family differs from the union of half-forest families",
            {
                "only_intrinsic": [f.to_dict() for f in set(intrinsic) - set(owner)],
                "only_families": [f.to_dict() for f in set(owner) - set(intrinsic)],
            },
        )
    for f in intrinsic:
        if reconstruct_matching(f) != owner[f]:
            raise InvariantError(f"matching rebuilt from {f!r} is not {owner[f].label()}", {"forest": f.to_dict()})
    by_intrinsic = sum((g.product(f.edges()) for f in intrinsic), Fraction(0))
    if by_matchings != by_intrinsic:
        raise InvariantError(
            "forest sums disagree",
            {"by_matchings": format_rational(by_matchings), "by_intrinsic": format_rational(by_intrinsic)},
        )
    return by_matchings
