import logging
from fractions import Fraction
from itertools import combinations

import networkx as nx
import numpy as np
import sympy
from sympy import factorial2

from config import *
from forests import compatible_forests, forest_sign, half_edges, half_forest_family, satisfies_condition_C
from model import *
from skewmatrix import iter_pairings, permutation_sign, pfaffian_by_pairings, random_rational

logger = logging.getLogger(__name__)


def _triples(v_count: int) -> list[tuple[int, int, int]]:
    return list(combinations(range(1, v_count + 1), 3))

def _require_odd(v_count: int) -> None:
    if v_count < 3 or v_count % 2 == 0:
        raise PreconditionError(f"vertex count must be odd and at least 3, got {v_count}")
    if v_count > HYPERGRAPH_MAX_VERTICES:
        raise PreconditionError(f"vertex count {v_count} exceeds {HYPERGRAPH_MAX_VERTICES}")


# Alternating weights y_ijk on the triples of 1..v_count, stored once per sorted triple
class HyperWeights:
    def __init__(self, v_count: int, values: dict[tuple[int, int, int], object]):
        self.v_count = v_count
        self.values = {tuple(sorted(triple)): value for triple, value in values.items()}

    @classmethod
    def random(cls, v_count: int, seed: int = DEFAULT_SEED, value_range: int = DEFAULT_VALUE_RANGE) -> "HyperWeights":
        rng = np.random.default_rng(seed)
        return cls(v_count, {triple: random_rational(rng, value_range) for triple in _triples(v_count)})

    @classmethod
    def symbolic(cls, v_count: int) -> "HyperWeights":
        return cls(v_count, {triple: sympy.Symbol("y_{}_{}_{}".format(*triple)) for triple in _triples(v_count)})

    def value(self, i: int, j: int, k: int):
        if len({i, j, k}) < 3:
            return 0
        return permutation_sign([i, j, k]) * self.values.get(tuple(sorted((i, j, k))), 0)


def hyper_matrix(y: HyperWeights) -> np.ndarray:
    """a_ij = Σ_k y_ijk; rational or symbolic depending on the weights."""
    size = y.v_count
    entries = np.zeros((size, size), dtype=object)
    for i in range(1, size + 1):
        for j in range(1, size + 1):
            total = 0
            for k in range(1, size + 1):
                total = total + y.value(i, j, k)
            entries[i - 1, j - 1] = total
    return entries

def matrix_from_hyperweights(y: HyperWeights) -> SkewMatrix:
    return SkewMatrix(hyper_matrix(y), n=y.v_count - 1, r=1, zero_sum=True)


class ThreeGraphTree:
    def __init__(self, hyperedges):
        self.hyperedges: frozenset[tuple[int, int, int]] = frozenset(tuple(sorted(t)) for t in hyperedges)

    def label(self) -> str:
        return ",".join("".join(str(v) for v in t) for t in sorted(self.hyperedges))

    def monomial(self, y: HyperWeights):
        total = 1
        for triple in sorted(self.hyperedges):
            total = total * y.values[triple]
        return total

    def __eq__(self, other) -> bool:
        if not isinstance(other, ThreeGraphTree):
            return NotImplemented
        return self.hyperedges == other.hyperedges

    def __hash__(self) -> int:
        return hash(self.hyperedges)

    def __repr__(self) -> str:
        return f"ThreeGraphTree({self.label()})"


def _bipartite(v_count: int, hyperedges) -> nx.Graph:
    graph = nx.Graph()
    graph.add_nodes_from(("v", i) for i in range(1, v_count + 1))
    for triple in hyperedges:
        graph.add_edges_from((("e", triple), ("v", i)) for i in triple)
    return graph

def enumerate_3graph_trees(v_count: int) -> list[ThreeGraphTree]:
    _require_odd(v_count)
    trees = [
        ThreeGraphTree(choice)
        for choice in combinations(_triples(v_count), (v_count - 1) // 2)
        if nx.is_tree(_bipartite(v_count, choice))
    ]
    logger.debug("%d spanning trees of the complete 3-graph on %d vertices", len(trees), v_count)
    return trees

def tree_count_formula(v_count: int) -> int:
    n = v_count - 1
    return v_count ** (n // 2 - 1) * int(factorial2(n - 1))


class MVReport:
    def __init__(self, v_count: int):
        self.v_count = v_count
        self.tree_count = 0
        self.signs: dict[ThreeGraphTree, int] = {}
        self.extra: list[str] = []
        self.missing: list[str] = []
        self.non_unit: list[str] = []

    @property
    def passed(self) -> bool:
        return not self.extra and not self.missing and not self.non_unit

    # Σ_T sgn(T) Π_{ijk ∈ T} y_ijk for numeric weights
    def evaluate(self, y: HyperWeights) -> Fraction:
        return sum((sign * Fraction(tree.monomial(y)) for tree, sign in self.signs.items()), Fraction(0))

    def to_dict(self) -> dict:
        return {
            "vertices": self.v_count,
            "passed": self.passed,
            "trees": self.tree_count,
            "signs": {tree.label(): sign for tree, sign in sorted(self.signs.items(), key=lambda item: item[0].label())},
            "extra": self.extra,
            "missing": self.missing,
            "non_unit": self.non_unit,
        }

def verify_mv_identity(v_count: int) -> MVReport:
    """Expands the Pfaffian of the symbolic minor and compares its monomials with the 3-graph trees.

    The coefficient of each tree monomial is reported as the sign of that tree.
    """
    _require_odd(v_count)
    y = HyperWeights.symbolic(v_count)
    minor = hyper_matrix(y)[:-1, :-1]
    generators = [y.values[triple] for triple in _triples(v_count)]
    polynomial = sympy.Poly(sympy.expand(pfaffian_by_pairings(minor)), *generators)

    report = MVReport(v_count)
    trees = {tree.hyperedges: tree for tree in enumerate_3graph_trees(v_count)}
    report.tree_count = len(trees)
    for exponents, coefficient in polynomial.terms():
        if coefficient == 0:
            continue
        support = frozenset(triple for triple, power in zip(_triples(v_count), exponents) if power)
        tree = trees.get(support) if set(exponents) <= {0, 1} else None
        if tree is None:
            report.extra.append(str(sympy.Mul(*[g ** p for g, p in zip(generators, exponents)])))
            continue
        if coefficient not in (1, -1):
            report.non_unit.append(tree.label())
        report.signs[tree] = int(coefficient)
    report.missing = sorted(tree.label() for tree in trees.values() if tree not in report.signs)
    logger.debug("symbolic Pfaffian on %d vertices: %d monomials", v_count, len(polynomial.terms()))
    return report


def is_compatible_tree(t: ThreeGraphTree, m: PerfectMatching) -> bool:
    return all(
        sum(m.contains(i, j) for i, j in combinations(triple, 2)) == 1
        for triple in t.hyperedges
    )

def compatible_matching_partition(v_count: int) -> dict[PerfectMatching, list[ThreeGraphTree]]:
    """Groups the trees by the matching of K_n having exactly one pair inside each hyperedge."""
    _require_odd(v_count)
    n = v_count - 1
    matchings = [PerfectMatching(pairs) for pairs in iter_pairings(range(1, n + 1))]
    partition: dict[PerfectMatching, list[ThreeGraphTree]] = {m: [] for m in matchings}
    for tree in enumerate_3graph_trees(v_count):
        owners = [m for m in matchings if is_compatible_tree(tree, m)]
        if len(owners) != 1:
            raise InvariantError(
                f"{tree!r} is compatible with {len(owners)} matchings",
                {"tree": tree.label(), "matchings": [m.label() for m in owners]},
            )
        partition[owners[0]].append(tree)
    expected = v_count ** (n // 2 - 1)
    sizes = {m.label(): len(trees) for m, trees in partition.items()}
    if any(size != expected for size in sizes.values()):
        raise InvariantError(f"classes are not all of size {expected}", {"sizes": sizes})
    return partition

def halftree_from_3tree(t: ThreeGraphTree, m: PerfectMatching) -> SpanningForest:
    """For each hyperedge with matched pair ij (i < j) and third vertex k keeps the edges ij and jk,
    then orients the resulting tree towards the last vertex.
    """
    if not is_compatible_tree(t, m):
        raise PreconditionError(f"{t!r} is not compatible with {m.label()}")
    v_count = max(v for triple in t.hyperedges for v in triple)
    tree = nx.Graph()
    tree.add_nodes_from(range(1, v_count + 1))
    for triple in sorted(t.hyperedges):
        i, j = next(pair for pair in combinations(triple, 2) if m.contains(*pair))
        k = next(v for v in triple if v not in (i, j))
        tree.add_edges_from([(i, j), (j, k)])
    if not nx.is_tree(tree):
        raise InvariantError(f"edges assigned to {t!r} do not form a spanning tree", {"edges": sorted(tree.edges)})
    out = {node: parent for node, parent in nx.bfs_predecessors(tree, source=v_count)}
    return SpanningForest(out, v_count - 1)


# K_{n+1} with unit weights; the families only depend on the support
def complete_graph(v_count: int) -> RootedGraph:
    weights = {(i, j): Fraction(1 if i < j else -1)
               for i in range(1, v_count + 1) for j in range(1, v_count + 1) if i != j}
    return RootedGraph(v_count - 1, 1, weights)

class AppendixFamilyReport:
    def __init__(self, matching: PerfectMatching):
        self.matching = matching
        self.halftrees: list[tuple[ThreeGraphTree, SpanningForest]] = []
        self.failing_condition_C: list[str] = []
        self.family_size = 0
        self.compatible_count = 0
        self.injective = False
        self.reaches_all_compatible = False

    def to_dict(self) -> dict:
        return {
            "matching": self.matching.label(),
            "halftrees": {tree.label(): f.to_dict()["out"] for tree, f in self.halftrees},
            "failing_condition_C": self.failing_condition_C,
            "family_size": self.family_size,
            "compatible_forests": self.compatible_count,
            "injective": self.injective,
            "reaches_all_compatible": self.reaches_all_compatible,
        }

def appendix_family_report(v_count: int, m: PerfectMatching) -> AppendixFamilyReport:
    report = AppendixFamilyReport(m)
    trees = compatible_matching_partition(v_count).get(m)
    if trees is None:
        raise PreconditionError(f"{m.label()} is not a perfect matching of 1..{v_count - 1}")
    for tree in trees:
        f = halftree_from_3tree(tree, m)
        report.halftrees.append((tree, f))
        if not satisfies_condition_C(f, m):
            report.failing_condition_C.append(tree.label())
    g = complete_graph(v_count)
    report.family_size = len(half_forest_family(g, m))
    compatible = set(compatible_forests(g, m))
    obtained = {f for _, f in report.halftrees}
    report.compatible_count = len(compatible)
    report.injective = len(obtained) == len(report.halftrees)
    report.reaches_all_compatible = compatible <= obtained
    return report

def pfaffian_via_theorem(y: HyperWeights, m0: PerfectMatching):
    """Half-forest expansion of the 3-graph matrix, rooted at the last vertex."""
    _require_odd(y.v_count)
    entries = hyper_matrix(y)
    total = 0
    for f in half_forest_family(complete_graph(y.v_count), m0):
        term = forest_sign(f, m0)
        for i, j in half_edges(f, m0):
            term = term * entries[i - 1, j - 1]
        total = total + term
    return total
