from collections import Counter
from enum import Enum
from fractions import Fraction

import numpy as np

from algorithms import functional_cycles
from config import *


class PfaffianError(Exception):
    pass

# Unreadable matrix/connection text, or input that is not skew-symmetric
class MatrixFormatError(PfaffianError, ValueError):
    pass

class PreconditionError(PfaffianError, ValueError):
    pass

# A checked identity or structural invariant failed; payload carries the counterexample
class InvariantError(PfaffianError, AssertionError):
    def __init__(self, message: str, payload: dict | None = None):
        super().__init__(message)
        self.payload = payload or {}


class TerminalCase(Enum):
    ROOT = 1
    INITIAL_CYCLE = 2
    CLOSED_LOOP = 3
    ATTACH_LEAF = 4
    NEW_BRANCH = 5
    ODD_LOOP = 6

class Suite(Enum):
    PFAFFIAN = "pfaffian"
    HALFTREE = "halftree"
    DET_FOREST = "det-forest"
    OPENING = "opening"
    LINEBUNDLE = "linebundle"
    ALL = "all"

class EnumerationKind(Enum):
    MATCHINGS = "matchings"
    FORESTS = "forests"
    FORESTS_C = "forests-C"
    RCRSF = "rcrsf"
    CRSF = "crsf"
    TREES_3 = "3trees"

class CheckStatus(Enum):
    PASSED = "passed"
    FAILED = "failed"
    SKIPPED = "skipped"


def format_rational(value) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


# Dense exact skew-symmetric matrix; rows/columns are labelled 1..size
class SkewMatrix:
    def __init__(self, entries, n: int | None = None, r: int = 0, zero_sum: bool = False):
        array = np.array(entries, dtype=object)
        if array.size == 0:
            array = np.empty((0, 0), dtype=object)
        if array.ndim != 2 or array.shape[0] != array.shape[1]:
            raise MatrixFormatError(f"matrix must be square, got shape {array.shape}")
        size = array.shape[0]
        for index in np.ndindex(array.shape):
            array[index] = Fraction(array[index])
        array.flags.writeable = False
        if n is None:
            n = size - r
        if n < 0 or r < 0 or n + r != size:
            raise MatrixFormatError(f"block sizes n={n}, r={r} do not match size {size}")
        self.entries: np.ndarray = array
        self.n = n
        self.r = r
        self.zero_sum = zero_sum

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def a(self, i: int, j: int) -> Fraction:
        return self.entries[i - 1, j - 1]

    def rows(self) -> list[list[Fraction]]:
        return [list(row) for row in self.entries]

    def __eq__(self, other) -> bool:
        if not isinstance(other, SkewMatrix):
            return NotImplemented
        return (self.n, self.r) == (other.n, other.r) and self.rows() == other.rows()

    def __repr__(self) -> str:
        return f"SkewMatrix(n={self.n}, r={self.r}, zero_sum={self.zero_sum})"


class ValidationReport:
    def __init__(self):
        self.antisymmetry_violations: list[tuple[int, int]] = []
        self.row_sum_violations: list[tuple[int, Fraction]] = []

    @property
    def passed(self) -> bool:
        return not self.antisymmetry_violations and not self.row_sum_violations

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "antisymmetry_violations": [list(cell) for cell in self.antisymmetry_violations],
            "row_sum_violations": [
                {"row": row, "sum": format_rational(total)} for row, total in self.row_sum_violations
            ],
        }


# Weighted graph G^R read off the support of a matrix; V = 1..n, R = n+1..n+r
class RootedGraph:
    def __init__(self, n: int, r: int, weights: dict[tuple[int, int], Fraction]):
        self.n = n
        self.r = r
        self.weights = {edge: Fraction(value) for edge, value in weights.items() if value != 0}
        self.edges: set[frozenset[int]] = {frozenset(edge) for edge in self.weights}
        self._neighbours: dict[int, list[int]] = {v: [] for v in self.vertices()}
        for i, j in self.weights:
            self._neighbours[i].append(j)
        for v in self._neighbours:
            self._neighbours[v].sort()

    def vertices(self) -> range:
        return range(1, self.n + self.r + 1)

    def core(self) -> range:
        return range(1, self.n + 1)

    def roots(self) -> range:
        return range(self.n + 1, self.n + self.r + 1)

    def is_root(self, v: int) -> bool:
        return v > self.n

    def has_edge(self, i: int, j: int) -> bool:
        return (i, j) in self.weights

    def weight(self, i: int, j: int) -> Fraction:
        return self.weights.get((i, j), Fraction(0))

    def neighbours(self, v: int) -> list[int]:
        return self._neighbours[v]

    def product(self, edges) -> Fraction:
        total = Fraction(1)
        for i, j in edges:
            total *= self.weight(i, j)
        return total


class PerfectMatching:
    def __init__(self, pairs):
        normalized = set()
        self._partner: dict[int, int] = {}
        for pair in pairs:
            i, j = tuple(pair)
            if i == j:
                raise PreconditionError(f"pair {i}-{j} joins a vertex to itself")
            if i in self._partner or j in self._partner:
                seen = sorted(tuple(sorted(p)) for p in normalized)
                raise PreconditionError(f"pair {i}-{j} is not disjoint from {seen}")
            self._partner[i] = j
            self._partner[j] = i
            normalized.add(frozenset((i, j)))
        self.pairs: frozenset[frozenset[int]] = frozenset(normalized)

    # Parses "1-4,2-3"
    @classmethod
    def from_text(cls, text: str) -> "PerfectMatching":
        pairs = []
        for token in text.split(","):
            token = token.strip()
            if not token:
                continue
            try:
                i, j = (int(part) for part in token.split("-"))
            except ValueError:
                raise PreconditionError(f"malformed pair {token!r}, expected 'i-j'")
            pairs.append((i, j))
        return cls(pairs)

    def partner(self, v: int) -> int:
        return self._partner[v]

    def covers(self) -> set[int]:
        return set(self._partner)

    def contains(self, i: int, j: int) -> bool:
        return self._partner.get(i) == j

    def sorted_pairs(self) -> list[tuple[int, int]]:
        return sorted(tuple(sorted(pair)) for pair in self.pairs)

    def label(self) -> str:
        return ",".join(f"{i}-{j}" for i, j in self.sorted_pairs())

    def __eq__(self, other) -> bool:
        if not isinstance(other, PerfectMatching):
            return NotImplemented
        return self.pairs == other.pairs

    def __hash__(self) -> int:
        return hash(self.pairs)

    def __repr__(self) -> str:
        return f"PerfectMatching({self.label()})"


class OrientedSuperimposition:
    def __init__(self, m0: PerfectMatching, m: PerfectMatching):
        self.m0 = m0
        self.m = m
        self.doubled: frozenset[frozenset[int]] = m0.pairs & m.pairs
        self.cycles: list[tuple[int, ...]] = []
        self.oriented_m0: list[tuple[int, int]] = []
        self.oriented_m: list[tuple[int, int]] = []

    # Every vertex is the tail of exactly one oriented M0 or M edge
    def out_map(self) -> dict[int, int]:
        out = dict(self.oriented_m0)
        out.update(self.oriented_m)
        return out


# Oriented edge configuration: one outgoing edge v -> out[v] per vertex of V
class Configuration:
    def __init__(self, out: dict[int, int], n: int):
        self.out: dict[int, int] = dict(sorted(out.items()))
        self.n = n

    def edges(self) -> list[tuple[int, int]]:
        return list(self.out.items())

    def in_degrees(self) -> Counter:
        return Counter(self.out.values())

    def leaves(self) -> list[int]:
        degrees = self.in_degrees()
        return [v for v in self.out if degrees[v] == 0]

    def cycles(self) -> list[tuple[int, ...]]:
        return functional_cycles(self.out)

    def cycle_vertices(self) -> set[int]:
        return {v for cycle in self.cycles() for v in cycle}

    def branch_edges(self) -> list[tuple[int, int]]:
        on_cycle = self.cycle_vertices()
        return [(v, w) for v, w in self.out.items() if v not in on_cycle]

    def undirected_edges(self) -> frozenset[frozenset[int]]:
        return frozenset(frozenset(edge) for edge in self.out.items())

    def canonical(self) -> tuple[tuple[int, int], ...]:
        return tuple(self.out.items())

    # Same key for configurations differing only by the direction of their cycles
    def orientation_free_key(self) -> tuple:
        cycles = sorted(
            tuple(sorted(tuple(sorted((cycle[k], cycle[(k + 1) % len(cycle)]))) for k in range(len(cycle))))
            for cycle in self.cycles()
        )
        return (tuple(self.branch_edges()), tuple(cycles))

    def to_dict(self) -> dict:
        return {"out": {str(v): w for v, w in self.out.items()}}

    def __eq__(self, other) -> bool:
        if not isinstance(other, Configuration):
            return NotImplemented
        return self.canonical() == other.canonical()

    def __hash__(self) -> int:
        return hash(self.canonical())

    def __repr__(self) -> str:
        arrows = ",".join(f"{v}>{w}" for v, w in self.out.items())
        return f"{type(self).__name__}({arrows})"

class SpanningForest(Configuration):
    pass

# RC-rooted spanning forest: trees rooted in R or on cycles of G
class RCRSF(Configuration):
    pass

# Cycle-rooted spanning forest of a rootless graph; every cycle has length >= 3
class CRSF(Configuration):
    pass


class PathDecomposition:
    def __init__(self, paths: list[tuple[int, ...]], starts_with_m0: list[bool] | None = None):
        self.paths = paths
        self.starts_with_m0 = starts_with_m0

    def lengths(self) -> list[int]:
        return [len(path) - 1 for path in self.paths]

    def all_even(self) -> bool:
        return all(length % 2 == 0 for length in self.lengths())

    def edges(self) -> list[tuple[int, int]]:
        return [(path[k], path[k + 1]) for path in self.paths for k in range(len(path) - 1)]

    def __len__(self) -> int:
        return len(self.paths)

    def __repr__(self) -> str:
        return f"PathDecomposition({self.paths})"
