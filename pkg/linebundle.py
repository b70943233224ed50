import logging
from fractions import Fraction
from itertools import permutations
from pathlib import Path

import numpy as np

from algorithms import functional_cycles, iter_out_maps
from config import *
from model import *
from opening import partial_reverse
from skewmatrix import parse_rational, random_rational

logger = logging.getLogger(__name__)


# Parallel transport ψ on the oriented edges; ψ(j, i) is always 1/ψ(i, j)
class Connection:
    def __init__(self, psi: dict[tuple[int, int], Fraction]):
        self.psi: dict[tuple[int, int], Fraction] = {}
        for (i, j), value in psi.items():
            value = Fraction(value)
            if value == 0:
                raise PreconditionError(f"transport on {i}-{j} must be nonzero")
            for edge, expected in (((i, j), value), ((j, i), 1 / value)):
                if self.psi.get(edge, expected) != expected:
                    raise PreconditionError(f"transports on {i}-{j} and {j}-{i} are not reciprocal")
                self.psi[edge] = expected

    @classmethod
    def identity(cls, g: RootedGraph) -> "Connection":
        return cls({edge: Fraction(1) for edge in g.weights})

    def value(self, i: int, j: int) -> Fraction:
        return self.psi[(i, j)]

    def __contains__(self, edge: tuple[int, int]) -> bool:
        return edge in self.psi

    def __eq__(self, other) -> bool:
        if not isinstance(other, Connection):
            return NotImplemented
        return self.psi == other.psi


def random_connection(g: RootedGraph, seed: int = DEFAULT_SEED, value_range: int = DEFAULT_VALUE_RANGE) -> Connection:
    rng = np.random.default_rng(seed)
    psi = {}
    for i, j in sorted(g.weights):
        if i < j:
            psi[(i, j)] = random_rational(rng, value_range)
    return Connection(psi)

def format_connection(c: Connection) -> str:
    return "".join(f"{i} {j} {format_rational(value)}\n" for (i, j), value in sorted(c.psi.items()) if i < j)

def parse_connection(text: str) -> Connection:
    psi = {}
    for k, line in enumerate(text.splitlines(), start=1):
        tokens = line.split()
        if not tokens:
            continue
        if len(tokens) != 3:
            raise MatrixFormatError(f"line {k}: expected 'i j p/q', got {line.strip()!r}")
        try:
            i, j = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise MatrixFormatError(f"line {k}: bad vertex labels {tokens[0]!r} {tokens[1]!r}")
        psi[(i, j)] = parse_rational(tokens[2])
    try:
        return Connection(psi)
    except PreconditionError as e:
        raise MatrixFormatError(str(e))

def read_connection(path) -> Connection:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise MatrixFormatError(f"{path} is not a text file: {e}")
    return parse_connection(text)

def write_connection(c: Connection, path) -> None:
    Path(path).write_text(format_connection(c))


# Whole matrix read as a rootless graph on 1..size
def core_graph(a: SkewMatrix) -> RootedGraph:
    weights = {}
    for i in range(a.size):
        for j in range(a.size):
            if i != j and a.entries[i, j] != 0:
                weights[(i + 1, j + 1)] = a.entries[i, j]
    return RootedGraph(a.size, 0, weights)

def twist(a: SkewMatrix, c: Connection) -> np.ndarray:
    twisted = np.array(a.entries, dtype=object)
    for i in range(a.size):
        for j in range(a.size):
            if twisted[i, j] == 0:
                continue
            if (i + 1, j + 1) not in c:
                raise PreconditionError(f"connection is missing on edge {i + 1}-{j + 1}")
            twisted[i, j] = twisted[i, j] * c.value(i + 1, j + 1)
    return twisted

def enumerate_crsf(g: RootedGraph) -> list[CRSF]:
    choices = {v: g.neighbours(v) for v in g.core()}
    family = [
        CRSF(out, g.n)
        for out in iter_out_maps(choices)
        if all(len(cycle) >= 3 for cycle in functional_cycles(out))
    ]
    logger.debug("%d CRSFs on %d vertices", len(family), g.n)
    return family

def crsf_condition_C(f: CRSF) -> bool:
    if not f.leaves():
        return True
    return partial_reverse(f).all_even()

def _cycle_edges(cycle) -> list[tuple[int, int]]:
    return [(cycle[k], cycle[(k + 1) % len(cycle)]) for k in range(len(cycle))]

def monodromy(c: Connection, cycle) -> Fraction:
    total = Fraction(1)
    for i, j in _cycle_edges(cycle):
        total *= c.value(i, j)
    return total

# Starts at the minimum and leaves it towards the smaller neighbour
def is_canonical_cycle(cycle) -> bool:
    return cycle[0] == min(cycle) and cycle[1] <= cycle[-1]

def cycle_factor(g: RootedGraph, c: Connection, cycle) -> Fraction:
    omega = monodromy(c, cycle)
    product = g.product(_cycle_edges(cycle))
    if len(cycle) % 2:
        return product * (omega - 1 / omega)
    return product * (2 - omega - 1 / omega)

def det_via_crsf(a: SkewMatrix, c: Connection) -> Fraction:
    """det(A^ψ) as a sum over Condition (C) CRSFs, one orientation per cycle.

    Holds when the rows of a sum to zero; odd cycles weigh
    Π a_e (ω - 1/ω) and even ones Π a_e (2 - ω - 1/ω).
    """
    if a.size % 2:
        raise PreconditionError(f"matrix size must be even, got {a.size}")
    g = core_graph(a)
    total = Fraction(0)
    terms = 0
    for f in enumerate_crsf(g):
        cycles = f.cycles()
        if not all(is_canonical_cycle(cycle) for cycle in cycles) or not crsf_condition_C(f):
            continue
        odd = [cycle for cycle in cycles if len(cycle) % 2]
        if len(odd) % 2:
            raise InvariantError(f"{f!r} satisfies Condition (C) with an odd number of odd cycles", f.to_dict())
        term = g.product(f.branch_edges())
        for cycle in cycles:
            factor = cycle_factor(g, c, cycle)
            reverse = cycle_factor(g, c, tuple(reversed(cycle)))
            if factor != reverse:
                raise InvariantError(
                    f"factor of cycle {cycle} depends on its orientation",
                    {"cycle": list(cycle), "factor": format_rational(factor), "reversed": format_rational(reverse)},
                )
            term *= factor
        total += term
        terms += 1
    logger.debug("CRSF sum over %d configurations", terms)
    return total

def cycle_cover_expansion(a: SkewMatrix) -> Fraction:
    """det(A) over covers by even cycles: a 2-cycle weighs a_e², a longer one -2 Π a_e."""
    size = a.size
    total = Fraction(0)
    for image in permutations(range(1, size + 1)):
        out = {v: image[v - 1] for v in range(1, size + 1)}
        if any(a.a(v, w) == 0 for v, w in out.items()):
            continue
        cycles = functional_cycles(out)
        if any(len(cycle) % 2 or not is_canonical_cycle(cycle) for cycle in cycles):
            continue
        term = Fraction(1)
        for cycle in cycles:
            product = Fraction(1)
            for i, j in _cycle_edges(cycle):
                product *= a.a(i, j)
            term *= -product if len(cycle) == 2 else -2 * product
        total += term
    return total
