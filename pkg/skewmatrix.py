import logging
from fractions import Fraction
from pathlib import Path
from typing import Iterator

import networkx as nx
import numpy as np
from sympy.combinatorics import Permutation

from config import *
from model import MatrixFormatError, PreconditionError, SkewMatrix, ValidationReport, format_rational

logger = logging.getLogger(__name__)

_as_fraction = np.frompyfunc(Fraction, 1, 1)


def parse_rational(token: str) -> Fraction:
    try:
        return Fraction(token)
    except (ValueError, ZeroDivisionError):
        raise MatrixFormatError(f"not a rational number: {token!r}")

def random_rational(rng: np.random.Generator, value_range: int) -> Fraction:
    """Nonzero rational p/q with 1 <= |p|, q <= value_range."""
    if value_range < 1:
        raise PreconditionError(f"value range must be >= 1, got {value_range}")
    numerator = int(rng.integers(1, value_range + 1)) * int(rng.choice((-1, 1)))
    denominator = int(rng.integers(1, value_range + 1))
    return Fraction(numerator, denominator)

def _square(m) -> np.ndarray:
    entries = m.entries if isinstance(m, SkewMatrix) else np.asarray(m, dtype=object)
    if entries.size == 0:
        return np.empty((0, 0), dtype=object)
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
        raise MatrixFormatError(f"matrix must be square, got shape {entries.shape}")
    return entries


def validate(m: SkewMatrix, require_zero_sum: bool = False) -> ValidationReport:
    report = ValidationReport()
    entries = m.entries
    for i in range(m.size):
        for j in range(i, m.size):
            if entries[i, j] != -entries[j, i]:
                report.antisymmetry_violations.append((i + 1, j + 1))
    if require_zero_sum:
        for i, row in enumerate(entries):
            total = sum(row, Fraction(0))
            if total != 0:
                report.row_sum_violations.append((i + 1, total))
    return report

def permutation_sign(sequence) -> int:
    """Sign of the permutation sending the sorted labels onto `sequence`."""
    sequence = list(sequence)
    if len(sequence) < 2:
        return 1
    ranks = {v: k for k, v in enumerate(sorted(sequence))}
    return Permutation([ranks[v] for v in sequence]).signature()

def iter_pairings(indices) -> Iterator[list[tuple]]:
    # The smallest unpaired index is paired with each larger one in turn
    indices = list(indices)
    if not indices:
        yield []
        return
    first, rest = indices[0], indices[1:]
    for k, partner in enumerate(rest):
        for tail in iter_pairings(rest[:k] + rest[k + 1:]):
            yield [(first, partner)] + tail

def pfaffian_by_pairings(m):
    """Pfaffian as the signed sum over all pairings.

    Works on any object array whose entries support + and *, so the same
    routine expands symbolic matrices.
    """
    entries = _square(m)
    size = entries.shape[0]
    if size % 2:
        return Fraction(0)
    total = 0
    for pairing in iter_pairings(range(size)):
        term = permutation_sign([v for pair in pairing for v in pair])
        for i, j in pairing:
            term = term * entries[i, j]
        total = total + term
    return Fraction(total) if isinstance(m, SkewMatrix) else total

def pfaffian_by_elimination(m) -> Fraction:
    a = _as_fraction(np.array(_square(m), dtype=object))
    size = a.shape[0]
    if size % 2:
        return Fraction(0)
    result = Fraction(1)
    for k in range(0, size, 2):
        pivots = [j for j in range(k + 1, size) if a[k, j] != 0]
        if not pivots:
            return Fraction(0)
        j = pivots[0]
        if j != k + 1:
            a[[k + 1, j], :] = a[[j, k + 1], :]
            a[:, [k + 1, j]] = a[:, [j, k + 1]]
            result = -result
        pivot = a[k, k + 1]
        result *= pivot
        u = a[k, k + 2:]
        v = a[k + 1, k + 2:]
        if len(u):
            a[k + 2:, k + 2:] += (np.outer(v, u) - np.outer(u, v)) / pivot
    return Fraction(result)

def determinant(m) -> Fraction:
    """Exact determinant by Gaussian elimination; accepts a SkewMatrix or any square array."""
    a = _as_fraction(np.array(_square(m), dtype=object))
    size = a.shape[0]
    result = Fraction(1)
    for k in range(size):
        pivots = [i for i in range(k, size) if a[i, k] != 0]
        if not pivots:
            return Fraction(0)
        i = pivots[0]
        if i != k:
            a[[k, i], :] = a[[i, k], :]
            result = -result
        pivot = a[k, k]
        result *= pivot
        if k + 1 < size:
            factors = a[k + 1:, k] / pivot
            a[k + 1:, k:] -= np.outer(factors, a[k, k:])
    return Fraction(result)

def principal_submatrix(m: SkewMatrix, drop_last: int) -> SkewMatrix:
    if not 0 <= drop_last <= m.size:
        raise PreconditionError(f"cannot drop {drop_last} rows from a matrix of size {m.size}")
    keep = m.size - drop_last
    n = min(m.n, keep)
    return SkewMatrix(m.entries[:keep, :keep], n=n, r=keep - n)

def relabel(m: SkewMatrix, order) -> SkewMatrix:
    """Renames vertex order[k-1] of V as k; root vertices keep their labels."""
    order = list(order)
    if sorted(order) != list(range(1, m.n + 1)):
        raise PreconditionError(f"{order} is not a permutation of 1..{m.n}")
    index = [v - 1 for v in order] + list(range(m.n, m.size))
    return SkewMatrix(m.entries[np.ix_(index, index)], n=m.n, r=m.r, zero_sum=m.zero_sum)


def random_instance(n: int, r: int, edge_set=None, seed: int = DEFAULT_SEED,
                    value_range: int = DEFAULT_VALUE_RANGE, density: float = DEFAULT_DENSITY) -> SkewMatrix:
    """Random zero-sum skew matrix of size n + r.

    Without an edge set, vertex n+1 balances every row. With one, the matrix
    is a random circulation supported exactly on the given edges.
    """
    if n < 0 or n % 2:
        raise PreconditionError(f"n must be even and non-negative, got {n}")
    if r < 1:
        raise PreconditionError(f"at least one root is required, got r={r}")
    if not 0 <= density <= 1:
        raise PreconditionError(f"density must lie in [0, 1], got {density}")
    rng = np.random.default_rng(seed)
    size = n + r
    if edge_set is not None:
        matrix = SkewMatrix(_random_circulation(size, edge_set, rng, value_range), n=n, r=r, zero_sum=True)
    else:
        balancer = n
        entries = [[Fraction(0)] * size for _ in range(size)]
        for i in range(size):
            for j in range(i + 1, size):
                if balancer in (i, j) or rng.random() >= density:
                    continue
                value = random_rational(rng, value_range)
                entries[i][j] = value
                entries[j][i] = -value
        for i in range(size):
            if i != balancer:
                total = sum(entries[i], Fraction(0))
                entries[i][balancer] = -total
                entries[balancer][i] = total
        matrix = SkewMatrix(entries, n=n, r=r, zero_sum=True)
    logger.debug("generated %r with seed %d", matrix, seed)
    return matrix

def _random_circulation(size: int, edge_set, rng: np.random.Generator, value_range: int) -> list[list[Fraction]]:
    wanted = set()
    for edge in edge_set:
        i, j = tuple(edge)
        if i == j or not (1 <= i <= size and 1 <= j <= size):
            raise PreconditionError(f"edge {i}-{j} is not a pair of distinct vertices in 1..{size}")
        wanted.add(frozenset((i, j)))
    graph = nx.Graph()
    graph.add_nodes_from(range(1, size + 1))
    graph.add_edges_from(tuple(edge) for edge in wanted)
    # Zero row sums make every bridge carry weight 0
    if nx.has_bridges(graph):
        bridges = sorted(tuple(sorted(edge)) for edge in nx.bridges(graph))
        raise PreconditionError(f"edges {bridges} are bridges and cannot carry a nonzero weight")
    basis = nx.cycle_basis(graph)
    for attempt in range(GENERATOR_MAX_ATTEMPTS):
        entries = [[Fraction(0)] * size for _ in range(size)]
        for cycle in basis:
            value = random_rational(rng, value_range)
            for a, b in zip(cycle, cycle[1:] + cycle[:1]):
                entries[a - 1][b - 1] += value
                entries[b - 1][a - 1] -= value
        support = {frozenset((i + 1, j + 1)) for i in range(size) for j in range(i + 1, size) if entries[i][j] != 0}
        if support == wanted:
            return entries
        logger.debug("circulation attempt %d lost %d edges", attempt, len(wanted - support))
    raise PreconditionError(f"no circulation supported on the edge set after {GENERATOR_MAX_ATTEMPTS} attempts")


def format_matrix(m: SkewMatrix) -> str:
    lines = [f"{m.n} {m.r}"]
    for row in m.entries:
        lines.append(" ".join(format_rational(value) for value in row))
    return "\n".join(lines) + "\n"

def parse_matrix(text: str) -> SkewMatrix:
    """Reads the "n r" header followed by n + r rows of rationals.

    Matrices with roots are flagged zero-sum; a broken row sum is left for
    validation, broken antisymmetry is a format error.
    """
    lines = [line.split() for line in text.splitlines() if line.strip()]
    if not lines or len(lines[0]) != 2:
        raise MatrixFormatError("first line must hold the two integers 'n r'")
    try:
        n, r = (int(token) for token in lines[0])
    except ValueError:
        raise MatrixFormatError(f"bad header {' '.join(lines[0])!r}")
    if n < 0 or r < 0 or n % 2:
        raise MatrixFormatError(f"header needs n even and r >= 0, got n={n}, r={r}")
    size = n + r
    rows = lines[1:]
    if len(rows) != size:
        raise MatrixFormatError(f"expected {size} rows, found {len(rows)}")
    entries = []
    for k, row in enumerate(rows, start=1):
        if len(row) != size:
            raise MatrixFormatError(f"row {k} has {len(row)} entries, expected {size}")
        entries.append([parse_rational(token) for token in row])
    matrix = SkewMatrix(entries, n=n, r=r, zero_sum=r >= 1)
    violations = validate(matrix).antisymmetry_violations
    if violations:
        raise MatrixFormatError(f"matrix is not skew-symmetric at cells {violations}")
    return matrix

def read_matrix(path) -> SkewMatrix:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise MatrixFormatError(f"{path} is not a text file: {e}")
    return parse_matrix(text)

def write_matrix(m: SkewMatrix, path) -> None:
    Path(path).write_text(format_matrix(m))
