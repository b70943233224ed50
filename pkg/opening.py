import logging
from collections import defaultdict, deque
from fractions import Fraction
from itertools import product

from algorithms import functional_cycles, hanging_vertices, in_degrees, leaves, strip_paths, walk
from forests import (
    half_forest_weight,
    iter_compatible_assignments,
    paths_satisfy_condition_C,
    pfaffian_via_half_forests,
)
from graphmodel import enumerate_perfect_matchings, matching_weight, require_matching, superimpose_and_orient
from model import *
from skewmatrix import permutation_sign

logger = logging.getLogger(__name__)


def m0_orientation(out: dict[int, int], m0: PerfectMatching) -> list[tuple[int, int]]:
    """Orientation each pair of m0 carries in a configuration; a doubled pair points away from its smaller vertex."""
    oriented = []
    for i, j in m0.sorted_pairs():
        if out.get(i) == j:
            oriented.append((i, j))
        elif out.get(j) == i:
            oriented.append((j, i))
        else:
            raise InvariantError(f"pair {i}-{j} of the reference matching is missing", {"out": out})
    return oriented

def doubled_pairs(out: dict[int, int], m0: PerfectMatching) -> list[tuple[int, int]]:
    return [(i, j) for i, j in m0.sorted_pairs() if out.get(i) == j and out.get(j) == i]

def weight_from_scratch(out: dict[int, int], m0: PerfectMatching, g: RootedGraph, initial_cycles: int) -> Fraction:
    """sgn(σ) (-1)^(|D|+|C|) Π a_e, every factor read off the configuration itself."""
    oriented = m0_orientation(out, m0)
    tails = {tail for tail, _ in oriented}
    sign = permutation_sign([v for edge in oriented for v in edge])
    sign *= (-1) ** (len(doubled_pairs(out, m0)) + initial_cycles)
    return sign * g.product((v, w) for v, w in out.items() if v not in tails)

def alternating_cycles(out: dict[int, int], m0: PerfectMatching) -> bool:
    for cycle in functional_cycles(out):
        kinds = [m0.contains(cycle[k], cycle[(k + 1) % len(cycle)]) for k in range(len(cycle))]
        if len(cycle) < 4 or any(kinds[k] == kinds[(k + 1) % len(kinds)] for k in range(len(kinds))):
            return False
    return True


# Configuration M_{ℓ1,...,ℓk} reached while opening the doubled edges of M0 ∪ M
class OpeningState:
    def __init__(self, graph: RootedGraph, m0: PerfectMatching, m0_edges: dict[int, int], m_edges: dict[int, int],
                 remaining: frozenset, sign: int, initial_cycles: tuple[tuple[int, ...], ...]):
        self.graph = graph
        self.m0 = m0
        self.m0_edges = m0_edges
        self.m_edges = m_edges
        self.remaining: frozenset[frozenset[int]] = remaining
        self.sign = sign
        self.initial_cycles = initial_cycles

    @classmethod
    def from_superimposition(cls, s: OrientedSuperimposition, graph: RootedGraph) -> "OpeningState":
        sign = permutation_sign([v for edge in s.oriented_m0 for v in edge])
        sign *= (-1) ** (len(s.doubled) + len(s.cycles))
        return cls(graph, s.m0, dict(s.oriented_m0), dict(s.oriented_m), s.doubled, sign, tuple(s.cycles))

    def out(self) -> dict[int, int]:
        out = dict(self.m0_edges)
        out.update(self.m_edges)
        return out

    def weight(self) -> Fraction:
        return self.sign * self.graph.product(self.m_edges.items())

    def weight_from_scratch(self) -> Fraction:
        return weight_from_scratch(self.out(), self.m0, self.graph, len(self.initial_cycles))

    def doubled_vertices(self) -> set[int]:
        return {v for pair in self.remaining for v in pair}

    def initial_cycle_vertices(self) -> set[int]:
        return {v for cycle in self.initial_cycles for v in cycle}

    # V_v: neighbours of the partner of v other than v, roots included
    def neighbourhood(self, v: int) -> list[int]:
        return [w for w in self.graph.neighbours(self.m0.partner(v)) if w != v]

    def split(self, v: int) -> tuple[list[int], list[int]]:
        doubled = self.doubled_vertices() - {v, self.m0.partner(v)}
        inside = [w for w in self.neighbourhood(v) if w in doubled]
        outside = [w for w in self.neighbourhood(v) if w not in doubled]
        return inside, outside

    def release(self, v: int) -> "OpeningState":
        """Drops the doubled edge at v; its M0 edge is turned to leave v, negating the sign when it flips."""
        partner = self.m0.partner(v)
        m0_edges = dict(self.m0_edges)
        m_edges = dict(self.m_edges)
        sign = -self.sign
        if v > partner:
            sign = -sign
            del m0_edges[partner]
            m0_edges[v] = partner
            del m_edges[v]
        else:
            del m_edges[partner]
        remaining = self.remaining - {frozenset((v, partner))}
        return OpeningState(self.graph, self.m0, m0_edges, m_edges, remaining, sign, self.initial_cycles)

    def redirect(self, v: int, target: int) -> "OpeningState":
        m_edges = dict(self.m_edges)
        m_edges[v] = target
        return OpeningState(self.graph, self.m0, self.m0_edges, m_edges, self.remaining, self.sign, self.initial_cycles)


class OutputItem:
    def __init__(self, state: OpeningState, provenance: list[tuple[int, ...]], origin: PerfectMatching,
                 case: TerminalCase | None = None):
        self.state = state
        self.provenance = provenance
        self.origin = origin
        self.case = case
        self.weight: Fraction = state.weight()

    @property
    def out(self) -> dict[int, int]:
        return self.state.out()

    # "1,5;2,1": the ℓ-sequence of every step
    def label(self) -> str:
        return ";".join(",".join(str(v) for v in gamma[::2]) for gamma in self.provenance)

    def configuration(self) -> RCRSF:
        return RCRSF(self.out, self.state.graph.n)

    def to_dict(self) -> dict:
        return {
            "label": self.label(),
            "origin": self.origin.label(),
            "case": self.case.name if self.case else None,
            "weight": format_rational(self.weight),
            "out": {str(v): w for v, w in sorted(self.out.items())},
        }

    def __repr__(self) -> str:
        return f"OutputItem({self.label() or '-'}, {format_rational(self.weight)})"

class WeightedOutputSet:
    def __init__(self, items: list[OutputItem] | None = None):
        self.items: list[OutputItem] = items or []

    def total(self) -> Fraction:
        return sum((item.weight for item in self.items), Fraction(0))

    def labels(self) -> list[str]:
        return sorted(item.label() for item in self.items)

    def by_label(self) -> dict[str, OutputItem]:
        return {item.label(): item for item in self.items}

    def __iter__(self):
        return iter(self.items)

    def __len__(self) -> int:
        return len(self.items)


def _classify(state: OpeningState, path: list[int], target: int, previous: list[tuple[int, ...]]) -> TerminalCase:
    if state.graph.is_root(target):
        return TerminalCase.ROOT
    if target in path:
        return TerminalCase.CLOSED_LOOP if path.index(target) % 2 == 0 else TerminalCase.ODD_LOOP
    if target in state.initial_cycle_vertices():
        return TerminalCase.INITIAL_CYCLE
    if in_degrees(state.out())[target] == 0:
        starts = [gamma[0] for gamma in previous]
        if target not in starts or target > path[0]:
            raise InvariantError(f"path {path} attaches to leaf {target} that no earlier step started from",
                                 {"path": path, "target": target, "starts": starts})
        return TerminalCase.ATTACH_LEAF
    return TerminalCase.NEW_BRANCH

def _characteristic_start(out: dict[int, int], initial_cycles) -> int | None:
    """Largest of: the largest leaf, the largest minimum of a created cycle component."""
    created = []
    initial = {frozenset(cycle) for cycle in initial_cycles}
    for cycle in functional_cycles(out):
        if len(cycle) >= 3 and frozenset(cycle) not in initial and not hanging_vertices(out, cycle):
            created.append(cycle[0])
    candidates = created + leaves(out)
    return max(candidates) if candidates else None

def _check_emission(item: OutputItem) -> None:
    state = item.state
    out = item.out
    gamma = item.provenance[-1]
    payload = {"label": item.label(), "path": list(gamma), "out": {str(v): w for v, w in out.items()}}
    if set(out) != set(state.graph.core()):
        raise InvariantError("configuration lacks an outgoing edge at some vertex", payload)
    if any(out.get(gamma[k]) != gamma[k + 1] for k in range(len(gamma) - 1)):
        raise InvariantError("configuration does not contain its path", payload)
    kinds = [state.m0.contains(gamma[k], gamma[k + 1]) for k in range(len(gamma) - 1)]
    if len(kinds) % 2 or kinds != [k % 2 == 0 for k in range(len(kinds))]:
        raise InvariantError("path is not even and alternating from an M0 edge", payload)
    head = gamma[:-1]
    if len(set(head)) != len(head) or any(v <= gamma[0] for v in head[1:]):
        raise InvariantError("path revisits a vertex or does not start at its smallest vertex", payload)
    if len(doubled_pairs(out, state.m0)) != len(state.remaining):
        raise InvariantError("doubled edge count drifted from the opening bookkeeping", payload)
    if item.case is TerminalCase.CLOSED_LOOP and len(gamma) - 1 - gamma.index(gamma[-1]) < 4:
        raise InvariantError("closed loop shorter than 4", payload)
    if _characteristic_start(out, state.initial_cycles) != gamma[0]:
        raise InvariantError("step start is not the largest leaf or created-cycle minimum", payload)
    scratch = state.weight_from_scratch()
    if scratch != item.weight:
        payload.update(incremental=format_rational(item.weight), from_scratch=format_rational(scratch))
        raise InvariantError("running sign disagrees with the recomputed weight", payload)

def _descend(state: OpeningState, v: int, path: list[int], previous: list[tuple[int, ...]],
             origin: PerfectMatching, emitted: list[OutputItem]) -> None:
    parent_weight = state.weight_from_scratch()
    partner = state.m0.partner(v)
    inside, _ = state.split(v)
    released = state.release(v)
    path = path + [partner]
    children_total = Fraction(0)
    for target in state.neighbourhood(v):
        child = released.redirect(partner, target)
        children_total += child.weight()
        if target in inside:
            _descend(child, target, path + [target], previous, origin, emitted)
            continue
        gamma = tuple(path + [target])
        case = _classify(state, path, target, previous)
        item = OutputItem(child, previous + [gamma], origin, case)
        if case is not TerminalCase.ODD_LOOP:
            _check_emission(item)
        emitted.append(item)
    if children_total != parent_weight:
        raise InvariantError(
            f"opening at {v} does not conserve the weight",
            {"path": path, "parent": format_rational(parent_weight), "children": format_rational(children_total)},
        )

def _cancel_odd_loops(items: list[OutputItem]) -> list[OutputItem]:
    kept = []
    groups: dict[frozenset, list[OutputItem]] = defaultdict(list)
    for item in items:
        if item.case is TerminalCase.ODD_LOOP:
            groups[item.configuration().undirected_edges()].append(item)
        else:
            kept.append(item)
    for group in groups.values():
        labels = [item.label() for item in group]
        if len(group) != 2 or group[0].weight + group[1].weight != 0:
            raise InvariantError(
                f"odd loops {labels} do not cancel in pairs",
                {"labels": labels, "weights": [format_rational(item.weight) for item in group]},
            )
        logger.debug("odd loops %s cancel", labels)
    return kept

def _run_step(state: OpeningState, previous: list[tuple[int, ...]], origin: PerfectMatching) -> list[OutputItem]:
    start = min(state.doubled_vertices())
    emitted: list[OutputItem] = []
    _descend(state, start, [start], previous, origin, emitted)
    return _cancel_odd_loops(emitted)


def open_step1(s: OrientedSuperimposition, g: RootedGraph) -> WeightedOutputSet:
    state = OpeningState.from_superimposition(s, g)
    if not s.doubled:
        return WeightedOutputSet([OutputItem(state, [], s.m)])
    output = WeightedOutputSet(_run_step(state, [], s.m))
    expected = matching_weight(s, g)
    if output.total() != expected:
        raise InvariantError(
            "first opening step changed the total weight",
            {"matching": s.m.label(), "expected": format_rational(expected), "total": format_rational(output.total())},
        )
    return output

def run_complete(m0: PerfectMatching, m: PerfectMatching, g: RootedGraph) -> WeightedOutputSet:
    """Repeats the opening step on every configuration until no doubled edge of M0 ∪ M remains."""
    s = superimpose_and_orient(m0, m)
    initial = OpeningState.from_superimposition(s, g)
    if not s.doubled:
        output = WeightedOutputSet([OutputItem(initial, [], m)])
    else:
        items = []
        pending = deque([(initial, [])])
        steps = 0
        while pending:
            state, provenance = pending.popleft()
            steps += 1
            for item in _run_step(state, provenance, m):
                if item.state.remaining:
                    pending.append((item.state, item.provenance))
                else:
                    items.append(item)
        logger.debug("opening %s against %s: %d steps, %d outputs", m.label(), m0.label(), steps, len(items))
        output = WeightedOutputSet(items)

    for item in output:
        out = item.out
        payload = {"label": item.label(), "out": {str(v): w for v, w in out.items()}}
        if doubled_pairs(out, m0):
            raise InvariantError("output still holds a doubled edge", payload)
        if item.weight != weight_from_scratch(out, m0, g, len(s.cycles)):
            raise InvariantError("output weight is not sgn(σ)(-1)^|C| Π a_e", payload)
        if not alternating_cycles(out, m0):
            raise InvariantError("output is not an RCRSF compatible with the reference matching", payload)
    expected = matching_weight(s, g)
    if output.total() != expected:
        raise InvariantError(
            "complete opening changed the total weight",
            {"matching": m.label(), "expected": format_rational(expected), "total": format_rational(output.total())},
        )
    return output


def partial_reverse(f: Configuration) -> PathDecomposition:
    if not leaves(f.out):
        raise PreconditionError(f"{f!r} consists of cycles only")
    return PathDecomposition(strip_paths(f.out))

def rcrsf_condition_C(f: Configuration, m0: PerfectMatching) -> bool:
    if not leaves(f.out):
        return True
    decomposition = partial_reverse(f)
    decomposition.starts_with_m0 = [m0.contains(path[0], path[1]) for path in decomposition.paths]
    return paths_satisfy_condition_C(decomposition, m0)

def iter_epsilon_matchings(f: Configuration, m0: PerfectMatching):
    """Yields (ε, M^(ε)); ε maps the vertex set of each cycle to 0 (M0 edges) or 1 (the other cycle edges)."""
    cycles = f.cycles()
    for choice in product((0, 1), repeat=len(cycles)):
        pairs = set(m0.pairs)
        eps = {}
        for cycle, e in zip(cycles, choice):
            eps[frozenset(cycle)] = e
            if e:
                edges = [frozenset((cycle[k], cycle[(k + 1) % len(cycle)])) for k in range(len(cycle))]
                pairs -= {edge for edge in edges if edge in m0.pairs}
                pairs |= {edge for edge in edges if edge not in m0.pairs}
        yield eps, PerfectMatching(pairs)

def matchings_from_rcrsf(f: Configuration, m0: PerfectMatching) -> list[PerfectMatching]:
    return [matching for _, matching in iter_epsilon_matchings(f, m0)]

def enumerate_rcrsf(g: RootedGraph, m0: PerfectMatching) -> list[RCRSF]:
    require_matching(g, m0)
    family = [
        RCRSF(out, g.n)
        for out in iter_compatible_assignments(g, m0, acyclic=False)
        if alternating_cycles(out, m0)
    ]
    logger.debug("%d RCRSFs compatible with %s", len(family), m0.label())
    return family

def complete_reverse(out: dict[int, int], m0: PerfectMatching, eps: dict[frozenset, int]) -> list[tuple[int, ...]]:
    """Recovers the opening paths of a configuration, given which of its cycles come from M0 ∪ M (ε = 1).

    Paths are returned in the order the opening produced them.
    """
    remaining = dict(out)
    gammas = []
    while True:
        cycles = functional_cycles(remaining)
        created = [
            cycle for cycle in cycles
            if not eps.get(frozenset(cycle), 0) and not hanging_vertices(remaining, cycle)
        ]
        x = max((cycle[0] for cycle in created), default=None)
        y = max(leaves(remaining), default=None)
        if x is None and y is None:
            break
        if y is None or (x is not None and x > y):
            cycle = next(cycle for cycle in created if cycle[0] == x)
            if remaining[x] != m0.partner(x):
                raise InvariantError(f"cycle {cycle} is not oriented along the M0 edge at its minimum",
                                     {"cycle": list(cycle)})
            gamma = cycle + (x,)
        else:
            on_cycle = {v for cycle in cycles for v in cycle}
            degrees = in_degrees(remaining)

            def stop(v: int) -> bool:
                return v not in remaining or v in on_cycle or degrees[v] >= 2 or v < y

            path = walk(remaining, y, stop)
            gamma = tuple(path)
            entry = path[-1]
            if entry in on_cycle:
                cycle = next(cycle for cycle in cycles if entry in cycle)
                unique_branch = hanging_vertices(remaining, cycle) == set(path[:-1])
                if not eps.get(frozenset(cycle), 0) and unique_branch and y < cycle[0]:
                    if remaining[entry] != m0.partner(entry):
                        raise InvariantError(f"loop entered at {entry} does not leave along its M0 edge",
                                             {"path": path, "cycle": list(cycle)})
                    k = cycle.index(entry)
                    gamma = tuple(path) + cycle[k + 1:] + cycle[:k + 1]
        for v in gamma[:-1]:
            del remaining[v]
        gammas.append(gamma)
    for cycle in functional_cycles(remaining):
        if remaining[cycle[0]] != m0.partner(cycle[0]):
            raise InvariantError(f"initial cycle {cycle} is not oriented along the M0 edge at its minimum",
                                 {"cycle": list(cycle)})
    return list(reversed(gammas))


class CorrespondenceReport:
    def __init__(self, m0: PerfectMatching):
        self.m0 = m0
        self.mismatches: list[dict] = []
        self.output_count = 0
        self.rcrsf_count = 0
        self.forest_count = 0
        self.forest_total = Fraction(0)
        self.half_forest_total = Fraction(0)

    @property
    def passed(self) -> bool:
        return not self.mismatches

    def add(self, reason: str, **details) -> None:
        self.mismatches.append({"reason": reason, **details})

    def to_dict(self) -> dict:
        return {
            "m0": self.m0.label(),
            "passed": self.passed,
            "outputs": self.output_count,
            "condition_C_rcrsfs": self.rcrsf_count,
            "forests": self.forest_count,
            "forest_total": format_rational(self.forest_total),
            "half_forest_total": format_rational(self.half_forest_total),
            "mismatches": self.mismatches,
        }

# A cycle is inherited from M0 ∪ M (ε = 1) when its non-M0 edges all belong to M
def _epsilon(f: Configuration, origin: PerfectMatching, m0: PerfectMatching) -> dict[frozenset, int]:
    eps = {}
    for cycle in f.cycles():
        edges = [(cycle[k], cycle[(k + 1) % len(cycle)]) for k in range(len(cycle))]
        eps[frozenset(cycle)] = int(all(origin.contains(i, j) for i, j in edges if not m0.contains(i, j)))
    return eps

def verify_correspondence(g: RootedGraph, m0: PerfectMatching) -> CorrespondenceReport:
    """Checks that the openings of all matchings produce each Condition (C) RCRSF once per ε,
    that unicycle contributions cancel and that the forests left carry the half-forest sum.
    """
    require_matching(g, m0)
    report = CorrespondenceReport(m0)
    produced: dict[tuple, list[OutputItem]] = defaultdict(list)
    for m in enumerate_perfect_matchings(g):
        for item in run_complete(m0, m, g):
            produced[item.configuration().orientation_free_key()].append(item)
            report.output_count += 1

    expected: dict[tuple, RCRSF] = {}
    for f in enumerate_rcrsf(g, m0):
        if rcrsf_condition_C(f, m0):
            expected.setdefault(f.orientation_free_key(), f)
    report.rcrsf_count = len(expected)

    for key in produced.keys() - expected.keys():
        report.add("output fails Condition (C)", labels=[item.label() for item in produced[key]])
    for key, f in expected.items():
        items = produced.get(key, [])
        k = len(f.cycles())
        if len(items) != 2 ** k:
            report.add("wrong multiplicity", rcrsf=f.to_dict(), expected=2 ** k, found=len(items))
            continue
        allowed = matchings_from_rcrsf(f, m0)
        origins = sorted(item.origin.label() for item in items)
        if origins != sorted(matching.label() for matching in allowed):
            report.add("origins are not the ε-matchings", rcrsf=f.to_dict(), origins=origins)
        for item in items:
            config = item.configuration()
            if complete_reverse(item.out, m0, _epsilon(config, item.origin, m0)) != item.provenance:
                report.add("reverse algorithm does not recover the opening paths",
                           label=item.label(), origin=item.origin.label())
        residue = sum((item.weight for item in items), Fraction(0))
        if k:
            if residue != 0:
                report.add("unicycle contributions do not cancel", rcrsf=f.to_dict(), residue=format_rational(residue))
            continue
        report.forest_count += 1
        report.forest_total += residue
        [forest] = items
        expected_weight = half_forest_weight(forest.configuration(), m0, g)
        if residue != expected_weight:
            report.add("forest weight differs from its half-forest term", rcrsf=f.to_dict(),
                       weight=format_rational(residue), expected=format_rational(expected_weight))
    report.half_forest_total = pfaffian_via_half_forests(g, m0)
    if report.forest_total != report.half_forest_total:
        report.add("forest sum differs from the half-forest sum",
                   forest_total=format_rational(report.forest_total),
                   half_forest_total=format_rational(report.half_forest_total))
    logger.debug("correspondence for %s: %d outputs, %d keys, %d mismatches",
                 m0.label(), report.output_count, len(expected), len(report.mismatches))
    return report
