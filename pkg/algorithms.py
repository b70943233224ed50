from collections import Counter
from typing import Callable, Iterator

# Functional-graph primitives shared by the forest, opening and line-bundle code.
# A configuration is a dict out: v -> w with one outgoing edge per vertex.


def in_degrees(out: dict[int, int]) -> Counter:
    return Counter(out.values())

def leaves(out: dict[int, int]) -> list[int]:
    degrees = in_degrees(out)
    return [v for v in out if degrees[v] == 0]

def functional_cycles(out: dict[int, int]) -> list[tuple[int, ...]]:
    """Cycles of the functional graph, each following `out` and rotated to start at its minimum."""
    seen: set[int] = set()
    cycles = []
    for start in sorted(out):
        if start in seen:
            continue
        trail: list[int] = []
        position: dict[int, int] = {}
        v = start
        while v in out and v not in seen and v not in position:
            position[v] = len(trail)
            trail.append(v)
            v = out[v]
        if v in position:
            cycle = trail[position[v]:]
            k = cycle.index(min(cycle))
            cycles.append(tuple(cycle[k:] + cycle[:k]))
        seen.update(trail)
    return cycles

# Vertices whose forward orbit ends on `cycle`, the cycle itself excluded
def hanging_vertices(out: dict[int, int], cycle: tuple[int, ...]) -> set[int]:
    on_cycle = set(cycle)
    hanging = set()
    for start in out:
        v = start
        trail = []
        while v in out and v not in on_cycle and v not in hanging and v not in trail:
            trail.append(v)
            v = out[v]
        if v in on_cycle or v in hanging:
            hanging.update(trail)
    return hanging - on_cycle

def walk(out: dict[int, int], start: int, stop: Callable[[int], bool]) -> list[int]:
    path = [start]
    v = start
    while True:
        v = out[v]
        path.append(v)
        if stop(v):
            return path

def strip_paths(out: dict[int, int]) -> list[tuple[int, ...]]:
    """Repeatedly strip the path hanging from the largest leaf.

    The walk leaves the start vertex and stops at the first vertex that
    - has no outgoing edge left (a root),
    - lies on a cycle of the configuration,
    - is a fork (in-degree >= 2 in what remains), or
    - is smaller than the leaf.
    Out-edges of the path are removed; stops once no leaf is left, so only
    cycles (or nothing) remain.
    """
    remaining = dict(out)
    on_cycle = {v for cycle in functional_cycles(out) for v in cycle}
    paths = []
    while True:
        degrees = in_degrees(remaining)
        candidates = [v for v in remaining if degrees[v] == 0]
        if not candidates:
            return paths
        leaf = max(candidates)

        def stop(v: int) -> bool:
            return v not in remaining or v in on_cycle or degrees[v] >= 2 or v < leaf

        path = walk(remaining, leaf, stop)
        for v in path[:-1]:
            del remaining[v]
        paths.append(tuple(path))

def _closes_cycle(out: dict[int, int], v: int, w: int) -> bool:
    x = w
    while True:
        if x == v:
            return True
        if x not in out:
            return False
        x = out[x]

def iter_out_maps(choices: dict[int, list[int]], acyclic: bool = False) -> Iterator[dict[int, int]]:
    """All maps v -> choices[v], in lexicographic order of the sorted vertices.

    With `acyclic` the search prunes every partial assignment closing a cycle.
    """
    order = sorted(choices)
    out: dict[int, int] = {}

    def extend(index: int) -> Iterator[dict[int, int]]:
        if index == len(order):
            yield dict(out)
            return
        v = order[index]
        for w in choices[v]:
            if acyclic and _closes_cycle(out, v, w):
                continue
            out[v] = w
            yield from extend(index + 1)
            del out[v]

    yield from extend(0)
