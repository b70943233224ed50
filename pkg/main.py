import argparse
import json
import logging
import sys

from config import *
from forests import compatible_forests, enumerate_spanning_forests, half_forest_family, half_forest_weight
from graphmodel import (
    enumerate_perfect_matchings,
    graph_from_matrix,
    matching_weight,
    require_matching,
    superimpose_and_orient,
)
from hypergraph import enumerate_3graph_trees
from linebundle import core_graph, enumerate_crsf, read_connection
from model import *
from opening import enumerate_rcrsf, rcrsf_condition_C
from skewmatrix import format_matrix, random_instance, read_matrix, write_matrix
from suites import run_suites

logger = logging.getLogger(__name__)


def parse_edges(text: str) -> list[tuple[int, int]]:
    # "1-2,1-3,..." has the same shape as a matching
    edges = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        try:
            i, j = (int(part) for part in token.split("-"))
        except ValueError:
            raise PreconditionError(f"malformed edge {token!r}, expected 'i-j'")
        edges.append((i, j))
    return edges

def _add_generator_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--n", type=int, default=DEFAULT_N, help="number of non-root vertices (even)")
    parser.add_argument("--r", type=int, default=DEFAULT_R, help="number of root vertices")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    parser.add_argument("--value-range", type=int, default=DEFAULT_VALUE_RANGE,
                        help="bound on numerators and denominators")
    parser.add_argument("--density", type=float, default=DEFAULT_DENSITY)
    parser.add_argument("--edges", help="restrict the support, e.g. 1-2,1-3,2-3")

def _generate(args) -> tuple[SkewMatrix, dict]:
    edges = parse_edges(args.edges) if args.edges else None
    matrix = random_instance(args.n, args.r, edge_set=edges, seed=args.seed,
                             value_range=args.value_range, density=args.density)
    descriptor = {"n": args.n, "r": args.r, "seed": args.seed, "value_range": args.value_range,
                  "density": args.density}
    if args.edges:
        descriptor["edges"] = args.edges
    return matrix, descriptor

def _load(args) -> tuple[SkewMatrix, dict]:
    if args.random or not args.matrix:
        return _generate(args)
    matrix = read_matrix(args.matrix)
    return matrix, {"n": matrix.n, "r": matrix.r, "file": args.matrix}


def cmd_generate(args) -> int:
    matrix, descriptor = _generate(args)
    if args.out:
        write_matrix(matrix, args.out)
        descriptor["file"] = args.out
        print(json.dumps(descriptor))
    else:
        sys.stdout.write(format_matrix(matrix))
    return 0

def cmd_verify(args) -> int:
    matrix, descriptor = _load(args)
    m0 = PerfectMatching.from_text(args.m0) if args.m0 else None
    connection = read_connection(args.connection) if args.connection else None
    report = run_suites(matrix, Suite(args.suite), descriptor, m0=m0, connection=connection, seed=args.seed)
    print(json.dumps(report.to_dict(include_timing=args.timing), indent=2))
    return 0 if report.passed else 1

def _enumerate_lines(args):
    kind = EnumerationKind(args.kind)
    if kind is EnumerationKind.TREES_3:
        for tree in enumerate_3graph_trees(args.v):
            yield {"tree": tree.label()}
        return
    matrix, _ = _load(args)
    g = graph_from_matrix(matrix)
    m0 = PerfectMatching.from_text(args.m0) if args.m0 else None
    if m0 is not None:
        require_matching(g, m0)
    if kind in (EnumerationKind.FORESTS_C, EnumerationKind.RCRSF) and m0 is None:
        raise PreconditionError(f"--kind {kind.value} needs --m0")
    if kind is EnumerationKind.MATCHINGS:
        for m in enumerate_perfect_matchings(g):
            line = {"matching": m.label()}
            if m0 is not None:
                line["weight"] = format_rational(matching_weight(superimpose_and_orient(m0, m), g))
            yield line
    elif kind is EnumerationKind.FORESTS:
        forests = compatible_forests(g, m0) if m0 else enumerate_spanning_forests(g)
        for f in forests:
            yield {**f.to_dict(), "weight": format_rational(g.product(f.edges()))}
    elif kind is EnumerationKind.FORESTS_C:
        for f in half_forest_family(g, m0):
            yield {**f.to_dict(), "weight": format_rational(half_forest_weight(f, m0, g))}
    elif kind is EnumerationKind.RCRSF:
        for f in enumerate_rcrsf(g, m0):
            yield {**f.to_dict(), "condition_C": rcrsf_condition_C(f, m0)}
    elif kind is EnumerationKind.CRSF:
        for f in enumerate_crsf(core_graph(matrix)):
            yield f.to_dict()

def cmd_enumerate(args) -> int:
    for line in _enumerate_lines(args):
        print(json.dumps(line))
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")

    parser = argparse.ArgumentParser(prog="main.py", description="Pfaffian half-tree identities on exact matrices")
    commands = parser.add_subparsers(dest="command", required=True)

    generate = commands.add_parser("generate", parents=[common], help="write a random zero-sum instance")
    _add_generator_arguments(generate)
    generate.add_argument("--out", help="matrix file; the matrix goes to stdout when omitted")
    generate.set_defaults(handler=cmd_generate)

    verify = commands.add_parser("verify", parents=[common], help="run the identity suites on an instance")
    verify.add_argument("matrix", nargs="?", help="matrix file")
    verify.add_argument("--random", action="store_true", help="verify a generated instance instead of a file")
    _add_generator_arguments(verify)
    verify.add_argument("--suite", choices=[suite.value for suite in Suite], default=Suite.ALL.value)
    verify.add_argument("--m0", help="pin the reference matching, e.g. 1-4,2-3")
    verify.add_argument("--connection", help="connection file for the linebundle suite")
    verify.add_argument("--timing", action="store_true", help="include elapsed seconds per check")
    verify.set_defaults(handler=cmd_verify)

    enumerate_ = commands.add_parser("enumerate", parents=[common], help="list configurations as JSON lines")
    enumerate_.add_argument("matrix", nargs="?", help="matrix file")
    enumerate_.add_argument("--random", action="store_true")
    _add_generator_arguments(enumerate_)
    enumerate_.add_argument("--kind", choices=[kind.value for kind in EnumerationKind], required=True)
    enumerate_.add_argument("--m0", help="reference matching, e.g. 1-4,2-3")
    enumerate_.add_argument("--v", type=int, default=5, help="vertex count for --kind 3trees")
    enumerate_.set_defaults(handler=cmd_enumerate)
    return parser

def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(stream=sys.stderr, format=LOG_FORMAT,
                        level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.handler(args)
    except (MatrixFormatError, PreconditionError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
