import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Callable

from config import *
from forests import determinant_via_forests, half_forest_family, pfaffian_via_half_forests
from graphmodel import (
    enumerate_perfect_matchings,
    graph_from_matrix,
    matching_weight,
    pfaffian_via_matchings,
    require_matching,
    superimpose_and_orient,
)
from linebundle import Connection, core_graph, cycle_cover_expansion, det_via_crsf, random_connection, twist
from model import *
from opening import open_step1, run_complete, verify_correspondence
from skewmatrix import determinant, pfaffian_by_elimination, pfaffian_by_pairings, principal_submatrix, validate

logger = logging.getLogger(__name__)

# A check returns (lhs, rhs) or (lhs, rhs, payload); it passes when both sides are equal
Check = Callable[[], tuple]


def _serialize(value):
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, (int, Fraction)):
        return format_rational(value)
    return str(value)


class CheckRecord:
    def __init__(self, name: str, status: CheckStatus, lhs=None, rhs=None, payload: dict | None = None,
                 elapsed: float = 0.0):
        self.name = name
        self.status = status
        self.lhs = lhs
        self.rhs = rhs
        self.payload = payload
        self.elapsed = elapsed

    def to_dict(self, include_timing: bool = False) -> dict:
        record = {"name": self.name, "status": self.status.value, "lhs": _serialize(self.lhs), "rhs": _serialize(self.rhs)}
        if self.payload:
            record["payload"] = self.payload
        if include_timing:
            record["elapsed"] = round(self.elapsed, 6)
        return record

class VerificationReport:
    def __init__(self, descriptor: dict, checks: list[CheckRecord] | None = None):
        self.descriptor = descriptor
        self.checks: list[CheckRecord] = checks or []

    @property
    def passed(self) -> bool:
        return all(check.status is not CheckStatus.FAILED for check in self.checks)

    def failed(self) -> list[CheckRecord]:
        return [check for check in self.checks if check.status is CheckStatus.FAILED]

    def to_dict(self, include_timing: bool = False) -> dict:
        return {
            "instance": self.descriptor,
            "passed": self.passed,
            "checks": [check.to_dict(include_timing) for check in self.checks],
        }


def _run_check(name: str, check: Check | None, reason: str = "") -> CheckRecord:
    if check is None:
        logger.info("%s: skipped (%s)", name, reason)
        return CheckRecord(name, CheckStatus.SKIPPED, payload={"reason": reason})
    start = time.perf_counter()
    try:
        outcome = check()
    except InvariantError as e:
        record = CheckRecord(name, CheckStatus.FAILED, payload={"error": str(e), **e.payload})
    else:
        lhs, rhs = outcome[0], outcome[1]
        payload = outcome[2] if len(outcome) > 2 else None
        status = CheckStatus.PASSED if lhs == rhs else CheckStatus.FAILED
        record = CheckRecord(name, status, lhs, rhs, payload)
    record.elapsed = time.perf_counter() - start
    logger.info("%s: %s in %.3fs", name, record.status.value, record.elapsed)
    return record

def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV_VAR, str(DEFAULT_THREADS))
    try:
        threads = int(raw)
    except ValueError:
        raise PreconditionError(f"{THREADS_ENV_VAR} must be a positive integer, got {raw!r}")
    if threads < 1:
        raise PreconditionError(f"{THREADS_ENV_VAR} must be a positive integer, got {threads}")
    return threads


class SuiteRunner:
    """Collects the checks of the selected suites for one instance and runs them.

    Checks needing a root are skipped on matrices with r = 0.
    """

    def __init__(self, m: SkewMatrix, m0: PerfectMatching | None = None, connection: Connection | None = None,
                 seed: int = DEFAULT_SEED):
        self.m = m
        self.g = graph_from_matrix(m)
        self.core = principal_submatrix(m, m.r)
        self.connection = connection
        self.seed = seed
        if m0 is not None:
            require_matching(self.g, m0)
            self.references = [m0]
        else:
            self.references = enumerate_perfect_matchings(self.g)
        self._pfaffian: Fraction | None = None

    @property
    def pfaffian(self) -> Fraction:
        if self._pfaffian is None:
            self._pfaffian = pfaffian_by_elimination(self.core)
        return self._pfaffian

    def _rootless_reason(self) -> str:
        return "" if self.m.r >= 1 else "matrix has no root vertices"

    def pfaffian_checks(self) -> list[tuple]:
        checks = [
            ("pfaffian: pairings = elimination", lambda: (pfaffian_by_pairings(self.core), self.pfaffian)),
            ("pfaffian: det = Pf^2", lambda: (determinant(self.core), self.pfaffian ** 2)),
        ]
        if self.m.zero_sum:
            def zero_sum():
                report = validate(self.m, require_zero_sum=True)
                return report.passed, True, (None if report.passed else report.to_dict())
            checks.append(("pfaffian: zero row sums", zero_sum))
        if not self.references:
            checks.append(("pfaffian: no perfect matching gives Pf = 0", lambda: (self.pfaffian, 0)))
        for m0 in self.references:
            checks.append((f"pfaffian: matching sum [{m0.label()}]",
                           lambda m0=m0: (pfaffian_via_matchings(self.g, m0), self.pfaffian)))
        return checks

    def halftree_checks(self) -> list[tuple]:
        reason = self._rootless_reason()
        if reason:
            return [("halftree", None, reason)]
        checks = []
        for m0 in self.references:
            def half_forests(m0=m0):
                total = pfaffian_via_half_forests(self.g, m0)
                return total, self.pfaffian, {"half_forests": len(half_forest_family(self.g, m0))}
            checks.append((f"halftree: half-forest sum [{m0.label()}]", half_forests))
        if len(self.references) > 1:
            def independence():
                values = {m0.label(): format_rational(pfaffian_via_half_forests(self.g, m0)) for m0 in self.references}
                return len(set(values.values())), 1, values
            checks.append(("halftree: reference independence", independence))
        return checks

    def det_forest_checks(self) -> list[tuple]:
        reason = self._rootless_reason()
        if reason:
            return [("det-forest", None, reason)]
        return [("det-forest: forests = det", lambda: (determinant_via_forests(self.g), determinant(self.core)))]

    def opening_checks(self) -> list[tuple]:
        reason = self._rootless_reason()
        if reason:
            return [("opening", None, reason)]
        matchings = enumerate_perfect_matchings(self.g)
        checks = []
        for m0 in self.references:
            def step_one(m0=m0):
                lhs = sum((open_step1(superimpose_and_orient(m0, m), self.g).total() for m in matchings), Fraction(0))
                return lhs, self.pfaffian
            def complete(m0=m0):
                lhs = Fraction(0)
                for m in matchings:
                    output = run_complete(m0, m, self.g)
                    expected = matching_weight(superimpose_and_orient(m0, m), self.g)
                    if output.total() != expected:
                        return output.total(), expected, {"matching": m.label()}
                    lhs += output.total()
                return lhs, self.pfaffian
            def correspondence(m0=m0):
                report = verify_correspondence(self.g, m0)
                return len(report.mismatches), 0, report.to_dict()
            checks += [
                (f"opening: step one preserves the weights [{m0.label()}]", step_one),
                (f"opening: complete opening preserves the weights [{m0.label()}]", complete),
                (f"opening: RCRSF correspondence [{m0.label()}]", correspondence),
            ]
        return checks

    def linebundle_checks(self) -> list[tuple]:
        if self.m.size % 2 or self.m.size > LINEBUNDLE_MAX_SIZE:
            return [("linebundle", None, f"matrix size {self.m.size} is odd or above {LINEBUNDLE_MAX_SIZE}")]
        checks = [("linebundle: cycle covers = det", lambda: (cycle_cover_expansion(self.m), determinant(self.m)))]
        if not self.m.zero_sum:
            checks.append(("linebundle: CRSF sums", None, "matrix is not flagged zero-sum"))
            return checks
        g = core_graph(self.m)
        c = self.connection or random_connection(g, self.seed)
        return checks + [
            ("linebundle: det(A^psi) = CRSF sum", lambda: (determinant(twist(self.m, c)), det_via_crsf(self.m, c))),
            ("linebundle: trivial connection", lambda: (det_via_crsf(self.m, Connection.identity(g)), 0)),
        ]

    def checks(self, suite: Suite) -> list[tuple]:
        builders = {
            Suite.PFAFFIAN: self.pfaffian_checks,
            Suite.HALFTREE: self.halftree_checks,
            Suite.DET_FOREST: self.det_forest_checks,
            Suite.OPENING: self.opening_checks,
            Suite.LINEBUNDLE: self.linebundle_checks,
        }
        selected = [s for s in builders if suite in (s, Suite.ALL)]
        return [check for s in selected for check in builders[s]()]

    def run(self, suite: Suite, descriptor: dict, threads: int | None = None) -> VerificationReport:
        checks = self.checks(suite)
        with ThreadPoolExecutor(max_workers=threads or thread_count()) as pool:
            records = list(pool.map(lambda check: _run_check(*check), checks))
        report = VerificationReport(descriptor, records)
        logger.info("%d checks, %d failed", len(records), len(report.failed()))
        return report


def run_suites(m: SkewMatrix, suite: Suite = Suite.ALL, descriptor: dict | None = None,
               m0: PerfectMatching | None = None, connection: Connection | None = None,
               seed: int = DEFAULT_SEED) -> VerificationReport:
    descriptor = descriptor or {"n": m.n, "r": m.r}
    return SuiteRunner(m, m0, connection, seed).run(suite, descriptor)
