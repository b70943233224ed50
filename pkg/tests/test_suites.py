import json

import pytest

from config import THREADS_ENV_VAR
from model import CheckStatus, PerfectMatching, PreconditionError, SkewMatrix, Suite
from skewmatrix import random_instance
from suites import SuiteRunner, run_suites, thread_count


def statuses(report) -> dict[str, CheckStatus]:
    return {check.name: check.status for check in report.checks}


def test_halftree_suite_on_the_running_example(canonical_matrix, m0):
    report = run_suites(canonical_matrix, Suite.HALFTREE, m0=m0)
    assert report.passed
    [check] = report.checks
    assert check.name == "halftree: half-forest sum [1-4,2-3]"
    assert check.payload == {"half_forests": 4}

def test_all_suites_pass_on_the_running_example(canonical_matrix):
    report = run_suites(canonical_matrix, Suite.ALL, {"name": "running example"})
    assert report.passed, [check.to_dict() for check in report.failed()]
    found = statuses(report)
    assert found["halftree: reference independence"] is CheckStatus.PASSED
    assert found["linebundle"] is CheckStatus.SKIPPED
    document = json.loads(json.dumps(report.to_dict()))
    assert document["instance"] == {"name": "running example"}
    assert document["passed"] is True

@pytest.mark.parametrize("seed", [0, 1, 2])
def test_all_suites_pass_on_random_instances(seed):
    report = run_suites(random_instance(4, 2, seed=seed, density=0.8), Suite.ALL)
    assert report.passed, [check.to_dict() for check in report.failed()]
    assert statuses(report)["linebundle: det(A^psi) = CRSF sum"] is CheckStatus.PASSED

def test_rootless_matrix_skips_the_forest_suites():
    m = SkewMatrix([[0, 1, 2, 3], [-1, 0, 4, 5], [-2, -4, 0, 6], [-3, -5, -6, 0]])
    report = run_suites(m, Suite.ALL)
    assert report.passed
    found = statuses(report)
    for name in ("halftree", "det-forest", "opening", "linebundle: CRSF sums"):
        assert found[name] is CheckStatus.SKIPPED
    assert found["linebundle: cycle covers = det"] is CheckStatus.PASSED
    skipped = next(check for check in report.checks if check.name == "halftree")
    assert skipped.to_dict()["payload"] == {"reason": "matrix has no root vertices"}

def test_broken_row_sums_fail_with_a_payload(canonical_matrix):
    entries = canonical_matrix.rows()
    entries[2][3] *= 2
    entries[3][2] *= 2
    m = SkewMatrix(entries, n=4, r=1, zero_sum=True)
    report = run_suites(m, Suite.ALL)
    assert not report.passed
    failed = {check.name: check for check in report.failed()}
    assert "pfaffian: zero row sums" in failed
    assert failed["pfaffian: zero row sums"].payload["row_sum_violations"]
    assert "parent" in failed["opening: step one preserves the weights [1-4,2-3]"].payload
    json.dumps(report.to_dict())

def test_pinned_reference_matching(canonical_matrix, m0):
    report = run_suites(canonical_matrix, Suite.PFAFFIAN, m0=m0)
    assert [check.name for check in report.checks if "matching sum" in check.name] == [
        "pfaffian: matching sum [1-4,2-3]",
    ]

def test_reference_matching_must_be_in_the_graph(canonical_matrix):
    with pytest.raises(PreconditionError):
        SuiteRunner(canonical_matrix, PerfectMatching.from_text("1-2,3-5"))


def test_thread_count_reads_the_environment(monkeypatch):
    monkeypatch.delenv(THREADS_ENV_VAR, raising=False)
    assert thread_count() == 1
    monkeypatch.setenv(THREADS_ENV_VAR, "3")
    assert thread_count() == 3

@pytest.mark.parametrize("value", ["zero", "0", "-2"])
def test_thread_count_rejects_bad_values(monkeypatch, value):
    monkeypatch.setenv(THREADS_ENV_VAR, value)
    with pytest.raises(PreconditionError):
        thread_count()

def test_report_does_not_depend_on_the_thread_count(canonical_matrix):
    runner = SuiteRunner(canonical_matrix)
    one = runner.run(Suite.ALL, {}, threads=1).to_dict()
    four = runner.run(Suite.ALL, {}, threads=4).to_dict()
    assert one == four
    assert "elapsed" not in one["checks"][0]
    assert "elapsed" in runner.run(Suite.PFAFFIAN, {}, threads=1).to_dict(include_timing=True)["checks"][0]
