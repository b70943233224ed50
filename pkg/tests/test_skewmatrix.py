from fractions import Fraction

import pytest
from hypothesis import given, settings

from model import MatrixFormatError, PreconditionError, SkewMatrix
from skewmatrix import (
    determinant,
    format_matrix,
    parse_matrix,
    permutation_sign,
    pfaffian_by_elimination,
    pfaffian_by_pairings,
    principal_submatrix,
    random_instance,
    read_matrix,
    relabel,
    validate,
    write_matrix,
)
from helpers import skew_matrices


def skew(upper: dict[tuple[int, int], Fraction], size: int, **kwargs) -> SkewMatrix:
    entries = [[Fraction(0)] * size for _ in range(size)]
    for (i, j), value in upper.items():
        entries[i - 1][j - 1] = Fraction(value)
        entries[j - 1][i - 1] = -Fraction(value)
    return SkewMatrix(entries, **kwargs)


def test_pfaffian_of_2x2_is_the_upper_entry():
    m = skew({(1, 2): Fraction(3, 4)}, 2)
    assert pfaffian_by_pairings(m) == Fraction(3, 4)
    assert pfaffian_by_elimination(m) == Fraction(3, 4)

def test_pfaffian_of_empty_matrix_is_one():
    assert pfaffian_by_pairings(SkewMatrix([])) == 1

def test_pfaffian_of_odd_size_is_zero():
    m = skew({(1, 2): 1, (1, 3): 2, (2, 3): 5}, 3)
    assert pfaffian_by_pairings(m) == 0
    assert pfaffian_by_elimination(m) == 0

def test_pfaffian_of_4x4_follows_the_three_pairings():
    values = {(1, 2): 1, (1, 3): 2, (1, 4): 3, (2, 3): 4, (2, 4): 5, (3, 4): 6}
    m = skew(values, 4)
    expected = 1 * 6 - 2 * 5 + 3 * 4
    assert pfaffian_by_pairings(m) == expected
    assert pfaffian_by_elimination(m) == expected
    assert determinant(m) == expected ** 2

def test_elimination_needs_a_pivot_swap():
    m = skew({(1, 3): 2, (2, 4): 7}, 4)
    assert pfaffian_by_elimination(m) == pfaffian_by_pairings(m) == -14

@settings(max_examples=200, deadline=None)
@given(skew_matrices(min_size=2, max_size=8))
def test_pfaffian_oracles_agree(m):
    pf = pfaffian_by_pairings(m)
    assert pfaffian_by_elimination(m) == pf
    assert determinant(m) == pf ** 2


def test_permutation_sign():
    assert permutation_sign([1, 2, 3]) == 1
    assert permutation_sign([2, 1]) == -1
    assert permutation_sign([2, 3, 1]) == 1
    assert permutation_sign([1, 4, 2, 3]) == 1
    assert permutation_sign([5]) == 1


def test_validate_reports_broken_cells_and_rows():
    m = SkewMatrix([[0, 1, 0], [-1, 0, 2], [0, -3, 0]])
    report = validate(m, require_zero_sum=True)
    assert not report.passed
    assert report.antisymmetry_violations == [(2, 3)]
    assert [row for row, _ in report.row_sum_violations] == [1, 2, 3]

def test_validate_ignores_row_sums_unless_asked():
    m = skew({(1, 2): 1}, 2)
    assert validate(m).passed
    assert not validate(m, require_zero_sum=True).passed


@pytest.mark.parametrize("n,r", [(2, 1), (4, 1), (4, 2), (6, 1)])
def test_random_instance_has_zero_row_sums(n, r):
    m = random_instance(n, r, seed=11)
    assert (m.n, m.r, m.size) == (n, r, n + r)
    assert m.zero_sum
    assert validate(m, require_zero_sum=True).passed

def test_random_instance_is_reproducible():
    assert random_instance(4, 2, seed=5) == random_instance(4, 2, seed=5)
    assert random_instance(4, 2, seed=5) != random_instance(4, 2, seed=6)

def test_random_instance_on_an_edge_set_keeps_the_support():
    edges = [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4), (3, 5), (4, 5)]
    m = random_instance(4, 1, edge_set=edges, seed=1)
    support = {(i, j) for i in range(1, 6) for j in range(i + 1, 6) if m.a(i, j) != 0}
    assert support == set(edges)
    assert validate(m, require_zero_sum=True).passed

def test_random_instance_rejects_bridges():
    with pytest.raises(PreconditionError):
        random_instance(2, 1, edge_set=[(1, 2), (2, 3)])

@pytest.mark.parametrize("n,r", [(3, 1), (4, 0), (-2, 1)])
def test_random_instance_rejects_bad_sizes(n, r):
    with pytest.raises(PreconditionError):
        random_instance(n, r)


def test_principal_submatrix_drops_the_roots():
    m = random_instance(4, 2, seed=2)
    core = principal_submatrix(m, 2)
    assert (core.size, core.n, core.r) == (4, 4, 0)
    assert not core.zero_sum
    assert core.a(1, 3) == m.a(1, 3)
    with pytest.raises(PreconditionError):
        principal_submatrix(m, 7)

@pytest.mark.parametrize("order", [[2, 1, 3, 4], [4, 3, 2, 1], [3, 1, 4, 2]])
def test_relabel_changes_the_pfaffian_by_the_permutation_sign(order):
    m = random_instance(4, 1, seed=9)
    relabeled = relabel(m, order)
    assert validate(relabeled, require_zero_sum=True).passed
    before = pfaffian_by_elimination(principal_submatrix(m, 1))
    after = pfaffian_by_elimination(principal_submatrix(relabeled, 1))
    assert after == permutation_sign(order) * before
    assert relabeled.a(5, 1) == m.a(5, order[0])

def test_relabel_rejects_non_permutations():
    with pytest.raises(PreconditionError):
        relabel(random_instance(2, 1), [1, 1])


def test_matrix_text_survives_a_file(tmp_path):
    m = random_instance(4, 1, seed=4)
    path = tmp_path / "instance.txt"
    write_matrix(m, path)
    assert path.read_text().splitlines()[0] == "4 1"
    loaded = read_matrix(path)
    assert loaded == m
    assert loaded.zero_sum

def test_parse_matrix_reads_fractions():
    m = parse_matrix("2 0\n0 -3/4\n3/4 0\n")
    assert m.a(2, 1) == Fraction(3, 4)
    assert not m.zero_sum
    assert format_matrix(m) == "2 0\n0 -3/4\n3/4 0\n"

@pytest.mark.parametrize("text", [
    "",
    "2\n0 1\n-1 0\n",
    "3 0\n0 1 1\n-1 0 1\n-1 -1 0\n",
    "2 0\n0 1\n1 0\n",
    "2 0\n0 x\n-1 0\n",
    "2 0\n0 1\n",
    "2 0\n0 1 2\n-1 0\n",
])
def test_parse_matrix_rejects_malformed_text(text):
    with pytest.raises(MatrixFormatError):
        parse_matrix(text)

def test_read_matrix_rejects_binary_files(tmp_path):
    path = tmp_path / "binary.txt"
    path.write_bytes(b"2 1\n0 1 \xff\n")
    with pytest.raises(MatrixFormatError):
        read_matrix(path)
