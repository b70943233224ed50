from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings

from linebundle import (
    Connection,
    core_graph,
    crsf_condition_C,
    cycle_cover_expansion,
    det_via_crsf,
    enumerate_crsf,
    monodromy,
    parse_connection,
    random_connection,
    read_connection,
    twist,
    write_connection,
)
from model import CRSF, MatrixFormatError, PreconditionError, SkewMatrix
from skewmatrix import determinant, random_instance
from helpers import skew_matrices


def complete4() -> SkewMatrix:
    values = {(1, 2): 1, (1, 3): 2, (1, 4): 3, (2, 3): 4, (2, 4): 5, (3, 4): 6}
    entries = [[Fraction(0)] * 4 for _ in range(4)]
    for (i, j), value in values.items():
        entries[i - 1][j - 1] = Fraction(value)
        entries[j - 1][i - 1] = -Fraction(value)
    return SkewMatrix(entries)


def test_connection_completes_reciprocals():
    c = Connection({(1, 2): Fraction(3, 4)})
    assert c.value(2, 1) == Fraction(4, 3)
    assert Connection({(1, 2): 2, (2, 1): Fraction(1, 2)}) == Connection({(2, 1): Fraction(1, 2)})

@pytest.mark.parametrize("psi", [{(1, 2): 0}, {(1, 2): 2, (2, 1): 2}])
def test_connection_rejects_bad_transports(psi):
    with pytest.raises(PreconditionError):
        Connection(psi)

def test_connection_text(tmp_path):
    c = parse_connection("1 2 3/4\n\n2 3 -2\n")
    assert c.value(3, 2) == Fraction(-1, 2)
    path = tmp_path / "psi.txt"
    write_connection(c, path)
    assert path.read_text() == "1 2 3/4\n2 3 -2\n"
    assert read_connection(path) == c

def test_connection_file_must_be_text(tmp_path):
    path = tmp_path / "psi.txt"
    path.write_bytes(b"1 2 \xfe\n")
    with pytest.raises(MatrixFormatError):
        read_connection(path)

@pytest.mark.parametrize("text", ["1 2\n", "a 2 1\n", "1 2 0\n", "1 2 2\n2 1 2\n", "1 2 1/0\n"])
def test_connection_text_rejects_malformed_lines(text):
    with pytest.raises(MatrixFormatError):
        parse_connection(text)


def test_twist_with_the_trivial_connection():
    m = complete4()
    twisted = twist(m, Connection.identity(core_graph(m)))
    assert (twisted == m.entries).all()

def test_twist_on_one_edge():
    m = SkewMatrix([[0, 3], [-3, 0]])
    twisted = twist(m, Connection({(1, 2): Fraction(2)}))
    assert twisted[0, 1] == 6
    assert twisted[1, 0] == Fraction(-3, 2)

def test_twist_needs_every_edge():
    with pytest.raises(PreconditionError):
        twist(complete4(), Connection({(1, 2): 2}))


def test_triangle_has_two_crsfs():
    m = SkewMatrix([[0, 1, -1], [-1, 0, 1], [1, -1, 0]])
    family = enumerate_crsf(core_graph(m))
    assert set(family) == {CRSF({1: 2, 2: 3, 3: 1}, 3), CRSF({1: 3, 3: 2, 2: 1}, 3)}

def test_path_graph_has_no_crsf():
    m = SkewMatrix([[0, 1, 0, 0], [-1, 0, 1, 0], [0, -1, 0, 1], [0, 0, -1, 0]])
    assert enumerate_crsf(core_graph(m)) == []

def test_crsf_count_on_k4():
    g = core_graph(complete4())
    # no fixed points, and rejecting 2-cycles leaves cycles of length 3 or 4
    brute = 0
    for image in product(range(1, 5), repeat=4):
        out = dict(zip(range(1, 5), image))
        if all(out[v] != v and out[out[v]] != v for v in out):
            brute += 1
    assert len(enumerate_crsf(g)) == brute

def test_crsf_condition_C():
    assert crsf_condition_C(CRSF({1: 2, 2: 3, 3: 4, 4: 1}, 4))
    assert not crsf_condition_C(CRSF({1: 2, 2: 3, 3: 4, 4: 2}, 4))
    assert crsf_condition_C(CRSF({1: 2, 2: 3, 3: 4, 4: 5, 5: 3}, 5))

def test_monodromy_multiplies_around_the_cycle():
    c = Connection({(1, 2): 2, (2, 3): 3, (3, 1): Fraction(1, 5)})
    assert monodromy(c, (1, 2, 3)) == Fraction(6, 5)
    assert monodromy(c, (1, 3, 2)) == Fraction(5, 6)


@pytest.mark.parametrize("n,r,seed", [(2 + 2 * (seed % 2), 2, seed) for seed in range(20)])
def test_twisted_determinant_is_the_crsf_sum(n, r, seed):
    m = random_instance(n, r, seed=seed)
    c = random_connection(core_graph(m), seed=seed + 100)
    assert det_via_crsf(m, c) == determinant(twist(m, c))

def test_trivial_connection_gives_zero():
    m = random_instance(4, 2, seed=7)
    assert det_via_crsf(m, Connection.identity(core_graph(m))) == 0
    assert determinant(m) == 0

def test_crsf_sum_needs_even_size():
    m = random_instance(2, 1, seed=0)
    with pytest.raises(PreconditionError):
        det_via_crsf(m, Connection.identity(core_graph(m)))


def test_cycle_covers_of_2x2():
    assert cycle_cover_expansion(SkewMatrix([[0, 5], [-5, 0]])) == 25

def test_cycle_covers_of_k4():
    a = {(1, 2): 1, (1, 3): 2, (1, 4): 3, (2, 3): 4, (2, 4): 5, (3, 4): 6}
    a.update({(j, i): -value for (i, j), value in list(a.items())})
    expected = (
        a[1, 2] ** 2 * a[3, 4] ** 2 + a[1, 3] ** 2 * a[2, 4] ** 2 + a[1, 4] ** 2 * a[2, 3] ** 2
        - 2 * (a[1, 2] * a[2, 3] * a[3, 4] * a[4, 1]
               + a[1, 2] * a[2, 4] * a[4, 3] * a[3, 1]
               + a[1, 3] * a[3, 2] * a[2, 4] * a[4, 1])
    )
    assert cycle_cover_expansion(complete4()) == expected == 64

@settings(max_examples=40, deadline=None)
@given(skew_matrices(min_size=0, max_size=6))
def test_cycle_covers_match_the_determinant(m):
    assert cycle_cover_expansion(m) == determinant(m)
