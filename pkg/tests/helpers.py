from fractions import Fraction

from hypothesis import strategies as st

from model import SkewMatrix, SpanningForest
from skewmatrix import random_instance

rationals = st.fractions(min_value=-9, max_value=9, max_denominator=9)


@st.composite
def skew_matrices(draw, min_size=0, max_size=8):
    size = draw(st.integers(min_size, max_size))
    entries = [[Fraction(0)] * size for _ in range(size)]
    for i in range(size):
        for j in range(i + 1, size):
            entries[i][j] = draw(rationals)
            entries[j][i] = -entries[i][j]
    return SkewMatrix(entries)

@st.composite
def zero_sum_instances(draw, sizes=(2, 4), roots=(1, 2)):
    n = draw(st.sampled_from(sizes))
    r = draw(st.sampled_from(roots))
    seed = draw(st.integers(0, 10_000))
    density = draw(st.sampled_from([0.6, 1.0]))
    return random_instance(n, r, seed=seed, density=density)

# K4 on 1..4 with the root 5 attached to 3 and 4
CANONICAL_EDGES = [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4), (3, 5), (4, 5)]

# Forests of the running example compatible with {14, 23}
F1 = SpanningForest({2: 3, 3: 1, 1: 4, 4: 5}, 4)
F2 = SpanningForest({2: 3, 3: 5, 1: 4, 4: 5}, 4)
F3 = SpanningForest({4: 1, 1: 2, 2: 3, 3: 5}, 4)
