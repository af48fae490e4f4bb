"""Property-style checks on freely drawn tiny instances.

The seeded suites in fuchsmc.identities sweep fixed plans; these let the
strategy engine hunt for corner cases at sizes where everything is fast.
"""

import random

from hypothesis import given, settings
from hypothesis import strategies as st

from fuchsmc.errors import CalculusError
from fuchsmc.katz import addition, middle_convolution, swap_with_infinity
from fuchsmc.linalg import ExactMatrix
from fuchsmc.schlesinger import (
    SchlesingerTuple,
    index_of_rigidity,
    is_equivalent,
    is_irreducible,
)

entries = st.integers(-2, 2)


def tuples(n, p):
    return st.builds(
        lambda seed: _draw_tuple(random.Random(seed), n, p),
        st.integers(0, 10_000),
    )


def _draw_tuple(rng, n, p):
    while True:
        mats = [
            ExactMatrix.from_rows(
                [[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)]
            )
            for _ in range(p)
        ]
        t = SchlesingerTuple(list(range(p)), mats)
        if is_irreducible(t):
            return t


@given(tuples(2, 2), st.integers(1, 4))
@settings(max_examples=25, deadline=None)
def test_mc_zero_is_identity_up_to_equivalence(t, _):
    assert is_equivalent(middle_convolution(t, 0), t)


@given(tuples(2, 2), st.integers(1, 3), st.integers(1, 3))
@settings(max_examples=20, deadline=None)
def test_mc_composition(t, lam1, lam2):
    left = middle_convolution(middle_convolution(t, lam1), lam2)
    right = middle_convolution(t, lam1 + lam2)
    assert left.rank == right.rank
    assert is_equivalent(left, right)


@given(tuples(2, 2), st.integers(1, 3), st.integers(-2, 2), st.integers(-2, 2))
@settings(max_examples=20, deadline=None)
def test_index_invariance(t, lam, m1, m2):
    idx = index_of_rigidity(t)
    assert index_of_rigidity(middle_convolution(t, lam)) == idx
    assert index_of_rigidity(addition(t, [m1, m2])) == idx
    assert index_of_rigidity(swap_with_infinity(t, 1)) == idx


@given(tuples(1, 3), st.integers(1, 3))
@settings(max_examples=15, deadline=None)
def test_rank_one_three_point_composition(t, lam):
    # rank-one inputs exercise the kernel/sum-kernel overlap paths
    try:
        left = middle_convolution(middle_convolution(t, lam), 1)
    except CalculusError:
        return
    right = middle_convolution(t, lam + 1)
    assert is_equivalent(left, right)


@given(tuples(2, 2), st.integers(1, 3))
@settings(max_examples=15, deadline=None)
def test_mc_preserves_irreducibility(t, lam):
    assert is_irreducible(middle_convolution(t, lam))
