import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fuchsmc.errors import NonSquareError, SizeMismatchError
from fuchsmc.linalg import (
    ExactMatrix,
    char_poly,
    commutant_dim,
    complete_to_basis,
    generated_algebra_dim,
    image_basis,
    inverse,
    kernel_basis,
    rank,
    rref,
    solve,
    solve_sylvester_space,
)
from fuchsmc.scalars import gr

E = ExactMatrix.from_rows


def random_mat(rng, n, m=None, lo=-3, hi=3):
    m = n if m is None else m
    return ExactMatrix(n, m, [[rng.randint(lo, hi) for _ in range(m)] for _ in range(n)])


small_mats = st.builds(
    lambda seed, n: random_mat(random.Random(seed), n),
    st.integers(0, 10_000),
    st.integers(1, 4),
)


class TestRref:
    def test_identity(self):
        r, piv = rref(ExactMatrix.identity(3))
        assert r == ExactMatrix.identity(3)
        assert piv == [0, 1, 2]

    def test_dependent_rows(self):
        r, piv = rref(E([[1, 2], [2, 4]]))
        assert r == E([[1, 2], [0, 0]])
        assert piv == [0]

    def test_zero(self):
        r, piv = rref(ExactMatrix.zeros(2))
        assert r == ExactMatrix.zeros(2)
        assert piv == []

    @given(small_mats)
    @settings(max_examples=50)
    def test_idempotent(self, m):
        r, piv = rref(m)
        r2, piv2 = rref(r)
        assert r2 == r and piv2 == piv

    @given(small_mats)
    @settings(max_examples=50)
    def test_pivots_strictly_increase(self, m):
        _, piv = rref(m)
        assert all(a < b for a, b in zip(piv, piv[1:]))


class TestRankKernelImage:
    def test_rank_examples(self):
        assert rank(ExactMatrix.identity(4)) == 4
        assert rank(E([[1, gr(0, 1)], [gr(0, 1), -1]])) == 1
        assert rank(ExactMatrix.zeros(3)) == 0

    def test_kernel_examples(self):
        assert kernel_basis(ExactMatrix.identity(3)) == []
        z = kernel_basis(ExactMatrix.zeros(2))
        assert z == [(gr(1), gr(0)), (gr(0), gr(1))]
        assert kernel_basis(E([[1, 2]])) == [(gr(-2), gr(1))]

    def test_image_examples(self):
        assert image_basis(ExactMatrix.identity(2)) == [
            (gr(1), gr(0)),
            (gr(0), gr(1)),
        ]
        assert image_basis(ExactMatrix.zeros(2)) == []
        assert image_basis(E([[1, 1], [1, 1]])) == [(gr(1), gr(1))]

    @given(small_mats)
    @settings(max_examples=60)
    def test_rank_nullity(self, m):
        assert m.ncols == rank(m) + len(kernel_basis(m))

    @given(small_mats)
    @settings(max_examples=60)
    def test_rank_equals_transpose_rank(self, m):
        assert rank(m) == rank(m.transpose())

    @given(small_mats)
    @settings(max_examples=40)
    def test_kernel_vectors_annihilate(self, m):
        for v in kernel_basis(m):
            assert all(x.is_zero() for x in m.apply(v))


class TestCommutant:
    def test_scalar_matrix(self):
        assert commutant_dim(ExactMatrix.diagonal([7, 7, 7])) == 9

    def test_distinct_diagonal(self):
        assert commutant_dim(ExactMatrix.diagonal([1, 2, 3])) == 3

    def test_normalized_class_representative(self):
        # two equal eigenvalues in square blocks plus two simple ones
        m = E([[1, 0, 1, 0], [0, 1, 0, 0], [0, 0, 2, 1], [0, 0, 0, 3]])
        assert commutant_dim(m) == 2 * 2 + 1 + 1

    def test_nilpotent_block(self):
        for n in (2, 3, 4):
            j = ExactMatrix(
                n, n, [[1 if k == i + 1 else 0 for k in range(n)] for i in range(n)]
            )
            assert commutant_dim(j) == n

    def test_non_square_rejected(self):
        with pytest.raises(NonSquareError):
            commutant_dim(ExactMatrix.zeros(2, 3))

    @given(small_mats, st.integers(0, 1000))
    @settings(max_examples=25)
    def test_conjugation_invariance(self, m, seed):
        rng = random.Random(seed)
        n = m.nrows
        while True:
            g = random_mat(rng, n)
            if rank(g) == n:
                break
        assert commutant_dim(g * m * inverse(g)) == commutant_dim(m)


class TestGeneratedAlgebra:
    def test_empty_generators(self):
        assert generated_algebra_dim([], size=3) == 1

    def test_single_diagonal(self):
        assert generated_algebra_dim([ExactMatrix.diagonal([1, 2])]) == 2

    def test_two_nilpotents_generate_everything(self):
        e12 = E([[0, 1], [0, 0]])
        e21 = E([[0, 0], [1, 0]])
        assert generated_algebra_dim([e12, e21]) == 4

    def test_size_mismatch(self):
        with pytest.raises(SizeMismatchError):
            generated_algebra_dim([ExactMatrix.zeros(2), ExactMatrix.zeros(3)])

    @given(st.integers(0, 1000))
    @settings(max_examples=20)
    def test_conjugation_invariance(self, seed):
        rng = random.Random(seed)
        n = rng.randint(1, 3)
        mats = [random_mat(rng, n) for _ in range(2)]
        while True:
            g = random_mat(rng, n)
            if rank(g) == n:
                break
        gi = inverse(g)
        conj = [g * m * gi for m in mats]
        assert generated_algebra_dim(conj) == generated_algebra_dim(mats)


class TestSylvester:
    def test_identity_constraint(self):
        basis = solve_sylvester_space([ExactMatrix.identity(2)], [ExactMatrix.identity(2)])
        assert len(basis) == 4

    def test_swapped_diagonals(self):
        basis = solve_sylvester_space(
            [ExactMatrix.diagonal([1, 2])], [ExactMatrix.diagonal([2, 1])]
        )
        assert len(basis) == 2
        for g in basis:
            assert g[0, 0].is_zero() and g[1, 1].is_zero()

    def test_disjoint_spectra(self):
        basis = solve_sylvester_space(
            [ExactMatrix.diagonal([1, 2])], [ExactMatrix.diagonal([3, 4])]
        )
        assert basis == []

    @given(st.integers(0, 500))
    @settings(max_examples=20)
    def test_solutions_intertwine(self, seed):
        rng = random.Random(seed)
        n = rng.randint(1, 3)
        a = [random_mat(rng, n) for _ in range(2)]
        b = [random_mat(rng, n) for _ in range(2)]
        for g in solve_sylvester_space(a, b):
            for aj, bj in zip(a, b):
                assert (g * aj - bj * g).is_zero()


class TestSolveInverse:
    def test_solve_round_trip(self):
        a = E([[2, 1], [1, 1]])
        x = E([[3], [5]])
        assert solve(a, a * x) == x

    def test_inconsistent(self):
        with pytest.raises(SizeMismatchError):
            solve(E([[1], [1]]), E([[1], [2]]))

    def test_inverse(self):
        a = E([[1, 2], [3, 5]])
        assert a * inverse(a) == ExactMatrix.identity(2)

    def test_complete_to_basis(self):
        span = ExactMatrix.from_columns([(gr(1), gr(1), gr(0))], nrows=3)
        indep, comp = complete_to_basis(span)
        assert indep == [0]
        # first standard vectors that stay independent: e0 then e2
        assert comp == [0, 2]


class TestCharPoly:
    def test_triangular(self):
        cp = char_poly(E([[1, 1], [0, 2]]))
        assert [str(c) for c in cp] == ["2", "-3", "1"]

    @given(small_mats)
    @settings(max_examples=30)
    def test_cayley_hamilton(self, m):
        cp = char_poly(m)
        acc = ExactMatrix.zeros(m.nrows)
        power = ExactMatrix.identity(m.nrows)
        for c in cp:
            acc = acc + power.scale(c)
            power = power * m
        assert acc.is_zero()
