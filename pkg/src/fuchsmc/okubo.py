"""Okubo normal form: (xI - T) du/dx = A u with T diagonal by blocks.

A system in this shape is the same thing as a residue tuple whose j-th matrix
is the j-th block row of A; both directions of that dictionary live here,
together with the normal-form genericity conditions, the image-space
realization of the rank-changing convolution, and the generic Euler
transformation A -> A + lambda.
"""

from __future__ import annotations

from typing import Optional, Sequence

from . import linalg
from .errors import (
    ConditionsFailError,
    EigenvalueCollisionError,
    InvariantError,
    NotOkuboConvertibleError,
    PreconditionFailError,
    SizeMismatchError,
)
from .katz import predicted_scheme
from .linalg import ExactMatrix
from .scalars import GaussianRational, ZERO, gr
from .schlesinger import SchlesingerTuple, verify_scheme
from .spectral import RiemannScheme, canonical_column


class OkuboSystem:
    """Block sizes, poles and the single coefficient matrix of a normal-form
    system; immutable, optionally with a verified scheme."""

    __slots__ = ("block_sizes", "poles", "a", "scheme")

    def __init__(
        self,
        block_sizes: Sequence[int],
        poles: Sequence,
        a: ExactMatrix,
        scheme: Optional[RiemannScheme] = None,
    ):
        block_sizes = tuple(int(b) for b in block_sizes)
        poles = tuple(gr(t) for t in poles)
        if len(block_sizes) != len(poles):
            raise SizeMismatchError("one block per pole required")
        if any(b < 1 for b in block_sizes):
            raise SizeMismatchError("block sizes must be positive")
        if len(set(poles)) != len(poles):
            raise SizeMismatchError("poles must be pairwise distinct")
        n = sum(block_sizes)
        if not a.is_square() or a.nrows != n:
            raise SizeMismatchError("coefficient matrix must match the block total")
        self.block_sizes = block_sizes
        self.poles = poles
        self.a = a
        self.scheme = scheme
        if scheme is not None and not verify_scheme(scf_from_onf(self.with_scheme(None)), scheme):
            raise InvariantError("declared scheme does not match the system")

    @property
    def rank(self) -> int:
        return self.a.nrows

    @property
    def num_points(self) -> int:
        return len(self.block_sizes)

    def with_scheme(self, scheme: Optional[RiemannScheme]) -> "OkuboSystem":
        return OkuboSystem(self.block_sizes, self.poles, self.a, scheme)

    def block_range(self, j: int) -> range:
        """Row/column range of the j-th block, 1-based."""
        start = sum(self.block_sizes[: j - 1])
        return range(start, start + self.block_sizes[j - 1])

    def diagonal_block(self, j: int) -> ExactMatrix:
        r = self.block_range(j)
        return self.a.submatrix(r, r)

    def t_matrix(self) -> ExactMatrix:
        vals = []
        for size, pole in zip(self.block_sizes, self.poles):
            vals.extend([pole] * size)
        return ExactMatrix.diagonal(vals)

    def __eq__(self, other):
        if not isinstance(other, OkuboSystem):
            return NotImplemented
        return (
            self.block_sizes == other.block_sizes
            and self.poles == other.poles
            and self.a == other.a
        )

    def __repr__(self):
        return f"OkuboSystem(blocks={self.block_sizes}, n={self.rank})"


def scf_from_onf(o: OkuboSystem) -> SchlesingerTuple:
    """Residue tuple of the system: A_j is block row j of A, zero elsewhere."""
    n = o.rank
    mats = []
    for j in range(1, o.num_points + 1):
        rows = [[ZERO] * n for _ in range(n)]
        for i in o.block_range(j):
            rows[i] = list(o.a.rows[i])
        mats.append(ExactMatrix(n, n, rows))
    return SchlesingerTuple(o.poles, mats, o.scheme)


def onf_from_scf(t: SchlesingerTuple) -> OkuboSystem:
    """Conjugate a tuple into normal form.

    Needs the ranks of the residues to sum to the rank of the system and the
    images to fill the whole space; the conjugating matrix is assembled from
    the canonical image bases in point order, so conversion is deterministic.
    """
    n = t.rank
    image_cols = []
    blocks = []
    for m in t.matrices:
        basis = linalg.image_basis(m)
        blocks.append(len(basis))
        image_cols.extend(basis)
    if sum(blocks) != n:
        raise NotOkuboConvertibleError(
            f"residue ranks sum to {sum(blocks)}, expected the system rank {n}"
        )
    g = ExactMatrix.from_columns(image_cols, nrows=n)
    if linalg.rank(g) != n:
        raise NotOkuboConvertibleError("residue images do not fill the whole space")
    ginv = linalg.inverse(g)
    total = t.matrices[0]
    for m in t.matrices[1:]:
        total = total + m
    a = ginv * total * g
    scheme = t.scheme
    return OkuboSystem(blocks, t.poles, a, scheme)


def check_onf_conditions(o: OkuboSystem) -> bool:
    """Full rank of A plus per-block kernel/image genericity.

    The per-block tests quantify over all scalar shifts; each reduces to the
    invariant-subspace fixpoint on the diagonal block against the other
    blocks' rows (columns for the transposed test), so the decision is exact.
    This is a code path independent of the residue-tuple genericity test, and
    equivalent to it.
    """
    n = o.rank
    if linalg.rank(o.a) != n:
        return False
    for i in range(1, o.num_points + 1):
        rng = o.block_range(i)
        others = [r for r in range(n) if r not in rng]
        aii = o.a.submatrix(rng, rng)
        # column test: no eigenvector of the diagonal block killed by the
        # other blocks' rows in the same column strip
        col_strip = o.a.submatrix(others, rng)
        if not _block_condition(aii, col_strip):
            return False
        # row test: the transposed analogue on the row strip
        row_strip = o.a.submatrix(rng, others).transpose()
        if not _block_condition(aii.transpose(), row_strip):
            return False
    return True


def _block_condition(aii: ExactMatrix, strip: ExactMatrix) -> bool:
    # a single-point system has no other blocks; the empty constraint set is
    # pinned to the zero subspace, matching the tuple-level convention
    if strip.nrows == 0:
        return True
    basis = linalg.kernel_basis(strip)
    return len(linalg.largest_invariant_subspace(aii, basis)) == 0


def mc_via_images(o: OkuboSystem, lam) -> OkuboSystem:
    """The rank-changing convolution realized on the residue images.

    When -lam misses the spectrum of A the convolution of the underlying tuple
    is conjugate to a normal-form system living on the direct sum of the
    residue images; this builds that system directly and is the independent
    counterpart of the quotient construction.
    """
    lam = gr(lam)
    if lam.is_zero():
        raise PreconditionFailError("the image realization needs a nonzero parameter")
    if not check_onf_conditions(o):
        raise ConditionsFailError("normal-form genericity conditions fail")
    n = o.rank
    if linalg.rank(o.a.shift(lam)) < n:
        raise EigenvalueCollisionError("-lambda is an eigenvalue of the coefficient matrix")
    t = scf_from_onf(o)
    p = o.num_points
    pn = p * n
    zero = ExactMatrix.zeros(n)

    big = []
    for j in range(p):
        aj = t.matrices[j]
        grid = [[zero] * p for _ in range(p)]
        for nu in range(p):
            grid[j][nu] = aj.shift(lam) if nu == j else aj
        big.append(linalg.block_matrix(grid))
    gsum = big[0]
    for g in big[1:]:
        gsum = gsum + g

    cols = []
    blocks = []
    for j in range(p):
        basis = linalg.image_basis(t.matrices[j])
        blocks.append(len(basis))
        for v in basis:
            vec = [ZERO] * pn
            vec[j * n : (j + 1) * n] = list(v)
            cols.append(tuple(vec))
    b = ExactMatrix.from_columns(cols, nrows=pn)
    restricted = linalg.solve(b, gsum * b)
    a_new = restricted  # the new coefficient matrix is the restricted sum
    scheme = None
    if o.scheme is not None:
        try:
            predicted = predicted_scheme(o.scheme, lam)
        except Exception:
            predicted = None
        if predicted is not None and predicted.order == a_new.nrows:
            cand = OkuboSystem(blocks, o.poles, a_new, None)
            if verify_scheme(scf_from_onf(cand), predicted):
                scheme = predicted
    return OkuboSystem(blocks, o.poles, a_new, scheme)


def euler_transform(o: OkuboSystem, lam) -> OkuboSystem:
    """A -> A + lambda, defined when -lambda misses the spectrum of A.

    Composes additively in lambda.  Scheme labels at infinity shift by
    -lambda; at a finite point the non-kernel labels shift by +lambda.
    """
    lam = gr(lam)
    if not check_onf_conditions(o):
        raise ConditionsFailError("normal-form genericity conditions fail")
    if lam.is_zero():
        return o
    n = o.rank
    if linalg.rank(o.a.shift(lam)) < n:
        raise EigenvalueCollisionError("-lambda is an eigenvalue of the coefficient matrix")
    a_new = o.a.shift(lam)
    scheme = None
    if o.scheme is not None:
        scheme = scheme_of_euler(o.scheme, o.block_sizes, lam)
        cand = OkuboSystem(o.block_sizes, o.poles, a_new, None)
        if not verify_scheme(scf_from_onf(cand), scheme):
            scheme = None
    return OkuboSystem(o.block_sizes, o.poles, a_new, scheme)


def scheme_of_euler(
    s: RiemannScheme, block_sizes: Sequence[int], lam
) -> RiemannScheme:
    """Label bookkeeping of the Euler transformation on a normal-form scheme.

    The structural kernel part of size n - n_j at each finite point stays at
    zero; every other finite label gains lambda and the labels at infinity
    lose it.
    """
    lam = gr(lam)
    n = s.order
    cols = [canonical_column([(l - lam, m) for l, m in s.column_at_infinity()])]
    for j, nj in enumerate(block_sizes, start=1):
        col = list(s.column_at(j))
        kernel_mult = n - nj
        rest, kernel_part = _take_zero_part(col, kernel_mult)
        entries = [(gr(0), kernel_part)] if kernel_part else []
        entries += [(l + lam, m) for l, m in rest]
        cols.append(canonical_column(entries))
    return RiemannScheme(s.poles, cols)


def _take_zero_part(col, mult):
    """Remove the structural zero part of the given multiplicity from a
    column; the remaining parts are the diagonal-block eigenvalues."""
    if mult == 0:
        return list(col), 0
    for i, (label, m) in enumerate(col):
        if label == gr(0) and m == mult:
            rest = [e for k, e in enumerate(col) if k != i]
            return rest, mult
    # fall back to the largest zero part when the sizes are ambiguous
    zeros = [(m, i) for i, (label, m) in enumerate(col) if label == gr(0)]
    if not zeros:
        raise InvariantError("normal-form column lacks its kernel part")
    m, i = max(zeros)
    rest = [e for k, e in enumerate(col) if k != i]
    return rest, m


def pick_generic(forbidden: Sequence) -> GaussianRational:
    """Smallest positive integer avoiding the forbidden values."""
    forbidden_set = {gr(x) for x in forbidden}
    k = 1
    while gr(k) in forbidden_set:
        k += 1
    return gr(k)
