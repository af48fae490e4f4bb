"""Tuples of residue matrices with poles, and their structural predicates.

A system du/dx = sum_j A_j/(x - t_j) u is stored as its poles and residue
matrices; the residue at infinity is always the negated sum.  This module
decides the kernel/image genericity conditions, irreducibility, simultaneous
conjugacy, the index of rigidity, and membership of a matrix in the conjugacy
class described by an (eigenvalue, multiplicity) list.
"""

from __future__ import annotations

import itertools
from typing import Optional, Sequence

from . import linalg
from .errors import (
    DuplicatePoleError,
    InvariantError,
    NonSquareError,
    PartitionSizeMismatchError,
    PointMismatchError,
    SchemeUnavailableError,
    SizeMismatchError,
)
from .linalg import ExactMatrix
from .scalars import GaussianRational, ONE, ZERO, gr
from .spectral import Column, RiemannScheme, canonical_column


class SchlesingerTuple:
    """Immutable (poles, residue matrices) pair, optionally with a verified
    Riemann scheme attached."""

    __slots__ = ("poles", "matrices", "scheme")

    def __init__(
        self,
        poles: Sequence,
        matrices: Sequence[ExactMatrix],
        scheme: Optional[RiemannScheme] = None,
    ):
        poles = tuple(gr(t) for t in poles)
        matrices = tuple(matrices)
        if not matrices:
            raise SizeMismatchError("a tuple needs at least one residue matrix")
        if len(poles) != len(matrices):
            raise SizeMismatchError("pole and matrix counts differ")
        if len(set(poles)) != len(poles):
            raise DuplicatePoleError("poles must be pairwise distinct")
        n = matrices[0].nrows
        if n < 1:
            raise SizeMismatchError("rank must be at least 1")
        for m in matrices:
            if not m.is_square() or m.nrows != n:
                raise SizeMismatchError("residues must be square of equal size")
        self.poles = poles
        self.matrices = matrices
        self.scheme = scheme
        if scheme is not None and not verify_scheme(self, scheme):
            raise InvariantError("declared scheme does not match the residues")

    @property
    def rank(self) -> int:
        return self.matrices[0].nrows

    @property
    def num_points(self) -> int:
        return len(self.matrices)

    def with_scheme(self, scheme: Optional[RiemannScheme]) -> "SchlesingerTuple":
        return SchlesingerTuple(self.poles, self.matrices, scheme)

    def spectral_type(self):
        if self.scheme is None:
            raise SchemeUnavailableError("tuple carries no declared scheme")
        return self.scheme.spectral_type()

    def __eq__(self, other):
        if not isinstance(other, SchlesingerTuple):
            return NotImplemented
        return self.poles == other.poles and self.matrices == other.matrices

    def __hash__(self):
        return hash((self.poles, self.matrices))

    def __repr__(self):
        return f"SchlesingerTuple(p={self.num_points}, n={self.rank})"


def with_poles(t: SchlesingerTuple, poles: Sequence) -> SchlesingerTuple:
    """Same matrices at relabelled pole positions.

    The operator identities of the calculus act on matrix tuples; pole values
    are inert labels for them, so comparisons across pipelines sometimes need
    one side relabelled onto the other's poles.
    """
    return SchlesingerTuple(poles, t.matrices, None)


def residue_at_infinity(t: SchlesingerTuple) -> ExactMatrix:
    total = t.matrices[0]
    for m in t.matrices[1:]:
        total = total + m
    return -total


def check_star_conditions(t: SchlesingerTuple) -> tuple[tuple[bool, ...], tuple[bool, ...]]:
    """Kernel and image genericity of the tuple, per point.

    The kernel condition at i holds when no nonzero vector of
    W_i = intersection of ker A_nu (nu != i) is an eigenvector of A_i,
    i.e. the largest A_i-invariant subspace of W_i vanishes.  The image
    condition is the same test after transposing every matrix.  Both are
    decided exactly by an invariant-subspace fixpoint, which is stable under
    field extension.  For a single-point tuple the intersection over the empty
    index set is taken to be zero, so both conditions hold vacuously.
    """
    star = _genericity_flags(t.matrices)
    starstar = _genericity_flags([m.transpose() for m in t.matrices])
    return star, starstar


def _genericity_flags(mats: Sequence[ExactMatrix]) -> tuple[bool, ...]:
    n = mats[0].nrows
    flags = []
    for i in range(len(mats)):
        others = [m for k, m in enumerate(mats) if k != i]
        if not others:
            flags.append(True)
            continue
        stacked = others[0]
        for m in others[1:]:
            stacked = stacked.vstack(m)
        w = linalg.kernel_basis(stacked)
        flags.append(len(linalg.largest_invariant_subspace(mats[i], w)) == 0)
    return tuple(flags)


def is_irreducible(t: SchlesingerTuple) -> bool:
    """No common invariant subspace, by the Burnside criterion: the algebra
    generated by the residues is the full matrix algebra."""
    n = t.rank
    return linalg.generated_algebra_dim(list(t.matrices), size=n) == n * n


def index_of_rigidity(t: SchlesingerTuple) -> int:
    n = t.rank
    p = t.num_points
    total = linalg.commutant_dim(residue_at_infinity(t))
    for m in t.matrices:
        total += linalg.commutant_dim(m)
    return total - (p - 1) * n * n


# -- simultaneous conjugacy ------------------------------------------------------


def matrix_tuples_equivalent(
    a_mats: Sequence[ExactMatrix], b_mats: Sequence[ExactMatrix]
) -> bool:
    """Simultaneous conjugacy of two matrix tuples, decided exactly.

    Cheap conjugation invariants first; then the intertwiner space is solved
    and searched for an invertible element.  The determinant restricted to the
    space is a polynomial of degree at most n in the basis coefficients, so if
    it vanishes on the full integer grid {0..n}^k it is identically zero and no
    invertible intertwiner exists over any extension field.
    """
    if len(a_mats) != len(b_mats):
        return False
    n = a_mats[0].nrows
    if any(m.nrows != n for m in b_mats):
        return False
    if list(a_mats) == list(b_mats):
        return True
    for a, b in zip(a_mats, b_mats):
        if linalg.rank(a) != linalg.rank(b):
            return False
        if linalg.char_poly(a) != linalg.char_poly(b):
            return False
    basis = linalg.solve_sylvester_space(list(a_mats), list(b_mats))
    if not basis:
        return False
    for g in basis:
        if linalg.rank(g) == n:
            return True
    k = len(basis)
    if k == 1:
        return False
    for coeffs in itertools.product(range(n + 1), repeat=k):
        g = ExactMatrix.zeros(n)
        for c, mat in zip(coeffs, basis):
            if c:
                g = g + mat.scale(c)
        if linalg.rank(g) == n:
            return True
    return False


def is_equivalent(a: SchlesingerTuple, b: SchlesingerTuple) -> bool:
    """Simultaneous conjugacy of two systems; poles must agree positionally."""
    if a.num_points != b.num_points or a.rank != b.rank:
        return False
    if a.poles != b.poles:
        return False
    return matrix_tuples_equivalent(a.matrices, b.matrices)


# -- conjugacy classes from (eigenvalue, multiplicity) data ----------------------


def build_L(parts: Sequence[tuple]) -> ExactMatrix:
    """The normalized block upper-bidiagonal class representative.

    Parts are sorted canonically (multiplicity descending, label ties by
    (re, im)); diagonal blocks are scalar, and each superdiagonal block is the
    rectangular identity, so repeated eigenvalues across consecutive blocks
    encode nontrivial Jordan structure.
    """
    entries = canonical_column([(gr(l), int(m)) for l, m in parts])
    if not entries:
        raise PartitionSizeMismatchError("empty part list")
    sizes = [m for _, m in entries]
    n = sum(sizes)
    rows = [[ZERO] * n for _ in range(n)]
    offset = 0
    for idx, (label, m) in enumerate(entries):
        for i in range(m):
            rows[offset + i][offset + i] = label
        if idx + 1 < len(entries):
            nxt = entries[idx + 1][1]
            for i in range(nxt):
                rows[offset + i][offset + m + i] = ONE
        offset += m
    return ExactMatrix(n, n, rows)


def matches_conjugacy_class(m: ExactMatrix, parts: Sequence[tuple]) -> bool:
    """Whether m lies in the class of the normalized representative with the
    given parts, decided by kernel ranks of the shifted products."""
    if not m.is_square():
        raise NonSquareError("class membership needs a square matrix")
    entries = canonical_column([(gr(l), int(mult)) for l, mult in parts])
    if sum(mult for _, mult in entries) != m.nrows:
        raise PartitionSizeMismatchError("multiplicities must sum to the matrix size")
    prod = ExactMatrix.identity(m.nrows)
    total = 0
    for label, mult in entries:
        prod = prod * m.shift(-label)
        total += mult
        if m.nrows - linalg.rank(prod) != total:
            return False
    return True


def verify_scheme(t: SchlesingerTuple, s: RiemannScheme) -> bool:
    """Check the declared scheme column-by-column against the residues."""
    if s.poles != t.poles:
        raise PointMismatchError("scheme points disagree with the tuple's poles")
    if s.order != t.rank:
        return False
    if not matches_conjugacy_class(residue_at_infinity(t), list(s.column_at_infinity())):
        return False
    for j, mat in enumerate(t.matrices, start=1):
        if not matches_conjugacy_class(mat, list(s.column_at(j))):
            return False
    return True


# -- best-effort scheme inference -------------------------------------------------


def infer_scheme(t: SchlesingerTuple) -> RiemannScheme:
    """Infer a scheme when every residue has Gaussian-rational eigenvalues.

    Root candidates come from divisors of the characteristic polynomial's
    extreme coefficients (after clearing denominators), so only eigenvalues in
    the base field are ever found; anything else raises.
    """
    cols = [_class_column(residue_at_infinity(t))]
    for m in t.matrices:
        cols.append(_class_column(m))
    scheme = RiemannScheme(t.poles, cols)
    if not verify_scheme(t, scheme):
        raise SchemeUnavailableError("inferred class data failed verification")
    return scheme


def _class_column(m: ExactMatrix) -> Column:
    n = m.nrows
    roots = _rational_roots(linalg.char_poly(m))
    if sum(mult for _, mult in roots) != n:
        raise SchemeUnavailableError(
            "characteristic polynomial has roots outside the Gaussian rationals"
        )
    entries = []
    for lam, alg_mult in roots:
        shifted = m.shift(-lam)
        prev = 0
        power = ExactMatrix.identity(n)
        while prev < alg_mult:
            power = power * shifted
            ker = n - linalg.rank(power)
            part = ker - prev
            if part <= 0:
                raise SchemeUnavailableError("inconsistent kernel filtration")
            entries.append((lam, part))
            prev = ker
    return canonical_column(entries)


def _rational_roots(coeffs) -> list[tuple[GaussianRational, int]]:
    """Gaussian-rational roots with multiplicities, by candidate testing and
    deflation."""
    roots = []
    poly = list(coeffs)
    while len(poly) > 1:
        poly = _trim(poly)
        if len(poly) <= 1:
            break
        root = _find_root(poly)
        if root is None:
            break
        mult = 0
        while True:
            quo, rem = _deflate(poly, root)
            if rem:
                break
            poly = quo
            mult += 1
            if len(poly) <= 1:
                break
        roots.append((root, mult))
    return roots


def _trim(poly):
    while len(poly) > 1 and poly[-1].is_zero():
        poly = poly[:-1]
    return poly


def _deflate(poly, root):
    out = [ZERO] * (len(poly) - 1)
    carry = ZERO
    for k in range(len(poly) - 1, 0, -1):
        carry = poly[k] + carry
        out[k - 1] = carry
        carry = carry * root
    rem = poly[0] + carry
    return out, rem


def _find_root(poly):
    if poly[0].is_zero():
        return ZERO
    cleared = _clear_denominators(poly)
    for cand in _root_candidates(cleared[0], cleared[-1]):
        if linalg.eval_poly(poly, cand).is_zero():
            return cand
    return None


def _clear_denominators(poly) -> list[tuple[int, int]]:
    """Scale the polynomial by the common denominator; Gaussian-integer coeffs."""
    lcm = 1
    for c in poly:
        for d in (c.re.denominator, c.im.denominator):
            lcm = lcm * d // _gcd_int(lcm, d)
    return [(int(c.re * lcm), int(c.im * lcm)) for c in poly]


def _root_candidates(c0: tuple[int, int], cn: tuple[int, int]):
    seen = set()
    for u in _gaussian_divisors(c0):
        un = gr(u[0], u[1])
        for v in _gaussian_divisors(cn):
            cand = un / gr(v[0], v[1])
            for unit in (ONE, -ONE, gr(0, 1), gr(0, -1)):
                c = cand * unit
                if c not in seen:
                    seen.add(c)
                    yield c


def _gcd_int(a: int, b: int) -> int:
    import math

    return math.gcd(int(a), int(b))


def _gaussian_divisors(z: tuple[int, int]):
    """All divisors of a nonzero Gaussian integer, up to units."""
    a, b = z
    norm = a * a + b * b
    if norm == 0:
        return [(1, 0)]
    divisors = {(1, 0)}
    for p, e in _factor_int(norm).items():
        primes = _gaussian_primes_above(p)
        new = set(divisors)
        for pr in primes:
            for d in divisors:
                cur = d
                for _ in range(e):
                    cur = _gmul(cur, pr)
                    if _gdivides(cur, z):
                        new.add(_gnormalize(cur))
                    else:
                        break
        divisors = new
        # saturate products of the accumulated divisors that still divide z
        stable = False
        while not stable:
            stable = True
            for d1 in list(divisors):
                for pr in primes:
                    cand = _gmul(d1, pr)
                    cn = _gnormalize(cand)
                    if cn not in divisors and _gdivides(cn, z):
                        divisors.add(cn)
                        stable = False
    return [d for d in divisors if _gdivides(d, z)]


def _gmul(x, y):
    return (x[0] * y[0] - x[1] * y[1], x[0] * y[1] + x[1] * y[0])


def _gnormalize(x):
    # pick the unit-multiple with a canonical sign pattern
    best = None
    cur = x
    for _ in range(4):
        cur = (-cur[1], cur[0])
        if best is None or (cur[0], cur[1]) > best:
            best = cur
    return best


def _gdivides(d, z):
    nd = d[0] * d[0] + d[1] * d[1]
    if nd == 0:
        return False
    qr = (z[0] * d[0] + z[1] * d[1])
    qi = (z[1] * d[0] - z[0] * d[1])
    return qr % nd == 0 and qi % nd == 0


def _factor_int(n: int) -> dict[int, int]:
    n = abs(int(n))
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _gaussian_primes_above(p: int):
    if p == 2:
        return [(1, 1)]
    if p % 4 == 3:
        return [(p, 0)]
    for a in range(1, int(p**0.5) + 1):
        b2 = p - a * a
        b = int(b2**0.5)
        if b * b == b2:
            return [(a, b), (a, -b)]
    raise InvariantError(f"no two-square decomposition found for prime {p}")
