"""Dense exact matrices over the Gaussian rationals.

Everything downstream reduces to the primitives here: reduced row echelon
form with its canonical pivot structure, kernel/image bases read off from it,
commutant dimensions, the dimension of a generated matrix algebra, and the
space of intertwiners between two matrix tuples.

All values are immutable after construction and all operations are pure, so
concurrent use is safe.  Kernel and image bases are the rref-canonical ones
(free variables set to one in column order, pivot columns of the original
matrix), which makes every construction built on them deterministic.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .errors import NonSquareError, SizeMismatchError
from .scalars import ONE, ZERO, GaussianRational, gr

Vector = tuple[GaussianRational, ...]


class ExactMatrix:
    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, nrows: int, ncols: int, rows: Sequence[Sequence]):
        if len(rows) != nrows or any(len(r) != ncols for r in rows):
            raise SizeMismatchError("matrix data does not match declared shape")
        self.nrows = nrows
        self.ncols = ncols
        self.rows = tuple(tuple(gr(x) for x in r) for r in rows)

    # -- constructors ---------------------------------------------------------

    @staticmethod
    def from_rows(rows: Sequence[Sequence]) -> "ExactMatrix":
        rows = [list(r) for r in rows]
        nc = len(rows[0]) if rows else 0
        return ExactMatrix(len(rows), nc, rows)

    @staticmethod
    def from_columns(cols: Sequence[Vector], nrows: int | None = None) -> "ExactMatrix":
        if not cols:
            if nrows is None:
                raise SizeMismatchError("empty column list needs an explicit row count")
            return ExactMatrix(nrows, 0, [[] for _ in range(nrows)])
        n = len(cols[0])
        if any(len(c) != n for c in cols):
            raise SizeMismatchError("columns of unequal length")
        return ExactMatrix(n, len(cols), [[c[i] for c in cols] for i in range(n)])

    @staticmethod
    def zeros(nrows: int, ncols: int | None = None) -> "ExactMatrix":
        ncols = nrows if ncols is None else ncols
        return ExactMatrix(nrows, ncols, [[ZERO] * ncols for _ in range(nrows)])

    @staticmethod
    def identity(n: int) -> "ExactMatrix":
        return ExactMatrix(
            n, n, [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]
        )

    @staticmethod
    def diagonal(values: Sequence) -> "ExactMatrix":
        vals = [gr(v) for v in values]
        n = len(vals)
        return ExactMatrix(
            n, n, [[vals[i] if i == j else ZERO for j in range(n)] for i in range(n)]
        )

    # -- basic structure ------------------------------------------------------

    def __getitem__(self, ij) -> GaussianRational:
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return (
            self.nrows == other.nrows
            and self.ncols == other.ncols
            and self.rows == other.rows
        )

    def __hash__(self):
        return hash((self.nrows, self.ncols, self.rows))

    def __repr__(self):
        body = "; ".join(" ".join(str(x) for x in r) for r in self.rows)
        return f"ExactMatrix({self.nrows}x{self.ncols}: {body})"

    def is_zero(self) -> bool:
        return all(not x for r in self.rows for x in r)

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def column(self, j: int) -> Vector:
        return tuple(r[j] for r in self.rows)

    def columns(self) -> list[Vector]:
        return [self.column(j) for j in range(self.ncols)]

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(
            self.ncols,
            self.nrows,
            [[self.rows[i][j] for i in range(self.nrows)] for j in range(self.ncols)],
        )

    def trace(self) -> GaussianRational:
        if not self.is_square():
            raise NonSquareError("trace of a non-square matrix")
        t = ZERO
        for i in range(self.nrows):
            t = t + self.rows[i][i]
        return t

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "ExactMatrix":
        return ExactMatrix(
            len(row_idx),
            len(col_idx),
            [[self.rows[i][j] for j in col_idx] for i in row_idx],
        )

    # -- arithmetic -----------------------------------------------------------

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._same_shape(other)
        return ExactMatrix(
            self.nrows,
            self.ncols,
            [
                [a + b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.rows, other.rows)
            ],
        )

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._same_shape(other)
        return ExactMatrix(
            self.nrows,
            self.ncols,
            [
                [a - b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.rows, other.rows)
            ],
        )

    def __neg__(self) -> "ExactMatrix":
        return ExactMatrix(
            self.nrows, self.ncols, [[-a for a in r] for r in self.rows]
        )

    def scale(self, c) -> "ExactMatrix":
        c = gr(c)
        return ExactMatrix(
            self.nrows, self.ncols, [[c * a for a in r] for r in self.rows]
        )

    def shift(self, c) -> "ExactMatrix":
        """self + c * identity."""
        if not self.is_square():
            raise NonSquareError("shift of a non-square matrix")
        c = gr(c)
        rows = [list(r) for r in self.rows]
        for i in range(self.nrows):
            rows[i][i] = rows[i][i] + c
        return ExactMatrix(self.nrows, self.ncols, rows)

    def __mul__(self, other):
        if isinstance(other, ExactMatrix):
            if self.ncols != other.nrows:
                raise SizeMismatchError(
                    f"cannot multiply {self.nrows}x{self.ncols} by {other.nrows}x{other.ncols}"
                )
            bt = other.rows
            out = []
            for arow in self.rows:
                acc = [ZERO] * other.ncols
                for k, a in enumerate(arow):
                    if a:
                        brow = bt[k]
                        acc = [s + a * b if b else s for s, b in zip(acc, brow)]
                out.append(acc)
            return ExactMatrix(self.nrows, other.ncols, out)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def apply(self, v: Vector) -> Vector:
        if len(v) != self.ncols:
            raise SizeMismatchError("vector length does not match column count")
        out = [ZERO] * self.nrows
        for i, row in enumerate(self.rows):
            acc = ZERO
            for a, x in zip(row, v):
                if a and x:
                    acc = acc + a * x
            out[i] = acc
        return tuple(out)

    def _same_shape(self, other: "ExactMatrix"):
        if self.nrows != other.nrows or self.ncols != other.ncols:
            raise SizeMismatchError("shape mismatch")

    # -- stacking -------------------------------------------------------------

    def hstack(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.nrows != other.nrows:
            raise SizeMismatchError("hstack row mismatch")
        return ExactMatrix(
            self.nrows,
            self.ncols + other.ncols,
            [ra + rb for ra, rb in zip(self.rows, other.rows)],
        )

    def vstack(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.ncols != other.ncols:
            raise SizeMismatchError("vstack column mismatch")
        return ExactMatrix(
            self.nrows + other.nrows, self.ncols, self.rows + other.rows
        )


def block_matrix(grid: Sequence[Sequence[ExactMatrix]]) -> ExactMatrix:
    rows = []
    for brow in grid:
        h = brow[0].nrows
        if any(b.nrows != h for b in brow):
            raise SizeMismatchError("ragged block row")
        for i in range(h):
            rows.append([x for b in brow for x in b.rows[i]])
    return ExactMatrix.from_rows(rows)


# -- elimination core ---------------------------------------------------------


def _forward_eliminate(rows: list[list[GaussianRational]], ncols: int) -> int:
    """In-place forward elimination; returns the rank."""
    nr = len(rows)
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, nr):
            if rows[i][c]:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        prow = rows[r]
        inv = prow[c].inverse()
        for i in range(r + 1, nr):
            f = rows[i][c]
            if f:
                fr = f * inv
                row = rows[i]
                row[c] = ZERO
                for k in range(c + 1, ncols):
                    pk = prow[k]
                    if pk:
                        row[k] = row[k] - fr * pk
        r += 1
        if r == nr:
            break
    return r


def _rref_rows(rows: list[list[GaussianRational]], ncols: int) -> list[int]:
    """In-place Gauss-Jordan reduction; returns pivot columns."""
    nr = len(rows)
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, nr):
            if rows[i][c]:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        prow = rows[r]
        pv = prow[c]
        if pv != ONE:
            inv = pv.inverse()
            prow[c] = ONE
            for k in range(c + 1, ncols):
                if prow[k]:
                    prow[k] = prow[k] * inv
        for i in range(nr):
            if i == r:
                continue
            f = rows[i][c]
            if f:
                row = rows[i]
                row[c] = ZERO
                for k in range(c + 1, ncols):
                    pk = prow[k]
                    if pk:
                        row[k] = row[k] - f * pk
        pivots.append(c)
        r += 1
        if r == nr:
            break
    return pivots


def rref(m: ExactMatrix) -> tuple[ExactMatrix, list[int]]:
    """The unique reduced row echelon form of m and its pivot columns."""
    rows = [list(r) for r in m.rows]
    pivots = _rref_rows(rows, m.ncols)
    return ExactMatrix(m.nrows, m.ncols, rows), pivots


def rank(m: ExactMatrix) -> int:
    rows = [list(r) for r in m.rows]
    return _forward_eliminate(rows, m.ncols)


def kernel_basis(m: ExactMatrix) -> list[Vector]:
    """Canonical basis of the right null space.

    Each free column of the rref contributes one vector with that coordinate
    set to one (in increasing column order) and pivot coordinates read off
    from the reduced rows.
    """
    rows = [list(r) for r in m.rows]
    pivots = _rref_rows(rows, m.ncols)
    pivot_set = set(pivots)
    basis = []
    for f in range(m.ncols):
        if f in pivot_set:
            continue
        v = [ZERO] * m.ncols
        v[f] = ONE
        for r, c in enumerate(pivots):
            if rows[r][f]:
                v[c] = -rows[r][f]
        basis.append(tuple(v))
    return basis


def image_basis(m: ExactMatrix) -> list[Vector]:
    """The pivot columns of m: the canonical basis of the column space."""
    rows = [list(r) for r in m.rows]
    pivots = _rref_rows(rows, m.ncols)
    return [m.column(c) for c in pivots]


def independent_columns(m: ExactMatrix) -> list[int]:
    rows = [list(r) for r in m.rows]
    return _rref_rows(rows, m.ncols)


def solve(a: ExactMatrix, b: ExactMatrix) -> ExactMatrix:
    """Solve a X = b exactly.

    Requires every column of b to lie in the column space of a; free
    coordinates (when a has deficient column rank) are set to zero, matching
    the kernel/image canonical conventions.
    """
    if a.nrows != b.nrows:
        raise SizeMismatchError("solve: row mismatch")
    aug = a.hstack(b)
    rows = [list(r) for r in aug.rows]
    pivots = _rref_rows(rows, aug.ncols)
    for c in pivots:
        if c >= a.ncols:
            raise SizeMismatchError("solve: inconsistent system")
    out = [[ZERO] * b.ncols for _ in range(a.ncols)]
    for r, c in enumerate(pivots):
        for j in range(b.ncols):
            out[c][j] = rows[r][a.ncols + j]
    return ExactMatrix(a.ncols, b.ncols, out)


def inverse(m: ExactMatrix) -> ExactMatrix:
    if not m.is_square():
        raise NonSquareError("inverse of a non-square matrix")
    aug = m.hstack(ExactMatrix.identity(m.nrows))
    rows = [list(r) for r in aug.rows]
    pivots = _rref_rows(rows, aug.ncols)
    if len(pivots) < m.nrows or any(c >= m.nrows for c in pivots[: m.nrows]):
        raise SizeMismatchError("matrix is singular")
    return ExactMatrix(
        m.nrows, m.nrows, [row[m.nrows :] for row in rows[: m.nrows]]
    )


def span_contains(basis: ExactMatrix, vectors: ExactMatrix) -> bool:
    """Whether every column of `vectors` lies in the column span of `basis`."""
    r0 = rank(basis)
    return rank(basis.hstack(vectors)) == r0


def complete_to_basis(span_cols: ExactMatrix) -> tuple[list[int], list[int]]:
    """Split coordinates against a spanning set.

    Returns (independent, complement): the rref-pivot choice of independent
    columns of span_cols, and the standard basis indices completing them to a
    basis of the ambient space.
    """
    n = span_cols.nrows
    aug = span_cols.hstack(ExactMatrix.identity(n))
    pivots = independent_columns(aug)
    indep = [c for c in pivots if c < span_cols.ncols]
    comp = [c - span_cols.ncols for c in pivots if c >= span_cols.ncols]
    return indep, comp


# -- higher-level primitives ---------------------------------------------------


def commutant_dim(m: ExactMatrix) -> int:
    """Dimension of the centralizer {X : mX = Xm} inside full matrix space."""
    if not m.is_square():
        raise NonSquareError("commutant of a non-square matrix")
    n = m.nrows
    a = m.rows
    # equation (i,j): sum_k m[i][k] X[k][j] - X[i][k] m[k][j] = 0
    rows = []
    for i in range(n):
        for j in range(n):
            row = [ZERO] * (n * n)
            for k in range(n):
                if a[i][k]:
                    row[k * n + j] = row[k * n + j] + a[i][k]
                if a[k][j]:
                    row[i * n + k] = row[i * n + k] - a[k][j]
            rows.append(row)
    return n * n - _forward_eliminate(rows, n * n)


def solve_sylvester_space(
    a_list: Sequence[ExactMatrix], b_list: Sequence[ExactMatrix]
) -> list[ExactMatrix]:
    """Basis of the intertwiner space {g : g a_j = b_j g for all j}.

    Solved one constraint at a time: the kernel of the first equation is
    computed directly, then each further equation is imposed on the current
    solution span, which keeps the eliminations small.
    """
    if len(a_list) != len(b_list):
        raise SizeMismatchError("intertwiner: list length mismatch")
    if not a_list:
        raise SizeMismatchError("intertwiner: empty constraint list")
    na = a_list[0].ncols
    nb = b_list[0].ncols
    for a in a_list:
        if not a.is_square() or a.nrows != na:
            raise SizeMismatchError("intertwiner: left sizes differ")
    for b in b_list:
        if not b.is_square() or b.nrows != nb:
            raise SizeMismatchError("intertwiner: right sizes differ")

    a0, b0 = a_list[0], b_list[0]
    # g is nb x na; equation (i,j): sum_c g[i][c] a[c][j] - sum_r b[i][r] g[r][j] = 0
    rows = []
    for i in range(nb):
        for j in range(na):
            row = [ZERO] * (nb * na)
            for c in range(na):
                if a0.rows[c][j]:
                    row[i * na + c] = row[i * na + c] + a0.rows[c][j]
            for r in range(nb):
                if b0.rows[i][r]:
                    row[r * na + j] = row[r * na + j] - b0.rows[i][r]
            rows.append(row)
    kern = kernel_basis(ExactMatrix(nb * na, nb * na, rows))
    gens = [_unflatten(v, nb, na) for v in kern]

    for a, b in zip(a_list[1:], b_list[1:]):
        if not gens:
            return []
        residuals = [g * a - b * g for g in gens]
        cols = [_flatten(r) for r in residuals]
        coeffs = kernel_basis(ExactMatrix.from_columns(cols, nrows=nb * na))
        gens = [_combine(gens, c) for c in coeffs]
    return gens


def _flatten(m: ExactMatrix) -> Vector:
    return tuple(x for row in m.rows for x in row)


def _unflatten(v: Vector, nrows: int, ncols: int) -> ExactMatrix:
    return ExactMatrix(
        nrows, ncols, [v[i * ncols : (i + 1) * ncols] for i in range(nrows)]
    )


def _combine(mats: Sequence[ExactMatrix], coeffs: Vector) -> ExactMatrix:
    out = ExactMatrix.zeros(mats[0].nrows, mats[0].ncols)
    for m, c in zip(mats, coeffs):
        if c:
            out = out + m.scale(c)
    return out


class _SpanBuilder:
    """Incremental row-reduced basis of vectors, for span-closure loops."""

    def __init__(self, length: int):
        self.length = length
        self.rows: list[list[GaussianRational]] = []
        self.pivots: list[int] = []

    def add(self, vec: Iterable[GaussianRational]) -> bool:
        v = list(vec)
        for row, p in zip(self.rows, self.pivots):
            f = v[p]
            if f:
                for k in range(p, self.length):
                    if row[k]:
                        v[k] = v[k] - f * row[k]
        piv = next((k for k in range(self.length) if v[k]), None)
        if piv is None:
            return False
        inv = v[piv].inverse()
        v = [x * inv if x else ZERO for x in v]
        self.rows.append(v)
        self.pivots.append(piv)
        return True

    @property
    def dim(self) -> int:
        return len(self.rows)


def generated_algebra_dim(mats: Sequence[ExactMatrix], size: int | None = None) -> int:
    """Dimension of the unital algebra generated by the given matrices.

    Span-closure under left multiplication by the generators, iterated until
    stable; stops early once the full matrix space is reached.
    """
    if mats:
        n = mats[0].nrows
        for m in mats:
            if not m.is_square() or m.nrows != n:
                raise SizeMismatchError("generators must be square of equal size")
    else:
        if size is None:
            raise SizeMismatchError("empty generator list needs an explicit size")
        n = size
    span = _SpanBuilder(n * n)
    ident = ExactMatrix.identity(n)
    span.add(_flatten(ident))
    frontier = [ident]
    full = n * n
    while frontier and span.dim < full:
        new_frontier = []
        for g in mats:
            for b in frontier:
                prod = g * b
                if span.add(_flatten(prod)):
                    new_frontier.append(prod)
                    if span.dim == full:
                        return full
        frontier = new_frontier
    return span.dim


def largest_invariant_subspace(a: ExactMatrix, basis: Sequence[Vector]) -> list[Vector]:
    """Largest a-invariant subspace contained in the span of `basis`.

    Fixpoint of U <- {x in U : a x in U}, starting from the given span.  Exact
    and stable under field extension since every step is cut out by linear
    conditions over the base field.
    """
    if not basis:
        return []
    n = a.nrows
    u = ExactMatrix.from_columns(list(basis), nrows=n)
    pivots = independent_columns(u)
    u = ExactMatrix.from_columns([u.column(c) for c in pivots], nrows=n)
    while True:
        d = u.ncols
        if d == 0:
            return []
        ann = kernel_basis(u.transpose())  # rows annihilating span(u)
        if not ann:
            return u.columns()  # span is the whole space
        q = ExactMatrix.from_rows([list(v) for v in ann])
        m = q * (a * u)
        coeffs = kernel_basis(m)
        if len(coeffs) == d:
            return u.columns()
        if not coeffs:
            return []
        u = u * ExactMatrix.from_columns(coeffs, nrows=d)


def char_poly(m: ExactMatrix) -> list[GaussianRational]:
    """Coefficients [c_0, ..., c_{n-1}, 1] of det(xI - m), low degree first."""
    if not m.is_square():
        raise NonSquareError("characteristic polynomial of a non-square matrix")
    n = m.nrows
    coeffs = [ZERO] * (n + 1)
    coeffs[n] = ONE
    mk = ExactMatrix.identity(n)
    for k in range(1, n + 1):
        mk = m * mk
        c = -(mk.trace() / k)
        coeffs[n - k] = c
        if k < n:
            mk = mk.shift(c)
    return coeffs


def eval_poly(coeffs: Sequence[GaussianRational], x: GaussianRational) -> GaussianRational:
    acc = ZERO
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc
