"""Extension and restriction of normal-form systems.

Extension adjoins a singular point and raises the rank by the dimension of
IM (A - rho1)(A - rho2); restriction deletes a block and lowers it.  Both are
realized twice: by closed-form block matrices (the direct route) and by
pipelines of additions, rank-changing convolutions and point swaps (the
composite route).  The two routes land in the same conjugacy class, which the
tests exercise; the composite operators below also package the
restriction-of-extension identities used by the reduction driver.

Pole bookkeeping: the operator identities act on matrix tuples, so pole values
travel as labels.  A restriction at point j leaves the extension's new pole
sitting at position j; the second extension of the two-step composite reuses
the deleted pole, which makes its pole set match the plain pipeline exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from . import linalg
from .errors import (
    ConditionsFailError,
    CRViolatedError,
    DegenerateExtensionError,
    DuplicatePoleError,
    IndexRangeError,
    InvariantError,
    NotGenericError,
    NotIrreducibleError,
    NotONFShapeError,
    NotQ2Error,
    ZeroRhoError,
)
from .katz import (
    addition,
    append_infinity_pole,
    drop_trailing_zero_pole,
    middle_convolution,
    swap_with_infinity,
)
from .linalg import ExactMatrix
from .okubo import (
    OkuboSystem,
    check_onf_conditions,
    euler_transform,
    pick_generic,
    scf_from_onf,
)
from .scalars import GaussianRational, gr
from .schlesinger import SchlesingerTuple, is_irreducible, verify_scheme
from .spectral import Column, RiemannScheme, canonical_column


@dataclass(frozen=True)
class ExtensionParams:
    rho1: GaussianRational
    rho2: GaussianRational
    t_new: GaussianRational

    def __init__(self, rho1, rho2, t_new):
        rho1, rho2, t_new = gr(rho1), gr(rho2), gr(t_new)
        if rho1.is_zero() or rho2.is_zero():
            raise ZeroRhoError("extension parameters must be nonzero")
        object.__setattr__(self, "rho1", rho1)
        object.__setattr__(self, "rho2", rho2)
        object.__setattr__(self, "t_new", t_new)


@dataclass(frozen=True)
class RestrictionParams:
    mu1: GaussianRational
    mu2: GaussianRational
    j: int

    def __init__(self, mu1, mu2, j):
        object.__setattr__(self, "mu1", gr(mu1))
        object.__setattr__(self, "mu2", gr(mu2))
        object.__setattr__(self, "j", int(j))


# -- extension -----------------------------------------------------------------


def extend_direct(o: OkuboSystem, params: ExtensionParams) -> OkuboSystem:
    """Closed-form extension on C^n + IM (A - rho1)(A - rho2).

    The new block matrix acts as A and the inclusion on the first summand and
    as minus the quadratic product and (rho1 + rho2) - A on the second,
    expressed on the canonical image basis of the product.
    """
    if params.t_new in o.poles:
        raise DuplicatePoleError(f"pole {params.t_new} already present")
    if not check_onf_conditions(o):
        raise ConditionsFailError("extension needs the normal-form genericity conditions")
    a = o.a
    n = o.rank
    w = a.shift(-params.rho1) * a.shift(-params.rho2)
    img = linalg.image_basis(w)
    r = len(img)
    if r == 0:
        raise DegenerateExtensionError(
            "(A - rho1)(A - rho2) vanishes; the extension would add an empty block"
        )
    c = ExactMatrix.from_columns(img, nrows=n)
    x = linalg.solve(c, -w)
    y = linalg.solve(c, a.shift(-(params.rho1 + params.rho2)).scale(-1) * c)
    a_hat = linalg.block_matrix([[a, c], [x, y]])
    blocks = list(o.block_sizes) + [r]
    poles = list(o.poles) + [params.t_new]
    scheme = None
    if o.scheme is not None:
        try:
            predicted = scheme_of_extension(
                o.scheme,
                params.rho1,
                params.rho2,
                block_sizes=o.block_sizes,
                t_new=params.t_new,
            )
        except (NotONFShapeError, InvariantError):
            predicted = None
        if predicted is not None and predicted.order == n + r:
            cand = OkuboSystem(blocks, poles, a_hat, None)
            if verify_scheme(scf_from_onf(cand), predicted):
                scheme = predicted
    return OkuboSystem(blocks, poles, a_hat, scheme)


def extend_composite(o: OkuboSystem, params: ExtensionParams) -> SchlesingerTuple:
    """Extension as a pipeline on the residue tuple: convolution down by rho1,
    materialize infinity as the new point, shift it by rho2 - rho1, convolve
    back up by rho1."""
    if not check_onf_conditions(o):
        raise ConditionsFailError("extension needs the normal-form genericity conditions")
    t = scf_from_onf(o)
    t = middle_convolution(t, -params.rho1)
    t = append_infinity_pole(t, params.t_new)
    mu = [gr(0)] * t.num_points
    mu[-1] = params.rho2 - params.rho1
    t = addition(t, mu)
    return middle_convolution(t, params.rho1)


# -- restriction ----------------------------------------------------------------


def swap_blocks(o: OkuboSystem, i: int, j: int) -> OkuboSystem:
    """Transpose two blocks (1-based), reordering coordinates, poles and the
    scheme columns together."""
    p = o.num_points
    if not (1 <= i <= p and 1 <= j <= p):
        raise IndexRangeError("block index out of range")
    if i == j:
        return o
    order = list(range(1, p + 1))
    order[i - 1], order[j - 1] = order[j - 1], order[i - 1]
    idx = [k for b in order for k in o.block_range(b)]
    a = o.a.submatrix(idx, idx)
    blocks = [o.block_sizes[b - 1] for b in order]
    poles = [o.poles[b - 1] for b in order]
    scheme = None
    if o.scheme is not None:
        cols = [o.scheme.column_at_infinity()] + [o.scheme.column_at(b) for b in order]
        scheme = RiemannScheme(poles, cols)
    return OkuboSystem(blocks, poles, a, scheme)


def restrict(o: OkuboSystem, params: RestrictionParams) -> OkuboSystem:
    """Delete the block at point j (after moving it last).

    Defined for linearly irreducible systems whose coefficient matrix
    satisfies (A - mu1)(A - mu2) = 0, provided mu1 + mu2 misses the spectrum
    of the target diagonal block.
    """
    p = o.num_points
    if not 1 <= params.j <= p:
        raise IndexRangeError(f"block index {params.j} out of range")
    if p < 2:
        raise IndexRangeError("cannot restrict a single-point system")
    quad = o.a.shift(-params.mu1) * o.a.shift(-params.mu2)
    if not quad.is_zero():
        raise NotQ2Error("coefficient matrix does not satisfy the quadratic relation")
    if not is_irreducible(scf_from_onf(o)):
        raise NotIrreducibleError("restriction requires a linearly irreducible system")
    ow = swap_blocks(o, params.j, p)
    npk = ow.block_sizes[-1]
    app = ow.diagonal_block(p)
    if linalg.rank(app.shift(-(params.mu1 + params.mu2))) < npk:
        raise CRViolatedError(
            "mu1 + mu2 is an eigenvalue of the deleted block; precompose a generic"
            " Euler transformation"
        )
    keep = [k for k in range(ow.rank) if k not in ow.block_range(p)]
    a_check = ow.a.submatrix(keep, keep)
    blocks = ow.block_sizes[:-1]
    poles = ow.poles[:-1]
    scheme = None
    if ow.scheme is not None:
        try:
            predicted = scheme_of_restriction(ow.scheme, block_sizes=ow.block_sizes)
        except (NotQ2Error, CRViolatedError, NotONFShapeError, InvariantError):
            predicted = None
        if predicted is not None and predicted.order == len(keep):
            cand = OkuboSystem(blocks, poles, a_check, None)
            if verify_scheme(scf_from_onf(cand), predicted):
                scheme = predicted
    return OkuboSystem(blocks, poles, a_check, scheme)


def restrict_composite(o: OkuboSystem, params: RestrictionParams) -> SchlesingerTuple:
    """Restriction as a pipeline on the residue tuple; the deleted point comes
    back with a zero residue, which is dropped."""
    p = o.num_points
    ow = swap_blocks(o, params.j, p)
    t = scf_from_onf(ow)
    t = middle_convolution(t, -params.mu1)
    mu = [gr(0)] * p
    mu[-1] = params.mu1 - params.mu2
    t = addition(t, mu)
    t = swap_with_infinity(t, p)
    t = middle_convolution(t, params.mu1)
    return drop_trailing_zero_pole(t)


# -- restriction-of-extension composites ------------------------------------------


def re_composite(
    o: OkuboSystem, j: int, rho1, rho2, epsilon=None
) -> OkuboSystem:
    """Restriction at j of the epsilon-shifted extension.

    The net effect replaces the block at j; the rank changes by
    dim IM (A - rho1)(A - rho2) - dim IM A_j.  epsilon must avoid a finite
    exceptional set; when omitted, the smallest positive integer for which
    every stage is defined is chosen.
    """
    if epsilon is None:
        epsilon = auto_epsilon_re(o, j, rho1, rho2)
    return _re_stages(o, j, gr(rho1), gr(rho2), gr(epsilon))


def _re_stages(o, j, rho1, rho2, eps) -> OkuboSystem:
    params = ExtensionParams(rho1, rho2, pick_generic(list(o.poles)))
    ext = extend_direct(o, params)
    if eps.is_zero() or linalg.rank(ext.a.shift(eps)) < ext.rank:
        raise NotGenericError(f"epsilon {eps} collides with the extended spectrum")
    eu = euler_transform(ext, eps)
    return restrict(eu, RestrictionParams(rho1 + eps, rho2 + eps, j))


def auto_epsilon_re(o, j, rho1, rho2):
    """Smallest positive integer shift making every stage of the
    restriction-of-extension defined."""
    return _first_working_epsilon(lambda eps: _re_stages(o, j, gr(rho1), gr(rho2), eps))


def _first_working_epsilon(runner, bound: int = 60):
    for k in range(1, bound):
        eps = gr(k)
        try:
            runner(eps)
        except (NotGenericError, CRViolatedError, DegenerateExtensionError, ZeroRhoError):
            continue
        return eps
    raise NotGenericError("no small integer epsilon makes the pipeline defined")


def re_katz_pipeline(o: OkuboSystem, j: int, rho1, rho2, epsilon) -> SchlesingerTuple:
    """The equivalent three-operation pipeline on the residue tuple: convolve
    down by rho1, swap point j with infinity, shift it by rho2 - rho1,
    convolve up by rho1 + epsilon."""
    rho1, rho2, epsilon = gr(rho1), gr(rho2), gr(epsilon)
    t = scf_from_onf(o)
    t = middle_convolution(t, -rho1)
    t = swap_with_infinity(t, j)
    mu = [gr(0)] * t.num_points
    mu[j - 1] = rho2 - rho1
    t = addition(t, mu)
    return middle_convolution(t, rho1 + epsilon)


def rere_composite(
    o: OkuboSystem, j: int, rho1, rho2, rho3, epsilon=None
) -> OkuboSystem:
    """Two extension/restriction rounds at the same point.

    Equals a convolution sandwich around a single scalar shift at j (see
    rere_katz_pipeline); the second extension reuses the deleted pole so the
    pole sets agree on the nose.
    """
    if epsilon is None:
        epsilon = auto_epsilon_rere(o, j, rho1, rho2, rho3)
    return _rere_stages(o, j, gr(rho1), gr(rho2), gr(rho3), gr(epsilon))


def _rere_stages(o, j, rho1, rho2, rho3, eps) -> OkuboSystem:
    pole_j = o.poles[j - 1]
    rho1p = rho1 + eps
    rho2p = rho1 + rho2 + rho3 + eps
    if rho1p.is_zero() or rho2p.is_zero():
        raise NotGenericError("epsilon zeroes a second-stage extension parameter")
    mid = _re_stages(o, j, rho1, rho2, eps)
    stage2 = extend_direct(mid, ExtensionParams(rho1p, rho2p, pole_j))
    app = stage2.diagonal_block(j)
    if linalg.rank(app.shift(-(rho1p + rho2p))) < stage2.block_sizes[j - 1]:
        raise NotGenericError("epsilon leaves the second restriction blocked")
    return restrict(stage2, RestrictionParams(rho1p, rho2p, j))


def auto_epsilon_rere(o, j, rho1, rho2, rho3):
    """Smallest positive integer shift making both rounds defined."""
    return _first_working_epsilon(
        lambda eps: _rere_stages(o, j, gr(rho1), gr(rho2), gr(rho3), eps)
    )


def rere_katz_pipeline(
    o: OkuboSystem, j: int, rho1, rho3, epsilon
) -> SchlesingerTuple:
    """Convolve down by rho1, add rho1 + rho3 at point j, convolve up by
    rho1 + epsilon."""
    rho1, rho3, epsilon = gr(rho1), gr(rho3), gr(epsilon)
    t = scf_from_onf(o)
    t = middle_convolution(t, -rho1)
    mu = [gr(0)] * t.num_points
    mu[j - 1] = rho1 + rho3
    t = addition(t, mu)
    return middle_convolution(t, rho1 + epsilon)


# -- scheme-level transforms -------------------------------------------------------


def _structural_zero(col: Column, n: int, nj: Optional[int]):
    """Split off the kernel part [0]_(n - nj) of a normal-form column.

    With an explicit block size the part must exist exactly; otherwise the
    largest zero part is taken (and the block size inferred).
    """
    zeros = [(m, i) for i, (label, m) in enumerate(col) if label == gr(0)]
    if nj is not None:
        want = n - nj
        if want == 0:
            return list(col), 0
        for m, i in zeros:
            if m == want:
                return [e for k, e in enumerate(col) if k != i], want
        raise NotONFShapeError("column lacks the kernel part of the declared block size")
    if not zeros:
        return list(col), 0
    m, i = max(zeros)
    return [e for k, e in enumerate(col) if k != i], m


def scheme_of_extension(
    s: RiemannScheme,
    rho1,
    rho2,
    block_sizes: Optional[Sequence[int]] = None,
    t_new=None,
) -> RiemannScheme:
    """Scheme bookkeeping of the extension.

    The infinity column donates its -rho1 and -rho2 slots (largest
    multiplicities, empty when absent); the new point receives a full-size
    zero part plus the shifted remainder of the old infinity column.
    """
    rho1, rho2 = gr(rho1), gr(rho2)
    n = s.order
    p = len(s.poles)
    if block_sizes is not None and len(block_sizes) != p:
        raise NotONFShapeError("one block size per finite point required")
    inf_col = list(s.column_at_infinity())
    m1, rest = _take_valued(inf_col, -rho1)
    m2, rest = _take_valued(rest, -rho2)
    n_hat = 2 * n - m1 - m2
    new_inf = canonical_column([(-rho1, n - m2), (-rho2, n - m1)])
    cols = [new_inf]
    for j in range(1, p + 1):
        nj = block_sizes[j - 1] if block_sizes is not None else None
        rest_j, kernel = _structural_zero(list(s.column_at(j)), n, nj)
        nj_val = n - kernel if nj is None else nj
        entries = [(gr(0), n_hat - nj_val)] + rest_j
        cols.append(canonical_column(entries))
    new_point = [(gr(0), n)]
    new_point += [(rho1 + rho2 + label, mult) for label, mult in rest]
    cols.append(canonical_column(new_point))
    t_new = pick_generic(list(s.poles)) if t_new is None else gr(t_new)
    if t_new in s.poles:
        raise DuplicatePoleError(f"pole {t_new} already present")
    poles = list(s.poles) + [t_new]
    return RiemannScheme(poles, cols)


def _take_valued(col, value):
    """Largest-multiplicity entry with the given label, removed from the rest."""
    best = -1
    best_i = None
    for i, (label, mult) in enumerate(col):
        if label == value and mult > best:
            best = mult
            best_i = i
    if best_i is None:
        return 0, list(col)
    return col[best_i][1], [e for i, e in enumerate(col) if i != best_i]


def scheme_of_restriction(
    s: RiemannScheme, block_sizes: Optional[Sequence[int]] = None
) -> RiemannScheme:
    """Scheme bookkeeping of the restriction at the last point.

    Requires exactly two parts at infinity (the quadratic-relation shape).
    The deleted column's non-kernel labels move to infinity shifted by
    -(mu1 + mu2); the kernel parts shrink by the deleted block size.
    """
    n = s.order
    p = len(s.poles)
    if p < 2:
        raise IndexRangeError("cannot restrict a single-point scheme")
    inf_col = list(s.column_at_infinity())
    if len(inf_col) != 2:
        raise NotQ2Error("infinity column must consist of exactly two parts")
    (l1, m1), (l2, m2) = inf_col
    mu1, mu2 = -l1, -l2
    mu_sum = mu1 + mu2
    nj_last = block_sizes[-1] if block_sizes is not None else None
    rest_p, kernel_p = _structural_zero(list(s.column_at(p)), n, nj_last)
    n_p = n - kernel_p if nj_last is None else nj_last
    for label, _ in rest_p:
        if label == mu_sum:
            raise CRViolatedError(
                "mu1 + mu2 is an eigenvalue of the deleted block; shift first"
            )
    if m1 - n_p < 0 or m2 - n_p < 0:
        raise NotONFShapeError("deleted block larger than an infinity part")
    n_check = n - n_p
    new_inf = [(-mu1, m1 - n_p), (-mu2, m2 - n_p)]
    new_inf += [(label - mu_sum, mult) for label, mult in rest_p]
    cols = [canonical_column(new_inf)]
    for j in range(1, p):
        nj = block_sizes[j - 1] if block_sizes is not None else None
        rest_j, kernel = _structural_zero(list(s.column_at(j)), n, nj)
        nj_val = n - kernel if nj is None else nj
        entries = [(gr(0), n_check - nj_val)] + rest_j
        cols.append(canonical_column(entries))
    return RiemannScheme(s.poles[:-1], cols)
