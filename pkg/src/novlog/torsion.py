"""Torsion of based acyclic complexes over the truncated Laurent ring.

A based complex is a finite sequence of free modules with differentials
d_k given as matrices over R = A_rho((t)); acyclicity is certified
constructively by exhibiting a chain contraction delta with

    d delta + delta d = id   (mod t^(order+1)),

found degree by degree: delta_0 is a right inverse of d_1, and each
later delta_k solves d_(k+1) X = id - delta_(k-1) d_k, a linear system
handled by unit-pivot Gaussian elimination over the series ring.  If no
pivot with an invertible leading coefficient exists, or a residual row
is nonzero, the complex cannot be certified acyclic and the computation
fails loudly.

The torsion of an acyclic complex is the class of the map

    (d + delta) : C_odd -> C_even

in the based the complex carries; its class-valued logarithm (which
kills monomial basis scalings, permutations and elementary changes) is
the computable invariant stored alongside the representative.  For a
chain map, the torsion is that of its algebraic mapping cone.

All internal work runs at an enlarged truncation with precision
tracking, because the contraction and the reduction of (d + delta) move
coefficients across the truncation window; published results are exact
modulo t^(order+1).  Differential entries are read as exact, finitely
supported Laurent elements.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    NotAcyclicOrNoPivot,
    NoUnitPivot,
    PrecisionExhausted,
    TruncationMismatch,
)
from .k1 import SeriesMatrix, _laurent_reduce
from .series import TruncatedSeries
from .wittlog import ClassSeries

__all__ = [
    "BasedComplex",
    "TorsionClass",
    "chain_contraction",
    "torsion",
    "mapping_cone",
    "torsion_of_map",
]


class BasedComplex:
    """Finite free based complex; ``diffs[i]`` is d_(i+1): C_(i+1) -> C_i."""

    def __init__(self, group, order, ranks, diffs):
        if len(diffs) != max(len(ranks) - 1, 0):
            raise TruncationMismatch("need one differential per adjacent pair")
        self.group = group
        self.order = order
        self.ranks = list(ranks)
        self.diffs = list(diffs)
        for i, d in enumerate(self.diffs):
            if d.group is not group or d.order != order:
                raise TruncationMismatch("differential %d has wrong group/order" % (i + 1))
            if (d.nrows, d.ncols) != (self.ranks[i], self.ranks[i + 1]):
                raise TruncationMismatch(
                    "differential %d must be %d x %d" % (i + 1, self.ranks[i], self.ranks[i + 1])
                )
        for i in range(1, len(self.diffs)):
            prod = self.diffs[i - 1] * self.diffs[i]
            if any(s.coeffs for row in prod.rows for s in row):
                raise TruncationMismatch("d_%d compose d_%d is nonzero" % (i, i + 1))

    @property
    def top_degree(self):
        return len(self.ranks) - 1

    def rank(self, k):
        return self.ranks[k] if 0 <= k < len(self.ranks) else 0

    def diff(self, k):
        """d_k as a matrix (zero matrix outside the stored range)."""
        if 1 <= k <= len(self.diffs):
            return self.diffs[k - 1]
        return SeriesMatrix.zeros(self.group, self.order, self.rank(k - 1), self.rank(k))

    def lifted(self, order):
        return BasedComplex(
            self.group, order, self.ranks, [d.lifted(order) for d in self.diffs]
        )


@dataclass
class TorsionClass:
    """A representative of the torsion and its class-valued logarithm."""

    representative: SeriesMatrix
    invariant: ClassSeries


# ---------------------------------------------------------------------------
# chain contraction
# ---------------------------------------------------------------------------


def chain_contraction(C: BasedComplex, _target=None):
    """Contraction maps delta_k: C_k -> C_(k+1) with d delta + delta d = id.

    Success certifies acyclicity up to the truncation order.  Raises
    NotAcyclicOrNoPivot otherwise.
    """
    if _target is None:
        guard = _guard_for(C)
        last = None
        for _ in range(3):
            try:
                lifted = C.lifted(C.order + guard)
                deltas = chain_contraction(lifted, _target=C.order)
                return [d.truncated(C.order) for d in deltas]
            except PrecisionExhausted as exc:
                last = exc
                guard *= 2
        raise last
    target = _target

    group, order = C.group, C.order
    n = C.top_degree
    deltas = []
    prev = None  # delta_(k-1)
    for k in range(n + 1):
        phi = SeriesMatrix.identity(group, order, C.rank(k))
        if prev is not None and C.rank(k):
            phi = phi - prev * C.diff(k)
        if k < n:
            X = _solve_left(C.diff(k + 1), phi, target)
            deltas.append(X)
            prev = X
        else:
            _require_zero_matrix(phi, target, "top degree is not exact")
    _verify_contraction(C, deltas, target)
    return deltas


def _guard_for(C):
    span = max((d.max_abs_valuation() for d in C.diffs), default=0)
    total = sum(C.ranks)
    return 2 * max(total, 1) * (span + 1) + 4


def _require_zero_matrix(M, target, msg):
    for row in M.rows:
        for s in row:
            if any(e <= target for e in s.coeffs):
                raise NotAcyclicOrNoPivot(msg)
            if not s.coeffs and s.prec < target:
                raise PrecisionExhausted("zero test below target precision")


def _verify_contraction(C, deltas, target):
    group, order = C.group, C.order
    for k in range(C.top_degree + 1):
        if not C.rank(k):
            continue
        acc = SeriesMatrix.zeros(group, order, C.rank(k), C.rank(k))
        if k < C.top_degree:
            acc = acc + C.diff(k + 1) * deltas[k]
        if k >= 1:
            acc = acc + deltas[k - 1] * C.diff(k)
        resid = acc - SeriesMatrix.identity(group, order, C.rank(k))
        _require_zero_matrix(resid, target, "contraction identity fails in degree %d" % k)


def _solve_left(A: SeriesMatrix, B: SeriesMatrix, target):
    """One solution X of A X = B over the truncated Laurent ring.

    Pivots are entries of globally minimal valuation whose leading
    coefficient is invertible in A; free variables are set to zero.
    Raises NotAcyclicOrNoPivot when the system is inconsistent to the
    stored precision or no unit pivot is available.
    """
    group, order = A.group, A.order
    m, ncols = A.nrows, A.ncols
    width = B.ncols
    arows = [list(r) for r in A.rows]
    brows = [list(r) for r in B.rows]
    active_rows = list(range(m))
    active_cols = list(range(ncols))
    pivots = []  # (row, col, pivot) in selection order

    while True:
        best = None
        for i in active_rows:
            for j in active_cols:
                e = arows[i][j]
                if not e.coeffs:
                    continue
                v = min(e.coeffs)
                cand = (v, i, j)
                if best is not None and cand >= best[0]:
                    continue
                if e.coefficient(v).is_invertible():
                    best = (cand, e)
        if best is None:
            break
        (v, pi, pj), pivot = best
        pinv = pivot.unit_invert()
        for r in active_rows:
            if r == pi:
                continue
            e = arows[r][pj]
            if not e.coeffs:
                if e.prec < target:
                    raise PrecisionExhausted("zero test below target precision")
                continue
            mult = e * pinv
            arows[r] = [
                a if b.trusted_zero else a - mult * b
                for a, b in zip(arows[r], arows[pi])
            ]
            brows[r] = [
                a if b.trusted_zero else a - mult * b
                for a, b in zip(brows[r], brows[pi])
            ]
        active_rows.remove(pi)
        active_cols.remove(pj)
        pivots.append((pi, pj, pivot, pinv))

    # leftover rows must vanish entirely, or the system is inconsistent
    for i in active_rows:
        for j in active_cols:
            e = arows[i][j]
            if any(x <= target for x in e.coeffs):
                raise NotAcyclicOrNoPivot(
                    "no unit pivot for a nonzero residual row"
                )
            if not e.coeffs and e.prec < target:
                raise PrecisionExhausted("zero test below target precision")
        for j in range(width):
            e = brows[i][j]
            if any(x <= target for x in e.coeffs):
                raise NotAcyclicOrNoPivot("inconsistent system: complex is not acyclic")
            if not e.coeffs and e.prec < target:
                raise PrecisionExhausted("zero test below target precision")

    zero = TruncatedSeries.zero(group, order)
    X = [[zero] * width for _ in range(ncols)]
    for pi, pj, pivot, pinv in reversed(pivots):
        for j in range(width):
            rhs = brows[pi][j]
            for c in range(ncols):
                if c == pj:
                    continue
                a = arows[pi][c]
                x = X[c][j]
                # an exactly-zero factor kills the term regardless of the
                # other factor's precision window
                if a.trusted_zero or x.trusted_zero:
                    continue
                rhs = rhs - a * x
            X[pj][j] = pinv * rhs
    return SeriesMatrix(group, order, X)


# ---------------------------------------------------------------------------
# torsion
# ---------------------------------------------------------------------------


def torsion(C: BasedComplex) -> TorsionClass:
    """Torsion of an acyclic based complex: the (d + delta) odd-to-even
    matrix in the given bases, together with its class logarithm."""
    target = C.order
    guard = _guard_for(C)
    last = None
    for _ in range(3):
        lifted = C.lifted(target + guard)
        try:
            deltas = chain_contraction(lifted, _target=target)
            rep = _odd_to_even(lifted, deltas)
            if rep.nrows != rep.ncols:
                raise NotAcyclicOrNoPivot(
                    "odd and even total ranks differ; complex cannot be acyclic"
                )
            if rep.nrows == 0:
                inv = ClassSeries.zero(C.group, target)
            else:
                inv = _laurent_reduce(rep, target).truncated(target)
            return TorsionClass(rep.truncated(target), inv)
        except PrecisionExhausted as exc:
            last = exc
            guard *= 2
    raise last


def _odd_to_even(C: BasedComplex, deltas):
    group, order = C.group, C.order
    n = C.top_degree
    odds = [k for k in range(1, n + 1, 2) if C.rank(k)]
    evens = [k for k in range(0, n + 1, 2) if C.rank(k)]
    if not odds or not evens:
        total_odd = sum(C.rank(k) for k in range(1, n + 1, 2))
        total_even = sum(C.rank(k) for k in range(0, n + 1, 2))
        return SeriesMatrix.zeros(group, order, total_even, total_odd)
    grid = []
    for e in evens:
        row = []
        for o in odds:
            if e == o - 1:
                row.append(C.diff(o))
            elif e == o + 1:
                row.append(deltas[o])
            else:
                row.append(None)
        grid.append(row)
    # fill shapes for fully-None rows/cols cannot happen: e is adjacent
    # to at least one odd degree unless the complex is trivial there
    for i, e in enumerate(evens):
        if all(b is None for b in grid[i]):
            grid[i][0] = SeriesMatrix.zeros(group, order, C.rank(e), C.rank(odds[0]))
    for j, o in enumerate(odds):
        if all(grid[i][j] is None for i in range(len(evens))):
            grid[0][j] = SeriesMatrix.zeros(group, order, C.rank(evens[0]), C.rank(o))
    return SeriesMatrix.block(group, order, grid)


# ---------------------------------------------------------------------------
# mapping cones
# ---------------------------------------------------------------------------


def mapping_cone(phi, F: BasedComplex, D: BasedComplex) -> BasedComplex:
    """Algebraic mapping cone of a chain map phi: F -> D.

    ``phi`` is a list of matrices phi_k: F_k -> D_k (k = 0..top of F).
    Cone_k = F_(k-1) (+) D_k with differential (a, b) ->
    (-d_F a, phi(a) + d_D b), in the block basis order (F, D).
    """
    if F.group is not D.group or F.order != D.order:
        raise TruncationMismatch("complexes are not compatible")
    group, order = F.group, F.order
    nF, nD = F.top_degree, D.top_degree
    if len(phi) != nF + 1:
        raise TruncationMismatch("need one chain-map block per degree of the source")
    for k, p in enumerate(phi):
        if (p.nrows, p.ncols) != (D.rank(k), F.rank(k)):
            raise TruncationMismatch("chain map block %d has wrong shape" % k)
    for k in range(1, nF + 1):
        if D.rank(k) or F.rank(k):
            lhs = (D.diff(k) * phi[k]) if D.rank(k - 1) else None
            rhs = (phi[k - 1] * F.diff(k)) if D.rank(k - 1) else None
            if lhs is not None and lhs != rhs:
                raise TruncationMismatch("not a chain map in degree %d" % k)

    top = max(nF + 1, nD)
    ranks = [F.rank(k - 1) + D.rank(k) for k in range(top + 1)]
    diffs = []
    for k in range(1, top + 1):
        def blk(nrows, ncols, mat=None, sign=1):
            if mat is None or not nrows or not ncols:
                return SeriesMatrix.zeros(group, order, nrows, ncols)
            return mat.scale(sign) if sign < 0 else mat

        a = blk(F.rank(k - 2), F.rank(k - 1), F.diff(k - 1) if k >= 2 else None, -1)
        b = blk(F.rank(k - 2), D.rank(k))
        c = blk(D.rank(k - 1), F.rank(k - 1), phi[k - 1] if k - 1 <= nF else None)
        d = blk(D.rank(k - 1), D.rank(k), D.diff(k) if k <= nD else None)
        rows = (
            [ra + rb for ra, rb in zip(a.rows, b.rows)]
            + [rc + rd for rc, rd in zip(c.rows, d.rows)]
        )
        diffs.append(SeriesMatrix(group, order, rows, ncols=ranks[k]))
    return BasedComplex(group, order, ranks, diffs)


def torsion_of_map(phi, F: BasedComplex, D: BasedComplex) -> TorsionClass:
    """Torsion of a chain homotopy equivalence via its mapping cone."""
    return torsion(mapping_cone(phi, F, D))
