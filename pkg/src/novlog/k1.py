"""Matrix trace logarithms over twisted power and Laurent series rings.

For matrices over P = A_rho[[t]] congruent to the identity mod t, the
composition trace o project o log is additive on products and stable
under block sum, so it descends to a class-series invariant of the
K1 class of the matrix (``matrix_log_trace``).  Gauss elimination with
the unipotent diagonal as pivots splits any such matrix into elementary
factors and a diagonal of Witt vectors (``gauss_reduce``), which gives
the same invariant one diagonal entry at a time.

``class_log`` extends the invariant to matrices whose constant term is
invertible over A by dividing the constant part out (constants
contribute nothing).  ``laurent_class_log`` extends it to invertible
matrices over the Laurent ring R = A_rho((t)): the matrix is reduced by
valuation pivoting to a diagonal of units t^v * a * w with a a unit of
A and w a Witt vector, and only the Witt parts contribute.  By
construction the result vanishes on constant matrices, on monomial
units +-t^n h, and is unchanged by elementary row and column
operations, so it is an invariant of the matrix class modulo trivial
units.

Reduction over R moves information across the truncation window, so it
runs at an enlarged internal order with per-series precision tracking;
results are exact modulo t^(order+1) or an error is raised.  Matrix
entries handed to ``laurent_class_log`` are read as exact, finitely
supported Laurent elements.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import (
    NotUnipotentModT,
    NoUnitPivot,
    PrecisionExhausted,
    SingularConstantTerm,
    TruncationMismatch,
)
from .series import AlgebraElement, TruncatedSeries, _solve_rational
from .wittlog import ClassSeries, project_to_classes, series_log

__all__ = [
    "SeriesMatrix",
    "matrix_log_trace",
    "gauss_reduce",
    "class_log",
    "laurent_class_log",
    "constant_inverse",
]

Q = Fraction


class SeriesMatrix:
    """Rectangular matrix of TruncatedSeries over one group and order.

    ``ncols`` only needs to be passed for matrices with zero rows, where
    the width cannot be inferred.
    """

    __slots__ = ("group", "order", "rows", "_ncols")

    def __init__(self, group, order, rows, ncols=None):
        self.group = group
        self.order = order
        self.rows = [list(r) for r in rows]
        w = len(self.rows[0]) if self.rows else (ncols or 0)
        self._ncols = w
        for r in self.rows:
            if len(r) != w:
                raise TruncationMismatch("ragged matrix")
            for s in r:
                if s.group is not group or s.order != order:
                    raise TruncationMismatch("entry has wrong group or order")

    # -- constructors ----------------------------------------------------

    @classmethod
    def identity(cls, group, order, n):
        one = TruncatedSeries.one(group, order)
        zero = TruncatedSeries.zero(group, order)
        return cls(group, order, [[one if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, group, order, nrows, ncols):
        zero = TruncatedSeries.zero(group, order)
        return cls(group, order, [[zero] * ncols for _ in range(nrows)], ncols=ncols)

    @classmethod
    def from_constants(cls, group, order, entries):
        """Matrix of AlgebraElements embedded as constant series."""
        return cls(
            group,
            order,
            [[TruncatedSeries.constant(a, order) for a in row] for row in entries],
        )

    @classmethod
    def block(cls, group, order, grid):
        """Assemble from a 2D grid of SeriesMatrix blocks (None = zero).

        Row heights and column widths are inferred from the non-None
        blocks; a fully None row or column is not allowed.
        """
        nbr = len(grid)
        nbc = len(grid[0]) if nbr else 0
        heights = [None] * nbr
        widths = [None] * nbc
        for i in range(nbr):
            for j in range(nbc):
                b = grid[i][j]
                if b is None:
                    continue
                if heights[i] is None:
                    heights[i] = b.nrows
                if widths[j] is None:
                    widths[j] = b.ncols
        if any(h is None for h in heights) or any(w is None for w in widths):
            raise TruncationMismatch("block grid has an undetermined row or column")
        zero = TruncatedSeries.zero(group, order)
        rows = []
        for i in range(nbr):
            for r in range(heights[i]):
                row = []
                for j in range(nbc):
                    b = grid[i][j]
                    if b is None:
                        row.extend([zero] * widths[j])
                    else:
                        row.extend(b.rows[r])
                rows.append(row)
        return cls(group, order, rows, ncols=sum(widths))

    # -- structure -----------------------------------------------------

    @property
    def nrows(self):
        return len(self.rows)

    @property
    def ncols(self):
        return self._ncols

    @property
    def is_square(self):
        return self.nrows == self.ncols

    def entry(self, i, j):
        return self.rows[i][j]

    def __eq__(self, other):
        if not isinstance(other, SeriesMatrix):
            return NotImplemented
        return (
            self.group is other.group
            and self.order == other.order
            and self.ncols == other.ncols
            and self.rows == other.rows
        )

    def _check(self, other):
        if other.group is not self.group or other.order != self.order:
            raise TruncationMismatch("matrices are not compatible")

    def __add__(self, other):
        self._check(other)
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise TruncationMismatch("matrix shapes differ")
        return SeriesMatrix(
            self.group,
            self.order,
            [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)],
            ncols=self.ncols,
        )

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return SeriesMatrix(
            self.group, self.order, [[-a for a in row] for row in self.rows],
            ncols=self.ncols,
        )

    def __mul__(self, other):
        if not isinstance(other, SeriesMatrix):
            return NotImplemented
        self._check(other)
        if self.ncols != other.nrows:
            raise TruncationMismatch("matrix shapes do not compose")
        zero = TruncatedSeries.zero(self.group, self.order)
        cols = other.ncols
        out = []
        for i in range(self.nrows):
            row = []
            for j in range(cols):
                acc = zero
                for k in range(self.ncols):
                    a = self.rows[i][k]
                    b = other.rows[k][j]
                    if not (a.trusted_zero or b.trusted_zero):
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return SeriesMatrix(self.group, self.order, out, ncols=cols)

    def scale(self, q):
        return SeriesMatrix(
            self.group, self.order, [[a.scale(q) for a in row] for row in self.rows],
            ncols=self.ncols,
        )

    def constant_part(self):
        """Exponent-0 coefficients as an AlgebraElement matrix."""
        return [[s.coefficient(0) for s in row] for row in self.rows]

    def min_valuation(self):
        vals = [min(s.coeffs) for row in self.rows for s in row if s.coeffs]
        return min(vals) if vals else None

    def max_abs_valuation(self):
        vals = [abs(min(s.coeffs)) for row in self.rows for s in row if s.coeffs]
        return max(vals) if vals else 0

    def lifted(self, order):
        return SeriesMatrix(
            self.group, order, [[s.lifted(order) for s in row] for row in self.rows],
            ncols=self.ncols,
        )

    def truncated(self, order):
        return SeriesMatrix(
            self.group, order, [[s.truncated(order) for s in row] for row in self.rows],
            ncols=self.ncols,
        )

    def is_power_series(self):
        return all(
            not s.coeffs or min(s.coeffs) >= 0 for row in self.rows for s in row
        )

    def __repr__(self):  # pragma: no cover
        return "SeriesMatrix(%d x %d over order %d)" % (
            self.nrows,
            self.ncols,
            self.order,
        )


# ---------------------------------------------------------------------------
# constant-part inversion over A
# ---------------------------------------------------------------------------


def constant_inverse(group, entries):
    """Inverse of a square AlgebraElement matrix, or SingularConstantTerm.

    Finite kernels go through the rational regular representation of the
    left-multiplication action on A^n; free abelian kernels use the
    commutative determinant/adjugate (a matrix is invertible iff its
    determinant is a nonzero rational multiple of a single monomial).
    """
    n = len(entries)
    if any(len(row) != n for row in entries):
        raise TruncationMismatch("constant matrix must be square")
    if n == 0:
        return []
    if group.is_finite_kernel:
        return _constant_inverse_regular(group, entries)
    return _constant_inverse_commutative(group, entries)


def _constant_inverse_regular(group, entries):
    hs = sorted(group.h_elements())
    index = {h: i for i, h in enumerate(hs)}
    m = len(hs)
    n = len(entries)
    dim = n * m
    M = [[Q(0)] * dim for _ in range(dim)]
    for i in range(n):
        for j in range(n):
            a = entries[i][j]
            for h, q in a.items():
                for k, hk in enumerate(hs):
                    M[i * m + index[group.h_mul(h, hk)]][j * m + k] += q
    cols = []
    ident = group.h_identity()
    for j in range(n):
        rhs = [Q(0)] * dim
        rhs[j * m + index[ident]] = Q(1)
        sol = _solve_rational(M, rhs)
        if sol is None:
            raise SingularConstantTerm("constant matrix is singular over A")
        cols.append(sol)
    out = [[None] * n for _ in range(n)]
    for j in range(n):
        for i in range(n):
            coeffs = {
                hs[k]: cols[j][i * m + k] for k in range(m) if cols[j][i * m + k]
            }
            out[i][j] = AlgebraElement(group, coeffs, _clean=True)
    return out


def _constant_inverse_commutative(group, entries):
    n = len(entries)
    det = _commutative_det(entries)
    try:
        det_inv = det.inverse()
    except Exception:
        raise SingularConstantTerm(
            "determinant is not a unit of the group algebra"
        ) from None
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [
                [entries[r][c] for c in range(n) if c != i]
                for r in range(n)
                if r != j
            ]
            cof = _commutative_det(minor) if minor else AlgebraElement.one(group)
            if (i + j) % 2:
                cof = -cof
            out[i][j] = cof * det_inv
    return out


def _commutative_det(entries):
    n = len(entries)
    if n == 0:
        raise TruncationMismatch("empty determinant")
    memo = {}

    def go(rows, cols):
        if len(rows) == 1:
            return entries[rows[0]][cols[0]]
        key = (rows, cols)
        got = memo.get(key)
        if got is not None:
            return got
        r = rows[0]
        acc = None
        for pos, c in enumerate(cols):
            a = entries[r][c]
            if not a:
                continue
            sub = go(rows[1:], cols[:pos] + cols[pos + 1 :])
            term = a * sub
            if pos % 2:
                term = -term
            acc = term if acc is None else acc + term
        if acc is None:
            acc = AlgebraElement.zero(entries[r][cols[0]].group)
        memo[key] = acc
        return acc

    return go(tuple(range(n)), tuple(range(n)))


# ---------------------------------------------------------------------------
# trace logarithms over P
# ---------------------------------------------------------------------------


def matrix_log_trace(U: SeriesMatrix) -> ClassSeries:
    """Class projection of Tr log(U) for U = I + (valuation >= 1)."""
    if not U.is_square:
        raise TruncationMismatch("trace logarithm needs a square matrix")
    n = U.nrows
    M = U - SeriesMatrix.identity(U.group, U.order, n)
    for row in M.rows:
        for s in row:
            if s.coeffs and min(s.coeffs) < 1:
                raise NotUnipotentModT("matrix is not I + O(t)")
    trace = TruncatedSeries.zero(U.group, U.order)
    power = M
    for k in range(1, U.order + 1):
        diag = TruncatedSeries.zero(U.group, U.order)
        for i in range(n):
            diag = diag + power.rows[i][i]
        trace = trace + diag.scale(Q((-1) ** (k - 1), k))
        if k < U.order:
            power = power * M
    return project_to_classes(trace)


def gauss_reduce(U: SeriesMatrix):
    """Split U over P as elementary * diagonal * constant.

    Requires the constant part U(0) to be invertible over A.  Returns
    (diagonal, constant): the diagonal entries are Witt vectors whose
    class logarithms sum to ``class_log(U)``, and ``constant`` is the
    AlgebraElement matrix U(0).
    """
    if not U.is_square:
        raise TruncationMismatch("reduction needs a square matrix")
    if not U.is_power_series():
        raise SingularConstantTerm(
            "matrix has negative-exponent entries; not a power-series matrix"
        )
    C = U.constant_part()
    Cinv = constant_inverse(U.group, C)
    V = U * SeriesMatrix.from_constants(U.group, U.order, Cinv)
    n = U.nrows
    rows = [list(r) for r in V.rows]
    for k in range(n):
        pivot = rows[k][k]
        pinv = pivot.unit_invert()
        for i in range(n):
            if i == k:
                continue
            e = rows[i][k]
            if e.trusted_zero:
                continue
            m = e * pinv
            rows[i] = [a - m * b for a, b in zip(rows[i], rows[k])]
    diagonal = [rows[k][k] for k in range(n)]
    return diagonal, C


def class_log(U: SeriesMatrix) -> ClassSeries:
    """Class-valued logarithm of a matrix over P with invertible
    constant part; constants contribute zero."""
    if not U.is_square:
        raise TruncationMismatch("class_log needs a square matrix")
    if not U.is_power_series():
        raise SingularConstantTerm(
            "matrix has negative-exponent entries; not a power-series matrix"
        )
    Cinv = constant_inverse(U.group, U.constant_part())
    return matrix_log_trace(U * SeriesMatrix.from_constants(U.group, U.order, Cinv))


# ---------------------------------------------------------------------------
# Laurent extension
# ---------------------------------------------------------------------------


def laurent_class_log(M: SeriesMatrix) -> ClassSeries:
    """Class-valued logarithm of an invertible matrix over R.

    Valuation pivoting reduces M to a diagonal of units t^v * a * w
    (a invertible in A, w a Witt vector); the result is the sum of the
    Witt logarithms.  Vanishes on GL(A), on monomial units, and under
    elementary operations.  Raises NoUnitPivot when no pivot with an
    invertible leading coefficient can be found at some step.
    """
    if not M.is_square:
        raise TruncationMismatch("laurent_class_log needs a square matrix")
    target = M.order
    if M.nrows == 0:
        return ClassSeries.zero(M.group, target)
    guard = 2 * M.nrows * (M.max_abs_valuation() + 1) + 4
    for _ in range(3):
        work = M.lifted(target + guard)
        try:
            acc = _laurent_reduce(work, target)
        except PrecisionExhausted:
            guard *= 2
            continue
        return acc.truncated(target)
    raise PrecisionExhausted(
        "Laurent reduction kept losing precision; input may be pathological"
    )


def _laurent_reduce(work: SeriesMatrix, target) -> ClassSeries:
    """Reduce a lifted working matrix; class log at the working order."""
    group = work.group
    order = work.order
    n = work.nrows
    rows = [list(r) for r in work.rows]
    active_rows = list(range(n))
    active_cols = list(range(n))
    acc = ClassSeries.zero(group, order)

    def known_zero(s):
        if s.coeffs:
            return False
        if s.prec < target:
            raise PrecisionExhausted("zero test below target precision")
        return True

    for _ in range(n):
        best = None
        for i in active_rows:
            for j in active_cols:
                e = rows[i][j]
                if not e.coeffs:
                    continue
                v = min(e.coeffs)
                cand = (v, i, j)
                if best is not None and cand >= best[0]:
                    continue
                if e.coefficient(v).is_invertible():
                    best = (cand, e)
        if best is None:
            raise NoUnitPivot(
                "no entry with an invertible leading coefficient; "
                "cannot certify invertibility"
            )
        (v, pi, pj), pivot = best
        pinv = pivot.unit_invert()
        # clear the pivot column with row operations
        for r in active_rows:
            if r == pi:
                continue
            e = rows[r][pj]
            if known_zero(e):
                continue
            m = e * pinv
            rows[r] = [
                a if b.trusted_zero else a - m * b
                for a, b in zip(rows[r], rows[pi])
            ]
        # clear the pivot row with column operations (these only touch
        # row pi now that the column is clear)
        for c in active_cols:
            if c == pj:
                continue
            e = rows[pi][c]
            if known_zero(e):
                continue
            rows[pi][c] = e - pivot * (pinv * e)
        active_rows.remove(pi)
        active_cols.remove(pj)
        # pivot = t^v * a * w with a = leading coefficient
        c0 = pivot.shift_left(-v)
        a = c0.coefficient(0)
        w = TruncatedSeries.constant(a.inverse(), order) * c0
        lw = series_log(w)
        if lw.prec < target:
            raise PrecisionExhausted("pivot Witt part below target precision")
        acc = acc + project_to_classes(lw)
    return acc
