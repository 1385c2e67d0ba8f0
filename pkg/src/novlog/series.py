"""Exact arithmetic in truncated twisted power and Laurent series rings.

Let A = QH be the rational group algebra of the kernel of a
:class:`~novlog.groups.TwistedGroup`.  This module implements the
twisted series ring

    P = A_rho[[t]]   and its Laurent extension   R = A_rho((t)),

truncated at a fixed order N: all identities hold modulo t^(N+1).  The
normal form keeps every power of t on the left, so the twist

    a * t = t * rho(a)

appears only in multiplication: (t^i a)(t^j b) = t^(i+j) rho^j(a) b.

Coefficients are exact rationals.  Invertibility in A is decided by the
left regular representation for finite kernels; over a free abelian
kernel the units are the nonzero rational multiples of single monomials.

Because the truncation window [low, N] is not stable under
multiplication by negative powers of t, every series carries an
internal absolute precision ``prec`` (coefficients at exponents > prec
are unknown).  Freshly built series have prec = N; Laurent pivoting in
the matrix routines consumes precision and is run at an enlarged
internal order so that published results are always exact mod t^(N+1).
"""

from __future__ import annotations

from fractions import Fraction

from .errors import NonUnitLeading, TruncationMismatch
from .groups import GroupElement

__all__ = ["AlgebraElement", "TruncatedSeries"]

Q = Fraction
INF = float("inf")


def _as_fraction(q):
    if isinstance(q, Fraction):
        return q
    if isinstance(q, int):
        return Fraction(q)
    raise TypeError("expected an exact rational, got %r" % (q,))


class AlgebraElement:
    """Element of the rational group algebra A = QH, stored sparsely."""

    __slots__ = ("group", "coeffs")

    def __init__(self, group, coeffs=None, _clean=False):
        self.group = group
        if coeffs is None:
            self.coeffs = {}
        elif _clean:
            self.coeffs = coeffs
        else:
            self.coeffs = {h: _as_fraction(q) for h, q in coeffs.items() if q}

    # -- constructors --------------------------------------------------

    @classmethod
    def zero(cls, group):
        return cls(group, {}, _clean=True)

    @classmethod
    def one(cls, group):
        return cls(group, {group.h_identity(): Q(1)}, _clean=True)

    @classmethod
    def monomial(cls, group, h, q=1):
        q = _as_fraction(q)
        return cls(group, {h: q} if q else {}, _clean=True)

    # -- basic structure -----------------------------------------------

    def items(self):
        return self.coeffs.items()

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.group is other.group and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def _check(self, other):
        if other.group is not self.group:
            raise TruncationMismatch("algebra elements over different groups")

    # -- arithmetic ------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        self._check(other)
        out = dict(self.coeffs)
        for h, q in other.coeffs.items():
            s = out.get(h, 0) + q
            if s:
                out[h] = s
            else:
                out.pop(h, None)
        return AlgebraElement(self.group, out, _clean=True)

    def __neg__(self):
        return AlgebraElement(
            self.group, {h: -q for h, q in self.coeffs.items()}, _clean=True
        )

    def __sub__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self + (-other)

    def scale(self, q):
        q = _as_fraction(q)
        if not q:
            return AlgebraElement.zero(self.group)
        return AlgebraElement(
            self.group, {h: c * q for h, c in self.coeffs.items()}, _clean=True
        )

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        self._check(other)
        g = self.group
        out = {}
        for h1, q1 in self.coeffs.items():
            for h2, q2 in other.coeffs.items():
                h = g.h_mul(h1, h2)
                s = out.get(h, 0) + q1 * q2
                if s:
                    out[h] = s
                else:
                    del out[h]
        return AlgebraElement(g, out, _clean=True)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def rho_pow(self, power):
        """Apply rho^power to every kernel element in the support."""
        if power == 0 or self.group.rho_is_identity:
            return self
        g = self.group
        return AlgebraElement(
            g, {g.h_rho(h, power): q for h, q in self.coeffs.items()}, _clean=True
        )

    def augment(self):
        """Sum of all coefficients (the map H -> 1)."""
        return sum(self.coeffs.values(), Q(0))

    # -- invertibility ----------------------------------------------------

    def is_invertible(self):
        try:
            self.inverse()
        except NonUnitLeading:
            return False
        return True

    def inverse(self):
        """Two-sided inverse in A, or NonUnitLeading.

        Finite kernel: solve the left regular representation over Q.
        Free abelian kernel: only rational multiples of monomials are
        units.
        """
        g = self.group
        if not self.coeffs:
            raise NonUnitLeading("zero is not invertible")
        if g.is_finite_kernel and g.kernel_size > 1:
            return self._inverse_regular()
        if len(self.coeffs) != 1:
            raise NonUnitLeading("not a unit in the group algebra")
        (h, q), = self.coeffs.items()
        return AlgebraElement.monomial(g, g.h_inv(h), 1 / q)

    def _inverse_regular(self):
        g = self.group
        hs = sorted(g.h_elements())
        index = {h: i for i, h in enumerate(hs)}
        n = len(hs)
        # column j of M is self * h_j expressed in the basis hs
        M = [[Q(0)] * n for _ in range(n)]
        for j, hj in enumerate(hs):
            for h, q in self.coeffs.items():
                M[index[g.h_mul(h, hj)]][j] += q
        rhs = [Q(0)] * n
        rhs[index[g.h_identity()]] = Q(1)
        sol = _solve_rational(M, rhs)
        if sol is None:
            raise NonUnitLeading("singular regular representation")
        out = {hs[i]: sol[i] for i in range(n) if sol[i]}
        return AlgebraElement(g, out, _clean=True)

    def __repr__(self):
        if not self.coeffs:
            return "0"
        g = self.group
        bits = [
            "%s*%s" % (q, g.h_name(h))
            for h, q in sorted(self.coeffs.items(), key=lambda kv: kv[0])
        ]
        return " + ".join(bits)


def _solve_rational(M, rhs):
    """Solve M x = rhs over Q by Gaussian elimination; None if singular."""
    n = len(M)
    A = [row[:] + [rhs[i]] for i, row in enumerate(M)]
    for col in range(n):
        piv = None
        for r in range(col, n):
            if A[r][col]:
                piv = r
                break
        if piv is None:
            return None
        A[col], A[piv] = A[piv], A[col]
        inv = 1 / A[col][col]
        A[col] = [v * inv for v in A[col]]
        for r in range(n):
            if r != col and A[r][col]:
                f = A[r][col]
                A[r] = [a - f * b for a, b in zip(A[r], A[col])]
    return [A[i][n] for i in range(n)]


class TruncatedSeries:
    """Element of A_rho((t)) truncated at a fixed order.

    ``coeffs`` maps exponents to nonzero AlgebraElements; every stored
    exponent satisfies low <= exp <= min(order, prec).  The finite
    negative part (low > -infinity) is automatic from the sparse
    representation.
    """

    __slots__ = ("group", "order", "coeffs", "prec")

    def __init__(self, group, order, coeffs=None, prec=None, _clean=False):
        if order < 0:
            raise TruncationMismatch("truncation order must be >= 0")
        self.group = group
        self.order = order
        self.prec = order if prec is None else min(prec, order)
        if coeffs is None:
            self.coeffs = {}
        elif _clean:
            self.coeffs = coeffs
        else:
            self.coeffs = {
                e: c for e, c in coeffs.items() if c and e <= self.prec
            }

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, group, order):
        return cls(group, order, {}, _clean=True)

    @classmethod
    def one(cls, group, order):
        return cls(group, order, {0: AlgebraElement.one(group)}, _clean=True)

    @classmethod
    def t_power(cls, group, order, k, coeff=1):
        a = AlgebraElement.one(group).scale(coeff)
        if not a or k > order:
            return cls.zero(group, order)
        return cls(group, order, {k: a}, _clean=True)

    @classmethod
    def monomial(cls, group, order, exp, algebra_elem):
        if not algebra_elem or exp > order:
            return cls.zero(group, order)
        return cls(group, order, {exp: algebra_elem}, _clean=True)

    @classmethod
    def from_element(cls, g: GroupElement, order, coeff=1):
        """Embed the group element t^n * h as the monomial t^n * (q h)."""
        a = AlgebraElement.monomial(g.group, g.h, coeff)
        return cls.monomial(g.group, order, g.n, a)

    @classmethod
    def from_group_sum(cls, group, order, terms):
        """Embed a finite formal sum {GroupElement: rational} of QG."""
        out = cls.zero(group, order)
        for g, q in terms.items():
            out = out + cls.from_element(g, order, q)
        return out

    @classmethod
    def constant(cls, a: AlgebraElement, order):
        return cls.monomial(a.group, order, 0, a)

    # -- structure --------------------------------------------------------

    def _check(self, other):
        if other.group is not self.group:
            raise TruncationMismatch("series over different groups")
        if other.order != self.order:
            raise TruncationMismatch(
                "truncation orders differ (%d vs %d)" % (self.order, other.order)
            )

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return (
            self.group is other.group
            and self.order == other.order
            and self.coeffs == other.coeffs
        )

    def __hash__(self):  # pragma: no cover
        return hash((self.order, frozenset(self.coeffs)))

    def valuation(self):
        """Least exponent with a nonzero coefficient; +inf for zero."""
        return min(self.coeffs) if self.coeffs else INF

    @property
    def trusted_zero(self):
        """No stored terms and full precision: an exact zero mod t^(order+1)."""
        return not self.coeffs and self.prec >= self.order

    def _known_valuation(self):
        # lower bound used in precision bookkeeping: a series with no
        # stored terms is only known to vanish through its precision
        return min(self.coeffs) if self.coeffs else self.prec + 1

    def coefficient(self, exp):
        c = self.coeffs.get(exp)
        return c if c is not None else AlgebraElement.zero(self.group)

    @property
    def low(self):
        return min(self.coeffs) if self.coeffs else 0

    def is_witt(self):
        """Whether the series has the shape 1 + a1 t + a2 t^2 + ...."""
        if self.coeffs and min(self.coeffs) < 0:
            return False
        return self.coefficient(0) == AlgebraElement.one(self.group)

    # -- ring operations ----------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        self._check(other)
        prec = min(self.prec, other.prec)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            s = out.get(e)
            s = c if s is None else s + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        if prec < self.order:
            out = {e: c for e, c in out.items() if e <= prec}
        return TruncatedSeries(self.group, self.order, out, prec=prec, _clean=True)

    def __neg__(self):
        return TruncatedSeries(
            self.group,
            self.order,
            {e: -c for e, c in self.coeffs.items()},
            prec=self.prec,
            _clean=True,
        )

    def __sub__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self + (-other)

    def scale(self, q):
        q = _as_fraction(q)
        if not q:
            return TruncatedSeries(self.group, self.order, {}, prec=self.prec, _clean=True)
        return TruncatedSeries(
            self.group,
            self.order,
            {e: c.scale(q) for e, c in self.coeffs.items()},
            prec=self.prec,
            _clean=True,
        )

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        self._check(other)
        prec = min(
            self.order,
            self.prec + other._known_valuation(),
            other.prec + self._known_valuation(),
        )
        out = {}
        rho_id = self.group.rho_is_identity
        for j, b in other.coeffs.items():
            for i, a in self.coeffs.items():
                e = i + j
                if e > prec:
                    continue
                ab = (a if rho_id else a.rho_pow(j)) * b
                if not ab:
                    continue
                s = out.get(e)
                s = ab if s is None else s + ab
                if s:
                    out[e] = s
                else:
                    del out[e]
        return TruncatedSeries(self.group, self.order, out, prec=prec, _clean=True)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only nonnegative integer powers")
        out = TruncatedSeries.one(self.group, self.order)
        for _ in range(k):
            out = out * self
        return out

    def shift_left(self, k):
        """Multiply by t^k on the left: exponents move, coefficients do not."""
        prec = min(self.prec + k, self.order)
        out = {
            e + k: c for e, c in self.coeffs.items() if e + k <= prec
        }
        return TruncatedSeries(self.group, self.order, out, prec=prec, _clean=True)

    def rho_pow(self, power):
        """Apply rho^power to every coefficient (exponents unchanged)."""
        if power == 0 or self.group.rho_is_identity:
            return self
        return TruncatedSeries(
            self.group,
            self.order,
            {e: c.rho_pow(power) for e, c in self.coeffs.items()},
            prec=self.prec,
            _clean=True,
        )

    def lifted(self, order):
        """Reinterpret at a higher truncation order, treating the stored
        coefficients as exact.  Only meaningful for series whose tail is
        known to vanish (finite inputs); internal use."""
        if order < self.order:
            raise TruncationMismatch("lifted() cannot lower the order")
        return TruncatedSeries(self.group, order, dict(self.coeffs), _clean=True)

    def truncated(self, order):
        """Drop coefficients above a smaller order."""
        if order > self.order:
            raise TruncationMismatch("truncated() cannot raise the order")
        return TruncatedSeries(
            self.group,
            order,
            {e: c for e, c in self.coeffs.items() if e <= order},
            prec=min(self.prec, order),
            _clean=True,
        )

    # -- inversion ------------------------------------------------------------

    def unit_invert(self):
        """Two-sided inverse modulo t^(order+1).

        Requires the leading coefficient to be invertible in A: factor
        x = t^v * c with c(0) a unit, invert the unit, and expand the
        remaining Witt part as a geometric series.
        """
        if not self.coeffs:
            raise NonUnitLeading("zero series has no leading coefficient")
        v = min(self.coeffs)
        c = self.shift_left(-v)
        a = c.coefficient(0)
        ainv = a.inverse()  # NonUnitLeading propagates
        u = TruncatedSeries.constant(ainv, self.order) * c  # Witt: u = a^-1 c
        m = TruncatedSeries.one(self.group, self.order) - u
        inv_u = TruncatedSeries.one(self.group, self.order)
        if not m.trusted_zero:
            for _ in range(self.order):
                inv_u = TruncatedSeries.one(self.group, self.order) + m * inv_u
        cinv = inv_u * TruncatedSeries.constant(ainv, self.order)
        return cinv * TruncatedSeries.t_power(self.group, self.order, -v)

    # -- display ----------------------------------------------------------------

    def __repr__(self):
        if not self.coeffs:
            return "O(t^%d)" % (self.order + 1)
        bits = []
        for e in sorted(self.coeffs):
            bits.append("t^%d*(%r)" % (e, self.coeffs[e]))
        return " + ".join(bits) + " + O(t^%d)" % (self.order + 1)
