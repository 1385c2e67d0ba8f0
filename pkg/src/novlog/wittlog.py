"""Logarithms of Witt vectors and the conjugacy-class projection.

A Witt vector is a series 1 + a1 t + a2 t^2 + ... in the twisted power
series ring P = A_rho[[t]]; under multiplication they form a group W.
The composition

    W --log--> P --project--> (product over k of Q-spans of classes)

is a group homomorphism because log(uv) - log(u) - log(v) is a sum of
commutators in each degree (the Baker-Campbell-Hausdorff correction
terms), and the class projection kills commutators degreewise.

The projection sends the degree-k coefficient sum_h q_h t^k h to
sum_h q_h {t^k h}, where {g} is the conjugacy class of g; its kernel in
degree k is exactly the span of differences g - u g u^-1.  This is what
makes the projected logarithm insensitive to the twist rho and turns
multiplicative questions about units into linear algebra over the
classes.

``commutator_factorize`` is the constructive converse: a Witt vector
whose projected logarithm vanishes is expanded, degree by degree, into
an explicit product of group commutators of units, leaving a residual
of arbitrarily high valuation.  Degree-n obstructions are sums of
elementary differences q (g - u g u^-1), and each difference is realised
by one commutator using either

    x (1 + yx) x^-1 (1 + yx)^-1        (x a unit of A), or
    (1 - x)(1 - y)(1 - x)^-1 (1 - y)^-1  (x, y of positive valuation),

both of which are congruent to 1 + (xy - yx) below degree 2n.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import (
    NotInKernel,
    PositiveValuationRequired,
    TruncationMismatch,
    UnsupportedGroup,
)
from .series import AlgebraElement, TruncatedSeries

__all__ = [
    "ClassSeries",
    "series_log",
    "series_exp",
    "project_to_classes",
    "witt_log",
    "bch_defect",
    "commutator_factorize",
    "commutator_product",
]

Q = Fraction


class ClassSeries:
    """Degreewise rational combination of conjugacy classes.

    The degree-k component is supported on classes at grading level -k;
    degree 0 is kept for uniformity (it receives the classes of constant
    coefficients).
    """

    __slots__ = ("group", "order", "coeffs")

    def __init__(self, group, order, coeffs=None, _clean=False):
        self.group = group
        self.order = order
        if coeffs is None:
            self.coeffs = {}
        elif _clean:
            self.coeffs = coeffs
        else:
            cleaned = {}
            for k, classes in coeffs.items():
                if k > order:
                    continue
                row = {c: Fraction(q) for c, q in classes.items() if q}
                if row:
                    cleaned[k] = row
            self.coeffs = cleaned

    @classmethod
    def zero(cls, group, order):
        return cls(group, order, {}, _clean=True)

    def _check(self, other):
        if other.group is not self.group or other.order != self.order:
            raise TruncationMismatch("class series are not compatible")

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, ClassSeries):
            return NotImplemented
        return (
            self.group is other.group
            and self.order == other.order
            and self.coeffs == other.coeffs
        )

    def __hash__(self):  # pragma: no cover
        return hash((self.order, len(self.coeffs)))

    def __add__(self, other):
        if not isinstance(other, ClassSeries):
            return NotImplemented
        self._check(other)
        out = {k: dict(row) for k, row in self.coeffs.items()}
        for k, row in other.coeffs.items():
            tgt = out.setdefault(k, {})
            for c, q in row.items():
                s = tgt.get(c, 0) + q
                if s:
                    tgt[c] = s
                else:
                    tgt.pop(c, None)
            if not tgt:
                del out[k]
        return ClassSeries(self.group, self.order, out, _clean=True)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        if not isinstance(other, ClassSeries):
            return NotImplemented
        return self + (-other)

    def scale(self, q):
        q = Fraction(q)
        if not q:
            return ClassSeries.zero(self.group, self.order)
        out = {
            k: {c: v * q for c, v in row.items()} for k, row in self.coeffs.items()
        }
        return ClassSeries(self.group, self.order, out, _clean=True)

    def degree(self, k):
        return dict(self.coeffs.get(k, {}))

    def truncated(self, order):
        if order > self.order:
            raise TruncationMismatch("cannot raise the order of a class series")
        out = {k: dict(row) for k, row in self.coeffs.items() if k <= order}
        return ClassSeries(self.group, order, out, _clean=True)

    def __repr__(self):
        if not self.coeffs:
            return "0"
        bits = []
        for k in sorted(self.coeffs):
            row = self.coeffs[k]
            for c in sorted(row, key=lambda c: c.sort_key()):
                bits.append("%s*{%s}" % (row[c], c.name))
        return " + ".join(bits)


def project_to_classes(p: TruncatedSeries) -> ClassSeries:
    """Project a power-series element onto conjugacy classes, degreewise.

    The degree-k coefficient sum q_h h is sent to sum q_h {t^k h}.
    Requires low >= 0; the group must support class computation.
    """
    if p.coeffs and min(p.coeffs) < 0:
        raise PositiveValuationRequired("projection needs a power series (low >= 0)")
    group = p.group
    out = {}
    for k, a in p.coeffs.items():
        row = {}
        for h, q in a.items():
            cls = group.conj_class(group.element(k, h))
            s = row.get(cls, 0) + q
            if s:
                row[cls] = s
            else:
                del row[cls]
        if row:
            out[k] = row
    return ClassSeries(group, p.order, out, _clean=True)


def series_log(w: TruncatedSeries) -> TruncatedSeries:
    """log(1 + mu) = mu - mu^2/2 + mu^3/3 - ... for a Witt vector."""
    if not w.is_witt():
        raise PositiveValuationRequired("logarithm needs a Witt vector (1 + O(t))")
    one = TruncatedSeries.one(w.group, w.order)
    mu = w - one
    acc = TruncatedSeries.zero(w.group, w.order)
    power = mu
    for k in range(1, w.order + 1):
        acc = acc + power.scale(Q((-1) ** (k - 1), k))
        if k < w.order:
            power = power * mu
    return acc


def series_exp(y: TruncatedSeries) -> TruncatedSeries:
    """exp(y) = 1 + y + y^2/2 + ... for a series of positive valuation."""
    if y.valuation() < 1:
        raise PositiveValuationRequired("exponential needs valuation >= 1")
    acc = TruncatedSeries.one(y.group, y.order)
    term = acc
    for k in range(1, y.order + 1):
        term = (term * y).scale(Q(1, k))
        acc = acc + term
    return acc


def witt_log(w: TruncatedSeries) -> ClassSeries:
    """The class-projected logarithm; a homomorphism on Witt vectors."""
    return project_to_classes(series_log(w))


def bch_defect(x: TruncatedSeries, y: TruncatedSeries) -> TruncatedSeries:
    """log(e^x e^y) - x - y; its class projection vanishes."""
    if x.valuation() < 1 or y.valuation() < 1:
        raise PositiveValuationRequired("defect needs both valuations >= 1")
    x._check(y)
    return series_log(series_exp(x) * series_exp(y)) - x - y


# ---------------------------------------------------------------------------
# commutator factorization
# ---------------------------------------------------------------------------


def commutator_product(pairs, group, order):
    """Product of group commutators x y x^-1 y^-1 over the given pairs."""
    out = TruncatedSeries.one(group, order)
    for x, y in pairs:
        out = out * _group_commutator(x, y)
    return out


def _group_commutator(x, y):
    return x * y * x.unit_invert() * y.unit_invert()


def commutator_factorize(alpha: TruncatedSeries):
    """Write a Witt vector with vanishing class logarithm as a product
    of commutators of units, up to the truncation order.

    Returns a list of pairs (x_i, y_i) of invertible series such that

        1 - alpha * prod_i [x_i, y_i]

    has valuation > order.  Raises NotInKernel when the class logarithm
    of ``alpha`` is nonzero, and UnsupportedGroup when the kernel is not
    finite (class orbits must be enumerable).
    """
    group, order = alpha.group, alpha.order
    if not alpha.is_witt():
        raise PositiveValuationRequired("factorization needs a Witt vector")
    if not group.is_finite_kernel:
        raise UnsupportedGroup("commutator factorization needs a finite kernel")
    if witt_log(alpha):
        raise NotInKernel("class logarithm is nonzero")

    one = TruncatedSeries.one(group, order)
    pairs = []
    current = alpha
    while True:
        rem = current - one
        if not rem:
            break
        n = min(rem.coeffs)
        c = rem.coefficient(n)
        stage = _stage_pairs(group, order, n, -c)
        for x, y in stage:
            pairs.append((x, y))
            current = current * _group_commutator(x, y)
        if (current - one) and min((current - one).coeffs) <= n:
            raise AssertionError("factorization stage failed to raise valuation")
    return pairs


def _stage_pairs(group, order, n, z):
    """Commutator pairs whose product is 1 + t^n z + O(t^(n+1)).

    ``z`` must lie in the span of differences h - (conjugate of h) at
    level -n; it is telescoped along BFS paths to class representatives
    and each elementary difference is realised by a single commutator.
    """
    moves = []  # (u, move, weight): weight * t^n * (move(u) - u)
    path_cache = {}
    leftover = {}
    for h, q in sorted(z.items()):
        rep = group.conj_class(group.element(n, h)).rep.h
        if rep not in path_cache:
            path_cache[rep] = group.orbit_paths(n, rep)
        paths = path_cache[rep]
        leftover[rep] = leftover.get(rep, 0) + q
        # walk h back to the representative, collecting forward moves
        steps = []
        x = h
        while paths[x] is not None:
            parent, move = paths[x]
            steps.append((parent, move))
            x = parent
        # h - rep = sum over steps of (move(u) - u), applied from rep up
        for u, move in reversed(steps):
            moves.append((u, move, q))
    for rep, total in leftover.items():
        if total:
            raise AssertionError("degree-%d obstruction is not in the kernel" % n)

    pairs = []
    for u, move, w in moves:
        pairs.extend(_difference_pairs(group, order, n, u, move, w))
    return pairs


def _difference_pairs(group, order, n, u, move, w):
    """Commutator pair(s) realising w * t^n * (move(u) - u)."""
    one = TruncatedSeries.one(group, order)
    kind = move[0]
    if kind == "conj":
        # w t^n (rho^n(k) u k^-1 - u) = [k, w t^n u k^-1]
        k = move[1]
        x = TruncatedSeries.constant(AlgebraElement.monomial(group, k), order)
        b = AlgebraElement.monomial(group, group.h_mul(u, group.h_inv(k)), w)
        y = TruncatedSeries.monomial(group, order, n, b)
        return [(x, one + y * x)]
    # rho moves: w t^n (rho(u) - u) with sign folded into the weight
    eps = move[1]
    if eps == -1:
        u = group.h_rho(u, -1)
        w = -w
    if n == 1:
        # [w u, t] has degree-1 part w t (rho(u) - u)
        x = TruncatedSeries.constant(AlgebraElement.monomial(group, u, w), order)
        y = TruncatedSeries.t_power(group, order, 1)
        return [(x, one + y * x)]
    # n >= 2: [t, -w t^(n-1) u] via the positive-valuation commutator
    x = TruncatedSeries.t_power(group, order, 1)
    y = TruncatedSeries.monomial(
        group, order, n - 1, AlgebraElement.monomial(group, u, -w)
    )
    return [(one - x, one - y)]
