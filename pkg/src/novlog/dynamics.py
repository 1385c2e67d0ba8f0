"""Closed-orbit counting on labeled digraph models.

A model assigns to each degree s a signed multigraph whose edges carry
group labels at grading level -1 (normal form t * h).  The matrix of
the model in degree s has (q, p) entry equal to the signed sum of
labels of edges p -> q, so powers of the matrix are weighted counts of
walks and the trace of the k-th power is the weighted count of closed
walks of length k, with labels multiplied against the walk direction
(right-module convention).

The eta series of the model is computed two independent ways:

* ``eta_from_traces``: per degree, the series sum_k trace(tau^k) t^k / k
  projected to conjugacy classes and weighted by (-1)^s; this is the
  negative of the class logarithm of 1 - tau.
* ``eta_direct``: explicit enumeration of closed walks up to rotation.
  Each orbit of length k with primitive period l contributes its sign
  product divided by m = k / l at the class of its label product, again
  weighted by (-1)^s.  Orbits are enumerated once each by keeping only
  the lexicographically minimal rotation of the edge sequence.

Equality of the two is the trace/orbit identity the rest of the
package's cross-checks hinge on.  The module also carries the scalar
zeta series: determinant form, exponential of weighted fixed-point
counts, and the exponential of the eta series over abelian groups, plus
``main_theorem_check`` which compares torsion, matrix logarithms and
orbit counts on one instance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    BadLabelLevel,
    NonAbelianGroup,
    PositiveValuationRequired,
    TruncationMismatch,
    ValidationError,
)
from .groups import GroupElement
from .k1 import SeriesMatrix, laurent_class_log
from .series import AlgebraElement, TruncatedSeries
from .torsion import BasedComplex, torsion
from .wittlog import ClassSeries, project_to_classes

__all__ = [
    "ModelEdge",
    "DegreeModel",
    "LabeledOrbitModel",
    "TauMatrix",
    "build_tau",
    "power_trace",
    "eta_from_traces",
    "eta_direct",
    "ZetaSeries",
    "zeta_det",
    "zeta_from_counts",
    "abelian_zeta",
    "MainTheoremReport",
    "main_theorem_check",
]

Q = Fraction


@dataclass(frozen=True)
class ModelEdge:
    """Directed edge with a sign and a level -1 group label."""

    src: int
    dst: int
    sign: int
    label: GroupElement


@dataclass
class DegreeModel:
    """Signed labeled multigraph for a single degree."""

    degree: int
    nodes: list
    edges: list = field(default_factory=list)

    def validate(self, group):
        names = set()
        for name in self.nodes:
            if name in names:
                raise ValidationError("duplicate node %r" % (name,))
            names.add(name)
        for i, e in enumerate(self.edges):
            if not 0 <= e.src < len(self.nodes) or not 0 <= e.dst < len(self.nodes):
                raise ValidationError("edge %d endpoint out of range" % i)
            if e.sign not in (1, -1):
                raise ValidationError("edge %d sign must be +1 or -1" % i)
            if e.label.group is not group:
                raise ValidationError("edge %d label from wrong group" % i)
            if e.label.n != 1:
                raise BadLabelLevel(
                    "edge %d label sits at level %d, not -1" % (i, -e.label.n)
                )


class LabeledOrbitModel:
    """Collection of degree models over one group."""

    def __init__(self, group, parts):
        self.group = group
        self.parts = {}
        for part in parts:
            if part.degree in self.parts:
                raise ValidationError("duplicate degree %d in model" % part.degree)
            part.validate(group)
            self.parts[part.degree] = part

    def degrees(self):
        return sorted(self.parts)

    def tau_matrices(self):
        return [build_tau(self, s) for s in self.degrees()]


@dataclass
class TauMatrix:
    """Square matrix with entries in the level -1 slice of the group ring.

    ``entries[q][p]`` is the kernel part (implicit factor t) of the signed
    label sum over edges p -> q.
    """

    group: object
    degree: int
    entries: list

    @property
    def size(self):
        return len(self.entries)

    @classmethod
    def from_integer_matrix(cls, group, degree, rows):
        """Integer matrix M -> tau with entries M[q][p] * (t * identity)."""
        one = group.h_identity()
        entries = [
            [AlgebraElement.monomial(group, one, v) for v in row] for row in rows
        ]
        return cls(group, degree, entries)

    def as_series_matrix(self, order):
        """Embed with the implicit t: entries t * a at exponent 1."""
        return SeriesMatrix(
            self.group,
            order,
            [
                [TruncatedSeries.monomial(self.group, order, 1, a) for a in row]
                for row in self.entries
            ],
        )


def build_tau(model: LabeledOrbitModel, degree) -> TauMatrix:
    """Matrix of the degree-s part of the model."""
    part = model.parts.get(degree)
    if part is None:
        raise ValidationError("model has no degree %d part" % degree)
    group = model.group
    n = len(part.nodes)
    zero = AlgebraElement.zero(group)
    entries = [[zero] * n for _ in range(n)]
    for e in part.edges:
        mono = AlgebraElement.monomial(group, e.label.h, e.sign)
        entries[e.dst][e.src] = entries[e.dst][e.src] + mono
    return TauMatrix(group, part.degree, entries)


def power_trace(tau: TauMatrix, k) -> AlgebraElement:
    """Kernel part of trace(tau^k); the group support is at level -k."""
    if k < 1:
        raise ValidationError("power must be >= 1")
    power = tau.entries
    for _ in range(k - 1):
        power = _tau_step(tau, power)
    return _trace(tau.group, power)


def _tau_step(tau: TauMatrix, power):
    """One more factor of tau on the right: entries rho(x) * tau_entry."""
    g = tau.group
    n = tau.size
    zero = AlgebraElement.zero(g)
    out = [[zero] * n for _ in range(n)]
    for q in range(n):
        for r in range(n):
            x = power[q][r]
            if not x:
                continue
            rx = x.rho_pow(1)
            for p in range(n):
                y = tau.entries[r][p]
                if y:
                    out[q][p] = out[q][p] + rx * y
    return out


def _trace(group, entries):
    acc = AlgebraElement.zero(group)
    for i in range(len(entries)):
        acc = acc + entries[i][i]
    return acc


def eta_from_traces(taus, order) -> ClassSeries:
    """Orbit-counting series from matrix traces.

    For each degree s the lift sum_k trace(tau_s^k) t^k / k is projected
    to classes and weighted by (-1)^s; this equals the negative of the
    class logarithm of 1 - tau_s, degree by degree.
    """
    if not taus:
        raise ValidationError("need at least one matrix")
    group = taus[0].group
    out = ClassSeries.zero(group, order)
    for tau in taus:
        if tau.group is not group:
            raise TruncationMismatch("matrices over different groups")
        lift = TruncatedSeries.zero(group, order)
        power = tau.entries
        for k in range(1, order + 1):
            tr = _trace(group, power)
            if tr:
                lift = lift + TruncatedSeries.monomial(group, order, k, tr.scale(Q(1, k)))
            if k < order:
                power = _tau_step(tau, power)
        sign = -1 if tau.degree % 2 else 1
        out = out + project_to_classes(lift).scale(sign)
    return out


def eta_direct(model: LabeledOrbitModel, order) -> ClassSeries:
    """Orbit-counting series by closed-walk enumeration.

    Walks are enumerated up to rotation (one representative per cyclic
    edge sequence); a length-k orbit with primitive period l and sign
    product eps contributes eps * l / k at the class of its label
    product, weighted (-1)^s per degree.
    """
    group = model.group
    out = ClassSeries.zero(group, order)
    for s in model.degrees():
        part = model.parts[s]
        contrib = _enumerate_orbits(group, part, order)
        sign = -1 if s % 2 else 1
        out = out + contrib.scale(sign)
    return out


def _enumerate_orbits(group, part: DegreeModel, order) -> ClassSeries:
    nodes = len(part.nodes)
    edges = part.edges
    if not edges or order < 1:
        return ClassSeries.zero(group, order)
    adj = [[] for _ in range(nodes)]
    for idx, e in enumerate(edges):
        adj[e.src].append(idx)
    dist = _all_pairs_distance(nodes, edges)
    acc = {}

    def record(seq, sign, g):
        k = len(seq)
        if not _is_minimal_rotation(seq):
            return
        period = _primitive_period(seq)
        mult = k // period
        cls = group.conj_class(g)
        row = acc.setdefault(k, {})
        q = row.get(cls, 0) + Q(sign, mult)
        if q:
            row[cls] = q
        else:
            del row[cls]

    for first in range(len(edges)):
        e0 = edges[first]
        start = e0.src
        # iterative DFS over edge sequences with all indices >= first
        # (a necessary condition for being the minimal rotation)
        stack = [(e0.dst, [first], e0.sign, e0.label)]
        while stack:
            node, seq, sign, g = stack.pop()
            if node == start:
                record(seq, sign, g)
            if len(seq) >= order:
                continue
            budget = order - len(seq) - 1
            for idx in adj[node]:
                if idx < first:
                    continue
                e = edges[idx]
                if e.dst != start and dist[e.dst][start] > budget:
                    continue
                stack.append((e.dst, seq + [idx], sign * e.sign, e.label * g))
    out = {}
    for k, row in acc.items():
        if row:
            out[k] = row
    return ClassSeries(group, order, out, _clean=True)


def _all_pairs_distance(nodes, edges):
    """Shortest directed path lengths (0 on the diagonal), for pruning."""
    big = float("inf")
    adj = [set() for _ in range(nodes)]
    for e in edges:
        adj[e.src].add(e.dst)
    dist = [[big] * nodes for _ in range(nodes)]
    for s in range(nodes):
        dist[s][s] = 0
        frontier = [s]
        d = 0
        while frontier:
            d += 1
            nxt = []
            for u in frontier:
                for v in adj[u]:
                    if dist[s][v] > d:
                        dist[s][v] = d
                        nxt.append(v)
            frontier = nxt
    return dist


def _is_minimal_rotation(seq):
    k = len(seq)
    t = tuple(seq)
    return all(t <= t[d:] + t[:d] for d in range(1, k))


def _primitive_period(seq):
    k = len(seq)
    for d in range(1, k + 1):
        if k % d:
            continue
        if all(seq[i] == seq[(i + d) % k] for i in range(k)):
            return d
    return k


# ---------------------------------------------------------------------------
# scalar zeta series
# ---------------------------------------------------------------------------


class ZetaSeries:
    """Commutative truncated rational power series with constant term 1."""

    __slots__ = ("order", "coeffs")

    def __init__(self, order, coeffs):
        self.order = order
        cs = [Q(c) for c in coeffs[: order + 1]]
        cs += [Q(0)] * (order + 1 - len(cs))
        self.coeffs = cs
        if self.coeffs[0] != 1:
            raise ValidationError("zeta series must have constant term 1")

    @classmethod
    def one(cls, order):
        return cls(order, [Q(1)])

    @classmethod
    def from_log(cls, order, log_coeffs):
        """exp of sum_k c_k t^k (c_0 must be 0), by the usual recurrence."""
        g = [Q(0)] * (order + 1)
        for k, c in enumerate(log_coeffs[: order + 1]):
            g[k] = Q(c)
        if g[0]:
            raise PositiveValuationRequired("exponential needs zero constant term")
        f = [Q(0)] * (order + 1)
        f[0] = Q(1)
        for k in range(1, order + 1):
            s = Q(0)
            for j in range(1, k + 1):
                if g[j]:
                    s += j * g[j] * f[k - j]
            f[k] = s / k
        return cls(order, f)

    def __eq__(self, other):
        if not isinstance(other, ZetaSeries):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __mul__(self, other):
        if not isinstance(other, ZetaSeries):
            return NotImplemented
        if other.order != self.order:
            raise TruncationMismatch("zeta series orders differ")
        return ZetaSeries(self.order, _poly_mul(self.coeffs, other.coeffs, self.order))

    def inverse(self):
        inv = [Q(0)] * (self.order + 1)
        inv[0] = Q(1)
        for k in range(1, self.order + 1):
            s = Q(0)
            for j in range(1, k + 1):
                s += self.coeffs[j] * inv[k - j]
            inv[k] = -s
        return ZetaSeries(self.order, inv)

    def __repr__(self):
        return "ZetaSeries(%s)" % ", ".join(str(c) for c in self.coeffs)


def _poly_mul(a, b, order):
    out = [Q(0)] * (order + 1)
    for i, x in enumerate(a):
        if not x or i > order:
            continue
        for j, y in enumerate(b):
            if i + j > order:
                break
            if y:
                out[i + j] += x * y
    return out


def _char_poly_coeffs(rows, order):
    """Coefficients of det(I - t M) for an integer matrix M."""
    n = len(rows)
    if n == 0:
        return [Q(1)]
    memo = {}

    def go(rset, cset):
        # entries are delta_ij - M_ij t: degree <= 1 polynomials
        if not rset:
            return [Q(1)]
        key = (rset, cset)
        got = memo.get(key)
        if got is not None:
            return got
        r = rset[0]
        acc = [Q(0)] * (order + 1)
        for pos, c in enumerate(cset):
            const = Q(1) if r == c else Q(0)
            lin = Q(-rows[r][c])
            if not const and not lin:
                continue
            sub = go(rset[1:], cset[:pos] + cset[pos + 1 :])
            term = _poly_mul([const, lin], sub, order)
            if pos % 2:
                term = [-x for x in term]
            acc = [x + y for x, y in zip(acc, term)]
        memo[key] = acc
        return acc

    return go(tuple(range(n)), tuple(range(n)))


def zeta_det(blocks, order) -> ZetaSeries:
    """Alternating determinant product prod_i det(I - t f_i)^((-1)^(i+1)).

    ``blocks`` is a list of (degree, integer matrix) pairs with distinct
    degrees; missing degrees contribute nothing.
    """
    seen = set()
    num = ZetaSeries.one(order)
    den = ZetaSeries.one(order)
    for degree, rows in blocks:
        if degree in seen:
            raise ValidationError("duplicate homology degree %d" % degree)
        seen.add(degree)
        if any(len(r) != len(rows) for r in rows):
            raise ValidationError("homology matrix at degree %d is not square" % degree)
        p = ZetaSeries(order, _char_poly_coeffs(rows, order))
        if degree % 2:
            num = num * p
        else:
            den = den * p
    return num * den.inverse()


def zeta_from_counts(counts, order) -> ZetaSeries:
    """exp(sum_k L_k t^k / k) from weighted fixed point counts L_1, L_2, ..."""
    if len(counts) < order:
        raise ValidationError(
            "need %d weighted counts for truncation %d" % (order, order)
        )
    logs = [Q(0)] * (order + 1)
    for k in range(1, order + 1):
        logs[k] = Q(counts[k - 1], k)
    return ZetaSeries.from_log(order, logs)


def abelian_zeta(eta: ClassSeries) -> ZetaSeries:
    """Exponential of the orbit series over an abelian group.

    Classes are singletons; they are collapsed along the grading to a
    scalar series (the kernel direction is summed out) and exponentiated.
    """
    if not eta.group.is_abelian:
        raise NonAbelianGroup("exponential of the orbit series needs an abelian group")
    logs = [Q(0)] * (eta.order + 1)
    for k, row in eta.coeffs.items():
        logs[k] = sum(row.values(), Q(0))
    if logs[0]:
        raise PositiveValuationRequired("orbit series has a constant term")
    return ZetaSeries.from_log(eta.order, logs)


# ---------------------------------------------------------------------------
# the main cross-check
# ---------------------------------------------------------------------------


@dataclass
class MainTheoremReport:
    """Three independently computed series and their comparison."""

    torsion_log: ClassSeries
    tau_log: ClassSeries
    minus_eta: ClassSeries
    verdict: bool


def main_theorem_check(model: LabeledOrbitModel, cplx: BasedComplex) -> MainTheoremReport:
    """Compare (a) the torsion invariant of the complex, (b) the
    alternating class logarithm of 1 - tau over the model's degrees, and
    (c) the negated direct orbit count; all three must agree."""
    if model.group is not cplx.group:
        raise TruncationMismatch("model and complex are over different groups")
    order = cplx.order
    torsion_log = torsion(cplx).invariant

    group = model.group
    tau_log = ClassSeries.zero(group, order)
    for tau in model.tau_matrices():
        mat = SeriesMatrix.identity(group, order, tau.size) - tau.as_series_matrix(order)
        sign = -1 if tau.degree % 2 else 1
        tau_log = tau_log + laurent_class_log(mat).scale(sign)

    minus_eta = -eta_direct(model, order)
    verdict = torsion_log == tau_log and tau_log == minus_eta
    return MainTheoremReport(torsion_log, tau_log, minus_eta, verdict)
