"""Shared builders for the test suite: groups, random data, complex surgery."""

import random
from fractions import Fraction as Q

from novlog import (
    AlgebraElement,
    BasedComplex,
    DegreeModel,
    LabeledOrbitModel,
    ModelEdge,
    SeriesMatrix,
    TruncatedSeries,
    TwistedGroup,
)

C3_TABLE = [[0, 1, 2], [1, 2, 0], [2, 0, 1]]


def integers():
    """G = Z (trivial kernel)."""
    return TwistedGroup.free_abelian(0)


def z3_twisted():
    """G = Z |x Z/3 with the twist acting by inversion."""
    return TwistedGroup.finite(["e", "a", "b"], C3_TABLE, rho=[0, 2, 1])


def z3_product():
    """G = Z x Z/3 (trivial twist)."""
    return TwistedGroup.finite(["e", "a", "b"], C3_TABLE)


def rand_rational(rng, num=3, den=3):
    return Q(rng.randint(-num, num), rng.randint(1, den))


def rand_algebra(rng, group, density=0.7):
    coeffs = {}
    for h in group.h_elements():
        if rng.random() < density:
            q = rand_rational(rng)
            if q:
                coeffs[h] = q
    return AlgebraElement(group, coeffs)


def rand_invertible_algebra(rng, group):
    while True:
        a = rand_algebra(rng, group)
        if a and a.is_invertible():
            return a


def rand_series(rng, group, order, lo, hi, density=0.5):
    """Random series supported in the exponent window [lo, hi]."""
    s = TruncatedSeries.zero(group, order)
    for e in range(lo, min(hi, order) + 1):
        if rng.random() < density:
            a = rand_algebra(rng, group)
            if a:
                s = s + TruncatedSeries.monomial(group, order, e, a)
    return s


def rand_positive(rng, group, order, hi=None):
    return rand_series(rng, group, order, 1, order if hi is None else hi)


def rand_witt(rng, group, order, hi=None):
    return TruncatedSeries.one(group, order) + rand_positive(rng, group, order, hi)


def rand_unit(rng, group, order, hi=None):
    """Invertible constant times a Witt vector."""
    c = TruncatedSeries.constant(rand_invertible_algebra(rng, group), order)
    return c * rand_witt(rng, group, order, hi)


def rand_commutator_product(rng, group, order, count, hi=None):
    """Product of ``count`` group commutators of random units."""
    out = TruncatedSeries.one(group, order)
    for _ in range(count):
        u = rand_unit(rng, group, order, hi)
        v = rand_unit(rng, group, order, hi)
        out = out * (u * v * u.unit_invert() * v.unit_invert())
    return out


def rand_unipotent(rng, group, order, n, hi=None):
    ident = SeriesMatrix.identity(group, order, n)
    rows = [
        [ident.rows[i][j] + rand_positive(rng, group, order, hi) for j in range(n)]
        for i in range(n)
    ]
    return SeriesMatrix(group, order, rows)


def rand_model(rng, group, max_nodes=5, max_edges=10, max_degree=3, out_cap=3):
    """Random labeled model with bounded out-degree (keeps walks tractable)."""
    nn = rng.randint(1, max_nodes)
    nodes = ["n%d" % i for i in range(nn)]
    hs = sorted(group.h_elements())
    edges = []
    out_deg = [0] * nn
    for _ in range(rng.randint(1, max_edges)):
        src = rng.randrange(nn)
        if out_deg[src] >= out_cap:
            continue
        out_deg[src] += 1
        edges.append(
            ModelEdge(
                src,
                rng.randrange(nn),
                rng.choice([1, -1]),
                group.element(1, rng.choice(hs)),
            )
        )
    degree = rng.randint(0, max_degree)
    return LabeledOrbitModel(group, [DegreeModel(degree, nodes, edges)])


# ---------------------------------------------------------------------------
# based-complex surgery (basis moves that must preserve the torsion class)
# ---------------------------------------------------------------------------


def two_term_complex(group, order, matrix, bottom=0):
    """0 -> R^n --matrix--> R^n -> 0 in degrees (bottom+1, bottom)."""
    ranks = [0] * bottom + [matrix.nrows, matrix.ncols]
    diffs = []
    for k in range(1, bottom + 2):
        if k == bottom + 1:
            diffs.append(matrix)
        else:
            diffs.append(SeriesMatrix.zeros(group, order, ranks[k - 1], ranks[k]))
    return BasedComplex(group, order, ranks, diffs)


def direct_sum(C1, C2):
    assert C1.group is C2.group and C1.order == C2.order
    group, order = C1.group, C1.order
    top = max(C1.top_degree, C2.top_degree)
    ranks = [C1.rank(k) + C2.rank(k) for k in range(top + 1)]
    diffs = []
    for k in range(1, top + 1):
        d1 = C1.diff(k)
        d2 = C2.diff(k)
        rows = []
        for i in range(d1.nrows):
            rows.append(list(d1.rows[i]) + [TruncatedSeries.zero(group, order)] * d2.ncols)
        for i in range(d2.nrows):
            rows.append([TruncatedSeries.zero(group, order)] * d1.ncols + list(d2.rows[i]))
        diffs.append(SeriesMatrix(group, order, rows, ncols=d1.ncols + d2.ncols))
    return BasedComplex(group, order, ranks, diffs)


def _copy_diffs(C):
    return [
        SeriesMatrix(C.group, C.order, [list(r) for r in d.rows], ncols=d.ncols)
        for d in C.diffs
    ]


def scale_basis(C, k, i, unit):
    """Rescale the i-th basis vector of C_k by a unit (right-module bases)."""
    diffs = _copy_diffs(C)
    uinv = unit.unit_invert()
    if 1 <= k <= len(diffs):
        d = diffs[k - 1]
        for r in range(d.nrows):
            d.rows[r][i] = d.rows[r][i] * unit
    if k + 1 <= len(diffs):
        d = diffs[k]
        d.rows[i] = [uinv * s for s in d.rows[i]]
    return BasedComplex(C.group, C.order, C.ranks, diffs)


def permute_basis(C, k, perm):
    """Reorder the basis of C_k by the given permutation."""
    diffs = _copy_diffs(C)
    if 1 <= k <= len(diffs):
        d = diffs[k - 1]
        for r in range(d.nrows):
            d.rows[r] = [d.rows[r][perm[j]] for j in range(len(perm))]
    if k + 1 <= len(diffs):
        d = diffs[k]
        d.rows = [d.rows[perm[j]] for j in range(len(perm))]
    return BasedComplex(C.group, C.order, C.ranks, diffs)


def elementary_change(C, k, i, j, lam):
    """Basis move e_j <- e_j + e_i * lam in C_k (i != j)."""
    assert i != j
    diffs = _copy_diffs(C)
    if 1 <= k <= len(diffs):
        d = diffs[k - 1]
        for r in range(d.nrows):
            d.rows[r][j] = d.rows[r][j] + d.rows[r][i] * lam
    if k + 1 <= len(diffs):
        d = diffs[k]
        d.rows[i] = [a - lam * b for a, b in zip(d.rows[i], d.rows[j])]
    return BasedComplex(C.group, C.order, C.ranks, diffs)


def simple_expansion(C, k):
    """Add a cancelling pair of generators in degrees k+1, k."""
    group, order = C.group, C.order
    top = max(C.top_degree, k + 1)
    ranks = [C.rank(d) + (1 if d in (k, k + 1) else 0) for d in range(top + 1)]
    diffs = []
    for d in range(1, top + 1):
        old = C.diff(d)
        rows = [list(r) for r in old.rows]
        zero = TruncatedSeries.zero(group, order)
        if d == k + 1:
            # both sides gain a generator; block sum with the 1x1 identity
            for r in rows:
                r.append(zero)
            rows.append([zero] * old.ncols + [TruncatedSeries.one(group, order)])
        elif d == k:
            # source gains a generator killed by d
            for r in rows:
                r.append(zero)
        elif d == k + 2:
            # target gains a generator that receives nothing
            rows.append([zero] * old.ncols)
        width = old.ncols + (1 if d in (k, k + 1) else 0)
        diffs.append(SeriesMatrix(group, order, rows, ncols=width))
    return BasedComplex(group, order, ranks, diffs)
