"""Split extensions of the integers with decidable conjugacy.

The groups handled here are G = <t> |x H: every element has a unique
normal form t^n * h with n an integer and h in the kernel H of the
grading homomorphism xi, normalised so that xi(t^n * h) = -n.  Scalars
move past t through a fixed automorphism rho of H,

    h * t = t * rho(h),

which is the only place twisting enters.  Two kernel models are
supported:

* a finite H given by an element list, a multiplication table on
  indices, and rho as an index permutation;
* a free abelian H of rank r with rho = id (elements are integer
  tuples).

Conjugation preserves the grading level, and on the h-part of an
element t^n * h it is generated by h -> rho^n(k) * h * k^-1 for k in H
together with h -> rho(h) and h -> rho^-1(h).  Conjugacy classes are
canonicalised by the least member under the fixed total order on normal
forms (t-exponent first, then the kernel key).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import TruncationMismatch, UnsupportedGroup, ValidationError

__all__ = [
    "TwistedGroup",
    "GroupElement",
    "ConjClass",
]


class _FiniteKernel:
    """Finite H: names, index multiplication table, rho permutation."""

    def __init__(self, elements, table, rho):
        n = len(elements)
        if n == 0:
            raise ValidationError("kernel needs at least one element")
        if len(set(elements)) != n:
            raise ValidationError("duplicate kernel element names")
        if len(table) != n or any(len(row) != n for row in table):
            raise ValidationError("multiplication table must be %d x %d" % (n, n))
        for row in table:
            for v in row:
                if not isinstance(v, int) or not 0 <= v < n:
                    raise ValidationError("table entry %r out of range" % (v,))
        if sorted(rho) != list(range(n)):
            raise ValidationError("rho must be a permutation of 0..%d" % (n - 1))
        self.elements = list(elements)
        self.table = [list(row) for row in table]
        self.rho_perm = list(rho)
        self.size = n
        self.identity = self._find_identity()
        self.inverse_table = self._find_inverses()
        self._check_associative()
        self._check_rho_automorphism()
        self.rho_inv_perm = [0] * n
        for i, j in enumerate(self.rho_perm):
            self.rho_inv_perm[j] = i
        self._rho_powers = {0: list(range(n)), 1: self.rho_perm, -1: self.rho_inv_perm}

    def _find_identity(self):
        for e in range(self.size):
            if all(self.table[e][x] == x == self.table[x][e] for x in range(self.size)):
                return e
        raise ValidationError("multiplication table has no identity")

    def _find_inverses(self):
        inv = [None] * self.size
        for a in range(self.size):
            for b in range(self.size):
                if self.table[a][b] == self.identity == self.table[b][a]:
                    inv[a] = b
                    break
            if inv[a] is None:
                raise ValidationError("element %r has no inverse" % self.elements[a])
        return inv

    def _check_associative(self):
        t = self.table
        rng = range(self.size)
        for a in rng:
            for b in rng:
                tab = t[a][b]
                for c in rng:
                    if t[tab][c] != t[a][t[b][c]]:
                        raise ValidationError(
                            "multiplication table is not associative at (%d,%d,%d)" % (a, b, c)
                        )

    def _check_rho_automorphism(self):
        t, r = self.table, self.rho_perm
        rng = range(self.size)
        for a in rng:
            for b in rng:
                if r[t[a][b]] != t[r[a]][r[b]]:
                    raise ValidationError("rho is not multiplicative at (%d,%d)" % (a, b))

    def rho_power(self, power):
        p = self._rho_powers.get(power)
        if p is None:
            base = self.rho_perm if power > 0 else self.rho_inv_perm
            p = list(range(self.size))
            for _ in range(abs(power)):
                p = [base[i] for i in p]
            self._rho_powers[power] = p
        return p


class _FreeAbelianKernel:
    """Free abelian H of a given rank; elements are integer tuples."""

    def __init__(self, rank):
        if rank < 0:
            raise ValidationError("rank must be nonnegative")
        self.rank = rank
        self.identity = (0,) * rank


class TwistedGroup:
    """The group G = <t> |x H with its grading and conjugacy structure."""

    def __init__(self, kernel):
        self._kernel = kernel
        self._class_cache = {}

    # -- constructors ------------------------------------------------

    @classmethod
    def finite(cls, elements, table, rho=None):
        """Group with finite kernel; ``rho`` defaults to the identity."""
        if rho is None:
            rho = list(range(len(elements)))
        return cls(_FiniteKernel(elements, table, rho))

    @classmethod
    def free_abelian(cls, rank):
        """Group Z x Z^rank (rho is forced to the identity)."""
        return cls(_FreeAbelianKernel(rank))

    @classmethod
    def infinite_cyclic(cls):
        """The group Z itself (trivial kernel)."""
        return cls(_FreeAbelianKernel(0))

    # -- kernel plumbing ----------------------------------------------

    @property
    def is_finite_kernel(self):
        k = self._kernel
        return isinstance(k, _FiniteKernel) or k.rank == 0

    @property
    def kernel_size(self):
        if isinstance(self._kernel, _FiniteKernel):
            return self._kernel.size
        if self._kernel.rank == 0:
            return 1
        raise UnsupportedGroup("kernel is infinite")

    def h_identity(self):
        return self._kernel.identity

    def h_mul(self, a, b):
        if isinstance(self._kernel, _FiniteKernel):
            return self._kernel.table[a][b]
        return tuple(x + y for x, y in zip(a, b))

    def h_inv(self, a):
        if isinstance(self._kernel, _FiniteKernel):
            return self._kernel.inverse_table[a]
        return tuple(-x for x in a)

    def h_rho(self, a, power=1):
        if isinstance(self._kernel, _FiniteKernel):
            return self._kernel.rho_power(power)[a]
        return a

    def h_elements(self):
        if isinstance(self._kernel, _FiniteKernel):
            return range(self._kernel.size)
        if self._kernel.rank == 0:
            return (self._kernel.identity,)
        raise UnsupportedGroup("kernel is infinite; cannot enumerate")

    def h_name(self, h):
        if isinstance(self._kernel, _FiniteKernel):
            return self._kernel.elements[h]
        if self._kernel.rank == 0:
            return "e"
        return ",".join(str(x) for x in h)

    def h_by_name(self, name):
        if isinstance(self._kernel, _FiniteKernel):
            try:
                return self._kernel.elements.index(name)
            except ValueError:
                raise ValidationError("unknown kernel element %r" % name) from None
        if self._kernel.rank == 0:
            if name in ("e", ""):
                return ()
            raise ValidationError("unknown kernel element %r" % name)
        try:
            parts = tuple(int(x) for x in name.split(","))
        except ValueError:
            raise ValidationError("bad kernel element %r" % name) from None
        if len(parts) != self._kernel.rank:
            raise ValidationError("kernel element %r has wrong rank" % name)
        return parts

    @property
    def rho_is_identity(self):
        if isinstance(self._kernel, _FiniteKernel):
            return self._kernel.rho_perm == list(range(self._kernel.size))
        return True

    @property
    def is_abelian(self):
        """Whether G itself is abelian (H abelian and rho = id)."""
        if not self.rho_is_identity:
            return False
        if isinstance(self._kernel, _FiniteKernel):
            t = self._kernel.table
            n = self._kernel.size
            return all(t[a][b] == t[b][a] for a in range(n) for b in range(a))
        return True

    # -- elements -----------------------------------------------------

    def element(self, n, h):
        return GroupElement(self, n, h)

    def element_by_names(self, n, h_name):
        return GroupElement(self, n, self.h_by_name(h_name))

    @property
    def identity(self):
        return GroupElement(self, 0, self.h_identity())

    @property
    def t(self):
        return GroupElement(self, 1, self.h_identity())

    def mul(self, g1, g2):
        """Normal form of the product: t^(n1+n2) * rho^n2(h1) * h2."""
        return GroupElement(
            self, g1.n + g2.n, self.h_mul(self.h_rho(g1.h, g2.n), g2.h)
        )

    def inv(self, g):
        return GroupElement(self, -g.n, self.h_inv(self.h_rho(g.h, -g.n)))

    # -- conjugacy ----------------------------------------------------

    def _orbit(self, n, h):
        """Kernel parts of the conjugates of t^n * h, as a set."""
        seen = {h}
        stack = [h]
        while stack:
            x = stack.pop()
            for y in self._conj_moves(n, x):
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return seen

    def _conj_moves(self, n, x):
        yield self.h_rho(x, 1)
        yield self.h_rho(x, -1)
        if isinstance(self._kernel, _FiniteKernel):
            rho_n = self._kernel.rho_power(n)
            for k in range(self._kernel.size):
                yield self.h_mul(self.h_mul(rho_n[k], x), self.h_inv(k))
        else:
            # rho = id and H abelian: conjugation by H is trivial.
            return

    def conj_class(self, g):
        """Canonical conjugacy class of ``g``.

        Raises UnsupportedGroup when the orbit cannot be enumerated.
        """
        if g.group is not self:
            raise TruncationMismatch("element belongs to a different group")
        key = (g.n, g.h)
        cached = self._class_cache.get(key)
        if cached is not None:
            return cached
        if isinstance(self._kernel, _FiniteKernel):
            rep = min(self._orbit(g.n, g.h))
        else:
            # rho = id over abelian H: classes are singletons.
            rep = g.h
        cls = ConjClass(-g.n, GroupElement(self, g.n, rep))
        if isinstance(self._kernel, _FiniteKernel):
            for h in self._orbit(g.n, g.h):
                self._class_cache[(g.n, h)] = cls
        else:
            self._class_cache[key] = cls
        return cls

    def classes_at_level(self, level):
        """All conjugacy classes inside xi^-1(level), duplicate-free."""
        if not self.is_finite_kernel:
            raise UnsupportedGroup("cannot enumerate classes over an infinite kernel")
        n = -level
        out = []
        seen = set()
        for h in sorted(self.h_elements()):
            if h in seen:
                continue
            orbit = self._orbit(n, h)
            seen |= orbit
            out.append(ConjClass(level, GroupElement(self, n, min(orbit))))
        return out

    def orbit_paths(self, n, rep_h):
        """BFS tree of the conjugation orbit of t^n * rep_h.

        Returns a dict mapping each kernel part ``h`` of the orbit to
        ``(parent_h, move)`` with ``move`` one of ``("conj", k)`` (for
        h = rho^n(k) * parent * k^-1) or ``("rho", +1 | -1)``; the root
        maps to ``None``.  Only available for finite kernels.
        """
        if not isinstance(self._kernel, _FiniteKernel):
            if self._kernel.rank == 0:
                return {rep_h: None}
            raise UnsupportedGroup("orbit paths need a finite kernel")
        paths = {rep_h: None}
        frontier = [rep_h]
        rho_n = self._kernel.rho_power(n)
        while frontier:
            nxt = []
            for x in frontier:
                moves = [(self.h_rho(x, 1), ("rho", 1)), (self.h_rho(x, -1), ("rho", -1))]
                for k in range(self._kernel.size):
                    y = self.h_mul(self.h_mul(rho_n[k], x), self.h_inv(k))
                    moves.append((y, ("conj", k)))
                for y, move in moves:
                    if y not in paths:
                        paths[y] = (x, move)
                        nxt.append(y)
            frontier = nxt
        return paths


@dataclass(frozen=True)
class GroupElement:
    """Normal form t^n * h of a group element; xi(t^n * h) = -n."""

    group: TwistedGroup = field(compare=False, repr=False)
    n: int = 0
    h: object = None

    @property
    def xi(self):
        return -self.n

    def __mul__(self, other):
        if not isinstance(other, GroupElement):
            return NotImplemented
        if other.group is not self.group:
            raise TruncationMismatch("elements belong to different groups")
        return self.group.mul(self, other)

    def inverse(self):
        return self.group.inv(self)

    def conj_class(self):
        return self.group.conj_class(self)

    @property
    def name(self):
        return "t^%d*%s" % (self.n, self.group.h_name(self.h))

    def __repr__(self):
        return "<%s>" % self.name


@dataclass(frozen=True)
class ConjClass:
    """Conjugacy class inside xi^-1(level), named by its least member."""

    level: int
    rep: GroupElement

    @property
    def name(self):
        return self.rep.name

    def __repr__(self):
        return "{%s}" % self.name

    def sort_key(self):
        return (self.level, self.rep.n, self.rep.h)
