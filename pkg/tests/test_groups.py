import random

import pytest

from helpers import integers, z3_twisted, z3_product, C3_TABLE
from novlog import TwistedGroup, UnsupportedGroup, ValidationError


def brute_conjugates(group, g, t_range=3):
    """Closure of {g} under conjugation by generators t, t^-1 and all of H."""
    seen = {(g.n, g.h)}
    frontier = [g]
    gens = [group.t, group.t.inverse()] + [
        group.element(0, h) for h in group.h_elements()
    ]
    while frontier:
        x = frontier.pop()
        for k in gens:
            y = k * x * k.inverse()
            if (y.n, y.h) not in seen:
                seen.add((y.n, y.h))
                frontier.append(group.element(y.n, y.h))
    return seen


def mul_by_moves(group, g1, g2):
    """Second multiplication route: push t-powers left one generator at a time."""
    # word: t^n1 h1 t^n2 h2; move h1 past t^n2 with single-step twists
    h = g1.h
    if g2.n >= 0:
        for _ in range(g2.n):
            h = group.h_rho(h, 1)
    else:
        for _ in range(-g2.n):
            h = group.h_rho(h, -1)
    return group.element(g1.n + g2.n, group.h_mul(h, g2.h))


def rand_element(rng, group, span=4):
    hs = sorted(group.h_elements())
    return group.element(rng.randint(-span, span), rng.choice(hs))


class TestMul:
    def test_twist_square(self):
        g = z3_twisted()
        ta = g.element(1, 1)
        assert ta * ta == g.element(2, 0)

    def test_identity(self):
        g = z3_twisted()
        rng = random.Random(0)
        for _ in range(20):
            x = rand_element(rng, g)
            assert g.identity * x == x
            assert x * g.identity == x

    def test_product_with_inverse_level(self):
        # (t, a) * (t^-1, a) over rho = inversion: solve by exhaustion
        g = z3_twisted()
        x = g.element(1, 1)
        y = g.element(-1, 1)
        candidates = [
            h for h in g.h_elements() if x * g.element(-1, h) == g.identity
        ]
        assert candidates == [1]  # the h making (t,a)*(t^-1,h) = e is a itself
        assert x * y == g.identity

    def test_xi_additive(self):
        g = z3_twisted()
        rng = random.Random(1)
        for _ in range(100):
            a, b = rand_element(rng, g), rand_element(rng, g)
            assert (a * b).xi == a.xi + b.xi

    def test_normal_form_two_routes(self):
        rng = random.Random(2)
        for group in (z3_twisted(), z3_product(), integers()):
            for _ in range(200):
                a, b = rand_element(rng, group), rand_element(rng, group)
                assert a * b == mul_by_moves(group, a, b)


class TestInv:
    def test_identity(self):
        g = z3_twisted()
        assert g.identity.inverse() == g.identity

    def test_solved_by_enumeration(self):
        g = z3_twisted()
        x = g.element(1, 1)
        # solve x * y = e over candidates t^-1 h
        sols = [h for h in g.h_elements() if x * g.element(-1, h) == g.identity]
        assert len(sols) == 1
        assert x.inverse() == g.element(-1, sols[0])

    def test_involution(self):
        rng = random.Random(3)
        for group in (z3_twisted(), integers()):
            for _ in range(100):
                x = rand_element(rng, group)
                assert x.inverse().inverse() == x
                assert x * x.inverse() == group.identity
                assert x.inverse() * x == group.identity


class TestConjClass:
    def test_level_zero_merges_rho_orbit(self):
        g = z3_twisted()
        assert g.conj_class(g.element(0, 1)) == g.conj_class(g.element(0, 2))

    def test_level_minus_one_single_class(self):
        g = z3_twisted()
        classes = {g.conj_class(g.element(1, h)) for h in g.h_elements()}
        assert len(classes) == 1

    def test_identity_singleton(self):
        g = z3_twisted()
        cls = g.conj_class(g.identity)
        orbit = {h for h in g.h_elements() if g.conj_class(g.element(0, h)) == cls}
        assert orbit == {0}

    def test_matches_brute_force_orbits(self):
        rng = random.Random(4)
        for group in (z3_twisted(), z3_product()):
            for _ in range(30):
                x = rand_element(rng, group, span=2)
                orbit = brute_conjugates(group, x)
                reps = {group.conj_class(group.element(n, h)) for n, h in orbit}
                assert len(reps) == 1
                assert reps.pop() == group.conj_class(x)

    def test_invariant_under_conjugation(self):
        rng = random.Random(5)
        for group in (z3_twisted(), z3_product()):
            for _ in range(200):
                k, x = rand_element(rng, group), rand_element(rng, group)
                assert group.conj_class(k * x * k.inverse()) == group.conj_class(x)

    def test_free_abelian_classes_are_singletons(self):
        g = TwistedGroup.free_abelian(2)
        x = g.element(3, (1, -2))
        assert g.conj_class(x).rep == x


class TestClassesAtLevel:
    def test_z3_twisted_counts(self):
        g = z3_twisted()
        assert len(g.classes_at_level(0)) == 2
        assert len(g.classes_at_level(-1)) == 1
        assert len(g.classes_at_level(1)) == 1

    def test_trivial_kernel(self):
        g = integers()
        for level in (-2, 0, 3):
            assert len(g.classes_at_level(level)) == 1

    def test_orbit_sizes_sum_to_kernel_order(self):
        for group in (z3_twisted(), z3_product()):
            for level in range(-3, 4):
                classes = group.classes_at_level(level)
                total = 0
                for cls in classes:
                    total += sum(
                        1
                        for h in group.h_elements()
                        if group.conj_class(group.element(-level, h)) == cls
                    )
                assert total == group.kernel_size

    def test_infinite_kernel_rejected(self):
        g = TwistedGroup.free_abelian(2)
        with pytest.raises(UnsupportedGroup):
            g.classes_at_level(0)


class TestValidation:
    def test_non_associative_table(self):
        # left translation table of a quasigroup that is not a group
        bad = [[0, 1, 2], [1, 0, 2], [2, 1, 0]]
        with pytest.raises(ValidationError):
            TwistedGroup.finite(["e", "x", "y"], bad)

    def test_rho_not_multiplicative(self):
        with pytest.raises(ValidationError):
            TwistedGroup.finite(["e", "a", "b"], C3_TABLE, rho=[1, 0, 2])

    def test_rho_not_permutation(self):
        with pytest.raises(ValidationError):
            TwistedGroup.finite(["e", "a", "b"], C3_TABLE, rho=[0, 0, 1])


class TestOrbitPaths:
    def test_paths_reach_whole_orbit(self):
        g = z3_twisted()
        for n in (-2, -1, 0, 1, 2):
            seen = set()
            for cls in g.classes_at_level(-n):
                paths = g.orbit_paths(n, cls.rep.h)
                assert cls.rep.h in paths and paths[cls.rep.h] is None
                seen |= set(paths)
            assert seen == set(g.h_elements())

    def test_moves_are_real_conjugations(self):
        g = z3_twisted()
        n = 2
        for cls in g.classes_at_level(-n):
            paths = g.orbit_paths(n, cls.rep.h)
            for h, parent_move in paths.items():
                if parent_move is None:
                    continue
                parent, move = parent_move
                if move[0] == "conj":
                    k = move[1]
                    expect = g.h_mul(g.h_mul(g.h_rho(k, n), parent), g.h_inv(k))
                else:
                    expect = g.h_rho(parent, move[1])
                assert h == expect
