import random
from fractions import Fraction

import pytest

from rigidcocycles.errors import (
    BadDiscriminant,
    DiscDivisibleByP,
    NotHeegner,
    NotSplit,
    SquareDiscriminant,
)
from rigidcocycles.exact_arith import QuadFieldElem, canonical_sqrt_D
from rigidcocycles.quadforms import (
    BinaryQF,
    Cusp,
    Mat2,
    S_MAT,
    T_MAT,
    D_MAT,
    act,
    class_key,
    enumerate_simple,
    gamma0_elements,
    intersection,
    linked_heegner_forms,
    linked_heegner_weights,
    padic_intersection,
    s_poly,
)
from rigidcocycles.polys import weight_action

ZERO, ONE, OO = Cusp.make(0), Cusp.make(1), Cusp.infinity()


def rand_sl2z(rng, length=6):
    g = Mat2.identity()
    for _ in range(rng.randint(1, length)):
        h = rng.choice([S_MAT, T_MAT])
        if rng.random() < 0.5:
            h = h.inverse()
        g = g * h
    return g


def test_act_examples():
    assert act(BinaryQF(1, 0, -1), S_MAT) == BinaryQF(-1, 0, 1)
    assert act(BinaryQF(5, 3, -1), Mat2.identity()) == BinaryQF(5, 3, -1)
    assert act(BinaryQF(5, 3, -1), T_MAT) == BinaryQF(5, 13, 7)


def test_act_composition():
    rng = random.Random(17)
    for _ in range(50):
        Q = rng.choice(enumerate_simple(rng.choice([5, 13, 29])))
        g, h = rand_sl2z(rng), rand_sl2z(rng)
        assert act(act(Q, g), h) == act(Q, g * h)
        assert act(Q, g).disc() == Q.disc()


def brute_force_simple(disc):
    out = set()
    for a in range(-disc, disc + 1):
        if a == 0:
            continue
        for b in range(-disc, disc + 1):
            if (b * b - disc) % (4 * a) == 0:
                c = (b * b - disc) // (4 * a)
                if a * c < 0:
                    out.add(BinaryQF(a, b, c))
    return out


def test_enumerate_simple_examples():
    forms5 = enumerate_simple(5)
    assert len(forms5) == 4
    assert set(forms5) == {BinaryQF(1, 1, -1), BinaryQF(1, -1, -1), BinaryQF(-1, 1, 1), BinaryQF(-1, -1, 1)}
    # oracle count for disc 13 (b in {+-1, +-3})
    assert set(enumerate_simple(13)) == brute_force_simple(13)
    assert len(enumerate_simple(13)) == len(brute_force_simple(13)) == 12
    with pytest.raises(BadDiscriminant):
        enumerate_simple(3)


def test_enumerate_simple_brute_force_sweep():
    for disc in range(1, 61):
        if disc % 4 in (0, 1):
            assert set(enumerate_simple(disc)) == brute_force_simple(disc)


def root_separation_oracle(Q, r, s):
    """Exact real-root test in Q(sqrt(disc)): nonzero intersection iff exactly
    one endpoint lies between the roots."""
    d = Q.disc()
    two_a = 2 * Q.a
    r1 = QuadFieldElem(d, Fraction(-Q.b, two_a), Fraction(1, two_a))
    r2 = QuadFieldElem(d, Fraction(-Q.b, two_a), Fraction(-1, two_a))
    lo, hi = (r1, r2) if r2 > r1 else (r2, r1)

    def inside(x):
        if x.is_infinity():
            return False
        v = Fraction(x.n, x.d)
        return (lo - v).sign() < 0 and (hi - v).sign() > 0

    return inside(r) != inside(s)


def test_intersection_examples():
    Q = BinaryQF(1, 1, -1)
    assert intersection(Q, ZERO, OO) == 1
    assert intersection(Q, ONE, Cusp.make(2)) == 0
    with pytest.raises(SquareDiscriminant):
        intersection(BinaryQF(1, 0, -1), ZERO, OO)  # disc 4


def test_intersection_base_convention_is_sign_a():
    for disc in (5, 13, 29):
        for Q in enumerate_simple(disc):
            assert intersection(Q, ZERO, OO) == (1 if Q.a > 0 else -1)


def test_intersection_vs_root_separation_oracle():
    rng = random.Random(23)
    checked = 0
    while checked < 100:
        Q = rng.choice(enumerate_simple(rng.choice([5, 13, 29, 37])))
        r = Cusp.make(rng.randint(-6, 6), rng.randint(1, 6))
        s = Cusp.make(rng.randint(-6, 6), rng.randint(1, 6))
        if r == s:
            continue
        got = intersection(Q, r, s)
        assert (got != 0) == root_separation_oracle(Q, r, s)
        checked += 1


def test_intersection_equivariance():
    rng = random.Random(31)
    for _ in range(100):
        Q = rng.choice(enumerate_simple(rng.choice([5, 13, 29])))
        g = rand_sl2z(rng)
        r = Cusp.make(rng.randint(-5, 5), rng.randint(1, 5))
        s = Cusp.make(rng.randint(-5, 5), rng.randint(1, 5))
        ginv = g.inverse()
        assert intersection(act(Q, ginv), r, s) == intersection(
            Q, r.apply(ginv), s.apply(ginv)
        )


def test_intersection_cocycle_and_antisymmetry():
    rng = random.Random(37)
    for _ in range(100):
        Q = rng.choice(enumerate_simple(rng.choice([5, 13, 29])))
        r, s, t = (Cusp.make(rng.randint(-6, 6), rng.randint(1, 4)) for _ in range(3))
        if len({r, s, t}) < 3:
            continue
        assert intersection(Q, r, t) == intersection(Q, r, s) + intersection(Q, s, t)
        assert intersection(-Q, r, s) == -intersection(Q, r, s)


def test_padic_intersection_table():
    s29 = canonical_sqrt_D(29, 5, 8)
    assert padic_intersection(BinaryQF(5, 3, -1), 5, s29) == -1
    assert padic_intersection(BinaryQF(-5, -3, 1), 5, s29) == 1
    assert padic_intersection(BinaryQF(5, -3, -1), 5, s29) == 1
    # flipping the root flips the sign
    assert padic_intersection(BinaryQF(5, 3, -1), 5, -s29) == 1
    with pytest.raises(NotHeegner):
        padic_intersection(BinaryQF(1, 3, -5), 5, s29)
    with pytest.raises(DiscDivisibleByP):
        padic_intersection(BinaryQF(5, 5, -1), 5, s29)  # disc 45, p | disc


def test_padic_intersection_negation():
    s29 = canonical_sqrt_D(29, 5, 8)
    for Q in linked_heegner_forms(29, 5, ZERO, OO):
        assert padic_intersection(-Q, 5, s29) == -padic_intersection(Q, 5, s29)


def test_linked_heegner_sets():
    forms = linked_heegner_forms(29, 5, ZERO, OO)
    assert BinaryQF(5, 3, -1) in forms and BinaryQF(-5, -3, 1) in forms
    assert all(q.a % 5 == 0 for q in forms)
    # Gamma_0(p)-equivariance: the linked set for (d^-1 r, d^-1 s) is the
    # acted set {Q|d}
    for delta in gamma0_elements(5, 5, seed=5):
        dinv = delta.inverse()
        lhs = set(linked_heegner_forms(29, 5, ZERO.apply(dinv), OO.apply(dinv)))
        rhs = {act(q, delta) for q in forms}
        assert lhs == rhs


def test_s_poly_golden_values():
    assert s_poly(3, 13, 3, ZERO, OO) == [0, -8, 0, 24, 0]
    assert s_poly(3, 29, 5, ZERO, OO) == [0, 24, 0, -120, 0]
    with pytest.raises(NotSplit):
        s_poly(3, 5, 5, ZERO, OO)


def test_s_poly_odd_and_antisymmetric():
    for (k, D, p) in [(3, 13, 3), (3, 29, 5), (5, 13, 3)]:
        sp = s_poly(k, D, p, ZERO, OO)
        assert all(c == 0 for c in sp[0::2])  # odd polynomial
        swapped = s_poly(k, D, p, OO, ZERO)
        assert swapped == [-c for c in sp]


def test_s_poly_gamma0_invariance():
    k, D, p = 3, 13, 3
    rng = random.Random(41)
    for g in gamma0_elements(p, 20, seed=9):
        r = Cusp.make(rng.randint(-5, 5), rng.randint(1, 5))
        s = Cusp.make(rng.randint(-5, 5), rng.randint(1, 5))
        if r == s:
            continue
        lhs = weight_action(s_poly(k, D, p, r.apply(g), s.apply(g)), g.entries(), 2 * k - 2)
        assert [Fraction(c) for c in s_poly(k, D, p, r, s)] == list(lhs)


def test_class_key_classifies():
    rng = random.Random(43)
    for _ in range(100):
        Q = rng.choice(enumerate_simple(rng.choice([13, 40, 61, 85])))
        g = rand_sl2z(rng)
        assert class_key(Q) == class_key(act(Q, g))
    assert class_key(BinaryQF(1, 0, -10)) != class_key(BinaryQF(2, 0, -5))
