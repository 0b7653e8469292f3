import random
from fractions import Fraction

import pytest

from rigidcocycles.errors import NonResidue, NotAUnit, NotSplit
from rigidcocycles.exact_arith import (
    PadicElem,
    QuadExtElem,
    QuadFieldElem,
    canonical_sqrt_D,
    hensel_sqrt,
    legendre,
    same_to_prec,
    smallest_nonresidue,
)


def test_hensel_examples():
    r = hensel_sqrt(PadicElem.from_int(2, 7, 12), 3)
    assert r.unit % 7 == 3
    assert same_to_prec(r * r, PadicElem.from_int(2, 7, 12), 12)

    r = hensel_sqrt(PadicElem.from_int(13, 3, 10), 1)
    assert r.unit % 3 == 1
    assert same_to_prec(r * r, PadicElem.from_int(13, 3, 10), 10)


def test_hensel_exhaustion_oracle_mod_25():
    # oracle: all solutions of x^2 = 29 mod 25 by exhaustion
    sols = sorted(x for x in range(25) if (x * x - 29) % 25 == 0)
    r = hensel_sqrt(PadicElem.from_int(29, 5, 2), 2)
    assert r.unit % 25 in sols
    assert r.unit % 25 == 2


def test_hensel_errors():
    with pytest.raises(NonResidue):
        hensel_sqrt(PadicElem.from_int(2, 5, 8), 3)  # (2/5) = -1
    with pytest.raises(NonResidue):
        hensel_sqrt(PadicElem.from_int(4, 5, 8), 1)  # bad seed: 1^2 != 4 mod 5
    with pytest.raises(NotAUnit):
        hensel_sqrt(PadicElem.from_int(25, 5, 8), 1)  # valuation 2


def test_hensel_idempotence():
    r = hensel_sqrt(PadicElem.from_int(46, 7, 15), 5)
    again = hensel_sqrt(r * r, 5)
    assert same_to_prec(r, again, 15)


def test_canonical_sqrt_convention():
    assert canonical_sqrt_D(2, 7, 6).unit % 7 == 3  # F_7^+ = {1,2,3}
    assert canonical_sqrt_D(13, 3, 6).unit % 3 == 1
    s = canonical_sqrt_D(29, 5, 6)
    assert s.unit % 5 == 2 and s.unit % 25 == 2
    with pytest.raises(NotSplit):
        canonical_sqrt_D(5, 3, 6)  # (5/3) = -1
    with pytest.raises(NotSplit):
        canonical_sqrt_D(5, 5, 6)  # p | D


def test_valuation_properties_random():
    rng = random.Random(101)
    p = 5
    for _ in range(400):
        x = PadicElem.from_fraction(
            Fraction(rng.randint(-500, 500) or 1, rng.randint(1, 500)), p, 30
        )
        y = PadicElem.from_fraction(
            Fraction(rng.randint(-500, 500) or 1, rng.randint(1, 500)), p, 30
        )
        assert (x * y).valuation() == x.valuation() + y.valuation()
        s = x + y
        assert s.val_lower_bound() >= min(x.valuation(), y.valuation())
        if x.valuation() != y.valuation():
            assert s.valuation() == min(x.valuation(), y.valuation())


def test_quadext_valuation_is_min():
    rng = random.Random(7)
    p = 7
    for _ in range(1000):
        a = Fraction(rng.randint(-300, 300), rng.randint(1, 300))
        b = Fraction(rng.randint(-300, 300), rng.randint(1, 300))
        if a == 0 and b == 0:
            continue
        z = QuadExtElem.from_pair(a, b, p, 25)
        assert z.valuation() == min(z.a.valuation(), z.b.valuation())


def test_exact_scalar_preserves_relative_precision():
    x = PadicElem.make(3, -5, 7, 10)  # known mod 3^10, valuation -5
    y = 3**6 * x
    assert y.val == 1 and y.prec == 16
    z = x * Fraction(2, 9)
    assert z.val == -7 and z.prec == 8


def test_inverse_and_pow():
    x = PadicElem.from_fraction(Fraction(45, 7), 3, 20)
    assert same_to_prec(x * x.inverse(), PadicElem.from_int(1, 3, 12), 12)
    assert same_to_prec(x**3, x * x * x, 15)
    assert same_to_prec(x**-2, (x * x).inverse(), 10)


def test_quadfield_norm_and_sign():
    q = QuadFieldElem(13, Fraction(3, 2), Fraction(-5, 7))
    assert q * q.conjugate() == QuadFieldElem(13, q.norm(), Fraction(0))
    rng = random.Random(3)
    import math

    for _ in range(200):
        x = QuadFieldElem(
            13, Fraction(rng.randint(-20, 20), rng.randint(1, 9)),
            Fraction(rng.randint(-20, 20), rng.randint(1, 9)),
        )
        f = float(x.x) + float(x.y) * math.sqrt(13)
        if abs(f) > 1e-9:
            assert x.sign() == (1 if f > 0 else -1)


def test_json_round_trip_bit_exact():
    rng = random.Random(11)
    for _ in range(200):
        x = PadicElem.from_fraction(
            Fraction(rng.randint(-9999, 9999) or 1, rng.randint(1, 9999)), 3, rng.randint(1, 40)
        )
        assert PadicElem.from_json(x.to_json()) == x


def test_nonresidue_choice():
    assert smallest_nonresidue(3) == 2
    assert smallest_nonresidue(5) == 2
    assert smallest_nonresidue(7) == 3
    assert legendre(smallest_nonresidue(11), 11) == -1
