"""Binary quadratic forms: group action, enumeration, intersection numbers
(archimedean and p-adic), Heegner sets and the unnormalized period sum.

Sign conventions pinned here:

* intersection(Q, r, s) = (sign Q(s) - sign Q(r)) / 2 evaluated projectively,
  so intersection([a,b,c], 0, oo) = sign(a) for simple forms.  This choice is
  Gamma-equivariant on the nose and additive along cusp paths.
* padic_intersection uses the canonical sqrt(D) fixed by F_p^+; flipping the
  root flips the sign.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import (
    BadDiscriminant,
    DiscDivisibleByP,
    NotHeegner,
    SquareDiscriminant,
)
from .exact_arith import PadicElem, val_p_int
from .polys import poly_add, poly_pow, poly_scale


def is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


# ---------------------------------------------------------------------------
# Matrices and cusps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Mat2:
    """2x2 matrix with entries in Z[1/p] (stored as exact Fractions)."""

    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction

    def __post_init__(self):
        for f in "abcd":
            object.__setattr__(self, f, Fraction(getattr(self, f)))

    def det(self) -> Fraction:
        return self.a * self.d - self.b * self.c

    def __mul__(self, o: "Mat2") -> "Mat2":
        return Mat2(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )

    def inverse(self) -> "Mat2":
        det = self.det()
        if det == 0:
            raise ZeroDivisionError("singular matrix")
        return Mat2(self.d / det, -self.b / det, -self.c / det, self.a / det)

    def entries(self):
        return (self.a, self.b, self.c, self.d)

    @staticmethod
    def identity() -> "Mat2":
        return Mat2(1, 0, 0, 1)


S_MAT = Mat2(0, 1, -1, 0)
U_MAT = Mat2(0, 1, -1, 1)
T_MAT = Mat2(1, 1, 0, 1)
ITILDE_MAT = Mat2(-1, 0, 0, 1)


def D_MAT(p: int) -> Mat2:
    return Mat2(p, 0, 0, Fraction(1, p))


def P_MAT(p: int) -> Mat2:
    return Mat2(p, 0, 0, 1)


@dataclass(frozen=True, order=True)
class Cusp:
    """Element n/d of P1(Q), normalized with gcd(n, d) = 1 and d >= 0.

    (1, 0) encodes oo.
    """

    n: int
    d: int

    @staticmethod
    def make(n, d=1) -> "Cusp":
        if isinstance(n, Fraction) and d == 1:
            n, d = n.numerator, n.denominator
        n, d = int(n), int(d)
        if n == 0 and d == 0:
            raise ValueError("0/0 is not a cusp")
        if d == 0:
            return Cusp(1, 0)
        g = math.gcd(n, d)
        n, d = n // g, d // g
        if d < 0:
            n, d = -n, -d
        return Cusp(n, d)

    @staticmethod
    def infinity() -> "Cusp":
        return Cusp(1, 0)

    def is_infinity(self) -> bool:
        return self.d == 0

    def as_fraction(self) -> Fraction:
        if self.d == 0:
            raise ValueError("oo has no fraction value")
        return Fraction(self.n, self.d)

    def apply(self, g: Mat2) -> "Cusp":
        """Moebius action; entries of g may live in Z[1/p]."""
        n = Fraction(g.a * self.n + g.b * self.d)
        d = Fraction(g.c * self.n + g.d * self.d)
        if n == 0 and d == 0:
            raise ZeroDivisionError("matrix kills the cusp")
        m = math.lcm(n.denominator, d.denominator)
        return Cusp.make(int(n * m), int(d * m))

    def __str__(self):
        return "oo" if self.d == 0 else (f"{self.n}" if self.d == 1 else f"{self.n}/{self.d}")


# ---------------------------------------------------------------------------
# Forms
# ---------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class BinaryQF:
    """Integer binary quadratic form [a, b, c] = a x^2 + b x y + c y^2."""

    a: int
    b: int
    c: int

    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def content(self) -> int:
        return math.gcd(math.gcd(abs(self.a), abs(self.b)), abs(self.c))

    def is_primitive(self) -> bool:
        return self.content() == 1

    def is_simple(self) -> bool:
        return self.a * self.c < 0

    def is_heegner(self, p: int) -> bool:
        return self.a % p == 0

    def __neg__(self) -> "BinaryQF":
        return BinaryQF(-self.a, -self.b, -self.c)

    def eval_pair(self, n, d):
        return self.a * n * n + self.b * n * d + self.c * d * d

    def poly_coeffs(self):
        """Ascending coefficients of Q(x, 1)."""
        return [self.c, self.b, self.a]

    def power_coeffs(self, e: int):
        """Ascending integer coefficients of Q(x, 1)^e."""
        return poly_pow(self.poly_coeffs(), e)

    def to_json(self) -> dict:
        return {"a": self.a, "b": self.b, "c": self.c, "disc": self.disc()}


def act(Q: BinaryQF, g: Mat2) -> BinaryQF:
    """The standard right action (Q|g)(x, y) = Q(ax + by, cx + dy).

    For g in SL2(Z) this preserves integrality and the discriminant.  For g
    over Z[1/p] the exact rational coefficients are cleared by the minimal
    power of p; callers that need the un-normalized form should act on
    coefficients directly.
    """
    a, b, c, d = g.entries()
    qa = Q.a * a * a + Q.b * a * c + Q.c * c * c
    qb = 2 * Q.a * a * b + Q.b * (a * d + b * c) + 2 * Q.c * c * d
    qc = Q.a * b * b + Q.b * b * d + Q.c * d * d
    if all(Fraction(t).denominator == 1 for t in (qa, qb, qc)):
        return BinaryQF(int(qa), int(qb), int(qc))
    den = 1
    for t in (qa, qb, qc):
        den = den * Fraction(t).denominator // math.gcd(den, Fraction(t).denominator)
    return BinaryQF(int(qa * den), int(qb * den), int(qc * den))


def scale_p_primitive(Q: BinaryQF, p: int) -> BinaryQF:
    """Scale by the power of p making the form p-primitive (positive scale)."""
    v = min(val_p_int(t, p) for t in (Q.a, Q.b, Q.c) if t != 0)
    if v == 0:
        return Q
    m = p**v
    return BinaryQF(Q.a // m, Q.b // m, Q.c // m)


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------


def _divisors(n: int):
    n = abs(n)
    small, large = [], []
    for d in range(1, math.isqrt(n) + 1):
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
    return small + large[::-1]


@lru_cache(maxsize=None)
def _enumerate_simple_cached(disc: int):
    forms = []
    bmax = math.isqrt(disc - 1)  # |b| < sqrt(disc) since ac < 0 forces b^2 < disc
    for b in range(-bmax, bmax + 1):
        if (b * b - disc) % 4 != 0:
            continue
        m = (b * b - disc) // 4  # = a*c < 0
        for d in _divisors(m):
            forms.append(BinaryQF(d, b, m // d))
            forms.append(BinaryQF(-d, b, -(m // d)))
    return tuple(sorted(forms))


def enumerate_simple(disc: int):
    """All integer forms [a,b,c] with b^2 - 4ac = disc and ac < 0, sorted.

    disc must be a positive integer congruent to 0 or 1 mod 4.
    """
    if disc <= 0 or disc % 4 not in (0, 1):
        raise BadDiscriminant(f"{disc} is not a positive discriminant")
    cache_dir = os.environ.get("COCYCLE_CACHE_DIR")
    if cache_dir:
        path = os.path.join(cache_dir, f"simple_{disc}.json")
        if os.path.exists(path):
            with open(path) as fh:
                return tuple(BinaryQF(*t) for t in json.load(fh))
        forms = _enumerate_simple_cached(disc)
        os.makedirs(cache_dir, exist_ok=True)
        tmp = path + ".tmp"
        with open(tmp, "w") as fh:
            json.dump([[q.a, q.b, q.c] for q in forms], fh)
        os.replace(tmp, path)
        return forms
    return _enumerate_simple_cached(disc)


# ---------------------------------------------------------------------------
# Intersection numbers
# ---------------------------------------------------------------------------


def sign_at_cusp(Q: BinaryQF, x: Cusp) -> int:
    v = Q.eval_pair(x.n, x.d)
    return 0 if v == 0 else (1 if v > 0 else -1)


def intersection(Q: BinaryQF, r: Cusp, s: Cusp) -> int:
    """Intersection number of the geodesic of Q with the geodesic (r, s).

    Zero iff the roots of Q do not separate {r, s} on P1(R); the base
    normalization is intersection(Q, 0, oo) = sign(a) for simple forms.
    Pairs with a root at an endpoint count as 0.
    """
    d = Q.disc()
    if d <= 0 or is_square(d):
        raise SquareDiscriminant(f"disc {d} is not positive nonsquare")
    sr, ss = sign_at_cusp(Q, r), sign_at_cusp(Q, s)
    if sr == 0 or ss == 0:
        return 0
    return (ss - sr) // 2


def padic_intersection(Q: BinaryQF, p: int, sqrtD: PadicElem) -> int:
    """The p-adic intersection number (gamma_Q . e_0) in {-1, +1}.

    +1 when the first p-adic root (-b + sqrtD)/(2a) lies inside the standard
    annulus (valuation >= 0) and the second outside (valuation <= -1), and -1
    in the opposite case.  Requires p | a and p not dividing disc(Q).
    """
    if Q.a % p != 0:
        raise NotHeegner(f"p={p} does not divide a={Q.a}")
    d = Q.disc()
    if d % p == 0:
        raise DiscDivisibleByP(f"p={p} divides disc {d}")
    need = val_p_int(4 * Q.a * Q.c, p) + 2 if Q.c != 0 else val_p_int(Q.b * Q.b, p) + 2
    if sqrtD.prec < need:
        raise ValueError(f"sqrtD needs precision >= {need}")
    num1 = sqrtD - Q.b  # numerator of r1 = (-b + sqrtD)/(2a)
    num2 = -sqrtD - Q.b
    va = val_p_int(Q.a, p)
    v1 = num1.valuation() - va
    v2 = num2.valuation() - va
    if v1 >= 0 and v2 <= -1:
        return 1
    if v1 <= -1 and v2 >= 0:
        return -1
    raise DiscDivisibleByP(f"roots of {Q} straddle no annulus boundary")


# ---------------------------------------------------------------------------
# Heegner sets and the unnormalized period sum
# ---------------------------------------------------------------------------


def _segment_matrix(r: Cusp, s: Cusp) -> Mat2:
    """g in SL2(Z) with g0 = r, g oo = s, for a unimodular pair (r, s)."""
    det = s.n * r.d - r.n * s.d
    assert det in (1, -1), "pair is not unimodular"
    if det == 1:
        return Mat2(s.n, r.n, s.d, r.d)
    return Mat2(s.n, -r.n, s.d, -r.d)


def _linked_candidates(disc: int, r: Cusp, s: Cusp):
    """Superset of the forms of given disc linked to (r, s), via Manin pullback."""
    from . import modsym  # local import; modsym depends on this module

    out = set()
    for x, y in modsym.manin_decompose(r, s):
        ginv = _segment_matrix(x, y).inverse()
        for Q0 in enumerate_simple(disc):
            out.add(act(Q0, ginv))
    return out


def linked_heegner_weights(D: int, p: int, r: Cusp, s: Cusp):
    """Map Q -> intersection(Q, r, s) over Heegner forms of disc D, zeros dropped."""
    if D <= 0 or D % 4 not in (0, 1):
        raise BadDiscriminant(f"{D} is not a positive discriminant")
    if is_square(D):
        raise SquareDiscriminant(f"D = {D} is a square")
    if r == s:
        return {}
    weights = {}
    for Q in _linked_candidates(D, r, s):
        if not Q.is_heegner(p):
            continue
        w = intersection(Q, r, s)
        if w:
            weights[Q] = w
    return weights


def linked_heegner_forms(D: int, p: int, r: Cusp, s: Cusp):
    """Sorted Heegner forms of disc D with nonzero intersection with (r, s)."""
    return sorted(linked_heegner_weights(D, p, r, s))


def s_poly(k: int, D: int, p: int, r: Cusp, s: Cusp):
    """Ascending integer coefficients of the degree <= 2k-2 sum

        sum_Q (gamma_Q . (r,s)) (gamma_Q . e_0) Q(x,1)^(k-1)

    over Heegner forms Q of discriminant D.  This is kappa_{k,D}{r,s} and the
    archimedean period polynomial stripped of their normalizing constants.
    """
    from .exact_arith import canonical_sqrt_D

    if k < 1 or k % 2 == 0:
        raise ValueError(f"k must be odd and >= 1, got {k}")
    weights = linked_heegner_weights(D, p, r, s)
    need = 6
    for Q in weights:
        if Q.c != 0:
            need = max(need, val_p_int(4 * Q.a * Q.c, p) + 2)
    sqrtD = canonical_sqrt_D(D, p, need)
    out = [0] * (2 * k - 1)
    for Q, w in sorted(weights.items()):
        sigma = padic_intersection(Q, p, sqrtD)
        out = poly_add(out, poly_scale(w * sigma, Q.power_coeffs(k - 1)))
    return out


# ---------------------------------------------------------------------------
# Gauss reduction of indefinite forms (nonsquare discriminant)
# ---------------------------------------------------------------------------


def is_reduced_indef(Q: BinaryQF) -> bool:
    """Reduced in the classical sense: |sqrt(disc) - 2|a|| < b < sqrt(disc)."""
    disc = Q.disc()
    if Q.b <= 0 or Q.b * Q.b >= disc:
        return False
    lo, hi = 2 * abs(Q.a) - Q.b, 2 * abs(Q.a) + Q.b
    return (lo < 0 or lo * lo < disc) and disc < hi * hi


def rho_step(Q: BinaryQF) -> BinaryQF:
    """One step of the reduction operator: [a,b,c] -> [c, r, (r^2-disc)/4c]
    with r = -b mod 2|c| taken in the standard window."""
    disc = Q.disc()
    s = math.isqrt(disc)
    c = Q.c
    cc = 2 * abs(c)
    r = (-Q.b) % cc
    if abs(c) > s:
        if r > abs(c):
            r -= cc
    else:
        r += ((s - r) // cc) * cc
    return BinaryQF(c, r, (r * r - disc) // (4 * c))


def gauss_reduce(Q: BinaryQF) -> BinaryQF:
    """Reduce an indefinite form of nonsquare discriminant."""
    d = Q.disc()
    if d <= 0 or is_square(d):
        raise SquareDiscriminant(f"disc {d} is not positive nonsquare")
    for _ in range(10_000):
        if is_reduced_indef(Q):
            return Q
        Q = rho_step(Q)
    raise RuntimeError("reduction did not terminate")


@lru_cache(maxsize=None)
def _cycle_of_reduced(R: BinaryQF):
    cyc = [R]
    Q = rho_step(R)
    while Q != R:
        cyc.append(Q)
        Q = rho_step(Q)
    return tuple(cyc)


def reduction_cycle(Q: BinaryQF):
    """The rho-cycle of reduced forms in the proper equivalence class of Q."""
    return _cycle_of_reduced(gauss_reduce(Q))


def class_key(Q: BinaryQF) -> BinaryQF:
    """Canonical representative (cycle minimum) of the SL2(Z)-class of Q.

    Two forms of equal nonsquare discriminant are properly equivalent iff
    their keys coincide.
    """
    return min(reduction_cycle(Q))


def gamma0_elements(p: int, count: int, seed: int = 0):
    """Deterministic sample of elements of Gamma_0(p) (matrices [[a,b],[pc,d]])."""
    import random

    rng = random.Random(seed)
    gens = [T_MAT, Mat2(1, 0, p, 1)]
    out = []
    for _ in range(count):
        g = Mat2.identity()
        for _ in range(rng.randint(2, 6)):
            h = rng.choice(gens)
            if rng.random() < 0.5:
                h = h.inverse()
            g = g * h
        out.append(g)
    return out
