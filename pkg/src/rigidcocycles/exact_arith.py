"""Exact arithmetic layers: rationals, the real quadratic field Q(sqrt(Delta)),
and fixed-precision p-adic numbers with their unramified quadratic extension.

Precision model: a PadicElem of precision M is known modulo p^M (absolute
precision).  Every operation propagates the worst-case precision of its
inputs, so a reported precision is always a guarantee, never an estimate.
All values are immutable and safe to share.

Conventions pinned here and used globally:

* F_p^+ = {1, ..., (p-1)/2} represents F_p^x / {+-1}; canonical_sqrt_D picks
  the square root congruent to an element of F_p^+.
* u = the smallest positive quadratic nonresidue mod p generates the
  unramified quadratic extension Qp(sqrt(u)).
* p = 2 is rejected everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import NonResidue, NotAUnit, NotSplit

# Arbitrary-precision reduced rationals (gcd = 1, positive denominator) are
# exactly what fractions.Fraction provides; it is re-exported under the name
# used throughout the package.
Rat = Fraction


def is_odd_prime(p: int) -> bool:
    if not isinstance(p, int) or p < 3 or p % 2 == 0:
        return False
    return all(p % q for q in range(3, math.isqrt(p) + 1, 2))


def require_odd_prime(p: int) -> None:
    if not is_odd_prime(p):
        raise NotAUnit(f"p must be an odd prime, got {p}")


def val_p_int(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def val_p_fraction(q: Fraction, p: int) -> int:
    if q == 0:
        raise ValueError("valuation of 0 is infinite")
    return val_p_int(q.numerator, p) - val_p_int(q.denominator, p)


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a/p) for odd prime p, in {-1, 0, 1}."""
    a %= p
    if a == 0:
        return 0
    t = pow(a, (p - 1) // 2, p)
    return 1 if t == 1 else -1


def smallest_nonresidue(p: int) -> int:
    """Smallest positive quadratic nonresidue mod p (deterministic choice of u)."""
    require_odd_prime(p)
    for n in range(2, p):
        if legendre(n, p) == -1:
            return n
    raise NonResidue(f"no nonresidue found for p={p}")  # unreachable for p > 2


# ---------------------------------------------------------------------------
# Q(sqrt(Delta)), exact
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadFieldElem:
    """Element x + y*sqrt(disc) of the real quadratic field Q(sqrt(disc)).

    disc is a positive nonsquare integer and sqrt(disc) means the positive
    real root; comparisons and sign() are exact.
    """

    disc: int
    x: Fraction
    y: Fraction

    def __post_init__(self):
        d = self.disc
        if d <= 0 or math.isqrt(d) ** 2 == d:
            raise ValueError(f"disc must be positive nonsquare, got {d}")
        object.__setattr__(self, "x", Fraction(self.x))
        object.__setattr__(self, "y", Fraction(self.y))

    def _coerce(self, other) -> "QuadFieldElem":
        if isinstance(other, QuadFieldElem):
            if other.disc != self.disc:
                raise ValueError("mixed discriminants")
            return other
        return QuadFieldElem(self.disc, Fraction(other), Fraction(0))

    def __add__(self, other):
        o = self._coerce(other)
        return QuadFieldElem(self.disc, self.x + o.x, self.y + o.y)

    __radd__ = __add__

    def __neg__(self):
        return QuadFieldElem(self.disc, -self.x, -self.y)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        return QuadFieldElem(
            self.disc,
            self.x * o.x + self.disc * self.y * o.y,
            self.x * o.y + self.y * o.x,
        )

    __rmul__ = __mul__

    def conjugate(self) -> "QuadFieldElem":
        return QuadFieldElem(self.disc, self.x, -self.y)

    def norm(self) -> Fraction:
        return self.x * self.x - self.disc * self.y * self.y

    def inverse(self) -> "QuadFieldElem":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("zero has no inverse")
        return QuadFieldElem(self.disc, self.x / n, -self.y / n)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = QuadFieldElem(self.disc, Fraction(1), Fraction(0))
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def sign(self) -> int:
        """Exact sign of x + y*sqrt(disc) as a real number."""
        x, y = self.x, self.y
        if y == 0:
            return 0 if x == 0 else (1 if x > 0 else -1)
        if x == 0:
            return 1 if y > 0 else -1
        if x > 0 and y > 0:
            return 1
        if x < 0 and y < 0:
            return -1
        # opposite signs: compare x^2 with disc*y^2
        t = x * x - self.disc * y * y
        if t == 0:
            return 0  # impossible for nonsquare disc, kept for safety
        return (1 if t > 0 else -1) * (1 if x > 0 else -1)

    def __lt__(self, other):
        return (self - self._coerce(other)).sign() < 0

    def __gt__(self, other):
        return (self - self._coerce(other)).sign() > 0

    def to_float(self) -> float:
        return float(self.x) + float(self.y) * math.sqrt(self.disc)


# ---------------------------------------------------------------------------
# Zp / Qp with absolute-precision tracking
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PadicElem:
    """A p-adic number known modulo p^prec.

    Nonzero-to-precision elements are stored as unit * p^val with unit a
    p-adic unit modulo p^(prec - val).  An element that is indistinguishable
    from 0 has unit == 0 and val == prec (valuation is only bounded below).
    """

    prime: int
    val: int
    unit: int
    prec: int

    # -- constructors -------------------------------------------------------

    @staticmethod
    def make(p: int, val: int, unit: int, prec: int) -> "PadicElem":
        """Normalize (strip p-powers from unit, reduce mod p^(prec-val))."""
        if val >= prec or unit == 0:
            return PadicElem(p, prec, 0, prec)
        while unit % p == 0:
            unit //= p
            val += 1
            if val >= prec:
                return PadicElem(p, prec, 0, prec)
        unit %= p ** (prec - val)
        if unit == 0:
            return PadicElem(p, prec, 0, prec)
        return PadicElem(p, val, unit, prec)

    @staticmethod
    def zero(p: int, prec: int) -> "PadicElem":
        return PadicElem(p, prec, 0, prec)

    @staticmethod
    def from_int(n: int, p: int, prec: int) -> "PadicElem":
        if n == 0:
            return PadicElem.zero(p, prec)
        return PadicElem.make(p, 0, n, prec)

    @staticmethod
    def from_fraction(q, p: int, prec: int) -> "PadicElem":
        q = Fraction(q)
        if q == 0:
            return PadicElem.zero(p, prec)
        num, den = q.numerator, q.denominator
        v = val_p_int(num, p) - val_p_int(den, p)
        num //= p ** max(val_p_int(num, p), 0)
        den //= p ** max(val_p_int(den, p), 0)
        rel = prec - v
        if rel <= 0:
            return PadicElem.zero(p, prec)
        m = p**rel
        unit = (num % m) * pow(den % m, -1, m) % m
        return PadicElem.make(p, v, unit, prec)

    # -- basic queries -------------------------------------------------------

    def is_zero(self) -> bool:
        """True when the element is 0 to working precision."""
        return self.unit == 0

    def valuation(self):
        """Exact valuation, or math.inf when zero to precision."""
        return math.inf if self.is_zero() else self.val

    def val_lower_bound(self) -> int:
        return self.prec if self.is_zero() else self.val

    def norm_exp(self):
        """log_p |x|; -inf bound marker (None) when zero to precision."""
        return None if self.is_zero() else -self.val

    def lift(self) -> Fraction:
        """The canonical rational representative unit * p^val."""
        if self.is_zero():
            return Fraction(0)
        return Fraction(self.unit) * Fraction(self.prime) ** self.val

    def digits(self) -> list:
        """Base-p digits of the unit part, length prec - val."""
        if self.is_zero():
            return []
        out, u = [], self.unit
        for _ in range(self.prec - self.val):
            out.append(u % self.prime)
            u //= self.prime
        return out

    # -- arithmetic ----------------------------------------------------------

    def _check(self, other) -> "PadicElem":
        if isinstance(other, int):
            return PadicElem.from_int(other, self.prime, self.prec)
        if isinstance(other, Fraction):
            return PadicElem.from_fraction(other, self.prime, self.prec)
        if not isinstance(other, PadicElem) or other.prime != self.prime:
            raise TypeError("incompatible p-adic operands")
        return other

    def __add__(self, other):
        if not isinstance(other, (int, Fraction, PadicElem)):
            return NotImplemented
        o = self._check(other)
        p = self.prime
        prec = min(self.prec, o.prec)
        if self.is_zero() and o.is_zero():
            return PadicElem.zero(p, prec)
        if self.is_zero():
            return PadicElem.make(p, o.val, o.unit, min(prec, o.prec))
        if o.is_zero():
            return PadicElem.make(p, self.val, self.unit, min(prec, self.prec))
        v0 = min(self.val, o.val)
        m = p ** (prec - v0) if prec > v0 else 1
        s = (self.unit * p ** (self.val - v0) + o.unit * p ** (o.val - v0)) % m
        return PadicElem.make(p, v0, s, prec)

    __radd__ = __add__

    def __neg__(self):
        if self.is_zero():
            return self
        return PadicElem.make(
            self.prime, self.val, -self.unit % self.prime ** (self.prec - self.val), self.prec
        )

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def mul_exact(self, q) -> "PadicElem":
        """Multiply by an exact rational: relative precision is preserved."""
        q = Fraction(q)
        p = self.prime
        if q == 0:
            return PadicElem.zero(p, self.prec + 64)
        v = val_p_fraction(q, p)
        if self.is_zero():
            return PadicElem.zero(p, self.prec + v)
        rel = self.prec - self.val
        m = p**rel
        num, den = q.numerator, q.denominator
        num //= p ** max(val_p_int(num, p), 0)
        den //= p ** max(val_p_int(den, p), 0)
        unit = self.unit * (num % m) * pow(den % m, -1, m) % m
        return PadicElem.make(p, self.val + v, unit, self.val + v + rel)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.mul_exact(other)
        if not isinstance(other, PadicElem):
            return NotImplemented
        o = self._check(other)
        p = self.prime
        if self.is_zero() or o.is_zero():
            # O(p^M) * (u p^v + O(p^N)) = O(p^(M+v)); O * O = O(p^(M+N))
            return PadicElem.zero(p, self.val_lower_bound() + o.val_lower_bound())
        rel = min(self.prec - self.val, o.prec - o.val)
        v = self.val + o.val
        unit = (self.unit * o.unit) % p**rel
        return PadicElem.make(p, v, unit, v + rel)

    __rmul__ = __mul__

    def inverse(self) -> "PadicElem":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero-to-precision element")
        p = self.prime
        rel = self.prec - self.val
        unit = pow(self.unit, -1, p**rel)
        return PadicElem.make(p, -self.val, unit, -self.val + rel)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.mul_exact(Fraction(1) / Fraction(other))
        return self * self._check(other).inverse()

    def __rtruediv__(self, other):
        return self._check(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        base, acc = self, None
        while n:
            if n & 1:
                acc = base if acc is None else acc * base
            base = base * base
            n >>= 1
        if acc is None:  # n == 0
            return PadicElem.make(self.prime, 0, 1, self.prec)
        return acc

    def reduce_prec(self, prec: int) -> "PadicElem":
        if prec >= self.prec:
            return self
        return PadicElem.make(self.prime, self.val, self.unit, prec)

    def __str__(self):
        if self.is_zero():
            return f"O({self.prime}^{self.prec})"
        return f"{self.unit}*{self.prime}^{self.val} + O({self.prime}^{self.prec})"

    # -- serialization (round-trip exact) -------------------------------------

    def to_json(self) -> dict:
        return {
            "p": self.prime,
            "val": self.val,
            "digits": self.digits(),
            "prec": self.prec,
        }

    @staticmethod
    def from_json(doc: dict) -> "PadicElem":
        p = doc["p"]
        unit = 0
        for d in reversed(doc["digits"]):
            unit = unit * p + d
        if unit == 0:
            return PadicElem.zero(p, doc["prec"])
        return PadicElem.make(p, doc["val"], unit, doc["prec"])


def same_to_prec(x: PadicElem, y: PadicElem, m: int) -> bool:
    """True when val(x - y) >= m, i.e. |x - y| <= p^-m."""
    return (x - y).val_lower_bound() >= m


def hensel_sqrt(a: PadicElem, seed: int) -> PadicElem:
    """Square root of a p-adic unit square, pinned by its residue mod p.

    The result r satisfies r^2 = a to the precision of a and r = seed mod p.
    Raises NotAUnit when val(a) != 0 and NonResidue when a is not a square
    mod p or the seed does not square to a.
    """
    p = a.prime
    require_odd_prime(p)
    if a.is_zero() or a.val != 0:
        raise NotAUnit(f"hensel_sqrt needs a unit, got valuation {a.valuation()}")
    a0 = a.unit % p
    if legendre(a0, p) != 1:
        raise NonResidue(f"{a0} is not a square mod {p}")
    seed %= p
    if seed * seed % p != a0:
        raise NonResidue(f"seed {seed} does not square to {a0} mod {p}")
    m = a.prec
    target = a.unit % p**m
    x, k = seed, 1
    while k < m:
        k = min(2 * k, m)
        mod = p**k
        # Newton step x <- (x + a/x) / 2 keeps the residue mod p fixed
        x = (x + target * pow(x, -1, mod)) * pow(2, -1, mod) % mod
    return PadicElem.make(p, 0, x, m)


def canonical_sqrt_D(D: int, p: int, prec: int) -> PadicElem:
    """The square root of D in Qp congruent to an element of F_p^+ mod p.

    Requires (D/p) = 1; raises NotSplit otherwise.  F_p^+ = {1,...,(p-1)/2}.
    """
    require_odd_prime(p)
    if legendre(D, p) != 1:
        raise NotSplit(f"({D}/{p}) != 1")
    s = next(t for t in range(1, p) if t * t % p == D % p)
    seed = min(s, p - s)
    return hensel_sqrt(PadicElem.from_int(D, p, prec), seed)


# ---------------------------------------------------------------------------
# Qp(sqrt(u)), unramified quadratic extension
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadExtElem:
    """Element a + b*sqrt(u) of Qp(sqrt(u)), u a fixed nonresidue unit.

    Represents a point of the p-adic upper half-plane when b != 0 to working
    precision.  Valuation is min(val a, val b) since the extension is
    unramified.
    """

    prime: int
    u: int
    a: PadicElem
    b: PadicElem

    @staticmethod
    def from_pair(x, y, p: int, prec: int) -> "QuadExtElem":
        u = smallest_nonresidue(p)
        return QuadExtElem(
            p, u, PadicElem.from_fraction(x, p, prec), PadicElem.from_fraction(y, p, prec)
        )

    @staticmethod
    def from_padic(x: PadicElem) -> "QuadExtElem":
        u = smallest_nonresidue(x.prime)
        return QuadExtElem(x.prime, u, x, PadicElem.zero(x.prime, x.prec))

    def _coerce(self, other) -> "QuadExtElem":
        if isinstance(other, QuadExtElem):
            if (other.prime, other.u) != (self.prime, self.u):
                raise TypeError("incompatible extension operands")
            return other
        if isinstance(other, PadicElem):
            return QuadExtElem.from_padic(other)
        return QuadExtElem(
            self.prime,
            self.u,
            PadicElem.from_fraction(Fraction(other), self.prime, self.a.prec),
            PadicElem.zero(self.prime, self.b.prec),
        )

    def __add__(self, other):
        o = self._coerce(other)
        return QuadExtElem(self.prime, self.u, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return QuadExtElem(self.prime, self.u, -self.a, -self.b)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale_exact(self, q) -> "QuadExtElem":
        return QuadExtElem(self.prime, self.u, self.a.mul_exact(q), self.b.mul_exact(q))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale_exact(other)
        o = self._coerce(other)
        return QuadExtElem(
            self.prime,
            self.u,
            self.a * o.a + self.u * (self.b * o.b),
            self.a * o.b + self.b * o.a,
        )

    __rmul__ = __mul__

    def conjugate(self) -> "QuadExtElem":
        return QuadExtElem(self.prime, self.u, self.a, -self.b)

    def norm(self) -> PadicElem:
        return self.a * self.a - self.u * (self.b * self.b)

    def is_zero(self) -> bool:
        return self.a.is_zero() and self.b.is_zero()

    def val_lower_bound(self) -> int:
        return min(self.a.val_lower_bound(), self.b.val_lower_bound())

    def valuation(self):
        if self.is_zero():
            return math.inf
        return min(self.a.valuation(), self.b.valuation())

    def inverse(self) -> "QuadExtElem":
        n = self.norm()
        if n.is_zero():
            raise ZeroDivisionError("inverse of zero-to-precision element")
        ninv = n.inverse()
        return QuadExtElem(self.prime, self.u, self.a * ninv, -self.b * ninv)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale_exact(Fraction(1) / Fraction(other))
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        acc = None
        base = self
        while n:
            if n & 1:
                acc = base if acc is None else acc * base
            base = base * base
            n >>= 1
        if acc is None:
            raise ValueError("0th power: supply explicit identity")
        return acc

    def __str__(self):
        return f"({self.a}) + ({self.b})*sqrt({self.u})"


def ext_same_to_prec(x: QuadExtElem, y: QuadExtElem, m: int) -> bool:
    d = x - y
    return d.a.val_lower_bound() >= m and d.b.val_lower_bound() >= m
