"""The Bruhat-Tits tree of PGL2(Qp) as a calculus of balls.

Vertices are (normalized) balls B(c, p^-m); an oriented edge is identified
with the clopen set U(e) in P1(Qp) of ends flowing through it, which is
either a finite ball or the complement of one (a "co-ball", containing oo).
Reversal is complementation.

Conventions pinned here:

* U(e_0) = Z_p for the standard edge e_0 (so the reverse edge carries the
  complement).
* The plus orbit Gamma.e_0 consists of the finite-ball edges of even level
  together with the co-ball edges of odd level; edge_to_matrix is defined
  exactly on that orbit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import OddOrientation, OnBoundary
from .exact_arith import QuadExtElem, val_p_fraction
from .quadforms import D_MAT, Mat2, S_MAT


def p_adic_truncate(x, p: int, m: int) -> Fraction:
    """Canonical representative of x modulo p^m: sum of digits d_i p^i, i < m."""
    x = Fraction(x)
    r = Fraction(0)
    rem = x
    while rem != 0:
        v = val_p_fraction(rem, p)
        if v >= m:
            break
        u = rem / Fraction(p) ** v
        d = u.numerator * pow(u.denominator, -1, p) % p
        r += Fraction(d) * Fraction(p) ** v
        rem = x - r
    return r


@dataclass(frozen=True)
class Ball:
    """A ball of P1(Qp): finite kind {x : val(x - center) >= level}, or the
    complement of one (co-infinite kind, containing oo)."""

    prime: int
    center: Fraction
    level: int
    co: bool = False

    @staticmethod
    def make(p: int, center, level: int, co: bool = False) -> "Ball":
        return Ball(p, p_adic_truncate(center, p, level), level, co)

    def complement(self) -> "Ball":
        return Ball(self.prime, self.center, self.level, not self.co)

    def contains(self, t) -> bool:
        """Membership of t in U; t is a Fraction or the string 'oo'."""
        if t == "oo":
            return self.co
        t = Fraction(t)
        inside = t == self.center or val_p_fraction(t - self.center, self.prime) >= self.level
        return inside != self.co

    def contains_infinity(self) -> bool:
        return self.co

    def to_json(self) -> dict:
        return {
            "center": str(self.center),
            "level": self.level,
            "coInfinite": self.co,
        }


def tree_distance(b1: Ball, b2: Ball) -> int:
    """Graph distance between two finite vertex balls.

    d = (log_p R - log_p r1) + (log_p R - log_p r2) with R the smallest ball
    containing both, R = max(r1, r2, |c1 - c2|_p).
    """
    assert not b1.co and not b2.co, "vertices are finite balls"
    assert b1.prime == b2.prime
    exps = [-b1.level, -b2.level]
    if b1.center != b2.center:
        exps.append(-val_p_fraction(b1.center - b2.center, b1.prime))
    log_r = max(exps)
    return (log_r + b1.level) + (log_r + b2.level)


def standard_vertex(p: int) -> Ball:
    return Ball.make(p, 0, 0)


def apply_matrix_ball(ball: Ball, g: Mat2) -> Ball:
    """Exact Moebius image of a ball or co-ball under g in GL2(Q)."""
    if ball.co:
        return apply_matrix_ball(ball.complement(), g).complement()
    p, m, c0 = ball.prime, ball.level, ball.center
    a, b, c, d = g.entries()
    vdet = val_p_fraction(g.det(), p)
    if c == 0:
        center = (a * c0 + b) / d
        level = m + val_p_fraction(a / d, p)
        return Ball.make(p, center, level)
    denom = c * c0 + d
    pole_inside = denom == 0 or val_p_fraction(denom, p) - val_p_fraction(c, p) >= m
    if not pole_inside:
        t = val_p_fraction(denom, p)
        center = (a * c0 + b) / denom
        return Ball.make(p, center, vdet + m - 2 * t)
    # the pole -d/c lies in the ball: the image is the complement of a ball
    # around g(oo) = a/c
    level = vdet - m - 2 * val_p_fraction(c, p) + 1
    return Ball.make(p, a / c, level, co=True)


@dataclass(frozen=True)
class TreeEdge:
    """Oriented edge of the tree, identified with its end set U(e)."""

    ball: Ball

    @property
    def prime(self) -> int:
        return self.ball.prime

    def reverse(self) -> "TreeEdge":
        return TreeEdge(self.ball.complement())

    def is_plus(self) -> bool:
        """True when the edge lies in the Gamma orbit of e_0."""
        if self.ball.co:
            return self.ball.level % 2 == 1
        return self.ball.level % 2 == 0

    def alpha(self) -> int:
        """inf of val(u - v) over U(e) (negated for co-balls): the level."""
        return -self.ball.level if self.ball.co else self.ball.level

    def apply(self, g: Mat2) -> "TreeEdge":
        return TreeEdge(apply_matrix_ball(self.ball, g))

    def to_json(self) -> dict:
        return self.ball.to_json()


def standard_edge(p: int) -> TreeEdge:
    """The standard edge e_0, with U(e_0) = Z_p."""
    return TreeEdge(Ball.make(p, 0, 0))


def _diag_p_power(p: int, n: int) -> Mat2:
    q = Fraction(p) ** n
    return Mat2(q, 0, 0, 1 / q)


def edge_to_matrix(e: TreeEdge) -> Mat2:
    """gamma in SL2(Z[1/p]) with gamma . e = e_0, for plus-oriented e.

    Well-defined up to left multiplication by Gamma_0(p).  Finite-ball edges
    of even level j map by z -> p^-j (z - c); co-ball edges of odd level use
    an extra S.  Raises OddOrientation off the plus orbit.
    """
    if not e.is_plus():
        raise OddOrientation(f"edge {e.ball} is not plus-oriented")
    p = e.prime
    j, c = e.ball.level, e.ball.center
    shift = Mat2(1, -c, 0, 1)
    if not e.ball.co:
        return _diag_p_power(p, -j // 2) * shift
    return S_MAT * _diag_p_power(p, (1 - j) // 2) * shift


def depth(z: QuadExtElem) -> int:
    """Distance from v_0 of the vertex to which z = a + b sqrt(u) reduces.

    Equivalently the smallest n with z in the affinoid of depth n.  Raises
    OnBoundary when b is zero to working precision.
    """
    if z.b.is_zero():
        raise OnBoundary("point is within working precision of P1(Qp)")
    m = z.b.valuation()
    va = z.a.val_lower_bound()
    big = max(-m, 0, -va)
    return m + 2 * big


def level_partition(p: int, n: int):
    """Disjoint edges covering P1(Qp): p^n balls a + p^n Z_p plus the p^(n-1)
    images under S of the balls b + p^n Z_p, b in p Z/p^n Z."""
    assert n >= 1
    out = [TreeEdge(Ball.make(p, a, n)) for a in range(p**n)]
    for b in range(0, p**n, p):
        out.append(TreeEdge(apply_matrix_ball(Ball.make(p, b, n), S_MAT)))
    return out


def partition_edges_to_depth(p: int, depth_max: int):
    """Union of the level partitions for n = 1..depth_max, deduplicated."""
    seen, out = set(), []
    for n in range(1, depth_max + 1):
        for e in level_partition(p, n):
            if e.ball not in seen:
                seen.add(e.ball)
                out.append(e)
    return out
