"""Evaluation of the higher-weight rigid cocycles J_{k,D} and the RM period
functions, the involution varpi_p, the Heegner period polynomial kappa_{k,D},
closed-form annular residues at the standard edge, Res_0, and the binomial
identity underlying the residue theorem.

Truncation contract for J: with h = depth(z) and N >= 2h + ceil(M/k) layers,
every dropped layer n > N contributes norm < p^(k(2h-n)) <= p^(-M), so the
reported precision is a guarantee.  Layer n sums over the p-primitive integer
forms of discriminant D p^(2n) (clearing denominators of forms over Z[1/p]
hits each exactly once).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .bruhat_tits import depth
from .errors import BadDiscriminant, NotSplit, PoleHit
from .exact_arith import (
    PadicElem,
    QuadExtElem,
    canonical_sqrt_D,
    legendre,
    require_odd_prime,
    val_p_int,
)
from .modsym import manin_decompose
from .polys import binom_general
from .quadforms import (
    BinaryQF,
    Cusp,
    D_MAT,
    Mat2,
    T_MAT,
    _segment_matrix,
    act,
    enumerate_simple,
    intersection,
    is_square,
    linked_heegner_weights,
    padic_intersection,
    scale_p_primitive,
    s_poly,
)


@dataclass(frozen=True)
class PSeriesValue:
    """A truncated p-adic series value with a guaranteed absolute precision:
    tail plus rounding error has norm < p^(-prec)."""

    value: QuadExtElem
    prec: int
    layers: int = 0
    forms_used: int = 0

    def to_json(self) -> dict:
        return {
            "value": {"a": self.value.a.to_json(), "b": self.value.b.to_json()},
            "prec": self.prec,
            "layers": self.layers,
            "forms_used": self.forms_used,
        }


@dataclass(frozen=True)
class KappaPoly:
    """Polynomial of degree <= 2k-2 over Qp with its defining parameters."""

    coeffs: tuple
    k: int
    D: int
    p: int
    r: Cusp
    s: Cusp

    def degree_bound(self) -> int:
        return 2 * self.k - 2

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "D": self.D,
            "p": self.p,
            "pair": [str(self.r), str(self.s)],
            "coeffs": [c.to_json() for c in self.coeffs],
        }


def _validate_jkd_args(k: int, D: int, p: int) -> None:
    require_odd_prime(p)
    if k < 1 or k % 2 == 0:
        raise BadDiscriminant(f"k must be odd and >= 1, got {k}")
    if D <= 0 or D % 4 not in (0, 1):
        raise BadDiscriminant(f"D = {D} is not a positive discriminant")
    if is_square(D):
        raise BadDiscriminant(f"D = {D} is a square")


def eval_J(
    k: int,
    D: int,
    p: int,
    r: Cusp,
    s: Cusp,
    z: QuadExtElem,
    prec: int,
    extra_layers: int = 0,
) -> PSeriesValue:
    """Truncated evaluation of J_{k,D}{r,s}(z) to absolute precision p^-prec.

    Sums layers n = 0..N of forms of discriminant D p^(2n) linked to (r, s),
    weighted by their intersection numbers, with N = 2 depth(z) + ceil(prec/k)
    (+ extra_layers, for stability tests).
    """
    _validate_jkd_args(k, D, p)
    h = depth(z)
    n_layers = 2 * h + max(1, math.ceil(prec / k)) + extra_layers
    seg_invs = [
        _segment_matrix(x, y).inverse() for x, y in manin_decompose(r, s)
    ]
    z2 = z * z
    total = None
    forms_used = 0
    arith_floor = None
    for n in range(n_layers + 1):
        disc = D * p ** (2 * n)
        layer = None
        for ginv in seg_invs:
            for Q0 in enumerate_simple(disc):
                if n >= 1 and Q0.content() % p == 0:
                    continue
                sign = 1 if Q0.a > 0 else -1  # intersection with (0, oo)
                Q = act(Q0, ginv)
                qz = Q.a * z2 + Q.b * z + Q.c
                qprec = min(qz.a.prec, qz.b.prec)
                if qz.is_zero() or qz.valuation() >= qprec - 2 * k:
                    raise PoleHit(f"{Q} vanishes at z to working precision")
                term = sign * qz.inverse() ** k
                layer = term if layer is None else layer + term
                forms_used += 1
        if layer is not None:
            contrib = p ** (n * k) * layer
            total = contrib if total is None else total + contrib
    if total is None:
        total = QuadExtElem.from_padic(PadicElem.zero(p, prec))
    tail_exp = k * (n_layers + 1 - 2 * h)
    arith_floor = min(total.a.prec, total.b.prec)
    return PSeriesValue(total, min(tail_exp, arith_floor), n_layers, forms_used)


def j_handle(k: int, D: int, p: int, r: Cusp, s: Cusp, prec: int):
    """Callable z -> J_{k,D}{r,s}(z) as a bare QuadExtElem, for relation checks."""

    def phi(z: QuadExtElem) -> QuadExtElem:
        return eval_J(k, D, p, r, s, z, prec).value

    return phi


def varpi(phi, k: int, p: int):
    """The involution (varpi phi)(z) = -p^k phi(p z) on weight-2k handles."""

    def out(z):
        return -(p**k) * phi(p * z)

    return out


# ---------------------------------------------------------------------------
# RM period functions phi_tau
# ---------------------------------------------------------------------------

def _power_matrix(m: Mat2, e: int) -> Mat2:
    out = Mat2.identity()
    base = m if e >= 0 else m.inverse()
    for _ in range(abs(e)):
        out = out * base
    return out


def orbit_layer_classes(Q0: BinaryQF, p: int, n_max: int):
    """SL2(Z)-classes of each discriminant layer D0 p^(2n) meeting the
    Gamma = SL2(Z[1/p]) orbit of Q0, for n = 0..n_max.

    Gamma is generated by SL2(Z) and D = diag(p, 1/p), so the orbit is a
    union of SL2(Z)-classes connected by normalized D-moves.  The D-image
    class of Q|T^m depends on m only mod p^2 (D^-1 T^(p^2) D = T), so each
    class has finitely many D-neighbours; this walks that finite graph.
    """
    from .quadforms import class_key, reduction_cycle

    dmat, dinv = D_MAT(p), D_MAT(p).inverse()
    start = scale_p_primitive(Q0, p)
    d0 = start.disc()
    layers = {n: set() for n in range(n_max + 1)}
    layers[0].add(class_key(start))
    frontier = [(0, class_key(start))]
    seen = {(0, class_key(start))}
    while frontier:
        n, key = frontier.pop()
        for member in reduction_cycle(key):
            for m in range(p * p):
                F = act(member, _power_matrix(T_MAT, m))
                for g in (dmat, dinv):
                    R = scale_p_primitive(act(F, g), p)
                    v = val_p_int(R.disc() // d0, p)
                    assert v % 2 == 0
                    n2 = v // 2
                    if n2 > n_max:
                        continue
                    node = (n2, class_key(R))
                    if node not in seen:
                        seen.add(node)
                        layers[n2].add(node[1])
                        frontier.append(node)
    return layers


def orbit_simple_forms(Q0: BinaryQF, p: int, disc_bound: int):
    """All simple forms in the Gamma-orbit of Q0 with disc <= disc_bound,
    grouped by layer n (disc = D0 p^(2n))."""
    from .quadforms import class_key

    start = scale_p_primitive(Q0, p)
    d0 = start.disc()
    if disc_bound < d0:
        return {}
    n_max = 0
    while d0 * p ** (2 * (n_max + 1)) <= disc_bound:
        n_max += 1
    layer_classes = orbit_layer_classes(Q0, p, n_max)
    out = {}
    for n in range(n_max + 1):
        disc = d0 * p ** (2 * n)
        keys = layer_classes[n]
        if not keys:
            continue
        forms = [
            Q
            for Q in enumerate_simple(disc)
            if (n == 0 or Q.content() % p != 0) and class_key(Q) in keys
        ]
        if forms:
            out[n] = forms
    return out


def eval_phi_tau(
    k: int,
    Q0: BinaryQF,
    p: int,
    z: QuadExtElem,
    disc_bound: int,
    prec_request: int = 0,
) -> PSeriesValue:
    """Truncated RM period function phi_tau(z) for tau the first root of Q0.

    Sums (gamma_Q.(0,oo)) D_Q^(k/2) Q(z,1)^(-k) over the simple forms of the
    Gamma-orbit of Q0 with disc <= disc_bound, where D_Q^(k/2) is realized as
    sqrt(D0)^k p^(nk) with the canonical p-adic root of the base discriminant
    D0 (required split and prime to p).
    """
    require_odd_prime(p)
    if k < 1 or k % 2 == 0:
        raise BadDiscriminant(f"k must be odd, got {k}")
    if not Q0.is_primitive():
        raise BadDiscriminant(f"{Q0} is not primitive")
    d0 = Q0.disc()
    if d0 <= 0 or is_square(d0):
        raise BadDiscriminant(f"disc {d0} not positive nonsquare")
    if d0 % p == 0:
        raise NotSplit(f"base discriminant {d0} must be prime to p")
    h = depth(z)
    if disc_bound < d0:
        return PSeriesValue(
            QuadExtElem.from_padic(PadicElem.zero(p, 1)), -2 * h * k, 0, 0
        )
    wp = max(prec_request, 1) + 2 * h * k + 3 * k + 8
    sqrt_d0 = canonical_sqrt_D(d0, p, wp)
    rootk = sqrt_d0**k
    z2 = z * z
    total = None
    used = 0
    n_max = 0
    zero_c, oo_c = Cusp.make(0), Cusp.infinity()
    for n, forms in sorted(orbit_simple_forms(Q0, p, disc_bound).items()):
        n_max = max(n_max, n)
        for Q in forms:
            w = intersection(Q, zero_c, oo_c)
            if w == 0:
                continue
            qz = Q.a * z2 + Q.b * z + Q.c
            qprec = min(qz.a.prec, qz.b.prec)
            if qz.is_zero() or qz.valuation() >= qprec - 2 * k:
                raise PoleHit(f"{Q} vanishes at z to working precision")
            term = (w * p ** (n * k)) * (rootk * qz.inverse() ** k)
            total = term if total is None else total + term
            used += 1
    if total is None:
        total = QuadExtElem.from_padic(PadicElem.zero(p, wp))
    tail_exp = k * (n_max + 1 - 2 * h)
    arith = min(total.a.prec, total.b.prec)
    return PSeriesValue(total, min(tail_exp, arith), n_max, used)


def phi_tau_handle(k, Q0, p, disc_bound, prec_request=0):
    def phi(z):
        return eval_phi_tau(k, Q0, p, z, disc_bound, prec_request).value

    return phi


# ---------------------------------------------------------------------------
# kappa and the residue map
# ---------------------------------------------------------------------------


def kappa_exact(k: int, D: int, p: int, r: Cusp, s: Cusp):
    """kappa_{k,D}{r,s} as (integer coefficients, rational factor): the
    polynomial equals factor * coeffs / sqrt(D) with the canonical p-adic
    root."""
    _validate_jkd_args(k, D, p)
    coeffs = s_poly(k, D, p, r, s)
    factor = Fraction(comb(2 * k - 2, k - 1), D ** (k - 1))
    return coeffs, factor


def kappa(k: int, D: int, p: int, r: Cusp, s: Cusp, prec: int) -> KappaPoly:
    """The Heegner period polynomial kappa_{k,D}{r,s} over Qp."""
    coeffs, factor = kappa_exact(k, D, p, r, s)
    sqrt_d = canonical_sqrt_D(D, p, prec)
    inv_root = sqrt_d.inverse()
    out = tuple(
        PadicElem.from_fraction(factor * c, p, prec) * inv_root for c in coeffs
    )
    return KappaPoly(out, k, D, p, r, s)


def annular_residue(
    Q: BinaryQF, i: int, k: int, p: int, prec: int, sqrtD: PadicElem = None
) -> PadicElem:
    """Res_{e_0}(z^i Q(z,1)^(-k) dz), the annular residue at the standard
    edge.

    Vanishes unless Q is a Heegner form (p | a) with p not dividing disc(Q);
    in the nonvanishing case this is the residue at the root inside the
    standard annulus:

        sum_l C(i,l) C(2k-2-l, k-1) (-1)^l r_in^(i-l) a^(-k) (a/sd)^(2k-1-l)

    with sd = (gamma_Q.e_0) sqrt(D) and r_in = (-b + sd)/(2a).
    """
    assert 0 <= i <= 2 * k - 2
    require_odd_prime(p)
    if Q.a == 0 or Q.a % p != 0:
        return PadicElem.zero(p, prec)
    disc = Q.disc()
    if disc % p == 0:
        return PadicElem.zero(p, prec)
    wp = prec + k * val_p_int(Q.a, p) + 6
    if sqrtD is None or sqrtD.prec < wp:
        sqrtD = canonical_sqrt_D(disc, p, wp)
    sigma = padic_intersection(Q, p, sqrtD)
    sd = sigma * sqrtD
    a = PadicElem.from_int(Q.a, p, wp)
    r_in = (sd - Q.b) / (2 * a)
    a_over_sd = a / sd
    a_inv_k = a.inverse() ** k
    total = PadicElem.zero(p, wp)
    for l in range(0, min(i, k - 1) + 1):
        coef = comb(i, l) * comb(2 * k - 2 - l, k - 1) * (-1) ** l
        term = coef * r_in ** (i - l) * a_inv_k * a_over_sd ** (2 * k - 1 - l)
        total = total + term
    return total.reduce_prec(prec)


def res0_J(k: int, D: int, p: int, r: Cusp, s: Cusp, prec: int) -> KappaPoly:
    """Res_0 applied to J_{k,D}{r,s}: the polynomial with T^i coefficient

        C(2k-2, i) (-1)^i sum_Q (gamma_Q.(r,s)) Res_{e_0}(z^(2k-2-i)/Q(z,1)^k)

    over Heegner forms Q of discriminant D linked to (r, s).  Only the n = 0
    layer of the form expansion contributes: every layer n >= 1 has p | disc
    and residue zero.
    """
    _validate_jkd_args(k, D, p)
    if legendre(D, p) != 1:
        raise NotSplit(f"({D}/{p}) != 1")
    weights = linked_heegner_weights(D, p, r, s)
    need = prec + 6
    for Q in weights:
        if Q.c != 0:
            need = max(need, val_p_int(4 * Q.a * Q.c, p) + 2, prec + k * val_p_int(Q.a, p) + 6)
    sqrt_d = canonical_sqrt_D(D, p, need)
    w = 2 * k - 2
    coeffs = []
    for i in range(w + 1):
        acc = PadicElem.zero(p, prec)
        for Q, wt in sorted(weights.items()):
            acc = acc + wt * annular_residue(Q, w - i, k, p, prec, sqrt_d)
        coeffs.append((comb(w, i) * (-1) ** i) * acc)
    return KappaPoly(tuple(c.reduce_prec(prec) for c in coeffs), k, D, p, r, s)


def binomial_identity_check(k: int, i: int, l: int) -> bool:
    """Exact check of the binomial identity that closes the residue theorem:

    C(2k-2,k-1) sum_t C(k-1,t) C(k-1,2k-2-i-t) C(i+t-k+1,l)
        = C(2k-2,i) C(i,l) C(2k-2-l,k-1),

    with C(n,j) = 0 for j < 0 and the falling-factorial extension for n < 0
    (those terms are always paired with a vanishing classical factor).
    """
    assert k >= 1 and 0 <= i <= 2 * k - 2 and l >= 0
    lhs = comb(2 * k - 2, k - 1) * sum(
        comb(k - 1, t)
        * (comb(k - 1, 2 * k - 2 - i - t) if 0 <= 2 * k - 2 - i - t <= k - 1 else 0)
        * binom_general(i + t - k + 1, l)
        for t in range(0, 2 * k - 2 - i + 1)
    )
    rhs = (
        comb(2 * k - 2, i)
        * (comb(i, l) if l <= i else 0)
        * (comb(2 * k - 2 - l, k - 1) if 2 * k - 2 - l >= 0 else 0)
    )
    return lhs == rhs
