"""The complex side: exact partial fractions over Q(sqrt(D)), closed-form
geodesic period integrals, the odd period polynomial, and assembly of the
generating-series coefficients.

The closed form for the geodesic integral is

    int_r^s z^i / ((z-r1)^k (z-r2)^k) dz  =  G - pi*sqrt(-1) * iota * A_1,

where iota is the intersection number of the geodesic of Q with (r, s), A_1
the simple-pole coefficient at the first root, and G the real antiderivative
difference of the partial-fraction expansion.  The coefficient pi (rather
than the 3*pi carried by period_polynomial's normalization) is forced by the
quadrature oracle; the two-path comparison measures and reports the
resulting constant-factor discrepancy instead of hiding it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .errors import EndpointIsRoot, SquareDiscriminant
from .exact_arith import QuadFieldElem, canonical_sqrt_D, legendre, val_p_int
from .polys import linear_pow, poly_add, poly_mul, poly_scale
from .quadforms import BinaryQF, Cusp, intersection, is_square, padic_intersection, s_poly


@dataclass(frozen=True)
class ComplexVal:
    """A complex double with a pessimistic absolute error estimate."""

    re: float
    im: float
    err: float = 0.0

    def as_complex(self) -> complex:
        return complex(self.re, self.im)

    def __add__(self, other: "ComplexVal") -> "ComplexVal":
        return ComplexVal(self.re + other.re, self.im + other.im, self.err + other.err)

    def __neg__(self) -> "ComplexVal":
        return ComplexVal(-self.re, -self.im, self.err)

    def scale(self, c: complex) -> "ComplexVal":
        z = self.as_complex() * c
        return ComplexVal(z.real, z.imag, self.err * abs(c))


def _roots(Q: BinaryQF):
    d = Q.disc()
    if d <= 0 or is_square(d):
        raise SquareDiscriminant(f"disc {d} is not positive nonsquare")
    two_a = Fraction(2 * Q.a)
    r1 = QuadFieldElem(d, Fraction(-Q.b) / two_a, 1 / two_a)
    r2 = QuadFieldElem(d, Fraction(-Q.b) / two_a, -1 / two_a)
    return r1, r2


def partial_fraction(Q: BinaryQF, i: int, k: int):
    """Exact coefficients (A_1..A_k, B_1..B_k) in Q(sqrt(disc)) of

        z^i / ((z-r1)^k (z-r2)^k) = sum_l A_l/(z-r1)^l + B_l/(z-r2)^l.

    A_l = sum_j C(i,j) r1^(i-j) C(2k-j-l-1, k-1) (-1)^k / (r2-r1)^(2k-j-l);
    B_l is its Galois conjugate.
    """
    assert 0 <= i <= 2 * k - 2 and k >= 1
    r1, r2 = _roots(Q)
    dinv = (r2 - r1).inverse()
    sign = (-1) ** k
    a_list = []
    for l in range(1, k + 1):
        acc = QuadFieldElem(Q.disc(), 0, 0)
        for j in range(0, min(i, k - l) + 1):
            coef = comb(i, j) * comb(2 * k - j - l - 1, k - 1) * sign
            acc = acc + coef * r1 ** (i - j) * dinv ** (2 * k - j - l)
        a_list.append(acc)
    b_list = [a.conjugate() for a in a_list]
    return a_list, b_list


def partial_fraction_identity_holds(Q: BinaryQF, i: int, k: int) -> bool:
    """Exact oracle: clearing denominators reproduces z^i as a polynomial."""
    r1, r2 = _roots(Q)
    a_list, b_list = partial_fraction(Q, i, k)
    one = QuadFieldElem(Q.disc(), 1, 0)
    lhs = [QuadFieldElem(Q.disc(), 0, 0)] * (2 * k)
    for l in range(1, k + 1):
        t1 = poly_mul(linear_pow(one, -r1, k - l), linear_pow(one, -r2, k))
        t2 = poly_mul(linear_pow(one, -r2, k - l), linear_pow(one, -r1, k))
        lhs = poly_add(lhs, poly_add(poly_scale(a_list[l - 1], t1), poly_scale(b_list[l - 1], t2)))
    want = [QuadFieldElem(Q.disc(), int(j == i), 0) for j in range(len(lhs))]
    return all((x - y).x == 0 and (x - y).y == 0 for x, y in zip(lhs, want))


def closed_geodesic_integral(Q: BinaryQF, i: int, k: int, r, s) -> ComplexVal:
    """int over the upper half-plane geodesic from r to s of
    z^i / ((z-r1)^k (z-r2)^k) dz, in closed form.

    Endpoints are rationals; raises EndpointIsRoot when Q vanishes at one.
    """
    r, s = Fraction(r), Fraction(s)
    if Q.eval_pair(r.numerator, r.denominator) == 0 or Q.eval_pair(s.numerator, s.denominator) == 0:
        raise EndpointIsRoot(f"{Q} vanishes at an endpoint")
    a_list, b_list = partial_fraction(Q, i, k)
    r1, r2 = (x.to_float() for x in _roots(Q))
    rf, sf = float(r), float(s)
    g_val = 0.0
    size = 0.0
    for l in range(2, k + 1):
        al, bl = a_list[l - 1].to_float(), b_list[l - 1].to_float()
        t = al / (1 - l) * ((sf - r1) ** (1 - l) - (rf - r1) ** (1 - l))
        t += bl / (1 - l) * ((sf - r2) ** (1 - l) - (rf - r2) ** (1 - l))
        g_val += t
        size += abs(t)
    a1, b1 = a_list[0].to_float(), b_list[0].to_float()
    g_val += a1 * math.log(abs((sf - r1) / (rf - r1)))
    g_val += b1 * math.log(abs((sf - r2) / (rf - r2)))
    size += abs(a1) + abs(b1)
    iota = intersection(Q, Cusp.make(r), Cusp.make(s))
    return ComplexVal(g_val, -math.pi * iota * a1, 1e-12 * (size + 1.0))


def geodesic_quadrature(Q: BinaryQF, i: int, k: int, r, s, epsabs: float = 1e-10):
    """Adaptive quadrature of the geodesic integral (the oracle for the
    closed form), over the semicircle parameterized by angle."""
    from scipy.integrate import quad

    r, s = float(r), float(s)
    c, rad = (r + s) / 2.0, abs(s - r) / 2.0
    th0, th1 = (math.pi, 0.0) if r < s else (0.0, math.pi)
    r1, r2 = (x.to_float() for x in _roots(Q))

    def integrand(theta, part):
        z = complex(c + rad * math.cos(theta), rad * math.sin(theta))
        dz = complex(-rad * math.sin(theta), rad * math.cos(theta))
        val = z**i / ((z - r1) ** k * (z - r2) ** k) * dz
        return val.real if part == 0 else val.imag

    re, re_err = quad(integrand, th0, th1, args=(0,), epsabs=epsabs, limit=400)
    im, im_err = quad(integrand, th0, th1, args=(1,), epsabs=epsabs, limit=400)
    return ComplexVal(re, im, re_err + im_err)


def heegner_forms_by_height(D: int, p: int, height: int):
    """All Heegner forms [a,b,c] of discriminant D with max(|a|,|c|) <= height."""
    out = []
    for a in range(-height, height + 1):
        if a == 0 or a % p != 0:
            continue
        bmax = math.isqrt(D + 4 * abs(a) * height)
        for b in range(-bmax, bmax + 1):
            if (b * b - D) % (4 * a) != 0:
                continue
            c = (b * b - D) // (4 * a)
            if abs(c) <= height:
                out.append(BinaryQF(a, b, c))
    return sorted(out)


def period_polynomial(k: int, D: int, p: int, r: Cusp, s: Cusp):
    """kappa-bar via the reported closed constant: ascending complex
    coefficients of 3 pi sqrt(-1) C(2k-2,k-1) D^(1-k) / sqrt(D) * s_poly.

    The two-path verifier measures the empirical constant against this
    normalization; see two_path_report.
    """
    coeffs = s_poly(k, D, p, r, s)
    const = complex(0.0, 3.0 * math.pi * comb(2 * k - 2, k - 1) / (D ** (k - 1) * math.sqrt(D)))
    return [const * c for c in coeffs]


def kappabar_termwise(k: int, D: int, p: int, r: Cusp, s: Cusp, height: int):
    """kappa-bar{r,s} assembled from per-form geodesic integrals:

        sum_i C(w,i) x^(w-i) sum_Q sigma_p(Q)
            [(-1)^i a^-k I(Q; r,s) - (-a)^-k I(Q~; -r,-s)]

    over Heegner forms of disc D with height <= height, Q~ = [-a, b, -c].
    Returns (ascending coefficients, error bounds).
    """
    assert not r.is_infinity() and not s.is_infinity(), "termwise path needs finite cusps"
    rq, sq = r.as_fraction(), s.as_fraction()
    forms = heegner_forms_by_height(D, p, height)
    need = 6
    for Q in forms:
        if Q.c != 0:
            need = max(need, val_p_int(4 * Q.a * Q.c, p) + 2)
    sqrt_d = canonical_sqrt_D(D, p, need)
    w = 2 * k - 2
    coeffs = [0j] * (w + 1)
    errs = [0.0] * (w + 1)
    for Q in forms:
        sigma = padic_intersection(Q, p, sqrt_d)
        qt = BinaryQF(-Q.a, Q.b, -Q.c)
        ak = float(Q.a) ** (-k)
        for i in range(w + 1):
            i1 = closed_geodesic_integral(Q, i, k, rq, sq)
            i2 = closed_geodesic_integral(qt, i, k, -rq, -sq)
            bracket = ((-1) ** i * ak) * i1.as_complex() - ((-ak)) * i2.as_complex()
            coeffs[w - i] += comb(w, i) * sigma * bracket
            errs[w - i] += comb(w, i) * abs(ak) * (i1.err + i2.err)
    return coeffs, errs


def two_path_report(k: int, D: int, p: int, r: Cusp, s: Cusp, height: int, tol: float = 1e-5):
    """Compare period_polynomial (closed constant x s_poly) against the
    term-by-term integral assembly and report the measured constant factor.

    Agreement is asserted coefficientwise after applying the single measured
    ratio; any deviation of the ratio from 1 is reported, never silently
    renormalized.
    """
    path1 = period_polynomial(k, D, p, r, s)
    path2, errs = kappabar_termwise(k, D, p, r, s, height)
    pairs = [(a, b) for a, b in zip(path1, path2) if abs(a) > 1e-12]
    if not pairs:
        return {
            "ratio": None,
            "pass": all(abs(b) <= tol for b in path2),
            "max_residual": max(map(abs, path2), default=0.0),
        }
    base = max(pairs, key=lambda t: abs(t[0]))
    ratio = base[1] / base[0]
    ratio_spread = max(abs(b / a - ratio) for a, b in pairs)
    residual = max(abs(b - ratio * a) for a, b in zip(path1, path2))
    return {
        "ratio_re": ratio.real,
        "ratio_im": ratio.imag,
        "ratio_spread": ratio_spread,
        "max_residual": residual,
        "pass": ratio_spread < tol and residual < tol,
        "constant_factor_discrepancy": abs(ratio - 1.0) > 1e-3,
        "height": height,
    }


def omega_bar_coeffs(k: int, p: int, d_max: int):
    """Skeleton of the generating series: one entry per discriminant D <=
    d_max, nonzero exactly when D is nonsquare with (D/p) = 1; nonzero
    entries carry the s_poly handle data at (0, oo) and the scale D^(k-1/2)."""
    assert k >= 3 and k % 2 == 1
    zero_c, oo_c = Cusp.make(0), Cusp.infinity()
    out = []
    for D in range(2, d_max + 1):
        if D % 4 not in (0, 1) or is_square(D):
            continue
        entry = {"D": D, "scale_num": f"D^{{{k}-1/2}}"}
        if legendre(D, p) == 1:
            entry["zero"] = False
            entry["spoly"] = s_poly(k, D, p, zero_c, oo_c)
        else:
            entry["zero"] = True
            entry["spoly"] = None
        out.append(entry)
    return out
