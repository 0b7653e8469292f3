"""Small exact-polynomial helpers (coefficient lists, ascending powers).

Coefficients are ints or Fractions; everything here is plumbing shared by the
form, cocycle and lift modules.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb


def binom_general(n: int, j: int) -> int:
    """Binomial coefficient with the falling-factorial extension.

    Zero for j < 0; for n >= 0 this agrees with math.comb (zero when j > n);
    for negative n it is the falling-factorial value n(n-1)...(n-j+1)/j!.
    """
    if j < 0:
        return 0
    if n >= 0:
        return comb(n, j)
    num = 1
    for t in range(j):
        num *= n - t
    den = 1
    for t in range(2, j + 1):
        den *= t
    assert num % den == 0
    return num // den


def poly_trim(cs):
    while cs and cs[-1] == 0:
        cs = cs[:-1]
    return list(cs)


def poly_add(a, b):
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]


def poly_neg(a):
    return [-c for c in a]


def poly_scale(s, a):
    return [s * c for c in a]


def poly_mul(a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return out


def poly_pow(a, n: int):
    out = [1]
    for _ in range(n):
        out = poly_mul(out, a)
    return out


def poly_eval(cs, x):
    """Horner evaluation; x may be Fraction, float, complex, or a field element."""
    acc = None
    for c in reversed(cs):
        acc = c if acc is None else acc * x + c
    return 0 if acc is None else acc


def linear_pow(alpha, beta, n: int):
    """Coefficients of (alpha*z + beta)^n."""
    return [comb(n, j) * alpha**j * beta ** (n - j) for j in range(n + 1)]


def weight_action(cs, mat, w: int):
    """The weight-w right action (q|g)(z) = (cz+d)^w q((az+b)/(cz+d)).

    cs are the coefficients of q, deg q <= w; mat = (a, b, c, d) with exact
    entries.  The result is again a polynomial of degree <= w.
    """
    a, b, c, d = (Fraction(t) for t in mat)
    assert len(cs) <= w + 1, "degree exceeds the weight"
    out = [Fraction(0)] * (w + 1)
    for j, q in enumerate(cs):
        if q == 0:
            continue
        term = poly_mul(linear_pow(a, b, j), linear_pow(c, d, w - j))
        for i, t in enumerate(term):
            out[i] += q * t
    return out
