"""P1(Q) machinery: Manin continued-fraction decomposition into unimodular
pairs, extension of unimodular-pair kernels to full modular symbols, and the
weight-2k relation checker for period functions.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import EqualEndpoints, EvaluationOutsideDomain
from .quadforms import Cusp


def _convergents(x: Fraction):
    """Convergents of the floor continued fraction of x, as Cusps."""
    p0, q0 = 1, 0  # oo
    p1, q1 = None, None
    out = []
    n, d = x.numerator, x.denominator
    while d != 0:
        a = n // d
        n, d = d, n - a * d
        if p1 is None:
            p1, q1 = a, 1
        else:
            p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        out.append(Cusp.make(p1, q1))
    return out


def _path_from_infinity(x: Cusp):
    """Unimodular path oo -> x (empty when x = oo)."""
    if x.is_infinity():
        return []
    stops = [Cusp.infinity()] + _convergents(x.as_fraction())
    return list(zip(stops, stops[1:]))


def manin_decompose(r: Cusp, s: Cusp):
    """Decompose (r, s) into consecutive unimodular pairs telescoping r -> s."""
    if r == s:
        raise EqualEndpoints(f"{r} = {s}")
    path = [(b, a) for a, b in reversed(_path_from_infinity(r))]
    path += _path_from_infinity(s)
    # drop immediate backtracks ( ..., (x, oo), (oo, x), ... )
    out = []
    for pair in path:
        if out and out[-1] == (pair[1], pair[0]):
            out.pop()
        else:
            out.append(pair)
    return out


def is_unimodular(r: Cusp, s: Cusp) -> bool:
    return abs(r.n * s.d - s.n * r.d) == 1


def extend_symbol(kernel, r: Cusp, s: Cusp):
    """Telescoping sum of a unimodular-pair kernel along manin_decompose(r, s).

    The kernel is any callable on cusp pairs with values in an additive
    module; the result satisfies the modular-symbol identities by
    construction.
    """
    value = None
    for x, y in manin_decompose(r, s):
        v = kernel(x, y)
        value = v if value is None else value + v
    return value


def check_relations(phi, k: int, p: int, points, prec: int):
    """Check the weight-2k period-function relations at sample points.

    phi maps an evaluation point to a value supporting subtraction and a
    val_lower_bound() method (PSeriesValue unwrapped to QuadExtElem works).
    Relations: phi|(1+S) = 0, phi|(1+U+U^2) = 0, phi|D = phi, where the
    weight-2k action is (phi|g)(z) = (cz+d)^(-2k) phi(gz).

    Returns a report with the worst deviation exponent per relation; PASS
    means every deviation has valuation >= prec (norm <= p^-prec).
    """
    w = 2 * k
    report = {"prec": prec, "relations": {}, "pass": True}
    deviations = {"1+S": [], "1+U+U^2": [], "D": []}
    for z in points:
        try:
            fz = phi(z)
            # phi|S (z) = z^(-2k) phi(-1/z)
            dev_s = fz + (z ** (-w)) * phi(-(z.inverse()))
            # phi|U (z) = (1-z)^(-2k) phi(1/(1-z)),  U = [[0,1],[-1,1]]
            one_minus = 1 - z
            dev_u = (
                fz
                + (one_minus ** (-w)) * phi(one_minus.inverse())
                + (z ** (-w)) * phi((z - 1) * z.inverse())
            )
            # phi|D (z) = p^(2k) phi(p^2 z)
            dev_d = (p**w) * phi((p * p) * z) - fz
        except ZeroDivisionError as exc:
            raise EvaluationOutsideDomain(str(exc))
        deviations["1+S"].append(dev_s)
        deviations["1+U+U^2"].append(dev_u)
        deviations["D"].append(dev_d)
    for name, devs in deviations.items():
        worst = min(d.val_lower_bound() for d in devs)
        ok = worst >= prec
        report["relations"][name] = {"min_valuation": worst, "pass": ok}
        report["pass"] = report["pass"] and ok
    return report
