"""Acceptance-suite driver: one callable per criterion, each returning a
report dict with a boolean "pass", shared by the CLI `accept` command and the
pytest acceptance module.  Tolerances are pinned here.
"""

from __future__ import annotations

import math
import random
import time
from fractions import Fraction

from .archimedean import (
    closed_geodesic_integral,
    geodesic_quadrature,
    period_polynomial,
    two_path_report,
)
from .bruhat_tits import depth
from .exact_arith import PadicElem, QuadExtElem, ext_same_to_prec, same_to_prec
from .modsym import check_relations, manin_decompose
from .padic_cocycles import (
    annular_residue,
    binomial_identity_check,
    eval_J,
    eval_phi_tau,
    kappa,
    res0_J,
)
from .polys import weight_action
from .quadforms import (
    BinaryQF,
    Cusp,
    Mat2,
    D_MAT,
    S_MAT,
    T_MAT,
    act,
    enumerate_simple,
    gamma0_elements,
    intersection,
    s_poly,
)
from .st_lift import (
    MomentTable,
    bound_check,
    res0_st_truncation,
    spoly_symbol,
    st_eval_kappa,
)

ZERO = Cusp.make(0)
ONE = Cusp.make(1)
OO = Cusp.infinity()


def _timed(fn):
    t0 = time.time()
    out = fn()
    out["seconds"] = round(time.time() - t0, 2)
    return out


def criterion_residue_identity() -> dict:
    """1. Res_0(J_{k,D}) = kappa_{k,D} coefficientwise to p^-10 at three
    parameter triples and three cusp pairs; < 60 s per triple."""

    def run():
        cases = []
        ok = True
        for (p, k, D) in [(3, 3, 13), (5, 3, 29), (3, 3, 37)]:
            t0 = time.time()
            for (r, s) in [(ZERO, OO), (ZERO, ONE), (OO, ONE)]:
                kp = kappa(k, D, p, r, s, 12)
                rj = res0_J(k, D, p, r, s, 12)
                good = all(
                    same_to_prec(a, b, 10) for a, b in zip(kp.coeffs, rj.coeffs)
                )
                ok = ok and good
                cases.append(
                    {"p": p, "k": k, "D": D, "pair": [str(r), str(s)], "pass": good}
                )
            dt = time.time() - t0
            ok = ok and dt < 60.0
        return {"criterion": 1, "name": "residue identity", "pass": ok, "cases": cases}

    return _timed(run)


def criterion_binomial_identity(k_max: int = 10) -> dict:
    """2. The binomial identity holds exactly for all k <= 10; < 5 s."""

    def run():
        t0 = time.time()
        failures = [
            (k, i, l)
            for k in range(1, k_max + 1)
            for i in range(0, 2 * k - 1)
            for l in range(0, 2 * k - 1)
            if not binomial_identity_check(k, i, l)
        ]
        dt = time.time() - t0
        return {
            "criterion": 2,
            "name": "binomial identity",
            "pass": not failures and dt < 5.0,
            "k_max": k_max,
            "failures": failures[:10],
        }

    return _timed(run)


def st_sample_points(p: int, prec: int):
    """Three evaluation points of depth <= 1: sqrt(u), 1 + p sqrt(u), 2 + sqrt(u)."""
    return [
        QuadExtElem.from_pair(0, 1, p, prec),
        QuadExtElem.from_pair(1, p, p, prec),
        QuadExtElem.from_pair(2, 1, p, prec),
    ]


def criterion_st_correspondence() -> dict:
    """3. |ST(kappa_{3,13})(z) - J_{3,13}{0,oo}(z)|_3 <= 3^-4 at N = 6 for
    three points of depth <= 1, with the gap shrinking for N = 4, 5, 6."""

    def run():
        p, k, D = 3, 3, 13
        sym = spoly_symbol(k, D, p)
        table = MomentTable(sym)
        points = st_sample_points(p, 70)
        ok = True
        rows = []
        for z in points:
            jv = eval_J(k, D, p, ZERO, OO, z, 12)
            gaps = []
            for level in (4, 5, 6):
                sv = st_eval_kappa(k, D, p, z, level, table)
                d = sv.value - jv.value
                gaps.append(min(d.a.val_lower_bound(), d.b.val_lower_bound()))
            good = gaps[-1] >= 4 and gaps[0] < gaps[1] < gaps[2]
            ok = ok and good
            rows.append({"gaps_val": gaps, "pass": good})
        return {"criterion": 3, "name": "ST correspondence", "pass": ok, "rows": rows}

    return _timed(run)


def criterion_left_inverse() -> dict:
    """4. Res_0 of the level-N ST truncation returns kappa_{3,13}{0,oo} at e_0
    to 3^-4 (the cancellation is in fact exact over Q)."""

    def run():
        p, k, D = 3, 3, 13
        sym = spoly_symbol(k, D, p)
        got = res0_st_truncation(sym, 4)
        want = list(sym.value(ZERO, OO))
        exact = got == want
        padic_ok = all(
            same_to_prec(
                PadicElem.from_fraction(a, p, 12), PadicElem.from_fraction(b, p, 12), 4
            )
            for a, b in zip(got, want)
        )
        return {
            "criterion": 4,
            "name": "left inverse",
            "pass": exact and padic_ok,
            "exact_over_Q": exact,
        }

    return _timed(run)


def criterion_distribution_bounds() -> dict:
    """5. A single constant bounds all moments to depth 4 with exponent
    (n - (k-1)) alpha(e); expected PASS."""

    def run():
        sym = spoly_symbol(3, 13, 3)
        rep = bound_check(sym, 4)
        rep.update({"criterion": 5, "name": "distribution bounds"})
        return rep

    return _timed(run)


def criterion_period_theorem(height: int = 60) -> dict:
    """6. Two-path computation of kappa-bar_{3,13}{0,1} agrees coefficientwise
    within 1e-5 up to a single measured constant factor (reported, and
    expected to differ from 1: the quadrature oracle forces pi, not 3 pi, in
    the geodesic integral); closed form vs quadrature within 1e-6 on a
    30-case matrix."""

    def run():
        rep = two_path_report(3, 13, 3, ZERO, ONE, height)
        rng = random.Random(20240613)
        worst = 0.0
        cases = 0
        pairs = [
            (Fraction(-2), Fraction(1)),
            (Fraction(0), Fraction(1)),
            (Fraction(1), Fraction(3)),
        ]
        while cases < 30:
            k = rng.choice([3, 5])
            disc = rng.choice([d for d in range(5, 100) if d % 4 in (0, 1) and not _is_sq(d)])
            forms = enumerate_simple(disc)
            Q = forms[rng.randrange(len(forms))]
            r, s = pairs[cases % 3]
            i = rng.randint(0, 2 * k - 2)
            cf = closed_geodesic_integral(Q, i, k, r, s).as_complex()
            qd = geodesic_quadrature(Q, i, k, r, s).as_complex()
            worst = max(worst, abs(cf - qd))
            cases += 1
        quad_ok = worst < 1e-6
        out = {
            "criterion": 6,
            "name": "period theorem (two-path)",
            "pass": bool(rep["pass"] and quad_ok),
            "two_path": rep,
            "quadrature_cases": cases,
            "quadrature_worst": worst,
        }
        if rep.get("constant_factor_discrepancy"):
            out["finding"] = (
                "measured path2/path1 = {:.9f}{:+.9f}i; the term-by-term integrals "
                "(quadrature-verified) carry -2*pi*sqrt(-1) where the reported closed "
                "constant carries 3*pi*sqrt(-1); reported, not renormalized".format(
                    rep["ratio_re"], rep["ratio_im"]
                )
            )
        return out

    return _timed(run)


def _is_sq(n: int) -> bool:
    r = math.isqrt(n)
    return r * r == n


def _random_cusp(rng) -> Cusp:
    if rng.random() < 0.1:
        return OO
    return Cusp.make(rng.randint(-8, 8), rng.randint(1, 8))


def _moebius_ext(g: Mat2, z: QuadExtElem) -> QuadExtElem:
    num = Fraction(g.a) * z + Fraction(g.b)
    den = Fraction(g.c) * z + Fraction(g.d)
    return num * den.inverse()


def _gamma_words(p, rng, count):
    """Words in S, T with at most one D factor (keeps image depths <= 2)."""
    out = []
    for _ in range(count):
        g = Mat2.identity()
        for _ in range(rng.randint(1, 3)):
            h = rng.choice([S_MAT, T_MAT])
            if rng.random() < 0.5:
                h = h.inverse()
            g = g * h
        if rng.random() < 0.5:
            g = g * (D_MAT(p) if rng.random() < 0.5 else D_MAT(p).inverse())
        out.append(g)
    return out


def criterion_symbol_suites(instances: int = 100, j_instances: int = 100, points: int = 10) -> dict:
    """7. Antisymmetry, the three-term identity and group-invariance checks
    for s_poly, kappa, kappa-bar (100 seeded instances each) and J (spot
    checks); the weight-2k relations for J{0,oo} and phi_tau at sample points
    with deviation < p^-8."""

    def run():
        p, k, D = 3, 3, 13
        rng = random.Random(13579)
        report = {"criterion": 7, "name": "modular-symbol suites"}
        ok = True

        # s_poly / kappa / kappa-bar: exact and float identities
        fails = 0
        for _ in range(instances):
            r, s, t = (_random_cusp(rng) for _ in range(3))
            if len({r, s, t}) < 3:
                continue
            anti = [x + y for x, y in zip(s_poly(k, D, p, r, s), s_poly(k, D, p, s, r))]
            three = [
                x + y - zc
                for x, y, zc in zip(
                    s_poly(k, D, p, r, s), s_poly(k, D, p, s, t), s_poly(k, D, p, r, t)
                )
            ]
            if any(anti) or any(three):
                fails += 1
        for g in gamma0_elements(p, 20, seed=77):
            r, s = _random_cusp(rng), _random_cusp(rng)
            if r == s:
                continue
            lhs = weight_action(
                s_poly(k, D, p, r.apply(g), s.apply(g)), g.entries(), 2 * k - 2
            )
            if [Fraction(c) for c in s_poly(k, D, p, r, s)] != lhs:
                fails += 1
        kb = period_polynomial(k, D, p, ZERO, ONE)
        kb_swap = period_polynomial(k, D, p, ONE, ZERO)
        if max(abs(a + b) for a, b in zip(kb, kb_swap)) > 1e-8:
            fails += 1
        report["polynomial_symbol_failures"] = fails
        ok = ok and fails == 0

        # J: antisymmetry, three-term, invariance spot checks
        zs = st_sample_points(p, 70)
        j_fails = 0
        for n in range(j_instances):
            z = zs[n % len(zs)]
            r, s, t = (_random_cusp(rng) for _ in range(3))
            if len({r, s, t}) < 3:
                continue
            vrs = eval_J(k, D, p, r, s, z, 6).value
            vsr = eval_J(k, D, p, s, r, z, 6).value
            vst = eval_J(k, D, p, s, t, z, 6).value
            vrt = eval_J(k, D, p, r, t, z, 6).value
            if not ext_same_to_prec(vrs, -vsr, 6):
                j_fails += 1
            if not ext_same_to_prec(vrs + vst, vrt, 6):
                j_fails += 1
        for g in _gamma_words(p, rng, 10):
            z = zs[0]
            r, s = ZERO, OO
            gz = _moebius_ext(g, z)
            den = Fraction(g.c) * z + Fraction(g.d)
            lhs = den ** (-2 * k) * eval_J(k, D, p, r.apply(g), s.apply(g), gz, 6).value
            rhs = eval_J(k, D, p, r, s, z, 6).value
            if not ext_same_to_prec(lhs, rhs, 5):
                j_fails += 1
        report["J_failures"] = j_fails
        ok = ok and j_fails == 0

        # weight-2k relations at sample points, deviation < p^-8
        pts = []
        rng2 = random.Random(2468)
        while len(pts) < points:
            a = rng2.randint(-4, 4)
            b = rng2.choice([1, 2, 4, 5])
            pts.append(QuadExtElem.from_pair(a, b, p, 90))

        def j_phi(z):
            return eval_J(k, D, p, ZERO, OO, z, 8).value

        rel_j = check_relations(j_phi, k, p, pts, 8)
        report["relations_J"] = {
            n: r["min_valuation"] for n, r in rel_j["relations"].items()
        }
        ok = ok and rel_j["pass"]

        def phi_t(z):
            # orbit slice deep enough for tail valuation >= 9 at depth(z)
            h = depth(z)
            bound = 13 * 3 ** (2 * (2 * h + 2))
            return eval_phi_tau(k, BinaryQF(1, 1, -3), p, z, bound, 9).value

        rel_p = check_relations(phi_t, k, p, pts, 8)
        report["relations_phi_tau"] = {
            n: r["min_valuation"] for n, r in rel_p["relations"].items()
        }
        ok = ok and rel_p["pass"]

        report["pass"] = ok
        return report

    return _timed(run)


def criterion_enumeration_oracles() -> dict:
    """8. enumerate_simple matches brute force for D <= 200; partial_fraction
    matches the polynomial-identity oracle; layer vanishing (residue 0 when
    p | disc) holds exhaustively for disc <= 200."""

    def run():
        from .archimedean import partial_fraction_identity_holds

        ok = True
        for disc in range(1, 201):
            if disc % 4 not in (0, 1):
                continue
            want = set()
            for a in range(-disc, disc + 1):
                if a == 0:
                    continue
                for b in range(-disc, disc + 1):
                    cc = b * b - disc
                    if cc % (4 * a) == 0:
                        c = cc // (4 * a)
                        if a * c < 0 and abs(b) <= disc:
                            want.add(BinaryQF(a, b, c))
            ok = ok and set(enumerate_simple(disc)) == want

        rng = random.Random(97)
        pf_ok = True
        for _ in range(20):
            disc = rng.choice([5, 8, 13, 29, 37, 40, 61])
            forms = enumerate_simple(disc)
            Q = forms[rng.randrange(len(forms))]
            k = rng.choice([1, 2, 3])
            i = rng.randint(0, 2 * k - 2)
            pf_ok = pf_ok and partial_fraction_identity_holds(Q, i, k)
        ok = ok and pf_ok

        vanish_ok = True
        for p in (3, 5, 7):
            for disc in range(5, 201):
                if disc % 4 not in (0, 1) or disc % p != 0 or _is_sq(disc):
                    continue
                for Q in enumerate_simple(disc):
                    if Q.a % p != 0:
                        continue
                    val = annular_residue(Q, 2, 3, p, 8)
                    if not val.is_zero():
                        vanish_ok = False
        ok = ok and vanish_ok
        return {
            "criterion": 8,
            "name": "enumeration oracles",
            "pass": ok,
            "partial_fraction_ok": pf_ok,
            "layer_vanishing_ok": vanish_ok,
        }

    return _timed(run)


ALL_CRITERIA = [
    criterion_residue_identity,
    criterion_binomial_identity,
    criterion_st_correspondence,
    criterion_left_inverse,
    criterion_distribution_bounds,
    criterion_period_theorem,
    criterion_symbol_suites,
    criterion_enumeration_oracles,
]


def run_all(echo=None):
    """Run every criterion; returns (reports, all_pass)."""
    reports = []
    ok = True
    for fn in ALL_CRITERIA:
        rep = fn()
        reports.append(rep)
        ok = ok and bool(rep["pass"])
        if echo:
            echo(
                "ACCEPT {criterion}: {status} - {name} ({seconds}s)".format(
                    criterion=rep["criterion"],
                    status="PASS" if rep["pass"] else "FAIL",
                    name=rep["name"],
                    seconds=rep["seconds"],
                )
            )
    return reports, ok
