"""Bundled self-verification suites: every fast path against its oracle.

These are quick spot checks runnable from the CLI (`sqfpoly verify`); the
full grids live in the pytest suite.
"""

from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction
from typing import Callable

from . import (
    Box,
    classify,
    collision_count,
    count_exact,
    count_sieve,
    count_solutions,
    count_solutions_bruteforce,
    count_square_difference,
    count_square_progression,
    count_square_sum,
    is_scaled_linear_cube,
    make_cubes_explicit,
    parse,
    render,
    rho,
    rho_bruteforce,
    singular_series,
    substitute_unimodular,
    value_histogram,
)
from .polynomial import UnimodularMap
from .quad_diophantine import QuadInstance
from .intmath import divisor_count

Check = tuple[str, bool, str]


def _random_poly(rng: random.Random, num_vars: int, max_deg: int = 3) -> object:
    terms = {}
    for _ in range(rng.randint(1, 5)):
        exps = tuple(rng.randint(0, max_deg) for _ in range(num_vars))
        terms[exps] = rng.randint(-5, 5)
    from .polynomial import Polynomial

    terms = {e: c for e, c in terms.items() if c}
    if not terms:
        terms = {(0,) * num_vars: 1}
    return Polynomial(num_vars, terms)


def suite_poly() -> list[Check]:
    rng = random.Random(7)
    checks: list[Check] = []
    ok = True
    for _ in range(200):
        p = _random_poly(rng, rng.randint(1, 3))
        if parse(render(p), num_vars=p.num_vars) != p:
            ok = False
            break
    checks.append(("parse/render round trip (200 random)", ok, ""))

    ok = True
    for _ in range(100):
        s = rng.randint(2, 3)
        p = _random_poly(rng, s)
        u = UnimodularMap.shear(s, 2, 1, rng.randint(-2, 2) or 1)
        v = UnimodularMap.swap(s, 1, 2)
        lhs = substitute_unimodular(substitute_unimodular(p, u), v)
        rhs = substitute_unimodular(p, u @ v)
        point = tuple(rng.randint(-4, 4) for _ in range(s))
        if lhs != rhs or lhs.evaluate(point) != p.evaluate((u @ v).apply(point)):
            ok = False
            break
    checks.append(("substitution functoriality + evaluation compat", ok, ""))

    ok = True
    detail = ""
    for _ in range(150):
        s = rng.choice([2, 3])
        coeffs = {}
        monos = [e for e in itertools.product(range(4), repeat=s) if sum(e) == 3]
        for e in monos:
            coeffs[e] = rng.randint(-2, 2)
        from .polynomial import Polynomial

        p = Polynomial(s, {e: c for e, c in coeffs.items() if c})
        if not p.terms or len(p.occurring_variables()) < 2:
            continue
        q, u = make_cubes_explicit(p)
        if substitute_unimodular(p, u) != q or u.det not in (1, -1):
            ok, detail = False, render(p)
            break
        key1 = tuple(3 if i == 0 else 0 for i in range(s))
        key2 = tuple(3 if i == 1 else 0 for i in range(s))
        if q.coefficient(key1) == 0 or q.coefficient(key2) == 0:
            ok, detail = False, render(p)
            break
    checks.append(("make_cubes_explicit on random cubic forms", ok, detail))
    return checks


def suite_rho() -> list[Check]:
    checks: list[Check] = []
    corpus = [parse(t) for t in ("x1*x2", "x1^2+x2^2", "x1^3+2*x2^3")] + [
        parse("x1", num_vars=2),
        parse("4*x1", num_vars=2),
    ]
    ok = True
    detail = ""
    for p in corpus:
        for d in range(1, 21):
            a = rho(p, d).count
            b = rho_bruteforce(p, d).count
            if a != b:
                ok, detail = False, f"{render(p)} d={d}: {a} != {b}"
                break
    checks.append(("rho == rho_bruteforce, d <= 20", ok, detail))

    rng = random.Random(11)
    ok = True
    for _ in range(30):
        p = corpus[rng.randrange(len(corpus))]
        d1, d2 = rng.randint(2, 12), rng.randint(2, 12)
        if math.gcd(d1, d2) != 1:
            continue
        if rho(p, d1 * d2).count != rho(p, d1).count * rho(p, d2).count:
            ok = False
            break
    checks.append(("rho multiplicativity on coprime splits", ok, ""))
    return checks


def suite_series() -> list[Check]:
    checks: list[Check] = []
    r = singular_series(parse("x1"), 10**4)
    target = Fraction(6) / Fraction(math.pi**2).limit_denominator(10**12)
    err = abs(float(r.truncated_value) - 6 / math.pi**2)
    checks.append(
        ("series(x1) near 6/pi^2 at cutoff 1e4", err < 1e-3, f"err={err:.2e}")
    )
    r = singular_series(parse("4*x1", num_vars=2), 50)
    checks.append(
        (
            "series(4*x1) vanishes with factor prime 2",
            r.truncated_value == 0 and r.zero_factor_primes == [2],
            "",
        )
    )
    return checks


def suite_quad() -> list[Check]:
    rng = random.Random(23)
    ok = True
    detail = ""
    for _ in range(2000):
        q = QuadInstance(*(rng.randint(-3, 3) for _ in range(6)))
        bound = rng.choice([2, 4, 6])
        fast, case = count_solutions(q, bound)
        brute = count_solutions_bruteforce(q, bound)
        if fast != brute:
            ok, detail = False, f"{q.coeffs()} P={bound} case {case.tag.value}"
            break
    checks = [("count_solutions == brute force (2000 random)", ok, detail)]

    ok = True
    for _ in range(3000):
        q = QuadInstance(*(rng.randint(-4, 4) for _ in range(6)))
        classify(q)  # must never raise
    checks.append(("classification total on 3000 random instances", ok, ""))
    return checks


def suite_quadfn() -> list[Check]:
    checks: list[Check] = []
    rng = random.Random(31)
    ok = True
    for _ in range(500):
        n = rng.randint(1, 5000)
        a, b = rng.randint(1, 10), rng.randint(1, 10)
        if count_square_sum(n, a, b) > 2 * divisor_count(n):
            ok = False
            break
    checks.append(("positive square-sum count within 2*d(n)", ok, ""))

    ok = True
    for n in range(1, 30):
        for b in range(-20, 21):
            fast = count_square_progression(50, n, b)
            brute = sum(
                1
                for y in range(-50, 51)
                if n * y + b >= 0 and math.isqrt(n * y + b) ** 2 == n * y + b
            )
            if fast != brute:
                ok = False
                break
    checks.append(("square-progression fast path == brute force", ok, ""))

    ok = count_square_difference(3, 1, 1, 100) == 1
    checks.append(("square-difference spot value", ok, ""))
    return checks


def suite_sieve() -> list[Check]:
    checks: list[Check] = []
    cases = [
        (parse("x1"), Box((200,))),
        (parse("x1*x2"), Box((15, 15))),
        (parse("x1^2+x2^2"), Box((12, 12))),
        (parse("x1^3+2*x2^3"), Box((10, 10))),
        (parse("4*x1", num_vars=2), Box((9, 9))),
    ]
    ok = True
    detail = ""
    for p, box in cases:
        a = count_exact(p, box).exact_count
        b = count_sieve(p, box).exact_count
        if a != b:
            ok, detail = False, f"{render(p)} {box.bounds}: {a} != {b}"
            break
    checks.append(("count_exact == count_sieve", ok, detail))
    return checks


def suite_collisions() -> list[Check]:
    checks: list[Check] = []
    p = parse("x1^3+2*x2^3")
    hist = value_histogram(p, Box((4, 4)))
    mass_ok = sum(hist.entries.values()) == hist.total_points
    sym_ok = all(hist.entries.get(-n, 0) == m for n, m in hist.entries.items())
    checks.append(("histogram mass and odd symmetry", mass_ok and sym_ok, ""))

    m = collision_count(p, 3)
    brute = 0
    pts = [
        (x, y) for x in range(-3, 4) for y in range(-3, 4)
    ]
    vals = {pt: p.evaluate(pt) for pt in pts}
    for a in pts:
        for b in pts:
            if vals[a] == vals[b]:
                brute += 1
    checks.append(("collision count == pair brute force (P=3)", m == brute, ""))
    checks.append(("diagonal lower bound", m >= 7**2, ""))
    checks.append(
        ("degenerate form rejected", _raises(lambda: collision_count(parse("x1^3 + 3*x1^2*x2 + 3*x1*x2^2 + x2^3"), 2)), "")
    )
    return checks


def _raises(fn: Callable[[], object]) -> bool:
    try:
        fn()
    except Exception:
        return True
    return False


SUITES: dict[str, Callable[[], list[Check]]] = {
    "poly": suite_poly,
    "rho": suite_rho,
    "series": suite_series,
    "quad": suite_quad,
    "quadfn": suite_quadfn,
    "sieve": suite_sieve,
    "collisions": suite_collisions,
}


def run_suites(names: list[str]) -> bool:
    all_ok = True
    for name in names:
        for check_name, ok, detail in SUITES[name]():
            status = "PASS" if ok else "FAIL"
            suffix = f"  [{detail}]" if detail and not ok else ""
            print(f"[{status}] {name}: {check_name}{suffix}")
            all_ok = all_ok and ok
    return all_ok
