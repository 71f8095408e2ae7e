"""Exact squarefree-value counts over boxes, by two independent methods.

N(box) counts lattice points x with P(x) nonzero and squarefree.  The
factorization method tests each distinct value directly; the sieve method
evaluates sum_d mu(d) * #{x : d^2 | P(x), P(x) != 0} over the value table.
The two agree as an integer identity, so any mismatch is a bug, never a
tolerance issue.  Points with P(x) = 0 are never counted.

Also here: the comparison of exact counts against the predicted main term
2^s * P1...Ps * (truncated series), the vanishing-series density experiment,
and the power-plus-cubic asymptotic experiment with its mixed box
(Q, P, ..., P), Q = round(P^(3/k)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .boxvalues import DEFAULT_MAX_POINTS, value_counts
from .errors import GuardExceeded, PreconditionError
from .intmath import (
    TRIAL_DIVISION_LIMIT,
    factorize,
    is_prime,
    moebius_sieve,
    primes_up_to,
)
from .local_density import make_mixed_form, singular_series
from .polynomial import Box, Polynomial

METHOD_FACTORIZATION = "Factorization"
METHOD_MOEBIUS_SIEVE = "MoebiusSieve"


@dataclass
class CountReport:
    box: Box
    exact_count: int
    method: str
    zero_value_points: int
    predicted_main_term: Optional[Fraction] = None
    relative_error: Optional[Fraction] = None

    def to_json_dict(self, digits: int = 24) -> dict:
        from .fmt import decimal_string

        out = {
            "box": list(self.box.bounds),
            "exact_count": self.exact_count,
            "method": self.method,
            "zero_value_points": self.zero_value_points,
        }
        if self.predicted_main_term is not None:
            out["predicted_main_term"] = decimal_string(self.predicted_main_term, digits)
        if self.relative_error is not None:
            out["relative_error"] = decimal_string(self.relative_error, digits)
        return out


def is_squarefree(n: int) -> bool:
    """True iff |n| >= 1 and no prime square divides |n|; 0 is not squarefree."""
    n = abs(n)
    if n == 0:
        return False
    if n < 4:
        return True
    for p in primes_up_to(min(_icbrt(n), TRIAL_DIVISION_LIMIT)):
        if p * p * p > n:
            break
        if n % p == 0:
            n //= p
            if n % p == 0:
                return False
    if n < 4:
        return True
    # every remaining prime factor q of n has q^3 > n, so n is 1, q, q^2,
    # or q1*q2 -- unless trial division stopped at the 10^6 cap
    r = math.isqrt(n)
    if r * r == n:
        return False
    if n <= TRIAL_DIVISION_LIMIT**3 or is_prime(n):
        return True
    return all(e == 1 for e in factorize(n).values())


def _icbrt(n: int) -> int:
    r = int(round(n ** (1.0 / 3.0)))
    while r > 0 and r**3 > n:
        r -= 1
    while (r + 1) ** 3 <= n:
        r += 1
    return r


def count_exact(
    poly: Polynomial,
    box: Box,
    *,
    max_points: int = DEFAULT_MAX_POINTS,
    threads: int = 1,
) -> CountReport:
    """N(box) by evaluating every lattice point and factoring each distinct value."""
    counts = value_counts(poly, box, max_points=max_points, threads=threads)
    total = 0
    for value, mult in counts.items():
        if value != 0 and is_squarefree(value):
            total += mult
    return CountReport(
        box=box,
        exact_count=total,
        method=METHOD_FACTORIZATION,
        zero_value_points=counts.get(0, 0),
    )


def count_sieve(
    poly: Polynomial,
    box: Box,
    *,
    max_points: int = DEFAULT_MAX_POINTS,
    max_value: int = 10**16,
    threads: int = 1,
) -> CountReport:
    """N(box) via sum over d of mu(d) * #{x : d^2 | P(x) != 0}.

    Stores the value multiset as a sorted array and locates multiples of d^2
    by arithmetic stepping plus binary search.
    """
    counts = value_counts(poly, box, max_points=max_points, threads=threads)
    zero_points = counts.pop(0, 0)
    if not counts:
        return CountReport(box, 0, METHOD_MOEBIUS_SIEVE, zero_points)
    values = np.array(sorted(counts), dtype=np.int64)
    mults = np.array([counts[int(v)] for v in values], dtype=np.int64)
    max_abs = int(max(abs(int(values[0])), abs(int(values[-1]))))
    if max_abs > max_value:
        raise GuardExceeded(f"value range {max_abs} exceeds guard {max_value}")
    mu = moebius_sieve(math.isqrt(max_abs))
    total = 0
    for d in range(1, math.isqrt(max_abs) + 1):
        if mu[d] == 0:
            continue
        dd = d * d
        hi = max_abs // dd
        multiples = np.arange(-hi, hi + 1, dtype=np.int64) * dd
        multiples = multiples[multiples != 0]
        if multiples.size == 0:
            continue
        pos = np.searchsorted(values, multiples)
        ok = pos < values.size
        pos = pos[ok]
        hit = values[pos] == multiples[ok]
        total += mu[d] * int(mults[pos[hit]].sum())
    return CountReport(box, total, METHOD_MOEBIUS_SIEVE, zero_points)


def asymptotic_report(
    poly: Polynomial,
    box: Box,
    cutoff: int,
    *,
    max_points: int = DEFAULT_MAX_POINTS,
    threads: int = 1,
) -> CountReport:
    """count_exact plus the predicted main term 2^s * prod(P_j) * truncated series."""
    report = count_exact(poly, box, max_points=max_points, threads=threads)
    series = singular_series(poly, cutoff, max_points=max_points, threads=threads)
    predicted = Fraction(2 ** poly.num_vars * math.prod(box.bounds)) * series.truncated_value
    report.predicted_main_term = predicted
    if predicted > 0:
        report.relative_error = abs(Fraction(report.exact_count) - predicted) / predicted
    elif report.exact_count == 0:
        report.relative_error = Fraction(0)  # exact match: both vanish
    else:
        report.relative_error = None
    return report


# ---------------------------------------------------------------------------
# experiments
# ---------------------------------------------------------------------------

@dataclass
class VanishingDensityRow:
    box: Box
    exact_count: int
    density: Fraction
    sieve_bound_count: int
    sieve_bound_density: Fraction


def vanishing_density_table(
    poly: Polynomial,
    boxes: Sequence[Box],
    cutoff: int,
    *,
    series_threshold: Fraction = Fraction(1, 4),
    max_points: int = DEFAULT_MAX_POINTS,
    threads: int = 1,
) -> list[VanishingDensityRow]:
    """Densities N/points for polynomials whose truncated series (nearly) vanishes.

    Precondition: the polynomial has a fixed square divisor, or its truncated
    series value is below series_threshold.  Each row carries the exact sieve
    upper bound sum_{m | prod primes} mu(m) * #{x : m^2 | P(x) != 0}, which
    dominates the exact count as an integer identity.
    """
    series = singular_series(poly, cutoff, max_points=max_points, threads=threads)
    if not series.zero_factor_primes and series.truncated_value >= series_threshold:
        raise PreconditionError(
            f"truncated series {float(series.truncated_value):.4f} is not below "
            f"threshold {float(series_threshold):.4f} and no fixed square divisor exists"
        )
    rows = []
    primes = primes_up_to(cutoff)
    for box in boxes:
        counts = value_counts(poly, box, max_points=max_points, threads=threads)
        n_exact = sum(
            m for v, m in counts.items() if v != 0 and is_squarefree(v)
        )
        max_abs = max((abs(v) for v in counts), default=0)
        bound = 0
        for m, mu_m in _squarefree_smooth(primes, math.isqrt(max_abs) if max_abs else 0):
            mm = m * m
            c = sum(mult for v, mult in counts.items() if v != 0 and v % mm == 0)
            bound += mu_m * c
        points = box.point_count
        rows.append(
            VanishingDensityRow(
                box=box,
                exact_count=n_exact,
                density=Fraction(n_exact, points),
                sieve_bound_count=bound,
                sieve_bound_density=Fraction(bound, points),
            )
        )
    return rows


def _squarefree_smooth(primes: Sequence[int], limit: int):
    """All products m of distinct listed primes with m <= limit, as (m, mu(m))."""
    out = [(1, 1)]
    for p in primes:
        if p > limit:
            break
        out += [(m * p, -mu) for m, mu in out if m * p <= limit]
    return out


@dataclass
class MixedFormRow:
    P: int
    Q: int
    exact_count: int
    predicted: Fraction
    relative_error: Optional[Fraction]


def round_mixed_bound(P: int, k: int) -> int:
    """Q = P^(3/k) rounded to the nearest integer, computed exactly."""
    if k == 3:
        return P
    target = P**3  # Q^4 vs P^3: nearest integer root
    r = 1
    while (r + 1) ** k <= target:
        r += 1
    # choose r or r+1 by comparing (r + 1/2)^k with target
    return r if (2 * r + 1) ** k > (2**k) * target else r + 1


def mixed_form_table(
    c: int,
    k: int,
    cstar: Polynomial,
    p_values: Sequence[int],
    cutoff: int = 1000,
    *,
    max_points: int = DEFAULT_MAX_POINTS,
    threads: int = 1,
) -> list[MixedFormRow]:
    """Exact N over the mixed box (Q, P, ..., P) against 2^s*Q*P^(s-1)*series."""
    poly = make_mixed_form(c, k, cstar)
    s = poly.num_vars
    series = singular_series(poly, cutoff, max_points=max_points, threads=threads)
    rows = []
    for P in p_values:
        Q = round_mixed_bound(P, k)
        box = Box((Q,) + (P,) * (s - 1))
        report = count_exact(poly, box, max_points=max_points, threads=threads)
        predicted = Fraction(2**s * Q * P ** (s - 1)) * series.truncated_value
        rel = (
            abs(Fraction(report.exact_count) - predicted) / predicted
            if predicted > 0
            else None
        )
        rows.append(MixedFormRow(P, Q, report.exact_count, predicted, rel))
    return rows


@dataclass
class BandRow:
    lower: int
    upper: Optional[int]  # None = unbounded
    prime_count: int
    point_count: int


def mixed_form_band_diagnostic(
    c: int,
    k: int,
    cstar: Polynomial,
    P: int,
    *,
    max_points: int = DEFAULT_MAX_POINTS,
    threads: int = 1,
) -> list[BandRow]:
    """Counts sum_{U < p <= V} #{x in mixed box : p^2 | P(x) != 0} per band.

    Bands follow the diagnostic split (X, sqrt(P)], (sqrt(P), |c|Q],
    (|c|Q, P^(8/9)], (P^(8/9), inf) with X = max(2, floor(ln(P)/3)); at desk
    scale some bands are often empty, which is reported rather than patched.
    """
    poly = make_mixed_form(c, k, cstar)
    s = poly.num_vars
    Q = round_mixed_bound(P, k)
    box = Box((Q,) + (P,) * (s - 1))
    counts = value_counts(poly, box, max_points=max_points, threads=threads)
    max_abs = max((abs(v) for v in counts), default=0)
    x_low = max(2, int(math.log(P) / 3))
    edges = [
        x_low,
        math.isqrt(P),
        abs(c) * Q,
        int(P ** (8.0 / 9.0)),
        None,
    ]
    rows = []
    for lower, upper in zip(edges, edges[1:]):
        hi = upper if upper is not None else math.isqrt(max_abs)
        band_primes = [p for p in primes_up_to(max(hi, 1)) if p > lower]
        pts = 0
        for p in band_primes:
            pp = p * p
            pts += sum(m for v, m in counts.items() if v != 0 and v % pp == 0)
        rows.append(BandRow(lower, upper, len(band_primes), pts))
    return rows
