"""Integer solutions of a*x^2 + b*x*y + c*y^2 + d*x + e*y + f = 0 in a box.

The classifier splits instances into nine mutually exclusive cases driven by
the invariants Delta = 4ac - b^2 and Theta = 4acf + ebd - ae^2 - cd^2 - fb^2:

    I     (a^2+c^2)*Delta*Theta != 0          conic with finitely many points
    II    quadratic part, Delta != 0, Theta = 0, -Delta not a square: <= 1 point
    III   a = c = 0, Delta*Theta != 0         hyperbola (bx+e)(by+d) = ed - bf
    IV    quadratic part, Delta != 0, Theta = 0, -Delta = m^2: line pair
    V     Delta = 0, no linear leak, constant not a square: empty
    VI    Delta = 0, linear leak l != 0       square in a progression
    VII   Delta = 0, no leak, constant a square: line pair
    VIII  a = c = Theta = 0, b != 0           degenerate hyperbola
    IX    everything else (plane, single line, or empty)

Counting dispatches per case to an exact fast path; a plain double-loop
brute force is kept alongside as the oracle.  All square tests use
math.isqrt -- no floating point anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Iterator, Optional

from .intmath import divisor_count, divisors, is_perfect_square, largest_square_divisor

__all__ = [
    "CaseTag",
    "QuadCase",
    "QuadInstance",
    "classify",
    "count_solutions",
    "count_solutions_bruteforce",
    "solutions",
    "solutions_bruteforce",
    "count_square_sum",
    "count_square_difference",
    "count_square_progression",
    "divisor_count",
    "largest_square_divisor",
]


class CaseTag(Enum):
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"
    V = "V"
    VI = "VI"
    VII = "VII"
    VIII = "VIII"
    IX = "IX"


@dataclass(frozen=True)
class QuadInstance:
    a: int
    b: int
    c: int
    d: int
    e: int
    f: int

    @cached_property
    def delta(self) -> int:
        return 4 * self.a * self.c - self.b * self.b

    @cached_property
    def theta(self) -> int:
        a, b, c, d, e, f = self.a, self.b, self.c, self.d, self.e, self.f
        return 4 * a * c * f + e * b * d - a * e * e - c * d * d - f * b * b

    def coeffs(self) -> tuple[int, int, int, int, int, int]:
        return (self.a, self.b, self.c, self.d, self.e, self.f)

    def swapped(self) -> "QuadInstance":
        """The instance with the roles of x and y exchanged."""
        return QuadInstance(self.c, self.b, self.a, self.e, self.d, self.f)

    def value(self, x: int, y: int) -> int:
        return (
            self.a * x * x
            + self.b * x * y
            + self.c * y * y
            + self.d * x
            + self.e * y
            + self.f
        )


@dataclass(frozen=True)
class QuadCase:
    tag: CaseTag
    # which of the twin Delta = 0 conditions fired: "a" or "c" (cases V-VII and VI)
    branch: Optional[str] = None
    l: Optional[int] = None  # case VI: the linear leak 2ae-bd (or 2cd-be)
    k: Optional[int] = None  # case VI: largest k with k^2 | |l|
    m: Optional[int] = None  # case IV: m with m^2 = -Delta


def classify(q: QuadInstance) -> QuadCase:
    """Assign the unique applicable case; total on all integer instances."""
    a, b, c, d, e, f = q.coeffs()
    delta, theta = q.delta, q.theta

    if a == 0 and c == 0:
        if b != 0:  # delta = -b^2 != 0
            return QuadCase(CaseTag.III) if theta != 0 else QuadCase(CaseTag.VIII)
        return QuadCase(CaseTag.IX)  # delta = theta = 0: linear equation

    if delta != 0:
        if theta != 0:
            return QuadCase(CaseTag.I)
        if is_perfect_square(-delta):
            return QuadCase(CaseTag.IV, m=math.isqrt(-delta))
        return QuadCase(CaseTag.II)

    # delta = 0 with a quadratic part present; prefer the a-branch
    if a != 0:
        branch = "a"
        leak = 2 * a * e - b * d
        disc = d * d - 4 * a * f
    else:
        branch = "c"
        leak = 2 * c * d - b * e
        disc = e * e - 4 * c * f
    if leak != 0:
        return QuadCase(
            CaseTag.VI, branch=branch, l=leak, k=largest_square_divisor(abs(leak))
        )
    if is_perfect_square(disc):
        return QuadCase(CaseTag.VII, branch=branch)
    return QuadCase(CaseTag.V, branch=branch)


# ---------------------------------------------------------------------------
# solution enumeration per case
# ---------------------------------------------------------------------------

def _signed_divisors(n: int) -> list[int]:
    ds = divisors(abs(n))
    return [u for d in ds for u in (d, -d)]


def _iter_degenerate(q: QuadInstance, bound: int) -> Iterator[tuple[int, int]]:
    """Cases with a = c = 0."""
    b, d, e, f = q.b, q.d, q.e, q.f
    if b != 0:
        # b*(bxy + dx + ey + f) = (bx+e)(by+d) + bf - ed = 0
        k = e * d - b * f
        if k != 0:  # case III
            for u in _signed_divisors(k):
                xn, yn = u - e, k // u - d
                if xn % b == 0 and yn % b == 0:
                    x, y = xn // b, yn // b
                    if abs(x) <= bound and abs(y) <= bound:
                        yield (x, y)
            return
        # case VIII: (bx+e)(by+d) = 0
        x0 = -e // b if e % b == 0 else None
        y0 = -d // b if d % b == 0 else None
        if x0 is not None and abs(x0) > bound:
            x0 = None
        if y0 is not None and abs(y0) > bound:
            y0 = None
        for y in range(-bound, bound + 1):
            if x0 is not None:
                yield (x0, y)
        if y0 is not None:
            for x in range(-bound, bound + 1):
                if x0 is None or x != x0:
                    yield (x, y0)
        return
    # case IX: dx + ey + f = 0
    if d == 0 and e == 0:
        if f == 0:
            for x in range(-bound, bound + 1):
                for y in range(-bound, bound + 1):
                    yield (x, y)
        return
    if e == 0:
        # d != 0: vertical line x = -f/d
        if (-f) % d == 0 and abs((-f) // d) <= bound:
            x = (-f) // d
            for y in range(-bound, bound + 1):
                yield (x, y)
        return
    for y in range(-bound, bound + 1):
        rem = -(e * y + f)
        if d == 0:
            if rem == 0:
                for x in range(-bound, bound + 1):
                    yield (x, y)
            continue
        if rem % d == 0 and abs(rem // d) <= bound:
            yield (rem // d, y)


def _recover(q: QuadInstance, X: int, Y: int, bound: int) -> Optional[tuple[int, int]]:
    """Invert X = 2ax + by + d, Y = delta*y + 2ae - bd (requires a != 0, delta != 0)."""
    a, b, d, e = q.a, q.b, q.d, q.e
    yn = Y - (2 * a * e - b * d)
    if yn % q.delta:
        return None
    y = yn // q.delta
    xn = X - b * y - d
    if xn % (2 * a):
        return None
    x = xn // (2 * a)
    if abs(x) <= bound and abs(y) <= bound:
        return (x, y)
    return None


def _iter_conic(q: QuadInstance, bound: int) -> Iterator[tuple[int, int]]:
    """Cases I, II, IV via Delta*X^2 + Y^2 = -4a*Theta (needs a != 0, Delta != 0)."""
    a = q.a
    delta, theta = q.delta, q.theta
    rhs = -4 * a * theta

    if theta == 0:
        if is_perfect_square(-delta):
            # case IV: Y = +-m X, sweep y and solve for x
            m = math.isqrt(-delta)
            const = 2 * a * q.e - q.b * q.d
            for y in range(-bound, bound + 1):
                Y = delta * y + const
                if Y % m:
                    continue
                targets = {Y // m, -(Y // m)}
                for X in targets:
                    xn = X - q.b * y - q.d
                    if xn % (2 * a) == 0 and abs(xn // (2 * a)) <= bound:
                        yield (xn // (2 * a), y)
            return
        # case II: forces X = Y = 0
        sol = _recover(q, 0, 0, bound)
        if sol is not None:
            yield sol
        return

    # case I
    if delta > 0:
        if rhs <= 0:
            return  # delta*X^2 + Y^2 > 0 unless X = Y = 0, excluded by rhs != 0
        xmax = math.isqrt(rhs // delta)
        for X in range(-xmax, xmax + 1):
            rem = rhs - delta * X * X
            if rem < 0 or not is_perfect_square(rem):
                continue
            r = math.isqrt(rem)
            for Y in {r, -r}:
                sol = _recover(q, X, Y, bound)
                if sol is not None:
                    yield sol
        return

    neg = -delta
    if is_perfect_square(neg):
        # (Y - mX)(Y + mX) = rhs with rhs != 0: divisor pairs
        m = math.isqrt(neg)
        for u in _signed_divisors(rhs):
            v = rhs // u
            if (u + v) % 2:
                continue
            Y = (u + v) // 2
            Xn = v - u
            if Xn % (2 * m):
                continue
            sol = _recover(q, Xn // (2 * m), Y, bound)
            if sol is not None:
                yield sol
        return

    # Pell-type: Y^2 + neg * X^2 values are unbounded, but X is box-bounded
    xmax = 2 * abs(a) * bound + abs(q.b) * bound + abs(q.d)
    for X in range(-xmax, xmax + 1):
        rem = rhs + neg * X * X
        if rem < 0 or not is_perfect_square(rem):
            continue
        r = math.isqrt(rem)
        for Y in {r, -r}:
            sol = _recover(q, X, Y, bound)
            if sol is not None:
                yield sol


def _iter_parabolic(q: QuadInstance, bound: int) -> Iterator[tuple[int, int]]:
    """Delta = 0 with a != 0: (2ax+by+d)^2 = -2*l*y + d^2 - 4af, l = 2ae-bd."""
    a, b, d, e, f = q.a, q.b, q.d, q.e, q.f
    leak = 2 * a * e - b * d
    disc = d * d - 4 * a * f
    if leak == 0:
        if not is_perfect_square(disc):
            return  # case V: empty
        r = math.isqrt(disc)
        for y in range(-bound, bound + 1):
            for sr in {r, -r}:
                xn = sr - b * y - d
                if xn % (2 * a) == 0 and abs(xn // (2 * a)) <= bound:
                    yield (xn // (2 * a), y)
        return
    # case VI: z^2 = disc - step*y with step = 2*leak; walk z by residue class
    step = 2 * leak
    n = abs(step)
    top = disc + n * bound
    if top < 0:
        return
    zmax = math.isqrt(top)
    rdisc = disc % n
    for res in range(min(n, zmax + 1)):
        if (res * res - rdisc) % n:
            continue
        for z in range(res, zmax + 1, n):
            y = (disc - z * z) // step  # exact: z^2 = disc (mod |step|)
            if abs(y) > bound:
                continue
            for sz in {z, -z}:
                xn = sz - b * y - d
                if xn % (2 * a) == 0 and abs(xn // (2 * a)) <= bound:
                    yield (xn // (2 * a), y)


def _iter_solutions(q: QuadInstance, bound: int, case: QuadCase) -> Iterator[tuple[int, int]]:
    tag = case.tag
    if tag in (CaseTag.III, CaseTag.VIII, CaseTag.IX):
        yield from _iter_degenerate(q, bound)
        return
    if tag in (CaseTag.I, CaseTag.II, CaseTag.IV):
        if q.a != 0:
            yield from _iter_conic(q, bound)
        else:
            for y, x in _iter_conic(q.swapped(), bound):
                yield (x, y)
        return
    # V, VI, VII
    if case.branch == "a":
        yield from _iter_parabolic(q, bound)
    else:
        for y, x in _iter_parabolic(q.swapped(), bound):
            yield (x, y)


def solutions(q: QuadInstance, bound: int) -> list[tuple[int, int]]:
    """All integer solutions with |x| <= bound and |y| <= bound, sorted."""
    if bound < 1:
        raise ValueError("bound must be >= 1")
    case = classify(q)
    return sorted(_iter_solutions(q, bound, case))


def solutions_bruteforce(q: QuadInstance, bound: int) -> list[tuple[int, int]]:
    out = []
    for x in range(-bound, bound + 1):
        for y in range(-bound, bound + 1):
            if q.value(x, y) == 0:
                out.append((x, y))
    return out


def count_solutions(
    q: QuadInstance, bound: int, *, check: bool = False
) -> tuple[int, QuadCase]:
    """Exact number of integer solutions in the box, with the case tag.

    check=True re-verifies the fast path against the brute force (testing aid).
    """
    if bound < 1:
        raise ValueError("bound must be >= 1")
    case = classify(q)
    if case.tag == CaseTag.V:
        count = 0
    elif case.tag == CaseTag.IX and q.d == 0 and q.e == 0:
        count = (2 * bound + 1) ** 2 if q.f == 0 else 0
    else:
        count = sum(1 for _ in _iter_solutions(q, bound, case))
    if check:
        brute = len(solutions_bruteforce(q, bound))
        if brute != count:
            raise AssertionError(
                f"fast path disagrees with brute force on {q.coeffs()} "
                f"P={bound}: {count} != {brute}"
            )
    return count, case


def count_solutions_bruteforce(q: QuadInstance, bound: int) -> int:
    return len(solutions_bruteforce(q, bound))


# ---------------------------------------------------------------------------
# auxiliary counting functions
# ---------------------------------------------------------------------------

def count_square_sum(n: int, a: int, b: int) -> int:
    """Solutions of a*x^2 + b*y^2 = n in positive integers x, y.

    The count never exceeds 2*d(n).
    """
    if n < 1 or a < 1 or b < 1:
        raise ValueError("n, a, b must be positive")
    count = 0
    x = 1
    while a * x * x <= n - b:
        rem = n - a * x * x
        if rem % b == 0:
            yy = rem // b
            if yy >= 1 and is_perfect_square(yy):
                count += 1
        x += 1
    assert count <= 2 * divisor_count(n)
    return count


def count_square_difference(n: int, a: int, b: int, m: int) -> int:
    """Solutions of a*x^2 - b*y^2 = n in positive integers with a*x^2 <= m.

    The count never exceeds 2*d(n)*(1 + log m).
    """
    if n < 1 or a < 1 or b < 1 or m < 1:
        raise ValueError("n, a, b, m must be positive")
    count = 0
    x = 1
    while a * x * x <= m:
        rem = a * x * x - n
        if rem >= b and rem % b == 0 and is_perfect_square(rem // b):
            count += 1
        x += 1
    assert count <= 2 * divisor_count(n) * (1 + math.log(m))
    return count


def count_square_progression(bound: int, n: int, b: int) -> int:
    """Integers y in [-bound, bound] with n*y + b a perfect square.

    Walks squares z^2 = b (mod n) by residue stepping instead of scanning y.
    """
    if bound < 1 or n < 1:
        raise ValueError("bound and n must be positive")
    top = n * bound + b
    if top < 0:
        return 0
    zmax = math.isqrt(top)
    bres = b % n
    count = 0
    for res in range(min(n, zmax + 1)):
        if (res * res - bres) % n:
            continue
        for z in range(res, zmax + 1, n):
            y = (z * z - b) // n
            if -bound <= y <= bound:
                count += 1
    return count
