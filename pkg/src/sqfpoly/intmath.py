"""Integer arithmetic utilities: primes, deterministic factorization,
multiplicative functions.

Factorization follows a fixed schedule (trial division by sieved primes up to
10^6, then deterministic Miller-Rabin and Brent's cycle finder with an
increasing polynomial-constant sequence), so identical inputs always factor
identically across runs and platforms.
"""

from __future__ import annotations

import bisect
import math
import threading

from .errors import GuardExceeded

TRIAL_DIVISION_LIMIT = 10**6

# Witness set proving primality for every n < 3.3 * 10**24; beyond that the
# same fixed list is used as a (heuristic but deterministic) schedule.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)

_sieve_lock = threading.Lock()
_prime_list: list[int] = []
_prime_limit = 0


def primes_up_to(n: int) -> list[int]:
    """All primes <= n, ascending.  Backed by a cached, growing sieve."""
    global _prime_list, _prime_limit
    if n > _prime_limit:
        with _sieve_lock:
            if n > _prime_limit:
                limit = max(n, 2 * _prime_limit, 1 << 16)
                sieve = bytearray([1]) * (limit + 1)
                sieve[0] = sieve[1] = 0
                for p in range(2, math.isqrt(limit) + 1):
                    if sieve[p]:
                        sieve[p * p :: p] = bytearray(len(range(p * p, limit + 1, p)))
                _prime_list = [i for i, flag in enumerate(sieve) if flag]
                _prime_limit = limit
    lst = _prime_list
    return lst[: bisect.bisect_right(lst, n)]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41):
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int) -> int:
    """A nontrivial factor of composite odd n; deterministic c = 1, 2, ..."""
    c = 1
    while True:
        x = y = 2
        d = 1
        # Brent's cycle detection on x -> x^2 + c mod n.
        power = lam = 1
        while d == 1:
            if power == lam:
                x = y
                power *= 2
                lam = 0
            y = (y * y + c) % n
            lam += 1
            d = math.gcd(abs(x - y), n)
        if d != n:
            return d
        c += 1


def _iroot(n: int, k: int) -> int:
    """Floor of the k-th root of n >= 0."""
    if n < 2:
        return n
    if k == 1:
        return n
    if k == 2:
        return math.isqrt(n)
    r = int(round(n ** (1.0 / k)))
    while r > 0 and r**k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r


def factorize(n: int, max_cofactor: int = 1 << 128) -> dict[int, int]:
    """Prime factorization of n >= 1 as {prime: exponent}."""
    if n < 1:
        raise ValueError("factorize requires n >= 1")
    factors: dict[int, int] = {}
    m = n
    for p in primes_up_to(min(math.isqrt(m), TRIAL_DIVISION_LIMIT)):
        if p * p > m:
            break
        while m % p == 0:
            factors[p] = factors.get(p, 0) + 1
            m //= p
    if m == 1:
        return factors
    if m <= TRIAL_DIVISION_LIMIT**2:
        # no prime factor <= 10^6 survives trial division, so m is prime
        factors[m] = factors.get(m, 0) + 1
        return factors
    if m > max_cofactor:
        raise GuardExceeded(f"cofactor {m} exceeds factorization guard {max_cofactor}")
    stack = [m]
    while stack:
        v = stack.pop()
        if v == 1:
            continue
        if is_prime(v):
            factors[v] = factors.get(v, 0) + 1
            continue
        # perfect powers first: cheap and they defeat rho's worst case
        reduced = False
        for k in range(2, v.bit_length()):
            r = _iroot(v, k)
            if r > 1 and r**k == v:
                stack.extend([r] * k)
                reduced = True
                break
        if reduced:
            continue
        d = _pollard_brent(v)
        stack.append(d)
        stack.append(v // d)
    return factors


def divisor_count(n: int) -> int:
    """d(n): number of positive divisors of n >= 1."""
    result = 1
    for e in factorize(n).values():
        result *= e + 1
    return result


def divisors(n: int) -> list[int]:
    """All positive divisors of n >= 1, ascending."""
    divs = [1]
    for p, e in factorize(n).items():
        divs = [d * p**i for d in divs for i in range(e + 1)]
    return sorted(divs)


def largest_square_divisor(n: int) -> int:
    """The largest k with k^2 | n, for n >= 1."""
    k = 1
    for p, e in factorize(n).items():
        k *= p ** (e // 2)
    return k


def moebius(n: int) -> int:
    if n < 1:
        raise ValueError("moebius requires n >= 1")
    result = 1
    for e in factorize(n).values():
        if e > 1:
            return 0
        result = -result
    return result


def moebius_sieve(limit: int) -> list[int]:
    """mu(0..limit) as a list; mu[0] = 0 by convention."""
    mu = [1] * (limit + 1)
    mu[0] = 0
    for p in primes_up_to(limit):
        for i in range(p, limit + 1, p):
            mu[i] = -mu[i]
        pp = p * p
        for i in range(pp, limit + 1, pp):
            mu[i] = 0
    return mu


def is_perfect_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n
