"""Local densities rho_P(d) and the truncated singular series.

rho_P(d) counts solution vectors of P(x) = 0 (mod d) in (Z/dZ)^s.  Two
routes are provided: exhaustive enumeration over Z_d^s, and a lifting route
that factors d, counts roots modulo each prime p, lifts them to prime-power
moduli (a root with nonvanishing gradient mod p lifts to exactly p^(s-1)
solutions per level; a singular root is lifted by explicit enumeration), and
multiplies the prime-power counts together.

The truncated singular series prod_{p<=cutoff} (1 - rho(p^2)/p^(2s)) is
accumulated in fixed-point arithmetic with >= 64 fractional bits, one
floor-rounding per prime factor, with the accumulated rounding error and a
heuristic tail bound reported alongside the value.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .boxvalues import DEFAULT_MAX_POINTS
from .errors import GuardExceeded, PreconditionError
from .intmath import factorize, primes_up_to
from .polynomial import Polynomial, is_scaled_linear_cube

_CHUNK = 1 << 22
_MANY_SINGULAR = 32
# (mod-1)^2 must stay below 2^63 for vectorized int64 products
_MOD_SAFE = 3_000_000_000

METHOD_BRUTEFORCE = "BruteForce"
METHOD_HENSEL_CRT = "HenselCRT"


@dataclass(frozen=True)
class LocalDensity:
    modulus: int
    count: int
    method: str


@dataclass
class SingularSeriesReport:
    """Truncated Euler product over primes p <= cutoff.

    truncated_value is exact fixed-point (as a Fraction); it is zero exactly
    when some prime has rho(p^2) = p^(2s), i.e. a fixed square divisor.  The
    tail bound is heuristic (documented as such) and never feeds assertions.
    """

    cutoff: int
    truncated_value: Fraction
    zero_factor_primes: list[int]
    per_prime_factors: list[tuple[int, int]]
    tail_bound: Fraction
    rounding_error_bound: Fraction
    tail_bound_is_heuristic: bool = field(default=True)

    def to_json_dict(self, digits: int = 24) -> dict:
        from .fmt import decimal_string

        return {
            "cutoff": self.cutoff,
            "value": decimal_string(self.truncated_value, digits),
            "zero_factor_primes": list(self.zero_factor_primes),
            "factors": [{"p": p, "rho_p2": r} for p, r in self.per_prime_factors],
            "tail_bound": decimal_string(self.tail_bound, digits),
            "tail_bound_is_heuristic": True,
            "rounding_error_bound": decimal_string(self.rounding_error_bound, digits),
        }


# ---------------------------------------------------------------------------
# vectorized modular evaluation
# ---------------------------------------------------------------------------

def _pow_mod(base: np.ndarray, e: int, mod: int) -> np.ndarray:
    out = np.ones_like(base)
    b = base % mod
    while e:
        if e & 1:
            out = out * b % mod
        e >>= 1
        if e:
            b = b * b % mod
    return out


def _eval_terms_mod(
    terms: dict[tuple[int, ...], int], coords: list[np.ndarray], mod: int, n: int
) -> np.ndarray:
    acc = np.zeros(n, dtype=np.int64)
    for exps, coeff in terms.items():
        t = np.full(n, coeff % mod, dtype=np.int64)
        for arr, e in zip(coords, exps):
            if e:
                t = t * _pow_mod(arr, e, mod) % mod
        acc = (acc + t) % mod
    return acc


def _grid_chunks(dims: int, p: int, chunk: int):
    """Yield (coords, n) covering Z_p^dims in flat-index chunks.

    dims == 0 yields a single empty-coordinate chunk of one point.
    """
    if dims == 0:
        yield [], 1
        return
    total = p**dims
    for start in range(0, total, chunk):
        stop = min(start + chunk, total)
        idx = np.arange(start, stop, dtype=np.int64)
        coords = []
        stride = 1
        for _ in range(dims):
            coords.append(idx // stride % p)
            stride *= p
        coords.reverse()
        yield coords, stop - start


def _squeeze_terms(
    terms: dict[tuple[int, ...], int], drop_index: int
) -> dict[tuple[int, ...], int]:
    """Remove the (zero) exponent slot of a variable the terms never use."""
    j = drop_index - 1
    return {exps[:j] + exps[j + 1 :]: c for exps, c in terms.items()}


# ---------------------------------------------------------------------------
# prime and prime-power counts
# ---------------------------------------------------------------------------

def _split_univariate(poly: Polynomial):
    """Decompose poly = f(x_i) + C(other vars) if possible.

    Returns (i, f, C) where f maps exponent -> coefficient (nonconstant) and
    C never involves x_i; constant terms go to C.  None when no variable
    separates this way.
    """
    for i in poly.occurring_variables():
        f: dict[int, int] = {}
        rest: dict[tuple[int, ...], int] = {}
        ok = True
        for exps, coeff in poly.terms.items():
            e_i = exps[i - 1]
            if e_i and any(e for j, e in enumerate(exps) if j != i - 1):
                ok = False
                break
            if e_i:
                f[e_i] = coeff
            else:
                rest[exps] = coeff
        if ok and f:
            return i, f, Polynomial(poly.num_vars, rest)
    return None


def _eval_univariate_mod(f: dict[int, int], xs: np.ndarray, mod: int) -> np.ndarray:
    acc = np.zeros_like(xs)
    for e, c in f.items():
        acc = (acc + (c % mod) * _pow_mod(xs, e, mod)) % mod
    return acc


def _structured_prime_square(poly: Polynomial, split, p: int, max_points: int) -> int:
    """rho(p^2) for poly = f(x_i) + C(rest): one O(p^(s-1)) grid pass.

    Roots mod p where f'(u_i) != 0 (mod p) are nonsingular in the x_i slot
    and lift p^(s-1)-fold to modulus p^2; the remaining roots need all
    partials of C to vanish too, and lift p^s-fold exactly when p^2 already
    divides the value at the representative.
    """
    i, f, cpoly = split
    s = poly.num_vars
    p2 = p * p

    # degree-1 slot with invertible coefficient mod p: x_i is determined
    # uniquely mod p^2 by the remaining variables
    if set(f) == {1} and f[1] % p != 0:
        return p ** (2 * s - 2)
    if p2 >= _MOD_SAFE:
        raise GuardExceeded(f"prime {p} too large for exact mod-p^2 vector arithmetic")

    rest_vars = [j for j in range(1, s + 1) if j != i]
    if p ** len(rest_vars) > max_points:
        raise GuardExceeded(
            f"rho(p^2) grid for p={p} needs {p ** len(rest_vars)} points"
        )

    u = np.arange(p, dtype=np.int64)
    fvals2 = _eval_univariate_mod(f, u, p2)
    fvals1 = fvals2 % p
    fprime = {e - 1: e * c for e, c in f.items()}
    fpvals = _eval_univariate_mod(fprime, u, p)
    sing_u = np.nonzero(fpvals == 0)[0]
    cnt_f_p = np.bincount(fvals1, minlength=p)

    many_singular = len(sing_u) > _MANY_SINGULAR
    if many_singular:
        if p2 > _CHUNK:
            raise GuardExceeded(
                f"rho(p^2) for p={p}: too many singular residues for the table path"
            )
        cnt_sing_p = np.bincount(fvals1[sing_u], minlength=p)
        cnt_sing_p2 = np.bincount(fvals2[sing_u], minlength=p2)

    cterms = _squeeze_terms(cpoly.terms, i)
    grads = [_squeeze_terms(cpoly.partial(j).terms, i) for j in rest_vars]

    z_total = 0
    s_total = 0
    n2_total = 0
    for coords, n in _grid_chunks(len(rest_vars), p, _CHUNK):
        cv2 = _eval_terms_mod(cterms, coords, p2, n)
        cv = cv2 % p
        sing_mask = np.ones(n, dtype=bool)
        for g in grads:
            # an empty gradient vanishes identically: mask unchanged
            if g:
                sing_mask &= _eval_terms_mod(g, coords, p, n) == 0
        neg1 = (p - cv) % p
        z_total += int(np.take(cnt_f_p, neg1).sum())
        if len(sing_u) == 0:
            continue
        if many_singular:
            s_total += int(np.take(cnt_sing_p, neg1)[sing_mask].sum())
            neg2 = (p2 - cv2) % p2
            n2_total += int(np.take(cnt_sing_p2, neg2)[sing_mask].sum())
        else:
            for u1 in sing_u.tolist():
                s_total += int(((fvals1[u1] + cv) % p == 0)[sing_mask].sum())
                n2_total += int(((fvals2[u1] + cv2) % p2 == 0)[sing_mask].sum())
    return (z_total - s_total) * p ** (s - 1) + n2_total * p**s


def _dense_prime_square(poly: Polynomial, p: int, max_points: int) -> int:
    s = poly.num_vars
    p2 = p * p
    if p2 >= _MOD_SAFE:
        raise GuardExceeded(f"prime {p} too large for exact mod-p^2 vector arithmetic")
    if p**s > max_points:
        raise GuardExceeded(f"rho(p^2) dense grid for p={p} needs {p**s} points")
    grads = [poly.partial(j).terms for j in range(1, s + 1)]
    n1 = 0
    n2 = 0
    for coords, n in _grid_chunks(s, p, _CHUNK):
        vals2 = _eval_terms_mod(poly.terms, coords, p2, n)
        root = vals2 % p == 0
        sing = np.ones(n, dtype=bool)
        for g in grads:
            if g:
                sing &= _eval_terms_mod(g, coords, p, n) == 0
        n1 += int((root & ~sing).sum())
        n2 += int((sing & (vals2 == 0)).sum())
    return n1 * p ** (s - 1) + n2 * p**s


def rho_prime_square(
    poly: Polynomial, p: int, *, max_points: int = DEFAULT_MAX_POINTS
) -> int:
    """Exact rho(p^2), choosing the cheapest applicable exact route."""
    split = _split_univariate(poly)
    if split is not None:
        return _structured_prime_square(poly, split, p, max_points)
    return _dense_prime_square(poly, p, max_points)


def _count_roots_mod_p(poly: Polynomial, p: int, max_points: int) -> int:
    if p >= _MOD_SAFE:
        raise GuardExceeded(f"prime {p} too large for exact vector arithmetic")
    s = poly.num_vars
    split = _split_univariate(poly)
    if split is not None:
        i, f, cpoly = split
        if set(f) == {1} and f[1] % p != 0:
            return p ** (s - 1)
        rest_vars = [j for j in range(1, s + 1) if j != i]
        if p ** len(rest_vars) > max_points:
            raise GuardExceeded(f"root count grid for p={p} too large")
        u = np.arange(p, dtype=np.int64)
        cnt = np.bincount(_eval_univariate_mod(f, u, p), minlength=p)
        cterms = _squeeze_terms(cpoly.terms, i)
        total = 0
        for coords, n in _grid_chunks(len(rest_vars), p, _CHUNK):
            cv = _eval_terms_mod(cterms, coords, p, n)
            total += int(np.take(cnt, (p - cv) % p).sum())
        return total
    if p**s > max_points:
        raise GuardExceeded(f"root count grid for p={p} too large")
    total = 0
    for coords, n in _grid_chunks(s, p, _CHUNK):
        total += int((_eval_terms_mod(poly.terms, coords, p, n) == 0).sum())
    return total


def _prime_power_count(poly: Polynomial, p: int, e: int, max_points: int) -> int:
    if e == 1:
        return _count_roots_mod_p(poly, p, max_points)
    if e == 2:
        return rho_prime_square(poly, p, max_points=max_points)

    # e >= 3: collect roots mod p explicitly, then lift level by level
    s = poly.num_vars
    if p**s > max_points:
        raise GuardExceeded(f"root enumeration for p={p} too large")
    grads = [poly.partial(j) for j in range(1, s + 1)]
    roots: list[tuple[int, ...]] = []
    offset = 0
    for coords, n in _grid_chunks(s, p, _CHUNK):
        vals = _eval_terms_mod(poly.terms, coords, p, n)
        for flat in np.nonzero(vals == 0)[0].tolist():
            idx = flat + offset
            root = []
            for _ in range(s):
                root.append(idx % p)
                idx //= p
            roots.append(tuple(reversed(root)))
        offset += n

    total = 0
    lift_per_level = p ** (s - 1)
    for root in roots:
        if any(g.evaluate(root) % p != 0 for g in grads):
            total += lift_per_level ** (e - 1)
            continue
        # singular root: every residue extension of x survives one level
        # exactly when the next power of p divides P(x)
        sols = [root]
        for level in range(1, e):
            mod_next = p ** (level + 1)
            step = p**level
            survivors = [x for x in sols if poly.evaluate(x) % mod_next == 0]
            if level == e - 1:
                total += len(survivors) * p**s
                break
            sols = [
                tuple(xi + step * ti for xi, ti in zip(x, t))
                for x in survivors
                for t in itertools.product(range(p), repeat=s)
            ]
            if len(sols) > max_points:
                raise GuardExceeded(f"singular lift explosion at p={p}^{e}")
    return total


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def rho_bruteforce(
    poly: Polynomial, d: int, *, max_points: int = DEFAULT_MAX_POINTS
) -> LocalDensity:
    """rho(d) by exhaustive enumeration of Z_d^s."""
    if d < 1:
        raise ValueError("modulus must be >= 1")
    if d >= _MOD_SAFE:
        raise GuardExceeded(f"modulus {d} too large for exact vector arithmetic")
    s = poly.num_vars
    if d**s > max_points:
        raise GuardExceeded(f"d^s = {d**s} exceeds enumeration guard {max_points}")
    if d == 1:
        return LocalDensity(1, 1, METHOD_BRUTEFORCE)
    count = 0
    for coords, n in _grid_chunks(s, d, _CHUNK):
        count += int((_eval_terms_mod(poly.terms, coords, d, n) == 0).sum())
    return LocalDensity(d, count, METHOD_BRUTEFORCE)


def rho(
    poly: Polynomial, d: int, *, max_points: int = DEFAULT_MAX_POINTS
) -> LocalDensity:
    """rho(d) via prime-power lifting and multiplicativity across prime powers."""
    if d < 1:
        raise ValueError("modulus must be >= 1")
    count = 1
    for p, e in sorted(factorize(d).items()):
        count *= _prime_power_count(poly, p, e, max_points)
    return LocalDensity(d, count, METHOD_HENSEL_CRT)


def fixed_square_divisor_primes(
    poly: Polynomial, prime_bound: int, *, max_points: int = DEFAULT_MAX_POINTS
) -> list[int]:
    """Primes q <= prime_bound with rho(q^2) = q^(2s), i.e. q^2 divides every value."""
    if prime_bound < 2:
        raise ValueError("prime_bound must be >= 2")
    s = poly.num_vars
    return [
        q
        for q in primes_up_to(prime_bound)
        if rho_prime_square(poly, q, max_points=max_points) == q ** (2 * s)
    ]


def singular_series(
    poly: Polynomial,
    cutoff: int,
    *,
    fraction_bits: int = 96,
    max_points: int = DEFAULT_MAX_POINTS,
    threads: int = 1,
) -> SingularSeriesReport:
    """Truncated product over primes p <= cutoff of (1 - rho(p^2)/p^(2s))."""
    if cutoff < 2:
        raise ValueError("cutoff must be >= 2")
    s = poly.num_vars
    primes = primes_up_to(cutoff)

    def compute(p: int) -> int:
        try:
            return rho_prime_square(poly, p, max_points=max_points)
        except GuardExceeded as exc:
            raise GuardExceeded(f"rho(p^2) guard exceeded at prime {p}: {exc}") from exc

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rho_values = list(pool.map(compute, primes))
    else:
        rho_values = [compute(p) for p in primes]

    one = 1 << fraction_bits
    value = one
    steps = 0
    zero_factor_primes: list[int] = []
    factors: list[tuple[int, int]] = []
    max_ratio = Fraction(0)
    for p, r in zip(primes, rho_values):
        factors.append((p, r))
        den = p ** (2 * s)
        ratio = Fraction(r, p ** (2 * s - 2))
        if ratio > max_ratio:
            max_ratio = ratio
        if r == den:
            zero_factor_primes.append(p)
            continue
        value = value * (den - r) // den
        steps += 1
        if value == 0:
            value = 1  # positive product underflowed the fixed point; keep it positive
    if zero_factor_primes:
        value = 0
    return SingularSeriesReport(
        cutoff=cutoff,
        truncated_value=Fraction(value, one),
        zero_factor_primes=zero_factor_primes,
        per_prime_factors=factors,
        tail_bound=2 * max_ratio / (cutoff - 1),
        rounding_error_bound=Fraction(steps, one),
    )


# ---------------------------------------------------------------------------
# the power-plus-cubic shape c*x1^k + C*(x2..xs)
# ---------------------------------------------------------------------------

def make_mixed_form(c: int, k: int, cstar: Polynomial) -> Polynomial:
    """Build c*x1^k + cstar, validating the shape of cstar.

    cstar must be a cubic form in x2..xs (x1 unused, at least two variables
    occurring) and must not be a scaled linear cube.
    """
    if c == 0:
        raise PreconditionError("leading coefficient c must be nonzero")
    if k not in (3, 4):
        raise PreconditionError("exponent k must be 3 or 4")
    s = cstar.num_vars
    if s < 3:
        raise PreconditionError("cstar must live in at least x2, x3 (arity >= 3)")
    occ = cstar.occurring_variables()
    if 1 in occ:
        raise PreconditionError("cstar must not involve x1")
    if len(occ) < 2:
        raise PreconditionError("cstar must involve at least two variables")
    if not cstar.is_form(3):
        raise PreconditionError("cstar must be a nonzero homogeneous cubic form")
    if is_scaled_linear_cube(cstar) is not None:
        raise PreconditionError("cstar is a scaled linear cube a*(b.x)^3")
    lead = [0] * s
    lead[0] = k
    return cstar + Polynomial.monomial(s, lead, c)


def prime_square_ratio_table(
    c: int,
    k: int,
    cstar: Polynomial,
    prime_bound: int,
    *,
    max_points: int = DEFAULT_MAX_POINTS,
) -> list[tuple[int, Fraction]]:
    """Table of (p, rho(p^2) / p^(2s-2)) for the power-plus-cubic shape.

    Empirically certifies that the normalized prime-square density stays
    bounded for this family.
    """
    poly = make_mixed_form(c, k, cstar)
    s = poly.num_vars
    return [
        (p, Fraction(rho_prime_square(poly, p, max_points=max_points), p ** (2 * s - 2)))
        for p in primes_up_to(prime_bound)
    ]
