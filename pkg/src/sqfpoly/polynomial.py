"""Exact sparse multivariate integer polynomials.

A polynomial in s variables x1..xs is stored as a map from exponent tuples
(length s) to nonzero integer coefficients; the zero polynomial has an empty
map.  All arithmetic runs on Python ints, so evaluation and substitution are
exact at any magnitude -- no width limit, no wraparound.

Also here: unimodular changes of variables, the shear procedure that makes
the leading cubes x1^3 and x2^3 of a cubic form explicit, and detection of
the degenerate shape a*(b1*x1 + ... + bs*xs)^3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .errors import PolyParseError, PreconditionError


class Polynomial:
    """Canonical sparse polynomial over Z[x1..xs].

    Instances are immutable; equality and hashing are structural, so two
    polynomials are equal exactly when their term maps agree.
    """

    __slots__ = ("num_vars", "_terms", "_hash")

    def __init__(self, num_vars: int, terms: dict[tuple[int, ...], int]):
        if not isinstance(num_vars, int) or num_vars < 1:
            raise ValueError("num_vars must be a positive integer")
        clean: dict[tuple[int, ...], int] = {}
        for exps, coeff in terms.items():
            exps = tuple(exps)
            if len(exps) != num_vars:
                raise ValueError(f"exponent vector {exps} has length != {num_vars}")
            if any(e < 0 or not isinstance(e, int) for e in exps):
                raise ValueError(f"exponents must be non-negative integers: {exps}")
            coeff = int(coeff)
            if coeff != 0:
                clean[exps] = clean.get(exps, 0) + coeff
                if clean[exps] == 0:
                    del clean[exps]
        self.num_vars = num_vars
        self._terms = clean
        self._hash: Optional[int] = None

    # -- construction ----------------------------------------------------

    @classmethod
    def zero(cls, num_vars: int) -> "Polynomial":
        return cls(num_vars, {})

    @classmethod
    def constant(cls, num_vars: int, value: int) -> "Polynomial":
        return cls(num_vars, {(0,) * num_vars: value})

    @classmethod
    def variable(cls, num_vars: int, index: int) -> "Polynomial":
        """The polynomial x_index (1-based index)."""
        if not 1 <= index <= num_vars:
            raise ValueError(f"variable index {index} out of range 1..{num_vars}")
        exps = [0] * num_vars
        exps[index - 1] = 1
        return cls(num_vars, {tuple(exps): 1})

    @classmethod
    def monomial(cls, num_vars: int, exps: Sequence[int], coeff: int) -> "Polynomial":
        return cls(num_vars, {tuple(exps): coeff})

    # -- basic protocol --------------------------------------------------

    @property
    def terms(self) -> dict[tuple[int, ...], int]:
        """The term map.  Treat as read-only."""
        return self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Polynomial)
            and self.num_vars == other.num_vars
            and self._terms == other._terms
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.num_vars, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"Polynomial({self.num_vars}, {render(self)!r})"

    # -- arithmetic ------------------------------------------------------

    def __add__(self, other: "Polynomial") -> "Polynomial":
        if self.num_vars != other.num_vars:
            raise ValueError("arity mismatch")
        out = dict(self._terms)
        for exps, coeff in other._terms.items():
            out[exps] = out.get(exps, 0) + coeff
        return Polynomial(self.num_vars, out)

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.num_vars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, int):
            return Polynomial(
                self.num_vars, {e: c * other for e, c in self._terms.items()}
            )
        if self.num_vars != other.num_vars:
            raise ValueError("arity mismatch")
        out: dict[tuple[int, ...], int] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                key = tuple(a + b for a, b in zip(e1, e2))
                out[key] = out.get(key, 0) + c1 * c2
        return Polynomial(self.num_vars, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise ValueError("negative power")
        result = Polynomial.constant(self.num_vars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    # -- queries ---------------------------------------------------------

    def coefficient(self, exps: Sequence[int]) -> int:
        return self._terms.get(tuple(exps), 0)

    def total_degree(self) -> int:
        """Maximum total degree; -1 for the zero polynomial."""
        if not self._terms:
            return -1
        return max(sum(e) for e in self._terms)

    def is_form(self, degree: int) -> bool:
        """True iff nonzero and homogeneous of the given total degree."""
        return bool(self._terms) and all(sum(e) == degree for e in self._terms)

    def occurring_variables(self) -> list[int]:
        """1-based indices of variables that actually appear."""
        occ = set()
        for exps in self._terms:
            for j, e in enumerate(exps):
                if e:
                    occ.add(j + 1)
        return sorted(occ)

    def partial(self, index: int) -> "Polynomial":
        """Formal partial derivative with respect to x_index (1-based)."""
        j = index - 1
        out: dict[tuple[int, ...], int] = {}
        for exps, coeff in self._terms.items():
            e = exps[j]
            if e:
                key = exps[:j] + (e - 1,) + exps[j + 1 :]
                out[key] = out.get(key, 0) + coeff * e
        return Polynomial(self.num_vars, out)

    def evaluate(self, point: Sequence[int]) -> int:
        """Exact value at an integer point."""
        if len(point) != self.num_vars:
            raise ValueError(
                f"point has {len(point)} coordinates, expected {self.num_vars}"
            )
        total = 0
        for exps, coeff in self._terms.items():
            term = coeff
            for x, e in zip(point, exps):
                if e:
                    term *= x**e
            total += term
        return total

    def max_abs_on_box(self, bounds: Sequence[int]) -> int:
        """Upper bound sum(|c| * prod(P_j^e_j)) for |x_j| <= P_j."""
        total = 0
        for exps, coeff in self._terms.items():
            term = abs(coeff)
            for bound, e in zip(bounds, exps):
                if e:
                    term *= bound**e
            total += term
        return total


@dataclass(frozen=True)
class Box:
    """Symmetric box {x in Z^s : |x_j| <= bounds[j-1]}, every bound >= 1."""

    bounds: tuple[int, ...]

    def __post_init__(self):
        if not self.bounds:
            raise ValueError("box needs at least one bound")
        if any(not isinstance(b, int) or b < 1 for b in self.bounds):
            raise ValueError("box bounds must be positive integers")
        object.__setattr__(self, "bounds", tuple(self.bounds))

    @classmethod
    def cube(cls, side: int, dims: int) -> "Box":
        return cls((side,) * dims)

    @property
    def point_count(self) -> int:
        n = 1
        for b in self.bounds:
            n *= 2 * b + 1
        return n


class UnimodularMap:
    """Integer matrix with determinant +1 or -1, acting on points by u @ x."""

    __slots__ = ("matrix", "det")

    def __init__(self, matrix: Iterable[Iterable[int]]):
        rows = tuple(tuple(int(v) for v in row) for row in matrix)
        n = len(rows)
        if n == 0 or any(len(row) != n for row in rows):
            raise ValueError("matrix must be square and non-empty")
        det = _int_det(rows)
        if det not in (1, -1):
            raise ValueError(f"matrix is not unimodular (det = {det})")
        self.matrix = rows
        self.det = det

    @property
    def size(self) -> int:
        return len(self.matrix)

    @classmethod
    def identity(cls, size: int) -> "UnimodularMap":
        return cls(
            tuple(
                tuple(1 if i == j else 0 for j in range(size)) for i in range(size)
            )
        )

    @classmethod
    def shear(cls, size: int, target: int, source: int, amount: int) -> "UnimodularMap":
        """The substitution x_target := x_target + amount * x_source (1-based)."""
        if target == source:
            raise ValueError("shear target and source must differ")
        rows = [[1 if i == j else 0 for j in range(size)] for i in range(size)]
        rows[target - 1][source - 1] = amount
        return cls(rows)

    @classmethod
    def swap(cls, size: int, i: int, j: int) -> "UnimodularMap":
        """The substitution exchanging x_i and x_j (1-based)."""
        perm = list(range(size))
        perm[i - 1], perm[j - 1] = perm[j - 1], perm[i - 1]
        return cls(
            tuple(
                tuple(1 if k == perm[r] else 0 for k in range(size))
                for r in range(size)
            )
        )

    def __matmul__(self, other: "UnimodularMap") -> "UnimodularMap":
        if self.size != other.size:
            raise ValueError("size mismatch")
        a, b = self.matrix, other.matrix
        n = self.size
        return UnimodularMap(
            tuple(
                tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n))
                for i in range(n)
            )
        )

    def apply(self, point: Sequence[int]) -> tuple[int, ...]:
        if len(point) != self.size:
            raise ValueError("dimension mismatch")
        return tuple(
            sum(row[j] * point[j] for j in range(self.size)) for row in self.matrix
        )

    def __eq__(self, other) -> bool:
        return isinstance(other, UnimodularMap) and self.matrix == other.matrix

    def __hash__(self) -> int:
        return hash(self.matrix)

    def __repr__(self) -> str:
        return f"UnimodularMap({self.matrix!r})"


def _int_det(rows: tuple[tuple[int, ...], ...]) -> int:
    """Exact integer determinant (fraction-free Bareiss elimination)."""
    n = len(rows)
    a = [list(r) for r in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


# ---------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------

def parse(text: str, num_vars: Optional[int] = None) -> Polynomial:
    """Parse polynomial text like "x1^3 + 2*x2^3 - 5".

    Grammar: sums of signed terms; a term is an optional integer coefficient
    joined by '*' to factors 'x<i>' or 'x<i>^<e>', or a bare integer.
    Whitespace is insignificant.  The arity is the largest variable index
    mentioned unless `num_vars` overrides it (it may only enlarge).
    """
    s = text
    pos = 0

    def skip_ws():
        nonlocal pos
        while pos < len(s) and s[pos].isspace():
            pos += 1

    def read_int() -> int:
        nonlocal pos
        start = pos
        while pos < len(s) and s[pos].isdigit():
            pos += 1
        if pos == start:
            raise PolyParseError("expected an integer", start)
        return int(s[start:pos])

    def read_factor() -> tuple[int, int]:
        nonlocal pos
        if pos >= len(s) or s[pos] != "x":
            raise PolyParseError("expected a variable factor like 'x1'", pos)
        pos += 1
        idx_pos = pos
        index = read_int()
        if index == 0:
            raise PolyParseError("variable index 0 is invalid (indices start at 1)", idx_pos)
        exponent = 1
        skip_ws()
        if pos < len(s) and s[pos] == "^":
            pos += 1
            skip_ws()
            exponent = read_int()
        return index, exponent

    def read_term() -> tuple[int, dict[int, int]]:
        nonlocal pos
        coeff = 1
        powers: dict[int, int] = {}
        skip_ws()
        if pos < len(s) and s[pos].isdigit():
            coeff = read_int()
            skip_ws()
            if pos < len(s) and s[pos] == "*":
                pos += 1
                skip_ws()
            else:
                if pos < len(s) and s[pos] == "x":
                    raise PolyParseError("missing '*' between coefficient and variable", pos)
                return coeff, powers  # bare integer term
        elif pos >= len(s) or s[pos] != "x":
            raise PolyParseError("expected a term", pos)
        while True:
            index, exponent = read_factor()
            powers[index] = powers.get(index, 0) + exponent
            skip_ws()
            if pos < len(s) and s[pos] == "*":
                pos += 1
                skip_ws()
                continue
            break
        return coeff, powers

    raw_terms: list[tuple[int, dict[int, int]]] = []
    skip_ws()
    sign = 1
    if pos < len(s) and s[pos] in "+-":
        sign = -1 if s[pos] == "-" else 1
        pos += 1
    if pos >= len(s):
        raise PolyParseError("empty polynomial text", pos)
    while True:
        coeff, powers = read_term()
        raw_terms.append((sign * coeff, powers))
        skip_ws()
        if pos >= len(s):
            break
        if s[pos] not in "+-":
            raise PolyParseError(f"unexpected character {s[pos]!r}", pos)
        sign = -1 if s[pos] == "-" else 1
        pos += 1
        skip_ws()

    max_index = max((i for _, powers in raw_terms for i in powers), default=0)
    if num_vars is None:
        num_vars = max(max_index, 1)
    elif num_vars < max_index:
        raise PolyParseError(
            f"arity override {num_vars} is smaller than largest index {max_index} used",
            0,
        )
    terms: dict[tuple[int, ...], int] = {}
    for coeff, powers in raw_terms:
        exps = [0] * num_vars
        for index, e in powers.items():
            exps[index - 1] += e
        key = tuple(exps)
        terms[key] = terms.get(key, 0) + coeff
    return Polynomial(num_vars, terms)


def render(p: Polynomial) -> str:
    """Canonical text: terms in graded-lexicographic order, highest first."""
    if not p.terms:
        return "0"
    keys = sorted(p.terms, key=lambda e: (sum(e), e), reverse=True)
    pieces = []
    for i, exps in enumerate(keys):
        coeff = p.terms[exps]
        factors = []
        for j, e in enumerate(exps):
            if e == 1:
                factors.append(f"x{j + 1}")
            elif e > 1:
                factors.append(f"x{j + 1}^{e}")
        mag = abs(coeff)
        if not factors:
            body = str(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = "*".join([str(mag)] + factors)
        if i == 0:
            pieces.append(body if coeff > 0 else "-" + body)
        else:
            pieces.append(("+ " if coeff > 0 else "- ") + body)
    return " ".join(pieces)


# ---------------------------------------------------------------------------
# unimodular substitution and cubic-form normalizations
# ---------------------------------------------------------------------------

def substitute_unimodular(p: Polynomial, u: UnimodularMap) -> Polynomial:
    """The composite q(x) = p(u @ x)."""
    if u.size != p.num_vars:
        raise ValueError(
            f"map dimension {u.size} does not match polynomial arity {p.num_vars}"
        )
    s = p.num_vars
    # linear form each original variable turns into
    forms = [
        Polynomial(s, {_unit(s, j): u.matrix[i][j] for j in range(s) if u.matrix[i][j]})
        for i in range(s)
    ]
    power_cache: list[dict[int, Polynomial]] = [
        {0: Polynomial.constant(s, 1)} for _ in range(s)
    ]
    result = Polynomial.zero(s)
    for exps, coeff in p.terms.items():
        term = Polynomial.constant(s, coeff)
        for i, e in enumerate(exps):
            if not e:
                continue
            cache = power_cache[i]
            if e not in cache:
                pw = max(cache)
                acc = cache[pw]
                while pw < e:
                    acc = acc * forms[i]
                    pw += 1
                    cache[pw] = acc
            term = term * cache[e]
        result = result + term
    return result


def _unit(s: int, j: int) -> tuple[int, ...]:
    exps = [0] * s
    exps[j] = 1
    return tuple(exps)


def _cube_key(s: int, j: int) -> tuple[int, ...]:
    exps = [0] * s
    exps[j - 1] = 3
    return tuple(exps)


def _mixed_key(s: int, powers: dict[int, int]) -> tuple[int, ...]:
    exps = [0] * s
    for idx, e in powers.items():
        exps[idx - 1] += e
    return tuple(exps)


def make_cubes_explicit(p: Polynomial) -> tuple[Polynomial, UnimodularMap]:
    """Transform a cubic form so x1^3 and x2^3 both have nonzero coefficients.

    Uses shears x_j := x_j + lam * x_pivot (smallest positive lam that keeps
    the pivot cube nonzero), falling back to a two-variable shear when no
    single variable carries a usable coefficient.  A shear with source
    x_pivot changes only the x_pivot^3 coefficient among the pure cubes, so
    the second pass cannot undo the first.
    """
    s = p.num_vars
    if s < 2:
        raise PreconditionError("cubic form must have at least 2 variables")
    if not p.is_form(3):
        raise PreconditionError("input is not a nonzero homogeneous cubic form")
    if len(p.occurring_variables()) < 2:
        raise PreconditionError("cubic form must involve at least 2 variables")

    q = p
    u = UnimodularMap.identity(s)

    def apply(m: UnimodularMap):
        nonlocal q, u
        q = substitute_unimodular(q, m)
        u = u @ m

    for pivot in (1, 2):
        if q.coefficient(_cube_key(s, pivot)) != 0:
            continue
        if pivot == 1 and 1 not in q.occurring_variables():
            apply(UnimodularMap.swap(s, 1, q.occurring_variables()[0]))
            if q.coefficient(_cube_key(s, 1)) != 0:
                continue
        done = False
        for j in range(1, s + 1):
            if j == pivot:
                continue
            a1 = q.coefficient(_mixed_key(s, {pivot: 2, j: 1}))
            a2 = q.coefficient(_mixed_key(s, {pivot: 1, j: 2}))
            a3 = q.coefficient(_cube_key(s, j))
            if a1 == a2 == a3 == 0:
                continue
            lam = 1
            while a1 * lam + a2 * lam**2 + a3 * lam**3 == 0:
                lam += 1
            apply(UnimodularMap.shear(s, j, pivot, lam))
            done = True
            break
        if not done:
            # no single shear works: pick a cross term x_pivot*x_j*x_k
            for j in range(1, s + 1):
                if done or j == pivot:
                    continue
                for k in range(j + 1, s + 1):
                    if k == pivot:
                        continue
                    b1 = q.coefficient(_mixed_key(s, {pivot: 1, j: 1, k: 1}))
                    if b1 == 0:
                        continue
                    b2 = q.coefficient(_mixed_key(s, {j: 2, k: 1}))
                    b3 = q.coefficient(_mixed_key(s, {j: 1, k: 2}))
                    lam = mu = 1
                    for lam in range(1, 7):
                        found = False
                        for mu in range(1, 7):
                            if b1 * lam * mu + b2 * lam**2 * mu + b3 * lam * mu**2 != 0:
                                found = True
                                break
                        if found:
                            break
                    apply(UnimodularMap.shear(s, j, pivot, lam))
                    apply(UnimodularMap.shear(s, k, pivot, mu))
                    done = True
                    break
        if q.coefficient(_cube_key(s, pivot)) == 0:
            raise AssertionError(
                f"shear search failed to expose x{pivot}^3 for {render(p)}"
            )
    return q, u


def is_scaled_linear_cube(
    p: Polynomial,
) -> Optional[tuple[Fraction, tuple[Fraction, ...]]]:
    """If p == a * (b1*x1 + ... + bs*xs)^3 over Q, return (a, b), else None.

    The returned b is the primitive integer vector with positive leading
    entry; a absorbs the scale.  Reads b_j off the x_i^2 x_j coefficients of
    the first occurring variable i and verifies the full expansion exactly.
    """
    if not p.is_form(3):
        raise PreconditionError("input is not a nonzero homogeneous cubic form")
    s = p.num_vars
    occ = p.occurring_variables()
    for j in occ:
        if p.coefficient(_cube_key(s, j)) == 0:
            return None
    i = occ[0]
    a = p.coefficient(_cube_key(s, i))
    b = [Fraction(0)] * s
    b[i - 1] = Fraction(1)
    for j in occ:
        if j != i:
            b[j - 1] = Fraction(p.coefficient(_mixed_key(s, {i: 2, j: 1})), 3 * a)
    den = math.lcm(*(f.denominator for f in b))
    vec = [int(f * den) for f in b]
    linear = Polynomial(s, {_unit(s, j): vec[j] for j in range(s) if vec[j]})
    if (linear**3) * a != p * den**3:
        return None
    g = math.gcd(*vec)
    vec = [v // g for v in vec]
    scale = Fraction(a) * Fraction(g, den) ** 3
    lead = next(v for v in vec if v)
    if lead < 0:
        vec = [-v for v in vec]
        scale = -scale
    return scale, tuple(Fraction(v) for v in vec)
