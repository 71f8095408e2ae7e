"""Exact value enumeration over symmetric boxes.

Computes the multiset {P(x) : x in box} as a value -> multiplicity map.  When
the a-priori bound sum(|c| * prod(P_j^e_j)) fits in int64 with headroom, the
grid is evaluated with vectorized numpy arithmetic (exact, since the bound
certifies that no intermediate can overflow); otherwise a pure-Python exact
path takes over.  Work is partitioned on the first coordinate; partial tables
merge by plain addition, so the result is independent of thread count.
"""

from __future__ import annotations

import itertools
from collections import Counter
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import GuardExceeded
from .polynomial import Box, Polynomial

DEFAULT_MAX_POINTS = 10**9
_INT64_SAFE = 1 << 62
_CHUNK = 1 << 22


def value_counts(
    poly: Polynomial,
    box: Box,
    *,
    max_points: int = DEFAULT_MAX_POINTS,
    threads: int = 1,
) -> dict[int, int]:
    """Exact {value: multiplicity} of poly over the box."""
    if len(box.bounds) != poly.num_vars:
        raise ValueError("box dimension does not match polynomial arity")
    if box.point_count > max_points:
        raise GuardExceeded(
            f"box has {box.point_count} points, guard is {max_points}"
        )
    if poly.max_abs_on_box(box.bounds) >= _INT64_SAFE:
        return _value_counts_python(poly, box)
    if poly.num_vars == 1:
        return _value_counts_1d(poly, box)
    return _value_counts_nd(poly, box, threads)


def _value_counts_1d(poly: Polynomial, box: Box) -> dict[int, int]:
    bound = box.bounds[0]
    out: Counter[int] = Counter()
    for lo in range(-bound, bound + 1, _CHUNK):
        xs = np.arange(lo, min(lo + _CHUNK, bound + 1), dtype=np.int64)
        vals = np.zeros_like(xs)
        for exps, coeff in poly.terms.items():
            vals += coeff * xs ** exps[0]
        uniq, cnts = np.unique(vals, return_counts=True)
        for v, c in zip(uniq.tolist(), cnts.tolist()):
            out[v] += c
    return dict(out)


def _rest_coords(bounds: tuple[int, ...], start: int, stop: int) -> list[np.ndarray]:
    """Decode flat rest-grid indices [start, stop) into coordinate arrays."""
    sizes = [2 * b + 1 for b in bounds]
    idx = np.arange(start, stop, dtype=np.int64)
    coords = []
    stride = 1
    for size in reversed(sizes):
        coords.append(idx // stride % size)
        stride *= size
    coords.reverse()
    return [c - b for c, b in zip(coords, bounds)]


def _value_counts_nd(poly: Polynomial, box: Box, threads: int) -> dict[int, int]:
    first = box.bounds[0]
    rest_bounds = box.bounds[1:]
    rest_count = 1
    for b in rest_bounds:
        rest_count *= 2 * b + 1

    # group terms by the first-variable exponent so the per-x1 work is a
    # handful of scalar-times-array operations
    by_e1: dict[int, list[tuple[tuple[int, ...], int]]] = {}
    for exps, coeff in poly.terms.items():
        by_e1.setdefault(exps[0], []).append((exps[1:], coeff))

    out: Counter[int] = Counter()
    for start in range(0, rest_count, _CHUNK):
        stop = min(start + _CHUNK, rest_count)
        coords = _rest_coords(rest_bounds, start, stop)
        partials: dict[int, np.ndarray] = {}
        for e1, terms in by_e1.items():
            acc = np.zeros(stop - start, dtype=np.int64)
            for rest_exps, coeff in terms:
                mono = np.full(stop - start, coeff, dtype=np.int64)
                for arr, e in zip(coords, rest_exps):
                    if e:
                        mono = mono * arr**e
                acc += mono
            partials[e1] = acc

        def count_x1(x1: int) -> Counter[int]:
            vals = np.zeros(stop - start, dtype=np.int64)
            for e1, arr in partials.items():
                vals += x1**e1 * arr
            uniq, cnts = np.unique(vals, return_counts=True)
            return Counter(dict(zip(uniq.tolist(), cnts.tolist())))

        x1_values = range(-first, first + 1)
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                for counter in pool.map(count_x1, x1_values):
                    out.update(counter)
        else:
            for x1 in x1_values:
                out.update(count_x1(x1))
    return dict(out)


def _value_counts_python(poly: Polynomial, box: Box) -> dict[int, int]:
    # exact fallback for value ranges beyond int64; slow but unbounded
    out: Counter[int] = Counter()
    ranges = [range(-b, b + 1) for b in box.bounds]
    for point in itertools.product(*ranges):
        out[poly.evaluate(point)] += 1
    return dict(out)
