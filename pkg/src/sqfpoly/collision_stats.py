"""Value histograms and collision counts for cubic forms.

R(n) is the multiplicity of the value n over a box; the collision count
sum_n R(n)^2 equals the number of pairs x, X in the box with equal values.
The growth of that count against the box side is summarized by a log-log
least-squares exponent fit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .boxvalues import value_counts
from .errors import GuardExceeded, PreconditionError
from .local_density import make_mixed_form
from .polynomial import Box, Polynomial, is_scaled_linear_cube
from .squarefree_count import round_mixed_bound

DEFAULT_MAX_HISTOGRAM_POINTS = 10**8


@dataclass
class ValueHistogram:
    box: Box
    entries: dict[int, int]
    total_points: int

    def collision_count(self) -> int:
        return sum(m * m for m in self.entries.values())


@dataclass
class ExponentFit:
    samples: tuple[tuple[int, int], ...]
    slope: float
    reference: float

    @property
    def excess(self) -> float:
        return self.slope - self.reference


def value_histogram(
    poly: Polynomial,
    box: Box,
    *,
    max_points: int = DEFAULT_MAX_HISTOGRAM_POINTS,
    threads: int = 1,
) -> ValueHistogram:
    """Exact value -> multiplicity histogram of poly over the box."""
    if box.point_count > max_points:
        raise GuardExceeded(
            f"histogram of {box.point_count} points exceeds guard {max_points}"
        )
    entries = value_counts(poly, box, max_points=max_points, threads=threads)
    return ValueHistogram(box=box, entries=entries, total_points=box.point_count)


def collision_count(
    poly: Polynomial,
    bound: int,
    *,
    allow_degenerate: bool = False,
    max_points: int = DEFAULT_MAX_HISTOGRAM_POINTS,
    threads: int = 1,
) -> int:
    """Pairs x, X in [-bound, bound]^s with equal cubic-form values.

    Rejects scaled linear cubes a*(b.x)^3 (their collision counts grow a full
    power faster) unless allow_degenerate is set for exploration.
    """
    if not poly.is_form(3):
        raise PreconditionError("collision counting expects a nonzero cubic form")
    if not allow_degenerate and is_scaled_linear_cube(poly) is not None:
        raise PreconditionError(
            "form is a scaled linear cube; pass allow_degenerate=True to force"
        )
    hist = value_histogram(
        poly,
        Box.cube(bound, poly.num_vars),
        max_points=max_points,
        threads=threads,
    )
    return hist.collision_count()


def mixed_collision_count(
    c: int,
    k: int,
    cstar: Polynomial,
    bound: int,
    *,
    max_points: int = DEFAULT_MAX_HISTOGRAM_POINTS,
    threads: int = 1,
) -> int:
    """Collision count of c*x1^k + C*(x2..xs) over the mixed box (Q, P, ..., P)."""
    poly = make_mixed_form(c, k, cstar)
    s = poly.num_vars
    q_bound = round_mixed_bound(bound, k)
    hist = value_histogram(
        poly,
        Box((q_bound,) + (bound,) * (s - 1)),
        max_points=max_points,
        threads=threads,
    )
    return hist.collision_count()


def exponent_fit(samples: Sequence[tuple[int, int]], reference: float) -> ExponentFit:
    """Least-squares slope of log(count) against log(P)."""
    if len(samples) < 3:
        raise ValueError("need at least 3 samples for a slope fit")
    if len({p for p, _ in samples}) < 3:
        raise ValueError("need at least 3 distinct P values")
    if any(count < 1 for _, count in samples):
        raise ValueError("counts must be >= 1 for a log-log fit")
    ts = [math.log(p) for p, _ in samples]
    us = [math.log(count) for _, count in samples]
    tbar = sum(ts) / len(ts)
    ubar = sum(us) / len(us)
    num = sum((t - tbar) * (u - ubar) for t, u in zip(ts, us))
    den = sum((t - tbar) ** 2 for t in ts)
    return ExponentFit(
        samples=tuple((int(p), int(n)) for p, n in samples),
        slope=num / den,
        reference=float(reference),
    )
