"""Exact squarefree-value densities of multivariate integer polynomials.

Core objects: sparse integer polynomials over boxes |x_j| <= P_j, local
densities rho(d) with a brute-force oracle, the truncated singular series,
exact squarefree counts by two independent methods, collision statistics for
cubic forms, and a complete box solver for binary quadratic Diophantine
equations.
"""

from .errors import GuardExceeded, PolyParseError, PreconditionError
from .polynomial import (
    Box,
    Polynomial,
    UnimodularMap,
    is_scaled_linear_cube,
    make_cubes_explicit,
    parse,
    render,
    substitute_unimodular,
)
from .local_density import (
    LocalDensity,
    SingularSeriesReport,
    fixed_square_divisor_primes,
    make_mixed_form,
    prime_square_ratio_table,
    rho,
    rho_bruteforce,
    rho_prime_square,
    singular_series,
)
from .quad_diophantine import (
    CaseTag,
    QuadCase,
    QuadInstance,
    classify,
    count_solutions,
    count_solutions_bruteforce,
    count_square_difference,
    count_square_progression,
    count_square_sum,
    solutions,
    solutions_bruteforce,
)
from .squarefree_count import (
    CountReport,
    asymptotic_report,
    count_exact,
    count_sieve,
    is_squarefree,
    mixed_form_table,
    round_mixed_bound,
    vanishing_density_table,
)
from .collision_stats import (
    ExponentFit,
    ValueHistogram,
    collision_count,
    exponent_fit,
    mixed_collision_count,
    value_histogram,
)

__version__ = "0.1.0"
