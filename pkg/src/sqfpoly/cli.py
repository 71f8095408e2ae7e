"""Command-line front end.

Subcommands:
    rho         local density rho(d) of a polynomial
    series      truncated singular series report (JSON schema or factor CSV)
    count       exact squarefree count over a box, optional main-term comparison
    quadcount   solution count of a binary quadratic equation in a box (CSV)
    quadsolve   list the solutions themselves (CSV)
    collisions  collision counts over growing boxes with a log-log slope fit
    zeroseries  density table for polynomials with (near-)vanishing series
    mixedform   asymptotic experiment for the shape c*x1^k + C*(x2..xs)
    verify      run the bundled oracle suites

Guards, threads, and output options can also come from a flat key=value
config file (--config); explicit flags win.  SQFREE_MAX_POINTS overrides the
default enumeration guard.  Identical configs produce byte-identical
reports: every number is rendered as a decimal string and no timestamps are
emitted.

Exit codes: 0 success, 2 parse/usage error, 3 guard violation,
4 precondition failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction
from typing import Optional

from . import __version__
from .boxvalues import DEFAULT_MAX_POINTS
from .collision_stats import collision_count, exponent_fit, mixed_collision_count
from .errors import GuardExceeded, PolyParseError, PreconditionError
from .local_density import rho, rho_bruteforce, singular_series
from .polynomial import Box, parse
from .quad_diophantine import (
    QuadInstance,
    count_solutions,
    count_solutions_bruteforce,
    solutions,
)
from .fmt import decimal_string
from .squarefree_count import (
    asymptotic_report,
    count_exact,
    count_sieve,
    mixed_form_band_diagnostic,
    mixed_form_table,
    vanishing_density_table,
)
from .verify import SUITES, run_suites

_CONFIG_KEYS = ("threads", "max-points", "max-value", "format", "out")


def _read_config(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, _, val = line.partition("=")
            values[key.strip()] = val.strip()
    return values


def _add_common(sub: argparse.ArgumentParser):
    sub.add_argument("--out", help="write the report to this path instead of stdout")
    sub.add_argument("--format", choices=("json", "csv"), default=None)
    sub.add_argument("--threads", type=int, default=None)
    sub.add_argument("--max-points", type=int, default=None, dest="max_points")
    sub.add_argument("--max-value", type=int, default=None, dest="max_value")
    sub.add_argument("--config", help="flat key=value config file; flags win")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sqfpoly", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("rho", help="local density rho(d)")
    p.add_argument("--poly", required=True)
    p.add_argument("--arity", type=int, default=None)
    p.add_argument("--modulus", type=int, required=True)
    p.add_argument("--brute", action="store_true", help="use exhaustive enumeration")
    _add_common(p)

    p = subs.add_parser("series", help="truncated singular series")
    p.add_argument("--poly", required=True)
    p.add_argument("--arity", type=int, default=None)
    p.add_argument("--cutoff", type=int, required=True)
    _add_common(p)

    p = subs.add_parser("count", help="exact squarefree count over a box")
    p.add_argument("--poly", required=True)
    p.add_argument("--arity", type=int, default=None)
    p.add_argument("--box", required=True, help="comma-separated bounds, e.g. 10,10")
    p.add_argument("--cutoff", type=int, default=None, help="compare to main term")
    p.add_argument("--method", choices=("exact", "sieve", "both"), default="exact")
    p.add_argument("--histogram-out", dest="histogram_out", help="CSV of n,R(n)")
    _add_common(p)

    p = subs.add_parser("quadcount", help="count quadratic equation solutions")
    p.add_argument("--coeffs", required=True, help="a,b,c,d,e,f")
    p.add_argument("--P", type=int, required=True)
    p.add_argument("--brute", action="store_true", help="append brute force column")
    _add_common(p)

    p = subs.add_parser("quadsolve", help="list quadratic equation solutions")
    p.add_argument("--coeffs", required=True, help="a,b,c,d,e,f")
    p.add_argument("--P", type=int, required=True)
    _add_common(p)

    p = subs.add_parser("collisions", help="collision counts and slope fit")
    p.add_argument("--poly")
    p.add_argument("--arity", type=int, default=None)
    p.add_argument("--P-values", dest="p_values", required=True, help="e.g. 8,16,32")
    p.add_argument("--reference", type=float, default=None)
    p.add_argument("--allow-degenerate", action="store_true")
    p.add_argument("--mixed", action="store_true", help="use c*x1^k + cstar shape")
    p.add_argument("--c", type=int, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--cstar", default=None)
    _add_common(p)

    p = subs.add_parser("zeroseries", help="density table for vanishing series")
    p.add_argument("--poly", required=True)
    p.add_argument("--arity", type=int, default=None)
    p.add_argument("--boxes", required=True, help="semicolon-separated, e.g. 10,10;50,50")
    p.add_argument("--cutoff", type=int, required=True)
    p.add_argument("--threshold", default="0.25", help="series threshold (rational ok)")
    _add_common(p)

    p = subs.add_parser("mixedform", help="mixed-box asymptotic experiment")
    p.add_argument("--c", type=int, required=True)
    p.add_argument("--k", type=int, required=True, choices=(3, 4))
    p.add_argument("--cstar", required=True)
    p.add_argument("--P-values", dest="p_values", required=True)
    p.add_argument("--cutoff", type=int, default=1000)
    p.add_argument("--bands", action="store_true", help="append the band diagnostic")
    _add_common(p)

    p = subs.add_parser("verify", help="run bundled oracle suites")
    p.add_argument("--suite", default="all", help="all or comma-separated suite names")
    _add_common(p)

    return parser


class RunConfig:
    """Resolved run options: flags > config file > environment > defaults."""

    def __init__(self, args: argparse.Namespace):
        file_values: dict[str, str] = {}
        if getattr(args, "config", None):
            file_values = _read_config(args.config)
        for key in file_values:
            if key not in _CONFIG_KEYS:
                raise ValueError(f"unknown config key {key!r}")

        def pick(flag_value, key: str, fallback):
            if flag_value is not None:
                return flag_value
            if key in file_values:
                raw = file_values[key]
                return type(fallback)(raw) if fallback is not None else raw
            return fallback

        env_points = os.environ.get("SQFREE_MAX_POINTS")
        default_points = int(env_points) if env_points else DEFAULT_MAX_POINTS
        self.threads = pick(getattr(args, "threads", None), "threads", 1)
        self.max_points = pick(getattr(args, "max_points", None), "max-points", default_points)
        self.max_value = pick(getattr(args, "max_value", None), "max-value", 10**16)
        self.format = pick(getattr(args, "format", None), "format", "json")
        self.out = pick(getattr(args, "out", None), "out", None)
        if self.threads < 1 or self.max_points < 1 or self.max_value < 1:
            raise ValueError("guards and thread count must be positive")


def _parse_poly(args: argparse.Namespace):
    return parse(args.poly, num_vars=args.arity)


def _parse_box(text: str) -> Box:
    return Box(tuple(int(tok) for tok in text.split(",")))


def _parse_int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",")]


def _emit(cfg: RunConfig, body: str):
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(body)
    else:
        sys.stdout.write(body)


def _json(payload) -> str:
    return json.dumps(payload, indent=2) + "\n"


def _rel_str(value: Optional[Fraction]) -> str:
    if value is None:
        return ""
    return decimal_string(value, 12)


# ---------------------------------------------------------------------------
# subcommand bodies
# ---------------------------------------------------------------------------

def _cmd_rho(args, cfg: RunConfig) -> str:
    poly = _parse_poly(args)
    fn = rho_bruteforce if args.brute else rho
    result = fn(poly, args.modulus, max_points=cfg.max_points)
    if cfg.format == "csv":
        return "modulus,count,method\n" f"{result.modulus},{result.count},{result.method}\n"
    return _json(
        {"modulus": result.modulus, "count": result.count, "method": result.method}
    )


def _cmd_series(args, cfg: RunConfig) -> str:
    poly = _parse_poly(args)
    report = singular_series(
        poly, args.cutoff, max_points=cfg.max_points, threads=cfg.threads
    )
    if cfg.format == "csv":
        lines = ["p,rho_p2"]
        lines += [f"{p},{r}" for p, r in report.per_prime_factors]
        return "\n".join(lines) + "\n"
    return _json(report.to_json_dict())


def _cmd_count(args, cfg: RunConfig) -> str:
    poly = _parse_poly(args)
    box = _parse_box(args.box)
    if len(box.bounds) != poly.num_vars:
        raise ValueError(
            f"box has {len(box.bounds)} bounds but polynomial has arity {poly.num_vars}"
        )
    reports = []
    if args.method in ("exact", "both"):
        if args.cutoff:
            reports.append(
                asymptotic_report(
                    poly, box, args.cutoff, max_points=cfg.max_points, threads=cfg.threads
                )
            )
        else:
            reports.append(
                count_exact(poly, box, max_points=cfg.max_points, threads=cfg.threads)
            )
    if args.method in ("sieve", "both"):
        reports.append(
            count_sieve(
                poly,
                box,
                max_points=cfg.max_points,
                max_value=cfg.max_value,
                threads=cfg.threads,
            )
        )
    if args.histogram_out:
        from .boxvalues import value_counts

        counts = value_counts(poly, box, max_points=cfg.max_points, threads=cfg.threads)
        with open(args.histogram_out, "w", encoding="utf-8") as fh:
            fh.write("n,R\n")
            for n in sorted(counts):
                fh.write(f"{n},{counts[n]}\n")
    if cfg.format == "csv":
        lines = ["box,exact_count,method,zero_value_points,predicted,relative_error"]
        for r in reports:
            pred = decimal_string(r.predicted_main_term, 12) if r.predicted_main_term is not None else ""
            lines.append(
                f"{'x'.join(map(str, r.box.bounds))},{r.exact_count},{r.method},"
                f"{r.zero_value_points},{pred},{_rel_str(r.relative_error)}"
            )
        return "\n".join(lines) + "\n"
    payload = [r.to_json_dict() for r in reports]
    return _json(payload[0] if len(payload) == 1 else payload)


def _parse_coeffs(text: str) -> QuadInstance:
    parts = [int(tok) for tok in text.split(",")]
    if len(parts) != 6:
        raise ValueError("--coeffs needs exactly six integers a,b,c,d,e,f")
    return QuadInstance(*parts)


def _cmd_quadcount(args, cfg: RunConfig) -> str:
    q = _parse_coeffs(args.coeffs)
    count, case = count_solutions(q, args.P)
    row = list(q.coeffs()) + [args.P, case.tag.value, count]
    header = "a,b,c,d,e,f,P,case,count"
    if args.brute:
        header += ",brute_count"
        row.append(count_solutions_bruteforce(q, args.P))
    if cfg.format == "json":
        keys = header.split(",")
        return _json(dict(zip(keys, row)))
    return header + "\n" + ",".join(str(v) for v in row) + "\n"


def _cmd_quadsolve(args, cfg: RunConfig) -> str:
    q = _parse_coeffs(args.coeffs)
    count, _case = count_solutions(q, args.P)
    if count > cfg.max_points:
        raise GuardExceeded(f"{count} solutions exceed listing guard {cfg.max_points}")
    sols = solutions(q, args.P)
    if cfg.format == "json":
        return _json([[x, y] for x, y in sols])
    return "x,y\n" + "".join(f"{x},{y}\n" for x, y in sols)


def _cmd_collisions(args, cfg: RunConfig) -> str:
    p_values = _parse_int_list(args.p_values)
    if args.mixed:
        if args.c is None or args.k is None or not args.cstar:
            raise ValueError("--mixed needs --c, --k and --cstar")
        cstar = parse(args.cstar)
        samples = [
            (P, mixed_collision_count(args.c, args.k, cstar, P, threads=cfg.threads))
            for P in p_values
        ]
        s = cstar.num_vars
        default_ref = 2 * s - 3 + 3.0 / args.k / 2  # 2s-3 plus Q-exponent/2
    else:
        if not args.poly:
            raise ValueError("--poly is required without --mixed")
        poly = _parse_poly(args)
        samples = [
            (
                P,
                collision_count(
                    poly, P, allow_degenerate=args.allow_degenerate, threads=cfg.threads
                ),
            )
            for P in p_values
        ]
        default_ref = 2 * poly.num_vars - 2
    reference = args.reference if args.reference is not None else default_ref
    if cfg.format == "json":
        payload = {
            "samples": [[p, n] for p, n in samples],
            "reference": repr(float(reference)),
        }
        if len(samples) >= 3:
            fit = exponent_fit(samples, reference)
            payload["slope"] = repr(fit.slope)
            payload["excess"] = repr(fit.excess)
        return _json(payload)
    lines = ["P,count,log_slope_so_far"]
    for i in range(len(samples)):
        prefix = samples[: i + 1]
        if i >= 1:
            t0, n0 = prefix[0]
            t1, n1 = prefix[-1]
            slope = (math.log(n1) - math.log(n0)) / (math.log(t1) - math.log(t0))
            slope_txt = f"{slope:.6f}"
        else:
            slope_txt = ""
        lines.append(f"{prefix[-1][0]},{prefix[-1][1]},{slope_txt}")
    return "\n".join(lines) + "\n"


def _cmd_zeroseries(args, cfg: RunConfig) -> str:
    poly = _parse_poly(args)
    boxes = [_parse_box(part) for part in args.boxes.split(";")]
    threshold = Fraction(args.threshold)
    rows = vanishing_density_table(
        poly,
        boxes,
        args.cutoff,
        series_threshold=threshold,
        max_points=cfg.max_points,
        threads=cfg.threads,
    )
    if cfg.format == "json":
        return _json(
            [
                {
                    "box": list(r.box.bounds),
                    "exact_count": r.exact_count,
                    "density": decimal_string(r.density, 12),
                    "sieve_bound_count": r.sieve_bound_count,
                    "sieve_bound_density": decimal_string(r.sieve_bound_density, 12),
                }
                for r in rows
            ]
        )
    lines = ["box,points,exact_count,density,sieve_bound_count,sieve_bound_density"]
    for r in rows:
        lines.append(
            f"{'x'.join(map(str, r.box.bounds))},{r.box.point_count},{r.exact_count},"
            f"{decimal_string(r.density, 12)},{r.sieve_bound_count},"
            f"{decimal_string(r.sieve_bound_density, 12)}"
        )
    return "\n".join(lines) + "\n"


def _cmd_mixedform(args, cfg: RunConfig) -> str:
    cstar = parse(args.cstar)
    p_values = _parse_int_list(args.p_values)
    rows = mixed_form_table(
        args.c,
        args.k,
        cstar,
        p_values,
        cutoff=args.cutoff,
        max_points=cfg.max_points,
        threads=cfg.threads,
    )
    band_rows = []
    if args.bands:
        for P in p_values:
            band_rows.append(
                (P, mixed_form_band_diagnostic(args.c, args.k, cstar, P, threads=cfg.threads))
            )
    if cfg.format == "json":
        payload = {
            "rows": [
                {
                    "P": r.P,
                    "Q": r.Q,
                    "N_exact": r.exact_count,
                    "predicted": decimal_string(r.predicted, 12),
                    "rel_error": _rel_str(r.relative_error),
                }
                for r in rows
            ]
        }
        if band_rows:
            payload["bands"] = [
                {
                    "P": P,
                    "bands": [
                        {
                            "lower": b.lower,
                            "upper": b.upper,
                            "primes": b.prime_count,
                            "points": b.point_count,
                        }
                        for b in bands
                    ],
                }
                for P, bands in band_rows
            ]
        return _json(payload)
    lines = ["P,Q,N_exact,predicted,rel_error"]
    for r in rows:
        lines.append(
            f"{r.P},{r.Q},{r.exact_count},{decimal_string(r.predicted, 12)},"
            f"{_rel_str(r.relative_error)}"
        )
    body = "\n".join(lines) + "\n"
    if band_rows:
        body += "P,band_lower,band_upper,primes,points\n"
        for P, bands in band_rows:
            for b in bands:
                upper = b.upper if b.upper is not None else "inf"
                body += f"{P},{b.lower},{upper},{b.prime_count},{b.point_count}\n"
    return body


class _SuiteFailure(Exception):
    pass


def _cmd_verify(args, cfg: RunConfig) -> str:
    names = list(SUITES) if args.suite == "all" else args.suite.split(",")
    for name in names:
        if name not in SUITES:
            raise ValueError(f"unknown suite {name!r}; choices: {', '.join(SUITES)}")
    ok = run_suites(names)
    if not ok:
        raise _SuiteFailure("one or more verification suites failed")
    return ""


_DISPATCH = {
    "rho": _cmd_rho,
    "series": _cmd_series,
    "count": _cmd_count,
    "quadcount": _cmd_quadcount,
    "quadsolve": _cmd_quadsolve,
    "collisions": _cmd_collisions,
    "zeroseries": _cmd_zeroseries,
    "mixedform": _cmd_mixedform,
    "verify": _cmd_verify,
}


def _error_json(exc: Exception, code: int):
    sys.stderr.write(
        json.dumps(
            {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
        )
        + "\n"
    )


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig(args)
        body = _DISPATCH[args.command](args, cfg)
        if body:
            _emit(cfg, body)
        return 0
    except _SuiteFailure as exc:
        sys.stderr.write(str(exc) + "\n")
        return 1
    except PolyParseError as exc:
        _error_json(exc, 2)
        return 2
    except GuardExceeded as exc:
        _error_json(exc, 3)
        return 3
    except PreconditionError as exc:
        _error_json(exc, 4)
        return 4
    except (ValueError, OSError) as exc:
        _error_json(exc, 2)
        return 2


if __name__ == "__main__":
    sys.exit(main())
