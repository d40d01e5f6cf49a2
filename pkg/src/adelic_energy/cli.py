"""Command-line front end.

Exit codes: 0 success, 1 computational failure, 2 usage or input error.
JSON output is deterministic: sorted keys, shortest round-trip floats,
exact integers and rationals as strings.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from typing import Any

from . import __version__
from .battery import run_battery
from .errors import (
    AdelicError,
    DegenerateMap,
    FactorizationTimeout,
    InvalidInput,
    ParseError,
    UnsupportedMap,
)
from .heights import (
    AlgebraicOrbit,
    arakelov_height,
    arakelov_height_map,
    canonical_height,
    check_height_inequalities,
    naive_height,
    standard_potential,
)
from .local_energy import SphereQuadrature
from .maps import INFINITY, RationalMap, reduction_datum, render
from .norms import ENCLOSURE_QUAD, az_pairing, norm_report
from .parser import map_from_json, parse_map, parse_rational_function
from .polynomials import IntegerPolynomial, render_polynomial

INPUT_ERRORS = (ParseError, InvalidInput, DegenerateMap, UnsupportedMap)
QUAD_SELFTEST_CRITERIA = ("1", "2", "3")


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# output


def _plain(x: Any) -> Any:
    """JSON-ready copy: rationals and wide integers become strings, non-finite floats too."""
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, int):
        return x if abs(x) < 2**53 else str(x)
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, float):
        return x if math.isfinite(x) else repr(x)
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if hasattr(x, "item"):
        return _plain(x.item())
    raise TypeError(f"cannot serialize {type(x).__name__}")


def dumps(payload: dict) -> str:
    return json.dumps(_plain(payload), sort_keys=True, indent=2, ensure_ascii=False)


def _text(payload: dict, indent: str = "") -> str:
    lines = []
    for key in sorted(payload):
        value = payload[key]
        if isinstance(value, dict) and value:
            lines.append(f"{indent}{key}:")
            lines.append(_text(value, indent + "  "))
        elif isinstance(value, (list, tuple)) and value and isinstance(value[0], dict):
            lines.append(f"{indent}{key}:")
            for item in value:
                lines.append(f"{indent}  - " + ", ".join(f"{k}={_plain(item[k])}" for k in sorted(item)))
        else:
            lines.append(f"{indent}{key}: {_plain(value)}")
    return "\n".join(lines)


def _table(rows: list[dict]) -> str:
    cols = ["criterion", "status", "check", "expected", "got", "slack"]
    cells = [[str(_plain(r[c])) if c != "slack" else f"{r[c]:.3g}" for c in cols] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
    out = ["  ".join(c.ljust(w) for c, w in zip(cols, widths))]
    out.append("  ".join("-" * w for w in widths))
    out += ["  ".join(v.ljust(w) for v, w in zip(row, widths)) for row in cells]
    return "\n".join(out)


def _map_json(f: RationalMap) -> dict:
    # coefficients are exact data, so always strings
    return {"expression": render(f), "num": [str(c) for c in f.P.coeffs], "den": [str(c) for c in f.Q.coeffs], "degree": f.d}


def _interval(iv) -> dict:
    return {"lo": iv.lo, "hi": iv.hi}


# ---------------------------------------------------------------------------
# input


def _load_inputs(args) -> list:
    """Map specs from positional arguments or the --in file."""
    specs = list(getattr(args, "maps", None) or [])
    if args.infile:
        if specs:
            raise UsageError("give maps either as arguments or with --in, not both")
        try:
            with open(args.infile, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise UsageError(f"cannot read {args.infile}: {exc.strerror}") from exc
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON in {args.infile}: {exc.msg}", exc.pos) from exc
        if isinstance(data, dict) and "maps" in data:
            data = data["maps"]
        specs = data if isinstance(data, list) else [data]
    return specs


def _maps(args, count: int) -> list[RationalMap]:
    specs = _load_inputs(args)
    if len(specs) != count:
        raise UsageError(f"{args.command} needs {count} map(s), got {len(specs)}")
    return [parse_map(s) if isinstance(s, str) else map_from_json(s) for s in specs]


def parse_point(text: str):
    """'inf', a rational constant, or a polynomial whose roots form an orbit."""
    if text.strip().lower() in ("inf", "infinity", "∞"):
        return INFINITY
    num, den = parse_rational_function(text)
    if len(den) != 1:
        raise InvalidInput("a point must be a number or a polynomial, not a quotient")
    num = [c / den[0] for c in num]
    if len(num) <= 1:
        return num[0] if num else Fraction(0)
    scale = math.lcm(*(c.denominator for c in num))
    return AlgebraicOrbit(IntegerPolynomial(int(c * scale) for c in num))


def _point_json(x) -> dict:
    if x is INFINITY:
        return {"kind": "infinity"}
    if isinstance(x, Fraction):
        return {"kind": "rational", "value": str(x)}
    return {"kind": "orbit", "polynomial": render_polynomial(x.defining_poly.coeffs), "size": x.N}


# ---------------------------------------------------------------------------
# commands


def cmd_norm(args) -> tuple[dict, int]:
    (f,) = _maps(args, 1)
    tol = args.tol if args.tol is not None else ENCLOSURE_QUAD.tol
    quad = SphereQuadrature(ENCLOSURE_QUAD.radial_nodes, ENCLOSURE_QUAD.angular_nodes, tol, ENCLOSURE_QUAD.refinement_levels)
    samples = args.samples or 100_000
    rep = norm_report(f, args.depth, quad, samples, seed=args.seed, period_max=args.period_max, threads=args.threads)
    payload = {
        "map": _map_json(f),
        "config": {"depth": rep.depth_used, "tol": tol, "samples": samples, "seed": str(args.seed)},
        "enclosure": _interval(rep.enclosure),
        "levels": [
            {"n": l.n, "energy": l.energy, "error": l.error, "lo": l.interval.lo, "hi": l.interval.hi} for l in rep.levels
        ],
        "monte_carlo": None
        if rep.mc_estimate is None
        else {"estimate": rep.mc_estimate[0], "stderr": rep.mc_estimate[1]},
        "small_points": {
            "estimate": rep.small_points_estimate.value,
            "trend": [{"n": n, "value": v} for n, v in rep.small_points_estimate.trend],
        },
        "flags": list(rep.consistency_flags),
    }
    if rep.mc_skipped:
        payload["monte_carlo_skipped"] = rep.mc_skipped
    return payload, 0


def cmd_az(args) -> tuple[dict, int]:
    f, g = _maps(args, 2)
    tol = args.tol if args.tol is not None else 1e-3
    n_max = args.period_max or 8
    m_max = args.telescope_max or 8
    rep = az_pairing(f, g, n_max, m_max, tol, symmetric=args.symmetric)
    payload = {
        "f": _map_json(f),
        "g": _map_json(g),
        "config": {"tol": tol, "period_max": n_max, "telescope_max": m_max, "symmetric": args.symmetric},
        "estimate": rep.estimate,
        "per_period": [{"n": n, "value": v} for n, v in rep.per_period],
        "errors": [{"n": n, "error": e} for n, e in rep.errors],
        "envelope": None if rep.envelope is None else _interval(rep.envelope),
        "symmetric_check": rep.symmetric_check,
    }
    return payload, 0


def cmd_height(args) -> tuple[dict, int]:
    x = parse_point(args.point)
    f = None
    if args.map is not None or args.infile:
        if args.map is not None and args.infile:
            raise UsageError("give the map either with --map or with --in, not both")
        args.maps = [args.map] if args.map is not None else []
        (f,) = _maps(args, 1)
    payload = {
        "point": _point_json(x),
        "naive": naive_height(x).value,
        "arakelov": arakelov_height(x).value,
        "standard_potential": standard_potential(x),
        "inequality_slacks": check_height_inequalities(x).slacks,
    }
    if f is not None:
        tol = args.tol if args.tol is not None else 1e-9
        m_max = args.telescope_max or 8
        h = canonical_height(f, x, m_max, tol)
        payload["map"] = _map_json(f)
        payload["canonical"] = {"value": h.value, "error_estimate": h.error_estimate, "flags": list(h.flags)}
        payload["config"] = {"tol": tol, "telescope_max": m_max}
    return payload, 0


def cmd_map_info(args) -> tuple[dict, int]:
    (f,) = _maps(args, 1)
    datum = reduction_datum(f)
    payload = {
        "map": _map_json(f),
        "is_polynomial": f.is_polynomial,
        "reduction_datum": str(datum.R),
        "arakelov_height": arakelov_height_map(f).value,
    }
    try:
        fac = reduction_datum(f, with_primes=True).bad_primes
        payload["bad_primes"] = {str(p): e for p, e in fac.factors}
    except FactorizationTimeout as exc:
        payload["bad_primes"] = {str(p): e for p, e in exc.partial.factors} if exc.partial else {}
        payload["unfactored_cofactor"] = str(exc.cofactor)
    return payload, 0


def _battery_payload(rows) -> tuple[dict, int]:
    table = [
        {
            "criterion": r.criterion,
            "check": r.name,
            "expected": r.expected,
            "got": r.got,
            "slack": r.slack,
            "status": r.status,
        }
        for r in rows
    ]
    failed = sum(r.status == "fail" for r in rows)
    payload = {
        "checks": table,
        "summary": {
            "pass": sum(r.status == "pass" for r in rows),
            "fail": failed,
            "known_false": sum(r.status == "xfail" for r in rows),
        },
    }
    return payload, 1 if failed else 0


def _progress(key: str) -> None:
    print(f"running criterion {key}", file=sys.stderr, flush=True)


def cmd_verify(args) -> tuple[dict, int]:
    only = args.criteria.split(",") if args.criteria else None
    return _battery_payload(run_battery(only, _progress))


def cmd_quad_selftest(args) -> tuple[dict, int]:
    return _battery_payload(run_battery(QUAD_SELFTEST_CRITERIA, _progress))


COMMANDS = {
    "norm": cmd_norm,
    "az": cmd_az,
    "height": cmd_height,
    "map-info": cmd_map_info,
    "verify": cmd_verify,
    "quad-selftest": cmd_quad_selftest,
}


# ---------------------------------------------------------------------------
# argument parsing


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError("must be a positive finite number")
    return v


def _seed(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=_positive_float, help="numerical tolerance (command specific default)")
    common.add_argument("--depth", type=_positive_int, help="enclosure depth: iterates f^1..f^depth")
    common.add_argument("--samples", type=_positive_int, help="Monte Carlo samples (default 100000)")
    common.add_argument("--seed", type=_seed, default=0, help="64-bit random seed (default 0)")
    common.add_argument("--period-max", type=_positive_int, help="largest period for small points")
    common.add_argument("--telescope-max", type=_positive_int, help="largest iterate in canonical heights")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--threads", type=_positive_int, default=1, help="worker threads; output does not depend on it")
    common.add_argument("--in", dest="infile", metavar="FILE", help="JSON file with the map(s)")

    parser = argparse.ArgumentParser(
        prog="adelic-energy",
        description="Energies of canonical measures of rational maps over Q, heights and pairings.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("norm", parents=[common], help="enclosure, Monte Carlo and small-point estimates")
    p.add_argument("maps", nargs="*", metavar="MAP")
    p = sub.add_parser("az", parents=[common], help="pairing of two maps via small points of the first")
    p.add_argument("maps", nargs="*", metavar="MAP")
    p.add_argument("--symmetric", action="store_true", help="also run with the roles swapped")
    p = sub.add_parser("height", parents=[common], help="naive, Arakelov and canonical heights of a point")
    p.add_argument("point", help="'inf', a rational, or a polynomial whose roots form the orbit")
    p.add_argument("--map", help="map for the canonical height")
    p = sub.add_parser("map-info", parents=[common], help="normal form, reduction datum and bad primes")
    p.add_argument("maps", nargs="*", metavar="MAP")
    p = sub.add_parser("verify", parents=[common], help="run the oracle battery")
    p.add_argument("--criteria", help="comma separated subset, e.g. 1,2,10")
    sub.add_parser("quad-selftest", parents=[common], help="quadrature checks against closed forms")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    base = {"command": args.command, "version": __version__}
    try:
        payload, code = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        payload, code = {"error": "usage-error", "message": str(exc)}, 2
    except INPUT_ERRORS as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
        payload, code = {"error": exc.code, "message": str(exc)}, 2
        if isinstance(exc, ParseError):
            payload["offset"] = exc.offset
    except AdelicError as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
        payload, code = {"error": exc.code, "message": str(exc)}, 1
    payload = {**base, **payload}
    if args.format == "text":
        if "checks" in payload:
            print(_table(payload["checks"]))
            s = payload["summary"]
            print(f"\n{s['pass']} pass, {s['fail']} fail, {s['known_false']} known false")
        else:
            print(_text(payload))
    else:
        print(dumps(payload))
    return code


if __name__ == "__main__":
    sys.exit(main())
