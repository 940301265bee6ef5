"""Command-line interface: ``quadforms <subcommand> --form F ...``.

Exit codes: 0 success, 2 bad input or failed precondition, 3 budget
exhausted.  Reports go to stdout as JSON (or CSV for ``theta``); errors
go to stderr as JSON.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import densities, genus, local, theta
from .clifford import OrthogonalMap, spinor_norm_report
from .forms import QuadraticForm, sum_of_squares

EXIT_OK, EXIT_INPUT, EXIT_BUDGET = 0, 2, 3
SCHEMA_DIR = Path(__file__).with_name("schemas")


class InputError(ValueError):
    pass


def rational(x) -> dict:
    x = Fraction(x)
    return {"num": x.numerator, "den": x.denominator, "decimal": float(x)}


def load_json_arg(text: str):
    """Inline JSON, or a path to a JSON file."""
    if text is None:
        raise InputError("missing required JSON input")
    s = text.strip()
    if s[:1] in "[{":
        try:
            return json.loads(s)
        except json.JSONDecodeError as e:
            raise InputError(f"malformed JSON: {e}") from None
    path = Path(text)
    if not path.is_file():
        raise InputError(f"no such file: {text}")
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise InputError(f"malformed JSON in {text}: {e}") from None


def load_form(text: str) -> QuadraticForm:
    obj = load_json_arg(text)
    if not isinstance(obj, dict) or "hessian" not in obj:
        raise InputError('form JSON needs a "hessian" field')
    try:
        return QuadraticForm.from_json(obj)
    except (TypeError, ValueError) as e:
        raise InputError(f"invalid form: {e}") from None


def _place(text):
    if text in ("inf", "infinity", "oo"):
        return local.INF
    try:
        return int(text)
    except ValueError:
        raise InputError(f"bad place {text!r}") from None


def _primes(text):
    if not text:
        return None
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise InputError(f"bad prime list {text!r}") from None


def _prime_arg(args):
    v = _place(_need(args, "p"))
    if v == local.INF:
        raise InputError("a finite prime is needed here")
    return v


def _need(args, name):
    v = getattr(args, name)
    if v is None:
        raise InputError(f"--{name} is required for this subcommand")
    return v


# ---------------------------------------------------------------- subcommands


def cmd_invariants(args):
    Q = load_form(_need(args, "form"))
    where = args.place if args.place is not None else args.p
    places = [_place(where)] if where is not None else [local.INF] + local.relevant_primes(Q)
    rows = [dict(local.invariant_triple(Q, v).to_json(), place=v) for v in places]
    if len(rows) == 1:
        return rows[0]
    return {"places": rows}


def cmd_density(args):
    Q = load_form(_need(args, "form"))
    v = _place(_need(args, "p"))
    m = _need(args, "m")
    if v == local.INF:
        val = densities.local_density_infty(Q, m)
    else:
        val = densities.local_density_p(Q, m, v, budget=args.budget)
    return val.to_json()


def cmd_eisenstein(args):
    Q = load_form(_need(args, "form"))
    m = _need(args, "m")
    if args.mode == "genus":
        cat = genus.genus_enumerate(Q, _primes(args.primes))
        out = densities.eisenstein_coefficient_genus_avg(Q, m, cat)
    else:
        tail = "l_value" if args.mode == "l-value" else None
        out = densities.eisenstein_coefficient_product(Q, m, tail=tail, budget=args.budget)
    return out.to_json()


def cmd_theta(args):
    Q = load_form(_need(args, "form"))
    M = _need(args, "max")
    if args.format == "csv":
        cat = genus.genus_enumerate(Q, _primes(args.primes))
        return theta.theta_table_csv(Q, M, cat, allow_heuristic=True)
    return theta.theta_coefficients(Q, M).to_json()


def cmd_neighbors(args):
    Q = load_form(_need(args, "form"))
    p = _prime_arg(args)
    nbs = genus.all_p_neighbors(Q, p, detailed=True)
    return {
        "p": p,
        "point_count": len(genus.isotropic_points_mod_p(Q, p)),
        "neighbors": [{"point": list(nb.point), "w": list(nb.w), "hessian": nb.form.hessian} for nb in nbs],
    }


def cmd_genus(args):
    Q = load_form(_need(args, "form"))
    cat = genus.genus_enumerate(Q, _primes(args.primes))
    out = cat.to_json()
    p = _prime_arg(args) if args.p is not None else cat.primes_used[0]
    out["graph"] = genus.neighbor_graph(Q, p, cat).to_json()
    return out


def cmd_mass(args):
    Q = load_form(_need(args, "form"))
    cat = genus.genus_enumerate(Q, _primes(args.primes))
    return {
        "mass": rational(cat.mass),
        "class_number": cat.class_number,
        "completeness": cat.completeness,
    }


def cmd_spinor_norm(args):
    Q = load_form(_need(args, "form"))
    mat = load_json_arg(_need(args, "matrix"))
    try:
        sigma = OrthogonalMap([[Fraction(x) for x in r] for r in mat], Q)
    except (TypeError, ValueError) as e:
        raise InputError(f"invalid matrix: {e}") from None
    return spinor_norm_report(sigma)


def selftest_report(M=100):
    """Sum of four squares three ways against the divisor formula."""
    Q = sum_of_squares(4)
    cat = genus.genus_enumerate(Q)
    avg = densities.eisenstein_series_genus_avg(cat, M)
    coeffs = theta.theta_coefficients(Q, M).coefficients
    rows = []
    for m in range(1, M + 1):
        j = densities.jacobi_r4(m)
        row = {
            "m": m,
            "jacobi": j,
            "enumeration_residual": coeffs[m] - j,
            "genus_average_residual": str(avg[m] - j),
        }
        try:
            prod = densities.eisenstein_coefficient_product(Q, m).value.rational()
            row["product_residual"] = str(prod - j)
        except densities.UnsupportedError:
            row["product_residual"] = None
        rows.append(row)
    ok = all(
        r["enumeration_residual"] == 0
        and r["genus_average_residual"] == "0"
        and r["product_residual"] in (None, "0")
        for r in rows
    )
    return {"status": "PASS" if ok else "FAIL", "genus_completeness": cat.completeness, "rows": rows}


def cmd_selftest(args):
    return selftest_report(args.max or 100)


COMMANDS = {
    "invariants": cmd_invariants,
    "density": cmd_density,
    "eisenstein": cmd_eisenstein,
    "theta": cmd_theta,
    "neighbors": cmd_neighbors,
    "genus": cmd_genus,
    "mass": cmd_mass,
    "spinor-norm": cmd_spinor_norm,
    "selftest": cmd_selftest,
}


def _positive(text):
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser():
    parser = argparse.ArgumentParser(prog="quadforms", description="Arithmetic of integral quadratic forms.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--form", help="form JSON {'hessian': [[...]]} inline or as a file path")
    common.add_argument("--p", help="prime ('inf' allowed where a place is meant)")
    common.add_argument("--m", type=int, help="represented integer")
    common.add_argument("--max", type=int, help="largest theta coefficient")
    common.add_argument("--primes", help="comma separated primes for neighbor steps")
    common.add_argument("--threads", type=_positive, default=1, help="worker threads (currently computed serially)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument(
        "--budget",
        type=_positive,
        default=int(os.environ.get("QUADFORMS_BUDGET", densities.DEFAULT_BUDGET)),
        help="enumeration budget (env QUADFORMS_BUDGET)",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "invariants":
            sp.add_argument("--place", help="prime or 'inf'")
        if name == "eisenstein":
            sp.add_argument("--mode", choices=["product", "l-value", "genus"], default="product")
        if name == "spinor-norm":
            sp.add_argument("--matrix", help="orthogonal matrix JSON (rationals as strings allowed)")
    return parser


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        report = COMMANDS[args.command](args)
    except densities.BudgetExceeded as e:
        json.dump({"error": "budget_exceeded", "message": str(e)}, stderr)
        stderr.write("\n")
        return EXIT_BUDGET
    except (InputError, ValueError, ArithmeticError) as e:
        json.dump({"error": type(e).__name__, "message": str(e)}, stderr)
        stderr.write("\n")
        return EXIT_INPUT
    if isinstance(report, str):
        stdout.write(report)
    else:
        json.dump(report, stdout, indent=2)
        stdout.write("\n")
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
