"""Command-line interface.

Exit codes: 0 success, 1 domain failure (invalid algebra, non-central
Casimir, singular configuration), 2 usage or I/O problems.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import List, Optional

import numpy as np

from . import multiindex as mi_ops
from .algebra_def import ConfigError, as_order, casimir_element, load_algebra, parse_polynomial, validate
from .casimir_constraints import (NonCentralCasimirError, generate_tower,
                                  independence_check, parse_axis, scan_grid)
from .moments import MissingVariableError, PhasePoint, evaluate, expectation
from .nc_poly import X, NCPoly, is_central, weyl_quantize

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _emit(obj, out: Optional[str] = None) -> None:
    text = json.dumps(obj, indent=2)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _order(args) -> int:
    if args.order is None:
        raise UsageError("--order is required")
    try:
        return as_order(args.order)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _parse_value(text: str):
    text = text.strip()
    try:
        return Fraction(text)
    except ValueError:
        raise UsageError(f"not a number: {text!r}") from None


def parse_point(text: str, M: int) -> List[object]:
    """``"x1=0,x2=1/2"``; unspecified coordinates are 0.  Values stay exact."""
    vals: List[object] = [Fraction(0)] * M
    for item in filter(None, (s.strip() for s in text.split(","))):
        if "=" not in item:
            raise UsageError(f"expected name=value, got {item!r}")
        name, val = item.split("=", 1)
        try:
            k = int(name.strip().lstrip("x")) - 1
        except ValueError:
            raise UsageError(f"unknown coordinate {name!r}") from None
        if not 0 <= k < M:
            raise UsageError(f"coordinate {name!r} out of range")
        vals[k] = _parse_value(val)
    return vals


def load_hamiltonian(path: str, spec) -> NCPoly:
    """``{"kind": "weyl", "polynomial": {"0,0,1": "1"}}``."""
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc.msg})") from exc
    if data.get("kind") != "weyl":
        raise ConfigError('Hamiltonian files need "kind": "weyl"')
    return weyl_quantize(spec, parse_polynomial(data.get("polynomial", {}), spec.dimension), X)


# subcommands ---------------------------------------------------------------------------

def cmd_check(args) -> int:
    spec = load_algebra(args.algebra)
    rep = validate(spec)
    out = rep.to_json()
    central = None
    if rep.valid:
        central = is_central(casimir_element(spec))
    out["casimir_central"] = central
    _emit(out, args.out)
    return EXIT_OK if rep.valid and central else EXIT_DOMAIN


def _valid_spec(args):
    spec = load_algebra(args.algebra)
    rep = validate(spec)
    if not rep.valid:
        _emit(rep.to_json())
        return None
    return spec


def cmd_bracket_table(args) -> int:
    spec = _valid_spec(args)
    if spec is None:
        return EXIT_DOMAIN
    from .qpoisson import table_for

    _emit(table_for(spec).dump(_order(args)), args.out)
    return EXIT_OK


def cmd_constraints(args) -> int:
    spec = _valid_spec(args)
    if spec is None:
        return EXIT_DOMAIN
    N = _order(args)
    tower = generate_tower(spec, N, parallel=True)
    census = tower.census()
    M = spec.dimension
    # order n + 1 adds binom(n + M - 1, M - 1) constraints, those with |i| = n
    expected = {n: mi_ops.count(M, n) for n in range(N)}
    _emit({
        "order": N,
        "count": len(tower),
        "constraints": {mi_ops.fmt(i): str(c) for i, c in tower.items()},
        "census": {str(n): census.get(n, 0) for n in range(N)},
        "expected_increments": {str(n): v for n, v in expected.items()},
        "census_ok": all(census.get(n, 0) == v for n, v in expected.items()),
    }, args.out)
    return EXIT_OK


def cmd_independence(args) -> int:
    spec = _valid_spec(args)
    if spec is None:
        return EXIT_DOMAIN
    N = _order(args)
    tol = args.tolerance
    if not tol > 0:
        raise UsageError("--tolerance must be positive")
    tower = generate_tower(spec, N)
    M = spec.dimension
    if args.grid:
        base = parse_point(args.point, M) if args.point else None
        axes = [parse_axis(g) for g in args.grid]
        reports = scan_grid(tower, axes, base, tol)
        lines = []
        for r in reports:
            lines.append(json.dumps({"point": [str(v) for v in r.point], "rank": r.rank,
                                     "rows": len(r.rows), "deficient": r.deficient}))
        lines.append(json.dumps({"summary": True, "points": len(reports),
                                 "deficient_points": [[str(v) for v in r.point]
                                                      for r in reports if r.deficient]}))
        text = "\n".join(lines)
        if args.out:
            Path(args.out).write_text(text + "\n")
        else:
            print(text)
        return EXIT_OK
    if not args.point:
        raise UsageError("independence needs --point or --grid")
    point = parse_point(args.point, M)
    report = independence_check(tower, point, tol, hbar=args.hbar, full=args.full)
    _emit(report.to_json(), args.out)
    return EXIT_DOMAIN if report.dC_zero else EXIT_OK


def _initial_point(args, spec, N: int):
    """Return (PhasePoint, oracle rep or None, oracle state or None)."""
    from . import rep_oracle as ro

    text = args.initial or ""
    rep = psi = None
    if args.oracle is not None:
        if args.hbar is None:
            raise UsageError("--oracle needs --hbar")
        rep = ro.su2_rep(Fraction(args.oracle), args.hbar)
        if len(rep.mats) != spec.dimension or rep.commutator_residual(spec) > 1e-10:
            raise UsageError("--oracle supports su(2)-type algebras only")
    if text.startswith("coherent"):
        params = dict(item.split("=") for item in text.split(":", 1)[1].split(",")) if ":" in text else {}
        j = Fraction(params.get("j", args.oracle if args.oracle is not None else 1))
        if args.hbar is None:
            raise UsageError("coherent initial data needs --hbar")
        if rep is None:
            rep = ro.su2_rep(j, args.hbar)
        psi = ro.coherent_state(j, float(params.get("theta", 0.0)), float(params.get("phi", 0.0)))
        return ro.phase_point(rep, psi, N), (rep if args.oracle is not None else None), psi
    if not text:
        raise UsageError("--initial is required")
    try:
        data = json.loads(Path(text).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read {text}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{text}: invalid JSON ({exc.msg})") from exc
    if "x" not in data:
        raise MissingVariableError("initial data has no 'x' entry")
    eps = {tuple(int(s) for s in k.replace("(", "").replace(")", "").split(",")): float(v)
           for k, v in data.get("eps", {}).items()}
    hbar = args.hbar if args.hbar is not None else data.get("hbar")
    if hbar is None:
        raise UsageError("no hbar given (flag or initial file)")
    point = PhasePoint(tuple(float(v) for v in data["x"]), eps, float(hbar))
    if rep is not None:
        raise UsageError("--oracle needs coherent initial data")
    return point, None, None


def cmd_evolve(args) -> int:
    from . import dynamics

    spec = _valid_spec(args)
    if spec is None:
        return EXIT_DOMAIN
    N = _order(args)
    if not args.hamiltonian:
        raise UsageError("--hamiltonian is required")
    if not args.out:
        raise UsageError("--out is required")
    if not args.dt > 0:
        raise UsageError("--dt must be positive")
    H = load_hamiltonian(args.hamiltonian, spec)
    point, rep, psi = _initial_point(args, spec, N)
    system = dynamics.build_system(spec, H, N)
    tower = None
    try:
        tower = generate_tower(spec, N)
    except NonCentralCasimirError:
        tower = None
    try:
        traj = dynamics.integrate(system, point, args.t_end, args.dt, tower=tower)
    except dynamics.DivergenceError as exc:
        dynamics.write_csv(exc.trajectory, args.out, {"diverged_at": exc.last_time})
        print(json.dumps({"error": str(exc), "last_time": exc.last_time}), file=sys.stderr)
        return EXIT_DOMAIN
    meta = {"algebra": spec.name or str(args.algebra), "order": N, "dt": args.dt,
            "t_end": args.t_end}
    if rep is not None:
        from . import rep_oracle as ro

        ex = ro.schrodinger_evolve(rep, psi, ro.operator(rep, H), args.t_end, args.dt)
        for i in range(spec.dimension):
            traj.extra[f"oracle_x{i + 1}"] = ex.means[: len(traj.t), i]
        dev = float(np.abs(traj.data[:, : spec.dimension] - ex.means[: len(traj.t)]).max())
        meta["oracle_j"] = str(Fraction(args.oracle))
        meta["oracle_max_deviation"] = dev
    report = dynamics.conserve_check(system, traj)
    meta["conservation"] = report.to_json()
    dynamics.write_csv(traj, args.out, meta)
    print(json.dumps({"rows": len(traj.t), "out": str(args.out), **{
        k: v for k, v in meta.items() if k in ("oracle_max_deviation",)}, "H_drift": report.H_drift}))
    return EXIT_OK


_COMPARE_WORDS = [(0,), (0, 1), (1, 0), (2, 2), (0, 1, 2), (1, 1, 0), (2, 0, 2), (0, 0, 0),
                  (1, 2, 1), (2, 1, 0)]


def cmd_oracle_compare(args) -> int:
    from . import rep_oracle as ro

    spec = _valid_spec(args)
    if spec is None:
        return EXIT_DOMAIN
    if args.hbar is None or args.oracle is None:
        raise UsageError("oracle-compare needs --oracle and --hbar")
    rep = ro.su2_rep(Fraction(args.oracle), args.hbar)
    if len(rep.mats) != spec.dimension or rep.commutator_residual(spec) > 1e-10:
        raise UsageError("oracle-compare supports su(2)-type algebras only")
    rng = np.random.default_rng(args.seed)
    polys = [NCPoly.word(spec, w) for w in _COMPARE_WORDS]
    symb = [expectation(p) for p in polys]
    N = max(p.degree() for p in polys)
    worst = 0.0
    for _ in range(args.samples):
        psi = ro.random_state(rep.d, rng)
        pp = ro.phase_point(rep, psi, N)
        for p, f in zip(polys, symb):
            worst = max(worst, abs(evaluate(f, pp) - ro.nc_expectation(rep, psi, p)))
    ok = worst <= 1e-10
    _emit({"samples": args.samples, "elements": len(polys), "max_error": worst, "passed": ok},
          args.out)
    return EXIT_OK if ok else EXIT_DOMAIN


# entry point ------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="liemoment", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, order=True):
        p.add_argument("--algebra", required=True, help="algebra JSON file")
        if order:
            p.add_argument("--order", type=int, help="truncation order N (>= 2)")
        p.add_argument("--out", help="output path (default stdout)")

    common(sub.add_parser("check", help="validate an algebra and its Casimir"), order=False)
    common(sub.add_parser("bracket-table", help="dump atom brackets up to a moment degree"))
    common(sub.add_parser("constraints", help="print the truncated constraint tower"))
    p = sub.add_parser("independence", help="rank of the symmetric constraint gradient")
    common(p)
    p.add_argument("--point", help='e.g. "x1=0,x2=1/2"')
    p.add_argument("--grid", action="append", help='e.g. "x1=-1:2:0.05" (repeatable)')
    p.add_argument("--tolerance", type=float, default=1e-10)
    p.add_argument("--hbar", type=float)
    p.add_argument("--full", action="store_true", help="also rank the full gradient (needs --hbar)")
    p = sub.add_parser("evolve", help="integrate the effective equations")
    common(p)
    p.add_argument("--hamiltonian", help='JSON {"kind": "weyl", "polynomial": {...}}')
    p.add_argument("--initial", help='JSON file or "coherent:j=10,theta=1,phi=0"')
    p.add_argument("--hbar", type=float)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--t-end", type=float, default=1.0)
    p.add_argument("--oracle", help="spin j of an exact su(2) co-run")
    p = sub.add_parser("oracle-compare", help="symbolic expectations vs matrix representation")
    common(p, order=False)
    p.add_argument("--oracle", required=True, help="spin j")
    p.add_argument("--hbar", type=float, default=1.0)
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    return ap


_COMMANDS = {
    "check": cmd_check, "bracket-table": cmd_bracket_table, "constraints": cmd_constraints,
    "independence": cmd_independence, "evolve": cmd_evolve, "oracle-compare": cmd_oracle_compare,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, UsageError, MissingVariableError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NonCentralCasimirError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
