"""Command-line front end.

Every subcommand produces one table. Output goes to stdout unless an output
directory is given (``--output-dir`` or ``$STRONGCOUPLING_OUTPUT_DIR``); then
the table is written to ``<dir>/<name>.<ext>`` next to a JSON run manifest.

Formats: ``csv`` (floats as ``format(x, '.17g')``), ``json``, ``text``
(aligned columns). Settings resolve as flags > ``--config`` JSON > defaults;
``--show-config`` prints the resolved set and exits.

Exit codes: 0 success, 1 property check failed, 2 numerical failure, 64 usage.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__
from .core import PowerLawPotential, QuantumNumbers, ScreenedPotential
from .coulomb import coulomb_coefficients, coulomb_energy, coulomb_state, coulomb_wavefunction
from .hierarchy import RegularityError, solve_hierarchy
from .oracle import (
    OracleError,
    SolverConfig,
    coulomb_profile,
    power_law_profile,
    solve_bound_state,
    yukawa_profile,
)
from .scaling import check_radius_mapping, verify_factorization
from .yukawa import STATES, YukawaGroundState, comparison_table, yukawa_excited_wavefunction

EXIT_OK, EXIT_PROPERTY, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2, 64
OUTPUT_DIR_ENV = "STRONGCOUPLING_OUTPUT_DIR"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# -- tables and writers ----------------------------------------------------


@dataclass
class Table:
    name: str
    columns: list[str]
    rows: list[list[Any]]
    meta: dict[str, Any] = field(default_factory=dict)
    status: int = EXIT_OK


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v) + 0.0, ".17g")  # + 0.0 folds -0.0 into 0.0
    return str(v)


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def render(table: Table, fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(table.columns)
        w.writerows([[_cell(v) for v in row] for row in table.rows])
        return buf.getvalue()
    if fmt == "json":
        doc = {
            "name": table.name,
            "columns": table.columns,
            "rows": [dict(zip(table.columns, _jsonable(r))) for r in table.rows],
            "meta": _jsonable(table.meta),
        }
        return json.dumps(doc, indent=2) + "\n"
    if fmt == "text":
        cells = [table.columns] + [[_cell(v) for v in row] for row in table.rows]
        widths = [max(len(r[i]) for r in cells) for i in range(len(table.columns))]
        return "".join("  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip() + "\n" for r in cells)
    raise UsageError(f"unknown format {fmt!r}")


@dataclass(frozen=True)
class RunManifest:
    command: str
    params: dict
    version: str
    format: str
    timestamp: str
    output_sha256: str


def _timestamp() -> str:
    # honour SOURCE_DATE_EPOCH so manifests can be made reproducible as well
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    t = time.gmtime(int(epoch)) if epoch else time.gmtime()
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", t)


# -- argument parsing helpers ----------------------------------------------


def parse_int_range(text: str) -> list[int]:
    """``"1..3"`` -> [1, 2, 3]; ``"1,4"`` -> [1, 4]; ``"3..2"`` -> []."""
    text = str(text).strip()
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return list(range(int(lo), int(hi) + 1))
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"cannot parse integer range {text!r}") from None


def parse_floats(text) -> list[float]:
    """Comma-separated numbers; fractions such as ``1/30`` are accepted."""
    if isinstance(text, (list, tuple)):
        return [float(Fraction(str(t))) for t in text]
    try:
        return [float(Fraction(t.strip())) for t in str(text).split(",") if t.strip()]
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"cannot parse number list {text!r}") from None


def _solver_cfg(args) -> SolverConfig:
    try:
        return SolverConfig(rho_max=args.rho_max, n_points=args.n_points, eig_tol=args.eig_tol)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _power_law(args) -> PowerLawPotential:
    kind = args.potential
    try:
        if kind == "coulomb":
            return PowerLawPotential.coulomb(m=args.m)
        if kind == "linear":
            return PowerLawPotential.linear(m=args.m)
        if kind == "harmonic":
            return PowerLawPotential.harmonic(m=args.m, scale=args.scale if args.scale is not None else 0.5)
        return PowerLawPotential(
            k=Fraction(str(args.k)),
            n=args.n,
            m=args.m,
            sign=args.sign,
            scale=args.scale if args.scale is not None else 1.0,
        )
    except (ValueError, TypeError) as exc:
        raise UsageError(str(exc)) from None


# -- subcommands -----------------------------------------------------------


def cmd_spectrum(args) -> Table:
    Ns = parse_int_range(args.N)
    if any(N < 1 for N in Ns):
        raise UsageError("N must be >= 1")
    Ls = None if args.L is None else parse_int_range(args.L)
    if Ls is not None and any(L < 0 for L in Ls):
        raise UsageError("L must be >= 0")
    rows = []
    for N in sorted(set(Ns)):
        for L in range(N):
            if Ls is not None and L not in Ls:
                continue
            if args.potential == "coulomb":
                E = coulomb_energy(N, args.g, args.m)
                eps = E / (args.g**4 * args.m)
            else:
                # N = n_r + L + 1 labelling; E = g m (2 n_r + L + 3/2)
                eps = 2 * (N - L - 1) + L + 1.5
                E = args.g * args.m * eps
            rows.append([N, L, eps, E])
    unit = "g^4 m" if args.potential == "coulomb" else "g m"
    return Table("spectrum", ["N", "L", "eps_hat", "E"], rows, {"potential": args.potential, "eps_unit": unit})


def cmd_coulomb(args) -> Table:
    rows = []
    for N in sorted(set(parse_int_range(args.N))):
        if N < 1:
            raise UsageError("N must be >= 1")
        for L in range(N):
            a = coulomb_coefficients(N, L)
            rows.append([N, L, -1 / (2 * N * N), 1 / N, ";".join(format(x, ".17g") for x in a)])
    return Table("coulomb", ["N", "L", "eps_hat", "b0", "coefficients"], rows)


def cmd_compare(args) -> Table:
    lams = parse_floats(args.lam)
    states = [s.strip() for s in str(args.states).split(",") if s.strip()]
    bad = [s for s in states if s not in STATES]
    if bad or not states:
        raise UsageError(f"states must be a subset of {sorted(STATES)}")
    if any(x < 0 for x in lams):
        raise UsageError("lambda must be non-negative")
    table = comparison_table(lams, states, _solver_cfg(args))
    cols = ["lambda", "state", "analytic", "oracle", "coulomb", "dev_analytic", "dev_coulomb", "note"]
    rows = [
        [r.lam, r.state, r.analytic, r.oracle, r.coulomb, r.deviation, r.coulomb_deviation, r.note] for r in table
    ]
    return Table("compare", cols, rows, {"energy_unit": "g^4 m", "deviation": "|x - oracle| / |oracle|"})


def cmd_scaling_check(args) -> Table:
    pot = _power_law(args)
    gs = parse_floats(args.g_list)
    if len(set(gs)) < 2 or any(g <= 0 for g in gs):
        raise UsageError("need at least two distinct positive couplings")
    try:
        qn = QuantumNumbers(args.N, args.L)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    override = None if args.exponent_override is None else Fraction(str(args.exponent_override))
    cfg = _solver_cfg(args)
    rep = verify_factorization(pot, qn, gs, cfg=cfg, exponent_override=override)
    rows = [["factorization_spread", "", rep.spread, args.spread_tol, rep.spread < args.spread_tol]]
    for g, ratio, dev in zip(rep.couplings, rep.virial_ratios, rep.virial_deviations):
        rows.append(["virial_ratio", g, ratio, rep.virial_expected, dev < args.virial_tol])
    for g1, g2 in zip(gs, gs[1:]):
        mp = check_radius_mapping(pot, qn, g1, g2, cfg=cfg)
        rows.append(["radius_mapping", f"{g1!r}->{g2!r}", mp.max_abs_diff, args.mapping_tol, mp.max_abs_diff < args.mapping_tol])
    for row in rows:
        row[-1] = "PASS" if row[-1] else "FAIL"
    status = EXIT_OK if all(r[-1] == "PASS" for r in rows) else EXIT_PROPERTY
    meta = {
        "exponent": str(rep.exponent),
        "reduced_energies": list(rep.reduced),
        "couplings": list(rep.couplings),
        "state": qn.label,
    }
    return Table("scaling-check", ["property", "coupling", "value", "reference", "status"], rows, meta, status)


def _hierarchy_profile(args):
    c, m, beta = args.curvature, args.m, args.quartic
    if c <= 0:
        raise UsageError("curvature must be positive")
    return lambda x: c * m**3 * x**2 * (1 + beta * (m * x) ** 2)


def cmd_hierarchy(args) -> Table:
    v = _hierarchy_profile(args)
    if args.points < 2 or args.xmax <= 0:
        raise UsageError("need xmax > 0 and at least 2 points")
    grid = np.linspace(0.0, args.xmax, args.points)
    res = solve_hierarchy(v, args.dim, grid, args.max_order, m=args.m)
    rows = []
    for o in res.orders:
        for x, s in zip(grid, res.S_samples(o.index)):
            rows.append([o.index, o.E, x, s])
    meta = {"energies": list(res.energies), "regularity_residuals": list(res.regularity_residuals), "dim": args.dim}
    return Table("hierarchy", ["order", "E", "x", "S"], rows, meta)


def _oracle_profile(args):
    if args.potential == "coulomb":
        return coulomb_profile()
    if args.potential == "yukawa":
        if args.lam is None or args.lam < 0:
            raise UsageError("--lambda >= 0 is required for the yukawa potential")
        return yukawa_profile(args.lam)
    pot = _power_law(argparse.Namespace(**{**vars(args), "potential": "powerlaw"}))
    return power_law_profile(pot.with_coupling(args.g))


def cmd_oracle_solve(args) -> Table:
    if args.L < 0 or args.nodes < 0:
        raise UsageError("L and nodes must be non-negative")
    prof = _oracle_profile(args)
    cfg = _solver_cfg(args)
    methods = ["shooting", "matrix"] if args.method == "both" else [args.method]
    states = [solve_bound_state(prof, args.L, args.nodes, cfg, method=meth) for meth in methods]
    if args.wavefunction:
        st = states[0]
        rows = [[x, u, R] for x, u, R in zip(st.grid, st.u, st.R)]
        meta = {"eigenvalue": st.eigenvalue, "method": st.method, "potential": prof.label}
        return Table("oracle-wavefunction", ["rho", "u", "R"], rows, meta)
    rows = [[prof.label, args.L, args.nodes, st.method, st.eigenvalue, float(st.grid[-1])] for st in states]
    meta = {}
    if len(states) == 2:
        a, b = states[0].eigenvalue, states[1].eigenvalue
        meta["rel_diff"] = abs(a - b) / abs(a)
    return Table("oracle", ["potential", "L", "nodes", "method", "eigenvalue", "rho_max"], rows, meta)


def cmd_wavefunction(args) -> Table:
    r = np.linspace(0.0, args.r_max, args.points)
    if args.points < 2 or args.r_max <= 0:
        raise UsageError("need r_max > 0 and at least 2 points")
    try:
        if args.kind == "coulomb":
            pot = ScreenedPotential(args.g, 0.0, args.m)
            f = coulomb_wavefunction(coulomb_state(args.N, args.L), pot)
        elif args.kind == "yukawa-ground":
            pot = ScreenedPotential.from_lambda(args.lam, args.g, args.m)
            f = YukawaGroundState(pot).wavefunction()
        else:
            pot = ScreenedPotential.from_lambda(args.lam, args.g, args.m)
            f = yukawa_excited_wavefunction(pot, args.L)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rows = [[x, y] for x, y in zip(r, f(r))]
    return Table("wavefunction", ["r", "R"], rows, {"kind": args.kind})


# -- parser ----------------------------------------------------------------


def _common(p: argparse.ArgumentParser, solver: bool = False, formats=("csv", "json", "text")):
    p.add_argument("--format", choices=formats, default="csv")
    p.add_argument("--output-dir", default=None, help=f"write table + manifest here (default ${OUTPUT_DIR_ENV})")
    p.add_argument("--config", default=None, help="JSON file of option defaults")
    p.add_argument("--show-config", action="store_true", help="print resolved options and exit")
    if solver:
        p.add_argument("--n-points", type=int, default=2048)
        p.add_argument("--eig-tol", type=float, default=1e-9)
        p.add_argument("--rho-max", type=float, default=None)


def _power_law_args(p, choices):
    p.add_argument("--potential", choices=choices, default=choices[0])
    p.add_argument("--k", default="2", help="g exponent (rational)")
    p.add_argument("--n", type=int, default=-1, help="r exponent")
    p.add_argument("--sign", type=int, default=None)
    p.add_argument("--scale", type=float, default=None)
    p.add_argument("--m", type=float, default=1.0)


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = _Parser(prog="strongcoupling", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    subs = {}

    p = sub.add_parser("spectrum", help="closed-form Coulomb or oscillator levels")
    p.add_argument("--potential", choices=["coulomb", "harmonic"], default="coulomb")
    p.add_argument("--N", default="1..3")
    p.add_argument("--L", default=None)
    p.add_argument("--g", type=float, default=1.0)
    p.add_argument("--m", type=float, default=1.0)
    _common(p)
    p.set_defaults(func=cmd_spectrum)
    subs["spectrum"] = p

    p = sub.add_parser("coulomb", help="Coulomb energies and polynomial coefficients")
    p.add_argument("--N", default="1..3")
    _common(p)
    p.set_defaults(func=cmd_coulomb)
    subs["coulomb"] = p

    def compare_args(p):
        p.add_argument("--lambda", dest="lam", default="0.0")
        p.add_argument("--states", default="1s,2s,2p")
        _common(p, solver=True)
        p.set_defaults(func=cmd_compare)

    p = sub.add_parser("compare", help="Yukawa series vs oracle vs Coulomb")
    compare_args(p)
    subs["compare"] = p
    p = sub.add_parser("yukawa", help="Yukawa tools")
    ysub = p.add_subparsers(dest="action", parser_class=_Parser, required=True)
    compare_args(ysub.add_parser("compare"))
    subs["yukawa compare"] = ysub.choices["compare"]

    p = sub.add_parser("scaling-check", help="coupling factorization and radius mapping")
    _power_law_args(p, ["coulomb", "linear", "harmonic", "powerlaw"])
    p.add_argument("--g-list", "--g", dest="g_list", default="1,2")
    p.add_argument("--N", type=int, default=1)
    p.add_argument("--L", type=int, default=0)
    p.add_argument("--spread-tol", type=float, default=1e-5)
    p.add_argument("--virial-tol", type=float, default=1e-5)
    p.add_argument("--mapping-tol", type=float, default=1e-8)
    # negative-control hook: replace the g-factor exponent
    p.add_argument("--exponent-override", default=None, help=argparse.SUPPRESS)
    _common(p, solver=True)
    p.set_defaults(func=cmd_scaling_check)
    subs["scaling-check"] = p

    p = sub.add_parser("hierarchy", help="order-by-order S_i and E_i for v = c m^3 x^2 (1 + beta (m x)^2)")
    p.add_argument("--dim", type=int, choices=[1, 3], default=1)
    p.add_argument("--curvature", type=float, default=1.0)
    p.add_argument("--quartic", type=float, default=0.0, help="beta")
    p.add_argument("--m", type=float, default=1.0)
    p.add_argument("--max-order", type=int, default=2)
    p.add_argument("--xmax", type=float, default=2.0)
    p.add_argument("--points", type=int, default=21)
    _common(p)
    p.set_defaults(func=cmd_hierarchy)
    subs["hierarchy"] = p

    p = sub.add_parser("oracle", help="numerical radial eigen-solver")
    osub = p.add_subparsers(dest="action", parser_class=_Parser, required=True)
    q = osub.add_parser("solve")
    _power_law_args(q, ["coulomb", "yukawa", "powerlaw"])
    q.add_argument("--lambda", dest="lam", type=float, default=None)
    q.add_argument("--g", type=float, default=1.0)
    q.add_argument("--L", type=int, default=0)
    q.add_argument("--nodes", type=int, default=0)
    q.add_argument("--method", choices=["shooting", "matrix", "both"], default="both")
    q.add_argument("--wavefunction", action="store_true")
    _common(q, solver=True)
    q.set_defaults(func=cmd_oracle_solve)
    subs["oracle solve"] = q

    p = sub.add_parser("wavefunction", help="analytic radial functions on a uniform grid")
    p.add_argument("--kind", choices=["coulomb", "yukawa-ground", "yukawa-excited"], default="coulomb")
    p.add_argument("--N", type=int, default=1)
    p.add_argument("--L", type=int, default=0)
    p.add_argument("--lambda", dest="lam", type=float, default=0.0)
    p.add_argument("--g", type=float, default=1.0)
    p.add_argument("--m", type=float, default=1.0)
    p.add_argument("--r-max", type=float, default=20.0)
    p.add_argument("--points", type=int, default=201)
    _common(p)
    p.set_defaults(func=cmd_wavefunction)
    subs["wavefunction"] = p
    return parser, subs


_META_KEYS = {"func", "config", "show_config", "output_dir", "command", "action"}


def _params(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in _META_KEYS}


def _parse(argv: Sequence[str]):
    parser, subs = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        raise UsageError(parser.format_usage().strip())
    if args.config:
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config!r}: {exc}") from None
        if not isinstance(cfg, dict):
            raise UsageError("config file must hold a JSON object")
        name = args.command + (f" {args.action}" if getattr(args, "action", None) else "")
        target = subs[name]
        known = {a.dest for a in target._actions}
        unknown = sorted(set(cfg) - known)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")
        # config values act as defaults, so explicit flags still win
        target.set_defaults(**cfg)
        args = parser.parse_args(argv)
    return args


def main(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _parse(argv)
        if args.show_config:
            stdout.write(json.dumps(_params(args), indent=2, default=str) + "\n")
            return EXIT_OK
        table = args.func(args)
        text = render(table, args.format)
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except UsageError as exc:
        stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except (OracleError, RegularityError, FloatingPointError) as exc:
        stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERIC
    except ValueError as exc:
        stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE

    out_dir = args.output_dir or os.environ.get(OUTPUT_DIR_ENV)
    if out_dir:
        d = Path(out_dir)
        d.mkdir(parents=True, exist_ok=True)
        ext = {"csv": "csv", "json": "json", "text": "txt"}[args.format]
        (d / f"{table.name}.{ext}").write_text(text)
        manifest = RunManifest(
            command=table.name,
            params=_jsonable(_params(args)),
            version=__version__,
            format=args.format,
            timestamp=_timestamp(),
            output_sha256=hashlib.sha256(text.encode()).hexdigest(),
        )
        (d / f"{table.name}.manifest.json").write_text(json.dumps(asdict(manifest), indent=2) + "\n")
    else:
        stdout.write(text)
    if table.status == EXIT_PROPERTY:
        stderr.write("property check FAILED\n")
    return table.status


def run():  # console-script entry point
    sys.exit(main())


if __name__ == "__main__":
    run()
