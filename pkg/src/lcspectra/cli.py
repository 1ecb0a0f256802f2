"""``lc-spectra``: batch front end for spectra, the radial oracle and the
Levi-Civita checks.

Exit codes: 0 success, 1 numerical failure (the report is still written),
2 usage or validation error.
"""
from __future__ import annotations

import csv
import io
import json
import math
import sys

import click

from .eigensolver import GridSpec, default_rmax, solve_extrapolated, solve_state
from .errors import LCError, NumericalError, ValidationError
from .levicivita import save_field
from .model import (
    Coulomb,
    EquationKind,
    Oscillator,
    QuantumNumbers,
    SystemSpec,
    validate_system,
)
from .spectra import MatchRule, closed_level
from .verify import DEFAULT_STATE_CELLS, map_verify, momentum_check, run_match

SCHEMA = "lc-spectra/1"
SPECTRUM_COLUMNS = ["equation", "potential", "mass", "coupling", "k", "l", "method",
                    "energy", "residual", "cells", "rmax", "iterations"]


class UsageFailure(click.UsageError):
    exit_code = 2


# -- argument helpers -------------------------------------------------------

def parse_range(text: str) -> list[int]:
    """'A..B' (inclusive) or a single integer."""
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            lo, hi = int(a), int(b)
        else:
            lo = hi = int(text)
    except ValueError:
        raise click.BadParameter(f"expected an integer or A..B, got {text!r}")
    if hi < lo:
        raise click.BadParameter(f"empty range {text!r}")
    return list(range(lo, hi + 1))


def _range_option(ctx, param, value):
    return parse_range(value)


def _grids_option(ctx, param, value):
    try:
        grids = [int(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise click.BadParameter(f"expected comma-separated integers, got {value!r}")
    if not grids or any(g < 3 for g in grids):
        raise click.BadParameter("grid sizes must be integers >= 3")
    return grids


def build_spec(equation: str, potential: str, mass: float, kappa, omega) -> SystemSpec:
    if potential == "coulomb":
        if kappa is None:
            raise UsageFailure("--kappa is required for the Coulomb potential")
        pot = Coulomb(kappa)
    else:
        if omega is None:
            raise UsageFailure("--omega is required for the oscillator potential")
        pot = Oscillator(omega)
    return validate_system(SystemSpec(EquationKind(equation), pot, mass))


def _fail_validation(err: Exception):
    raise UsageFailure(f"{type(err).__name__}: {err}")


# -- output -----------------------------------------------------------------

def fmt_csv(x) -> str:
    if isinstance(x, float):
        return format(x, ".17g")
    return "" if x is None else str(x)


def fmt_table(x) -> str:
    if isinstance(x, float):
        return format(x, ".6g")
    return "" if x is None else str(x)


def render_csv(columns: list[str], rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt_csv(row.get(c)) for c in columns])
    return buf.getvalue()


def render_table(columns: list[str], rows: list[dict]) -> str:
    cells = [[fmt_table(row.get(c)) for c in columns] for row in rows]
    widths = [max([len(c)] + [len(r[i]) for r in cells]) for i, c in enumerate(columns)]
    lines = ["  ".join(c.rjust(w) for c, w in zip(columns, widths))]
    lines += ["  ".join(v.rjust(w) for v, w in zip(r, widths)) for r in cells]
    return "\n".join(lines) + "\n"


def _clean(obj):
    """Make a payload JSON-safe: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


def render_json(payload: dict) -> str:
    return json.dumps(_clean({"schema": SCHEMA, **payload}), indent=2) + "\n"


def _system_dict(spec: SystemSpec) -> dict:
    return {"equation": spec.equation.value, "potential": spec.potential.name,
            "mass": float(spec.mass), "coupling": float(spec.potential.coupling)}


def _emit(text: str) -> None:
    click.echo(text, nl=False)


# -- commands ---------------------------------------------------------------

equation_opt = click.option("--equation", type=click.Choice([e.value for e in EquationKind]),
                            required=True)
mass_opt = click.option("--mass", type=float, default=1.0, show_default=True)
kappa_opt = click.option("--kappa", type=float, default=None)
omega_opt = click.option("--omega", type=float, default=None)
format_opt = click.option("--format", "fmt", type=click.Choice(["json", "csv", "table"]),
                          default="json", show_default=True)
seed_opt = click.option("--seed", type=int, default=0, show_default=True)


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Levi-Civita correspondence between 2D Coulomb and oscillator spectra."""


@main.command()
@equation_opt
@click.option("--potential", type=click.Choice(["coulomb", "oscillator"]), default="coulomb",
              show_default=True)
@mass_opt
@kappa_opt
@omega_opt
@click.option("--l", "ls", default="0", callback=_range_option, help="l or A..B")
@click.option("--k", "ks", default="0", callback=_range_option, help="k or A..B")
@click.option("--method", type=click.Choice(["closed", "numeric", "both"]), default="closed",
              show_default=True)
@click.option("--cells", type=int, default=2048, show_default=True,
              help="base grid; numeric levels extrapolate from N and 2N cells")
@click.option("--rmax", type=float, default=None, help="outer wall (default per state)")
@format_opt
@seed_opt
def spectrum(equation, potential, mass, kappa, omega, ls, ks, method, cells, rmax, fmt, seed):
    """Levels for a range of (k, l)."""
    try:
        spec = build_spec(equation, potential, mass, kappa, omega)
        qns = [QuantumNumbers(k, l) for k in ks for l in ls]
        if method != "closed" and cells < 16:
            raise UsageFailure("--cells must be >= 16")
    except (ValidationError, ValueError) as err:
        _fail_validation(err)
    rows, failures = [], []
    system = _system_dict(spec)
    for q in qns:
        base = dict(system, k=q.k, l=q.l)
        closed = None
        if method in ("closed", "both"):
            closed = closed_level(spec, q)
            if method == "closed":
                rows.append(dict(base, method="closed", energy=closed, residual=0.0,
                                 cells=None, rmax=None, iterations=None))
                continue
        try:
            r_max = rmax or default_rmax(spec, q)
            lvl = solve_extrapolated(spec, q, GridSpec(cells, r_max), seed=seed)
        except NumericalError as err:
            failures.append(dict(k=q.k, l=q.l, error=type(err).__name__, message=str(err)))
            continue
        row = dict(base, method=method, energy=lvl.energy, residual=lvl.error_estimate,
                   cells=cells, rmax=r_max, iterations=lvl.iterations)
        if method == "both":
            row["closed_energy"] = closed
            row["discrepancy"] = abs(lvl.energy - closed) / max(abs(closed), 1e-300)
        rows.append(row)
    columns = SPECTRUM_COLUMNS + (["closed_energy", "discrepancy"] if method == "both" else [])
    if fmt == "json":
        _emit(render_json({"command": "spectrum", "system": system, "method": method,
                           "richardson": method != "closed", "rows": rows,
                           "failures": failures}))
    elif fmt == "csv":
        _emit(render_csv(columns, rows))
    else:
        _emit(render_table(columns, rows))
    for f in failures:
        click.echo(f"{f['error']}: (k={f['k']}, l={f['l']}) {f['message']}", err=True)
    sys.exit(1 if failures else 0)


@main.command()
@equation_opt
@click.option("--potential", type=click.Choice(["coulomb", "oscillator"]), default="coulomb",
              show_default=True)
@mass_opt
@kappa_opt
@omega_opt
@click.option("--k", type=int, default=0, show_default=True)
@click.option("--l", type=int, default=0, show_default=True)
@click.option("--cells", type=int, default=4096, show_default=True)
@click.option("--rmax", type=float, default=None)
@click.option("--relax", type=float, default=0.5, show_default=True)
@click.option("--tol", type=float, default=1e-12, show_default=True)
@click.option("--max-iter", type=int, default=200, show_default=True)
@click.option("--update", type=click.Choice(["ratio", "sqrt"]), default="ratio",
              show_default=True, help="fixed-point update for KG/Dirac")
@format_opt
@seed_opt
def solve(equation, potential, mass, kappa, omega, k, l, cells, rmax, relax, tol, max_iter,
          update, fmt, seed):
    """One state on one grid, with full solver diagnostics."""
    try:
        spec = build_spec(equation, potential, mass, kappa, omega)
        q = QuantumNumbers(k, l)
        grid = GridSpec(cells, rmax or default_rmax(spec, q))
    except (ValidationError, ValueError) as err:
        _fail_validation(err)
    closed = closed_level(spec, q)
    system = _system_dict(spec)
    opts = {"seed": seed}
    if spec.equation.relativistic:
        opts.update(relax=relax, tol=tol, max_iter=max_iter, update=update)
    row = dict(system, k=k, l=l, method="numeric", cells=cells, rmax=grid.r_max)
    error = None
    try:
        sol = solve_state(spec, q, grid, **opts)
        row.update(energy=sol.energy, residual=abs(sol.energy - closed) / max(abs(closed), 1e-300),
                   iterations=sol.iterations)
        extra = {"converged": sol.converged, "eigenvalue": sol.eigenvalue,
                 "closed_energy": closed, "history": list(sol.history)}
    except NumericalError as err:
        error = f"{type(err).__name__}: {err}"
        row.update(energy=None, residual=None, iterations=None)
        extra = {"converged": False, "closed_energy": closed, "error": error}
    if fmt == "json":
        _emit(render_json({"command": "solve", "system": system, "state": {**row, **extra},
                           "options": opts}))
    elif fmt == "csv":
        _emit(render_csv(SPECTRUM_COLUMNS, [row]))
    else:
        _emit(render_table(SPECTRUM_COLUMNS + ["closed_energy"], [dict(row, closed_energy=closed)]))
    if error:
        click.echo(error, err=True)
        sys.exit(1)


@main.command("map-verify")
@equation_opt
@mass_opt
@kappa_opt
@click.option("--k", type=int, default=0, show_default=True)
@click.option("--l", type=int, default=0, show_default=True)
@click.option("--grids", default="512,1024,2048", show_default=True, callback=_grids_option,
              help="u-plane radial sample counts")
@click.option("--cells", type=int, default=DEFAULT_STATE_CELLS, show_default=True,
              help="radial solver cells for the hydrogen state")
@click.option("--spinor-map", type=click.Choice(["weighted", "regular"]), default="weighted",
              show_default=True, help="Dirac only: tau/(2u^2) weighting or (Psi1, 2 conj(tau) Psi2)")
@click.option("--dump-field", type=click.Path(dir_okay=False), default=None,
              help="write the finest pulled-back (upper) field here")
@format_opt
@seed_opt
def map_verify_cmd(equation, mass, kappa, k, l, grids, cells, spinor_map, dump_field, fmt, seed):
    """Pull a hydrogen eigenstate to the u-plane and test it under the oscillator operator."""
    try:
        spec = build_spec(equation, "coulomb", mass, kappa, None)
        q = QuantumNumbers(k, l)
        GridSpec(cells, 1.0)
    except (ValidationError, ValueError) as err:
        _fail_validation(err)
    try:
        rep = map_verify(spec, q, grids, cells, spinor_map, seed)
    except LCError as err:
        click.echo(f"{type(err).__name__}: {err}", err=True)
        sys.exit(1)
    if dump_field and rep.final_field is not None:
        fld = getattr(rep.final_field, "upper", rep.final_field)
        save_field(fld, dump_field)
    p = rep.params
    rows = [{"n_r": r.n_r, "n_theta": r.n_theta, "residual": r.residual,
             "upper_row": r.upper_row, "lower_row": r.lower_row,
             "order": (rep.orders[i - 1] if i else None)} for i, r in enumerate(rep.rows)]
    columns = ["n_r", "n_theta", "residual", "order"]
    if rep.spinor_map:
        columns += ["upper_row", "lower_row"]
    if fmt == "json":
        _emit(render_json({
            "command": "map-verify", "system": _system_dict(spec), "k": k, "l": l,
            "hydrogen": {"energy": rep.energy, "closed_energy": rep.closed_energy,
                         "cells": rep.solver_cells, "rmax": rep.solver_rmax,
                         "iterations": rep.iterations},
            "oscillator": {"m": p.m, "omega_squared": p.stiffness / p.m,
                           "stiffness": p.stiffness, "epsilon": p.epsilon,
                           "physical": p.physical},
            "spinor_map": rep.spinor_map,
            "angular_before": [list(a) for a in rep.angular_before],
            "angular_after": [list(a) for a in rep.angular_after],
            "rows": rows, "decreasing": rep.decreasing}))
    elif fmt == "csv":
        _emit(render_csv(columns, rows))
    else:
        before = ", ".join(f"l={a[0]} ({a[1]:.6g})" for a in rep.angular_before)
        after = ", ".join(f"l={a[0]} ({a[1]:.6g})" for a in rep.angular_after)
        _emit(render_table(columns, rows) + f"angular before: {before}\nangular after:  {after}\n")
    if not rep.decreasing:
        click.echo("residual does not decrease under refinement", err=True)
        sys.exit(1)


def _pair_row(pair) -> dict:
    o, h = pair.oscillator, pair.hydrogen
    return {"osc_k": o.qn.k, "osc_l": o.qn.l, "osc_energy": o.energy, "h_k": h.qn.k,
            "h_l": h.qn.l, "h_method": h.method.value, "h_energy": h.energy,
            "mapped_energy": pair.mapped_energy, "discrepancy": pair.discrepancy,
            "agrees": pair.agrees}


ODD_NOTE = ("odd-n1n2 pairs odd oscillator shells n1+n2 with hydrogen level "
            "n=(n1+n2+1)/2; its mapped energies disagree with the numerical oracle, "
            "while even-lo (l_h = l_o/2) reproduces it")


@main.command()
@equation_opt
@mass_opt
@kappa_opt
@click.option("--depth", type=click.IntRange(min=0), default=3, show_default=True,
              help="hydrogen levels with k + l < depth")
@click.option("--rule", type=click.Choice(["even-lo", "odd-n1n2", "both"]), default="both",
              show_default=True)
@click.option("--cells", type=int, default=2048, show_default=True)
@format_opt
@seed_opt
def match(equation, mass, kappa, depth, rule, cells, fmt, seed):
    """Pair oscillator and hydrogen levels under a matching rule and test against the oracle."""
    rules = [MatchRule.EVEN_LO, MatchRule.ODD_N1N2] if rule == "both" else [MatchRule(rule)]
    try:
        spec = build_spec(equation, "coulomb", mass, kappa, None)
        GridSpec(cells, 1.0)
    except (ValidationError, ValueError) as err:
        _fail_validation(err)
    try:
        out = run_match(spec.equation, mass, kappa, depth, rules, cells, seed)
    except LCError as err:
        click.echo(f"{type(err).__name__}: {err}", err=True)
        sys.exit(1)
    sections = []
    for r in out.rules:
        sections.append({
            "rule": r.rule.value, "supported": r.supported,
            "max_discrepancy_closed": r.closed.max_discrepancy,
            "max_discrepancy_numeric": r.numeric.max_discrepancy,
            "closed": [_pair_row(p) for p in r.closed.matched],
            "numeric": [_pair_row(p) for p in r.numeric.matched],
            "rejected": [[e.qn.k, e.qn.l] for e in r.numeric.rejected],
            "unpaired_oscillator": [[e.qn.k, e.qn.l] for e in r.numeric.unpaired_oscillator],
            "unmatched_hydrogen": [[e.qn.k, e.qn.l] for e in r.numeric.unmatched_hydrogen]})
    supported = [r.value for r in out.supported_rules]
    note = None
    if MatchRule.ODD_N1N2 in rules and MatchRule.ODD_N1N2 not in out.supported_rules and depth:
        note = ODD_NOTE
    columns = ["rule", "osc_k", "osc_l", "osc_energy", "h_k", "h_l", "h_method", "h_energy",
               "mapped_energy", "discrepancy", "agrees"]
    rows = [dict(row, rule=s["rule"]) for s in sections for row in s["closed"] + s["numeric"]]
    if fmt == "json":
        _emit(render_json({"command": "match", "system": _system_dict(spec), "depth": depth,
                           "cells": cells, "rules": sections, "supported": supported,
                           "note": note}))
    elif fmt == "csv":
        _emit(render_csv(columns, rows))
    else:
        text = render_table(columns, rows)
        for s in sections:
            text += (f"{s['rule']}: {'supported' if s['supported'] else 'not supported'} "
                     f"(max numeric discrepancy {s['max_discrepancy_numeric']:.6g})\n")
        if note:
            text += note + "\n"
        _emit(text)
    if depth and not supported:
        click.echo("no matching rule reproduces the oracle", err=True)
        sys.exit(1)


@main.command("momentum-check")
@click.option("--h", type=click.FloatRange(min=0, min_open=True), default=0.02,
              show_default=True)
@format_opt
def momentum_check_cmd(h, fmt):
    """Finite-difference check of the u/x momentum relation on built-in fields."""
    checks = momentum_check(h)
    rows = []
    ok = True
    for c in checks:
        exact = c.name in ("x1", "x2")
        passed = (max(c.residual, c.residual_half) <= 1e-12 if exact
                  else 3.5 <= c.ratio <= 4.5)
        ok &= passed
        rows.append({"field": c.name, "h": c.h, "residual": c.residual,
                     "residual_half": c.residual_half,
                     "ratio": None if exact else c.ratio, "passed": passed})
    columns = ["field", "h", "residual", "residual_half", "ratio", "passed"]
    if fmt == "json":
        _emit(render_json({"command": "momentum-check", "rows": rows}))
    elif fmt == "csv":
        _emit(render_csv(columns, rows))
    else:
        _emit(render_table(columns, rows))
    sys.exit(0 if ok else 1)


if __name__ == "__main__":
    main()
