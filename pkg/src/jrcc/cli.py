"""Command-line entry point: ``jrcc {predict,fit,sweep,compare,check,solve}``.

Exit codes: 0 success, 2 input/validation error, 3 fit failure, 4 infeasible.
"""

from __future__ import annotations

import argparse
import math
import re
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__, calibration, explorer, params
from .dataio import (
    Provenance,
    ResultTable,
    parse_assignment,
    parse_design,
    parse_measurements,
    parse_quantity,
    write_table,
)
from .errors import FitError, ValidationError
from .model import predict
from .units import UNITS, accepted_tokens, column_suffix, scale, split_quantity, to_si

EXIT_OK, EXIT_INPUT, EXIT_FIT, EXIT_INFEASIBLE = 0, 2, 3, 4

_UNIT_HELP = "; ".join(f"{kind}: {', '.join(accepted_tokens(kind))}" for kind in UNITS if accepted_tokens(kind))


class CliError(Exception):
    def __init__(self, message, code=EXIT_INPUT):
        super().__init__(message)
        self.code = code


# --------------------------------------------------------------------------
# Argument helpers
# --------------------------------------------------------------------------

def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None


def _overrides(items) -> dict:
    out = {}
    for item in items or ():
        key, value = parse_assignment(item, "--set: ")
        key = params.canonical(key)
        out[key] = parse_quantity(key, value)
    return out


def _load_design(args):
    text = _read(args.design)
    design, op = parse_design(text)
    design, op = params.apply(design, op, _overrides(getattr(args, "set", None)))
    return design, op, text


_RANGE = re.compile(r"^([^:]+):([^:]+):([^:]+)$")


def parse_values(spec: str, name: str) -> list[Fraction]:
    """``start:stop:step`` (inclusive) or ``a,b,c`` as exact decimals."""
    spec = spec.strip()
    m = _RANGE.match(spec)
    if m:
        start, stop, step = (_decimal(x, name) for x in m.groups())
        if step <= 0:
            if start == stop:
                return [start]
            raise ValidationError(name, "step must be > 0")
        if stop < start:
            raise ValidationError(name, "stop must be >= start")
        n = (stop - start) / step
        if n.denominator != 1:
            raise ValidationError(name, f"step {float(step)} does not divide {float(start)}..{float(stop)}")
        return [start + i * step for i in range(int(n) + 1)]
    if not spec:
        raise ValidationError(name, "empty value list")
    return [_decimal(x, name) for x in spec.split(",")]


def _decimal(text: str, name: str) -> Fraction:
    value, unit = split_quantity(text, name)
    if unit:
        raise ValidationError(name, f"malformed number {text!r}")
    return value


def parse_axis(text: str) -> explorer.Axis:
    """``name=start:stop:step unit``; ``wraps=...`` needs no unit."""
    name, eq, rest = text.partition("=")
    name = name.strip()
    if not eq or not name:
        raise ValidationError("axis", f"expected 'name=start:stop:step unit', got {text!r}")
    rest = rest.strip()
    values_text, _, unit = rest.partition(" ")
    unit = unit.strip()
    if name == "wraps":
        if unit not in ("", "wraps"):
            raise ValidationError("axis", "wraps axis takes no unit")
        vals = parse_values(values_text, name)
        return explorer.Axis("wrap_angle", tuple(float(v * 2) * math.pi for v in vals), "wraps",
                             tuple(float(v) for v in vals))
    key = params.canonical(name)
    kind = params.PARAMS[key].kind
    vals = parse_values(values_text, name)
    si = tuple(scale(v, unit, kind, name) for v in vals)
    label = f"{key}_{column_suffix(unit)}" if unit else key
    return explorer.Axis(key, si, label, tuple(float(v) for v in vals))


def _grid(text: str, kind: str, name: str) -> list[float]:
    values_text, _, unit = text.strip().partition(" ")
    return [scale(v, unit.strip(), kind, name) for v in parse_values(values_text, name)]


def _emit(table: ResultTable, args):
    out = write_table(table, args.format)
    if args.output:
        Path(args.output).write_text(out, encoding="utf-8", newline="")
    else:
        sys.stdout.write(out)


def _num(x, divisor=1.0):
    return "N/A" if x is None else repr(x / divisor)


# --------------------------------------------------------------------------
# Subcommands
# --------------------------------------------------------------------------

PREDICT_FIELDS = (
    ("t_load", "N", 1.0),
    ("holding_torque", "N*m", 1.0),
    ("band_stress", "Pa", 1.0),
    ("band_stress_adhesive", "Pa", 1.0),
    ("specific_shear_stress", "N/cm2", 1e4),
    ("specific_power", "mW/cm2", 10.0),
    ("coulomb_pressure", "Pa", 1.0),
    ("jr_pressure", "Pa", 1.0),
    ("beta_total", "Pa", 1.0),
    ("alpha_per_radian", "N/rad", 1.0),
    ("advantage_exact", "", 1.0),
    ("advantage_approx", "", 1.0),
    ("ratio_term", "", 1.0),
    ("planar_tension", "N", 1.0),
    ("planar_specific_shear_stress", "N/cm2", 1e4),
)


def _prediction_value(pred, name):
    if hasattr(pred, name):
        return getattr(pred, name)
    return getattr(pred.pressures, name)


def cmd_predict(args) -> int:
    design, op, text = _load_design(args)
    pred = predict(op, design)
    if args.format == "text":
        out = [f"{name} = {_num(_prediction_value(pred, name), div)} {unit}".rstrip()
               for name, unit, div in PREDICT_FIELDS]
        out += [f"note: {w}" for w in pred.warnings]
        sys.stdout.write("\n".join(out) + "\n")
        return EXIT_OK
    cols = tuple(f"{n}_{column_suffix(u)}" if u else n for n, u, _ in PREDICT_FIELDS)
    row = [_prediction_value(pred, n) for n, _, _ in PREDICT_FIELDS]
    row = [None if v is None else v / div for v, (_, _, div) in zip(row, PREDICT_FIELDS)]
    prov = Provenance.for_inputs(text, repr(sorted(_overrides(args.set).items())))
    _emit(ResultTable(cols, [row], provenance=prov), args)
    for w in pred.warnings:
        print(f"note: {w}", file=sys.stderr)
    return EXIT_OK


def cmd_fit(args) -> int:
    records = parse_measurements(_read(args.measurements))
    design, op, text = _load_design(args)
    if args.kind == "cof":
        result = calibration.fit_cof(records, design.r)
        fitted = params.apply(design, op, {"cof": result.value})[0]
        shown = f"cof = {result.value!r}"
    elif args.kind == "gap":
        bounds = calibration.DEFAULT_GAP_BOUNDS
        if args.bounds:
            lo_hi, _, unit = args.bounds.strip().partition(" ")
            lo, hi = lo_hi.split(":")
            bounds = (to_si(f"{lo} {unit}", "length", "bounds"), to_si(f"{hi} {unit}", "length", "bounds"))
        result = calibration.fit_gap(records, design, bounds)
        fitted = calibration.with_gap(design, result.value)
        shown = f"gap = {result.value * 1e6!r} um"
    else:
        result = calibration.fit_resistivity(records, design.dielectric)
        fitted = design
        shown = (f"volume_resistivity = {result.value!r} ohm*m ({result.value * 100!r} ohm*cm)\n"
                 f"rho_times_d = {result.derived['rho_times_d']!r} ohm*m2")
    print(shown)
    print(f"residual_sse = {result.residual_sse!r}")
    print(f"pearson_r = {_num(result.pearson_r)}")
    print(f"n_records = {result.n_records}")
    if args.emit_curve:
        _write_curve(args, records, fitted, text)
    if result.at_bound:
        print(f"error: fitted {result.parameter_name} is pinned at a bound {result.bounds_used}", file=sys.stderr)
        return EXIT_FIT
    return EXIT_OK


def _write_curve(args, records, design, text):
    if args.kind == "resistivity":
        cols = ("voltage_V", "measured_power_mW_per_cm2", "predicted_power_mW_per_cm2")
        rows = []
        res = calibration.fit_resistivity(records, design.dielectric)
        rho_d = res.derived["rho_times_d"]
        for r in records:
            if r.power_areal is None:
                continue
            rows.append((r.voltage, r.power_areal / 10, r.voltage**2 / rho_d / 10))
    else:
        cols = ("wrap_angle_rad", "voltage_V", "pretension_N", "measured_torque_Nm", "predicted_torque_Nm")
        pred = calibration.predicted_torques(records, design)
        rows = [(r.wrap_angle, r.voltage, r.pretension, r.slip_torque, float(p)) for r, p in zip(records, pred)]
    table = ResultTable(cols, rows, provenance=Provenance.for_inputs(text, _read(args.measurements)))
    Path(args.emit_curve).write_text(write_table(table, "csv"), encoding="utf-8", newline="")


def cmd_sweep(args) -> int:
    design, op, text = _load_design(args)
    if not args.axis:
        raise ValidationError("axis", "at least one --axis is required")
    axes = [parse_axis(a) for a in args.axis]
    metrics = []
    for m in args.metric or ():
        metrics.extend(x.strip() for x in m.split(",") if x.strip())
    spec = explorer.SweepSpec(axes, tuple(metrics) or explorer.DEFAULT_METRICS, include_jr=not args.coulomb_only)
    prov = Provenance.for_inputs(
        text, repr(sorted(_overrides(args.set).items())), "\n".join(args.axis), ",".join(spec.metrics),
        repr(spec.include_jr),
    )
    table = explorer.run_sweep(design, op, spec, workers=args.jobs, provenance=prov)
    _emit(table, args)
    return EXIT_OK


def cmd_compare(args) -> int:
    design, op, text = _load_design(args)
    voltages = _grid(args.voltages, "voltage", "voltages") if args.voltages else [op.voltage_V]
    if args.wraps:
        thetas = [float(v * 2) * math.pi for v in parse_values(args.wraps, "wraps")]
    elif args.thetas:
        thetas = _grid(args.thetas, "angle", "thetas")
    else:
        thetas = [design.theta]
    prov = Provenance.for_inputs(text, repr(sorted(_overrides(args.set).items())),
                                 repr(voltages), repr(thetas))
    _emit(explorer.compare_planar(design, voltages, thetas, provenance=prov), args)
    return EXIT_OK


def cmd_check(args) -> int:
    design, op, _ = _load_design(args)
    rep = explorer.check_constraints(design, op, args.safety_factor)
    cap = " (capped)" if rep.stress_margin >= explorer.MARGIN_CAP else ""
    lines = [
        f"feasible = {'yes' if rep.feasible else 'no'}",
        f"stress_margin = {rep.stress_margin!r}{cap}",
        f"exact_stress = {rep.exact_stress!r} Pa",
        f"adhesive_stress = {rep.adhesive_stress!r} Pa",
        f"allowable_stress = {rep.allowable_stress!r} Pa (yield / safety factor {args.safety_factor!r})",
        f"holding_torque = {rep.holding_torque!r} N*m",
        f"max_torque = {rep.max_torque!r} N*m",
        f"ratio_term = {_num(rep.ratio_term)}",
    ]
    lines += [f"warning: {w}" for w in rep.warnings]
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK if rep.feasible else EXIT_INFEASIBLE


def cmd_solve(args) -> int:
    design, op, _ = _load_design(args)
    if args.problem == "min-wrap":
        if not args.target_torque:
            raise ValidationError("target_torque", "required for min-wrap")
        target = to_si(args.target_torque, "torque", "target_torque")
        theta_max = to_si(args.theta_max, "angle", "theta_max")
        sol = explorer.min_wrap_for_torque(design, op, target, theta_max)
        if sol.theta is None:
            print(f"infeasible: target not reachable within theta_max (torque there {sol.torque!r} N*m)")
            return EXIT_INFEASIBLE
        print(f"wrap_angle = {sol.theta!r} rad ({sol.theta / (2 * math.pi)!r} wraps)")
        print(f"holding_torque = {sol.torque!r} N*m")
        print(f"max_torque = {sol.max_torque!r} N*m")
        if not sol.feasible:
            print(f"infeasible: target exceeds the band strength limit ({sol.reason})")
            return EXIT_INFEASIBLE
        return EXIT_OK
    ceiling = to_si(args.voltage_ceiling, "voltage", "voltage_ceiling")
    lim = explorer.max_voltage_for_stress(design, args.safety_factor, ceiling)
    print(f"voltage = {lim.voltage!r} V")
    print(f"limited_by = {lim.limited_by}")
    for w in lim.warnings:
        print(f"warning: {w}")
    return EXIT_OK


# --------------------------------------------------------------------------
# Parser
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="jrcc", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"jrcc {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    units = f"Accepted unit tokens -- {_UNIT_HELP}."

    def common(sp, formats=("csv", "json")):
        sp.add_argument("design", help="design config file ('key = value unit' lines)")
        sp.add_argument("--set", action="append", metavar="KEY=VALUE UNIT",
                        help="override a design value, e.g. --set 'voltage=0 V' (repeatable)")
        if formats:
            sp.add_argument("--format", choices=formats, default=formats[0])
            sp.add_argument("-o", "--output", help="write the table here instead of stdout")

    sp = sub.add_parser("predict", help="evaluate the model at one operating point", epilog=units)
    common(sp, ("text", "csv", "json"))
    sp.set_defaults(func=cmd_predict)

    sp = sub.add_parser("fit", help="estimate cof, gap or resistivity from measurements", epilog=units)
    sp.add_argument("kind", choices=("cof", "gap", "resistivity"))
    sp.add_argument("--measurements", required=True, help="slip-test CSV")
    sp.add_argument("--design", required=True, help="design config supplying the fixed parameters")
    sp.add_argument("--set", action="append", metavar="KEY=VALUE UNIT")
    sp.add_argument("--bounds", help="gap bounds 'LO:HI unit', default '0.1:100 um'")
    sp.add_argument("--emit-curve", metavar="PATH", help="write predicted-vs-measured CSV")
    sp.set_defaults(func=cmd_fit)

    sp = sub.add_parser("sweep", help="Cartesian parameter sweep", epilog=units + (
        " Axis syntax: NAME=START:STOP:STEP UNIT (inclusive) or NAME=A,B,C UNIT; "
        f"names: wraps, {', '.join(params.PARAMS)}. Metrics: {', '.join(explorer.METRICS)}."))
    common(sp)
    sp.add_argument("--axis", action="append", help="e.g. --axis 'voltage=0:500:50 V' (repeatable)")
    sp.add_argument("--metric", action="append", help="metric name(s), comma separated (repeatable)")
    sp.add_argument("--coulomb-only", action="store_true", help="drop the Johnsen-Rahbek pressure term")
    sp.add_argument("--jobs", type=int, default=1, help="worker processes (output order is unaffected)")
    sp.set_defaults(func=cmd_sweep)

    for name in ("compare", "advantage"):
        sp = sub.add_parser(name, help="capstan vs planar tension and advantage factor", epilog=units)
        common(sp)
        sp.add_argument("--voltages", help="voltage grid, e.g. '0:500:100 V' (default: design voltage)")
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--wraps", help="wrap-count grid, e.g. '0:3:0.5'")
        g.add_argument("--thetas", help="wrap-angle grid with unit, e.g. '0:6.28:0.5 rad'")
        sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("check", help="band-stress feasibility report (exit 4 when infeasible)", epilog=units)
    common(sp, None)
    sp.add_argument("--safety-factor", type=float, default=1.0)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("solve", help="inverse design: minimum wrap angle or maximum voltage", epilog=units)
    sp.add_argument("problem", choices=("min-wrap", "max-voltage"))
    common(sp, None)
    sp.add_argument("--target-torque", help="e.g. '7.1 N*m' (min-wrap)")
    sp.add_argument("--theta-max", default="10 wraps", help="search limit for min-wrap")
    sp.add_argument("--safety-factor", type=float, default=1.0)
    sp.add_argument("--voltage-ceiling", default="10 kV")
    sp.set_defaults(func=cmd_solve)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, CliError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return getattr(exc, "code", EXIT_INPUT)
    except FitError as exc:
        print(f"fit failed: {exc}", file=sys.stderr)
        return EXIT_FIT


if __name__ == "__main__":
    raise SystemExit(main())
