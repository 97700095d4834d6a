"""Measurement CSVs, design config files and result tables.

Design config is UTF-8 ``key = value unit`` text with ``#`` comments.
Result tables are written as CSV (provenance in leading ``#`` lines) or JSON
(provenance under ``"metadata"``). Floats are written as their shortest
round-trip repr, so parse(write(x)) is bit-exact.
"""

from __future__ import annotations

import csv
import datetime as _dt
import hashlib
import io
import json
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from . import __version__
from .calibration import MeasurementRecord
from .errors import ValidationError
from .model import (
    BandSpec,
    CapstanGeometry,
    ClutchDesign,
    DielectricSpec,
    InterfaceSpec,
    OperatingPoint,
)
from .params import PARAMS
from .units import SI_TOKEN, parse_number, scale, split_quantity

INFEASIBLE = "INFEASIBLE"
NOT_APPLICABLE = "N/A"

MEASUREMENT_REQUIRED = ("wrap_angle_rad", "voltage_V", "pretension_N", "slip_torque_Nm")
MEASUREMENT_OPTIONAL = ("power_mW_per_cm2", "label")


# --------------------------------------------------------------------------
# Provenance and result tables
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Provenance:
    tool_version: str
    input_sha256: str
    generated_at: str

    @classmethod
    def for_inputs(cls, *inputs: str | bytes) -> "Provenance":
        digest = hashlib.sha256()
        for chunk in inputs:
            data = chunk.encode("utf-8") if isinstance(chunk, str) else chunk
            digest.update(len(data).to_bytes(8, "big"))
            digest.update(data)
        return cls(__version__, digest.hexdigest(), utc_timestamp())


def utc_timestamp() -> str:
    """Current UTC time in ISO-8601; honours SOURCE_DATE_EPOCH for reproducible output."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch:
        now = _dt.datetime.fromtimestamp(int(epoch), tz=_dt.timezone.utc)
    else:
        now = _dt.datetime.now(tz=_dt.timezone.utc)
    return now.replace(microsecond=0).isoformat().replace("+00:00", "Z")


@dataclass
class ResultTable:
    """Rectangular table of floats. ``None`` cells are N/A, or INFEASIBLE when the row is infeasible."""

    columns: tuple
    rows: list = field(default_factory=list)
    feasible: list = field(default_factory=list)
    provenance: Optional[Provenance] = None

    def __post_init__(self):
        self.columns = tuple(self.columns)
        if len(set(self.columns)) != len(self.columns):
            raise ValidationError("columns", "duplicate column names")
        if "feasible" in self.columns:
            raise ValidationError("columns", "'feasible' is reserved")
        self.rows = [tuple(r) for r in self.rows]
        if not self.feasible:
            self.feasible = [True] * len(self.rows)
        if len(self.feasible) != len(self.rows):
            raise ValidationError("feasible", "one flag per row is required")
        for n, row in enumerate(self.rows, 1):
            self._check_row(n, row, self.feasible[n - 1])

    def _check_row(self, n, row, ok):
        if len(row) != len(self.columns):
            raise ValidationError("rows", f"row {n} has {len(row)} cells, expected {len(self.columns)}")
        for cell in row:
            if cell is not None and not math.isfinite(cell):
                raise ValidationError("rows", f"row {n} has a non-finite value {cell!r}")
        if not ok and all(c is not None for c in row):
            raise ValidationError("rows", f"infeasible row {n} needs at least one empty metric cell")

    def append(self, row: Sequence[Optional[float]], feasible: bool = True):
        row = tuple(None if c is None else float(c) for c in row)
        self._check_row(len(self.rows) + 1, row, feasible)
        self.rows.append(row)
        self.feasible.append(bool(feasible))

    def column(self, name: str) -> list:
        k = self.columns.index(name)
        return [r[k] for r in self.rows]

    def __len__(self):
        return len(self.rows)

    def same_data(self, other: "ResultTable") -> bool:
        return (self.columns == other.columns and self.rows == other.rows
                and list(self.feasible) == list(other.feasible))


def _fmt(value: float) -> str:
    return repr(float(value))


def write_table(table: ResultTable, fmt: str = "csv") -> str:
    if fmt == "csv":
        return _write_csv(table)
    if fmt == "json":
        return _write_json(table)
    raise ValidationError("format", f"unknown table format {fmt!r}; use csv or json")


def _write_csv(table: ResultTable) -> str:
    buf = io.StringIO()
    if table.provenance is not None:
        for key in ("tool_version", "input_sha256", "generated_at"):
            buf.write(f"# {key}: {getattr(table.provenance, key)}\n")
    writer = csv.writer(buf, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
    writer.writerow(table.columns)
    for row, ok in zip(table.rows, table.feasible):
        empty = NOT_APPLICABLE if ok else INFEASIBLE
        writer.writerow([empty if c is None else _fmt(c) for c in row])
    return buf.getvalue()


def _write_json(table: ResultTable) -> str:
    meta = None
    if table.provenance is not None:
        meta = {
            "tool_version": table.provenance.tool_version,
            "input_sha256": table.provenance.input_sha256,
            "generated_at": table.provenance.generated_at,
        }
    rows = []
    for row, ok in zip(table.rows, table.feasible):
        obj = {c: (None if v is None else float(v)) for c, v in zip(table.columns, row)}
        obj["feasible"] = bool(ok)
        rows.append(obj)
    doc = {"metadata": meta, "columns": list(table.columns), "rows": rows}
    return json.dumps(doc, indent=1, ensure_ascii=False, allow_nan=False) + "\n"


def read_table(text: str, fmt: str = "csv") -> ResultTable:
    if fmt == "json":
        doc = json.loads(text)
        meta = doc.get("metadata")
        prov = Provenance(**meta) if meta else None
        columns = tuple(doc["columns"])
        rows = [tuple(obj[c] for c in columns) for obj in doc["rows"]]
        flags = [bool(obj.get("feasible", True)) for obj in doc["rows"]]
        return ResultTable(columns, rows, flags, prov)
    if fmt != "csv":
        raise ValidationError("format", f"unknown table format {fmt!r}")

    meta = {}
    body = []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition(":")
            meta[key.strip()] = value.strip()
        elif line.strip():
            body.append(line)
    reader = csv.reader(body)
    try:
        columns = tuple(next(reader))
    except StopIteration:
        raise ValidationError("table", "missing header row") from None
    rows, flags = [], []
    for n, cells in enumerate(reader, 2):
        ok = INFEASIBLE not in cells
        row = []
        for c in cells:
            if c in (INFEASIBLE, NOT_APPLICABLE):
                row.append(None)
            else:
                try:
                    row.append(float(c))
                except ValueError:
                    raise ValidationError("table", f"row {n}: non-numeric cell {c!r}") from None
        rows.append(tuple(row))
        flags.append(ok)
    prov = Provenance(**meta) if meta else None
    return ResultTable(columns, rows, flags, prov)


# --------------------------------------------------------------------------
# Measurement CSV
# --------------------------------------------------------------------------

def _cell_number(text: str, line: int, column: str) -> Fraction:
    try:
        return parse_number(text, column)
    except ValidationError:
        raise ValidationError(column, f"line {line}: non-numeric value {text!r}") from None


def parse_measurements(text: str) -> list[MeasurementRecord]:
    """Parse a slip-test CSV. Any bad row rejects the whole file; errors give the 1-based line number."""
    header = None
    records = []
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        cells = next(csv.reader([line]))
        if header is None:
            header = [c.strip() for c in cells]
            missing = [c for c in MEASUREMENT_REQUIRED if c not in header]
            if missing:
                raise ValidationError(missing[0], f"line {lineno}: missing required column")
            unknown = [c for c in header if c not in MEASUREMENT_REQUIRED + MEASUREMENT_OPTIONAL]
            if unknown:
                raise ValidationError(unknown[0], f"line {lineno}: unknown column")
            continue
        if len(cells) != len(header):
            raise ValidationError("row", f"line {lineno}: expected {len(header)} cells, got {len(cells)}")
        row = dict(zip(header, (c.strip() for c in cells)))
        values = {c: float(_cell_number(row[c], lineno, c)) for c in MEASUREMENT_REQUIRED}
        power = None
        if row.get("power_mW_per_cm2"):
            power = float(_cell_number(row["power_mW_per_cm2"], lineno, "power_mW_per_cm2") * 10)
        try:
            rec = MeasurementRecord(
                wrap_angle=values["wrap_angle_rad"],
                voltage=values["voltage_V"],
                pretension=values["pretension_N"],
                slip_torque=values["slip_torque_Nm"],
                power_areal=power,
                label=row.get("label", ""),
            )
        except ValidationError as exc:
            raise ValidationError(exc.field, f"line {lineno}: {exc}") from None
        records.append(rec)
    if header is None:
        raise ValidationError("header", "measurement file has no header row")
    return records


def write_measurements(records: Iterable[MeasurementRecord], comment: str = "") -> str:
    records = list(records)
    has_power = any(r.power_areal is not None for r in records)
    has_label = any(r.label for r in records)
    cols = list(MEASUREMENT_REQUIRED)
    if has_power:
        cols.append("power_mW_per_cm2")
    if has_label:
        cols.append("label")
    buf = io.StringIO()
    for line in comment.splitlines():
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in records:
        row = [_fmt(r.wrap_angle), _fmt(r.voltage), _fmt(r.pretension), _fmt(r.slip_torque)]
        if has_power:
            row.append("" if r.power_areal is None else _fmt(r.power_areal / 10))
        if has_label:
            row.append(r.label)
        w.writerow(row)
    return buf.getvalue()


# --------------------------------------------------------------------------
# Design config
# --------------------------------------------------------------------------

_TEXT_KEYS = ("name",)


def parse_assignment(line: str, where: str = "") -> tuple[str, str]:
    key, eq, value = line.partition("=")
    key = key.strip()
    if not eq or not key:
        raise ValidationError("line", f"{where}expected 'key = value unit', got {line.strip()!r}")
    return key, value.strip()


def parse_quantity(key: str, text: str) -> float:
    """Convert ``text`` (number plus unit) for design parameter ``key`` to SI."""
    p = PARAMS[key]
    value, unit = split_quantity(text, key)
    return scale(value, unit, p.kind, key)


def parse_design(text: str) -> tuple[ClutchDesign, OperatingPoint]:
    values: dict[str, float] = {}
    name = ""
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, value = parse_assignment(line, f"line {lineno}: ")
        if key in seen:
            raise ValidationError(key, f"line {lineno}: duplicate key")
        seen.add(key)
        if key in _TEXT_KEYS:
            name = value
            continue
        if key not in PARAMS:
            raise ValidationError(key, f"line {lineno}: unknown key")
        values[key] = parse_quantity(key, value)
    return build_design(values, name)


def build_design(values: dict, name: str = "") -> tuple[ClutchDesign, OperatingPoint]:
    missing = [k for k, p in PARAMS.items() if p.required and k not in values]
    if missing:
        raise ValidationError(missing[0], "missing required key")
    design = ClutchDesign(
        dielectric=DielectricSpec(
            values["dielectric_thickness"],
            values["dielectric_permittivity"],
            values.get("volume_resistivity"),
            name=name,
        ),
        interface=InterfaceSpec(values["gap"], values["cof"], values.get("gas_permittivity", 1.0)),
        band=BandSpec(values["band_thickness"], values["band_width"], values["yield_stress"]),
        geometry=CapstanGeometry(values["shaft_radius"], values["wrap_angle"], values["pretension"]),
    )
    return design, OperatingPoint(values["voltage"])


def write_design(design: ClutchDesign, op: OperatingPoint) -> str:
    """Serialise in SI units; parse_design() of the result reproduces every float exactly."""
    from .params import get_value

    lines = []
    if design.dielectric.name:
        lines.append(f"name = {design.dielectric.name}")
    for key, p in PARAMS.items():
        v = get_value(design, op, key)
        if v is None:
            continue
        unit = SI_TOKEN[p.kind]
        lines.append(f"{key} = {_fmt(v)} {unit}".rstrip())
    return "\n".join(lines) + "\n"
