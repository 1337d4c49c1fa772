"""Run configuration parsing and result-file emission.

Configs are JSON objects.  Material keys are the lower-snake-case names of
:class:`~triaxdamage.material_model.MaterialParams` fields (``e``, ``nu``,
``a``, ``b``, ``n``, ``y0``, ..., ``dc``).  Unknown keys anywhere are an
error; missing material keys fall back to the reference defaults with a logged
notice.

Every file written here starts with a units line and a parameter-echo
comment line, so a result can be re-run from the file alone.  Floats are
written with 17 significant digits, which makes CSV round trips exact.
"""

from __future__ import annotations

import csv
import dataclasses
import io as _io
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

from . import drivers as dv
from . import material_model as mm

log = logging.getLogger("triaxdamage")

FORMATS = ("csv", "json")
UNITS_LINE = "# units: stress MPa, strain dimensionless"

RECORD_COLUMNS = (
    "step", "eps11", "eps22", "eps33", "eps12", "eps23", "eps13",
    "sig11", "sig22", "sig33", "sig12", "sig23", "sig13",
    "ebar_p", "D", "h", "eta", "theta0", "f_res", "plastic", "fractured",
)

TRUNCATED = "# TRUNCATED"


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""


# --------------------------------------------------------------------------
# config
# --------------------------------------------------------------------------

MATERIAL_KEYS = {f.name.lower(): f.name for f in dataclasses.fields(mm.MaterialParams)}

_SECTIONS = {
    "preset": None,
    "material": None,
    "path": {"preset", "strain", "steps", "modes", "targets"},
    "sweep": {"ebar_p", "eta", "samples", "mode", "eta_grid", "theta0_grid", "pairs",
              "d_eps", "max_strain", "workers"},
    "fit": {"kind", "points"},
    "output": {"path", "format"},
}


@dataclass
class RunConfig:
    material: mm.MaterialParams = mm.REFERENCE
    path: dict = field(default_factory=dict)
    sweep: dict = field(default_factory=dict)
    fit: dict = field(default_factory=dict)
    out: str | None = None
    format: str = "csv"


def _check_keys(section, data, allowed):
    if not isinstance(data, dict):
        raise ConfigError(f"section {section!r} must be an object")
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown key(s) in {section!r}: {', '.join(unknown)}")


def material_from_dict(data: dict, base: mm.MaterialParams = mm.REFERENCE) -> mm.MaterialParams:
    _check_keys("material", data, MATERIAL_KEYS)
    missing = sorted(set(MATERIAL_KEYS) - set(data))
    if data and missing:
        log.warning("material keys not given, using defaults: %s", ", ".join(missing))
    changes = {}
    for key, value in data.items():
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"material key {key!r} must be a number, got {value!r}")
        changes[MATERIAL_KEYS[key]] = value
    try:
        return base.with_(**changes)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def material_to_dict(params: mm.MaterialParams) -> dict:
    return {k: getattr(params, name) for k, name in MATERIAL_KEYS.items()}


def preset_material(name: str) -> mm.MaterialParams:
    if name not in mm.PRESETS:
        raise ConfigError(f"unknown material preset {name!r}; choose from {sorted(mm.PRESETS)}")
    return mm.PRESETS[name]


def parse_config(data: dict) -> RunConfig:
    _check_keys("config", data, _SECTIONS)
    for name, allowed in _SECTIONS.items():
        if allowed is not None and name in data:
            _check_keys(name, data[name], allowed)
    base = preset_material(data["preset"]) if "preset" in data else mm.REFERENCE
    material = material_from_dict(data.get("material", {}), base)
    out = data.get("output", {})
    fmt = out.get("format", "csv")
    if fmt not in FORMATS:
        raise ConfigError(f"unknown output format {fmt!r}")
    return RunConfig(material, dict(data.get("path", {})), dict(data.get("sweep", {})),
                     dict(data.get("fit", {})), out.get("path"), fmt)


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return parse_config(data)


def path_from_config(spec: dict, preset=None, steps=None) -> dv.PathSpec:
    spec = dict(spec)
    if steps is not None:
        spec["steps"] = steps
    if preset is not None:
        spec["preset"] = preset
    try:
        if "modes" in spec or "targets" in spec:
            if "preset" in spec:
                raise ConfigError("give either a path preset or explicit modes/targets")
            return dv.PathSpec(int(spec.get("steps", 2000)), tuple(spec["modes"]),
                               tuple(spec["targets"]))
        return dv.PathSpec.preset(spec.get("preset", "uniaxial_tension"),
                                  strain=spec.get("strain"), steps=spec.get("steps"))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"invalid path: {exc}") from exc


# --------------------------------------------------------------------------
# writers
# --------------------------------------------------------------------------


def fmt_float(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def param_echo(params: mm.MaterialParams) -> str:
    body = json.dumps(material_to_dict(params), sort_keys=True, separators=(",", ":"))
    return "# params: " + body


def _json_safe(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def record_row(r: dv.SimRecord) -> list:
    return ([r.step] + [float(v) for v in r.eps] + [float(v) for v in r.sigma]
            + [r.ebar_p, r.D, r.h, r.eta, r.theta0, r.f_res, int(r.plastic), int(r.fractured)])


def render_table(columns, rows, params, fmt="csv", meta=None) -> str:
    """Serialize ``rows`` (lists aligned with ``columns``) to csv or json text."""
    if fmt == "csv":
        buf = _io.StringIO()
        buf.write(UNITS_LINE + "\n")
        buf.write(param_echo(params) + "\n")
        for key, value in (meta or {}).items():
            buf.write(f"# {key}: {value}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            if isinstance(row, str):
                buf.write(row + "\n")
                continue
            w.writerow([fmt_float(v) if isinstance(v, float) else v for v in row])
        return buf.getvalue()
    if fmt == "json":
        doc = {
            "units": UNITS_LINE[2:],
            "params": material_to_dict(params),
            "meta": meta or {},
            "columns": list(columns),
            "rows": [[_json_safe(v) for v in row] for row in rows if not isinstance(row, str)],
        }
        if any(isinstance(row, str) for row in rows):
            doc["truncated"] = True
        return json.dumps(doc, indent=1, sort_keys=True) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def records_text(records, params, fmt="csv", truncated=None, meta=None) -> str:
    rows = [record_row(r) for r in records]
    if truncated:
        rows.append(f"{TRUNCATED}: {truncated}")
    return render_table(RECORD_COLUMNS, rows, params, fmt, meta)


def write_text(path, text):
    Path(path).write_text(text)


def read_records_csv(path_or_text):
    """Parse a records CSV back into :class:`~triaxdamage.drivers.SimRecord` objects.

    Returns ``(records, truncated)``.
    """
    import numpy as np

    text = path_or_text
    if not isinstance(text, str) or "\n" not in text:
        text = Path(path_or_text).read_text()
    truncated = False
    lines = []
    for line in text.splitlines():
        if line.startswith(TRUNCATED):
            truncated = True
        elif not line.startswith("#"):
            lines.append(line)
    reader = csv.reader(lines)
    header = next(reader)
    if tuple(header) != RECORD_COLUMNS:
        raise ValueError("not a records file: unexpected header")
    out = []
    for row in reader:
        v = [float(x) for x in row]
        out.append(dv.SimRecord(int(v[0]), np.array(v[1:7]), np.array(v[7:13]), v[13], v[14],
                                v[15], v[16], v[17], v[18], bool(v[19]), bool(v[20])))
    return out, truncated
