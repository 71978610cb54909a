"""Scenario configuration: TOML parsing and whole-file validation.

Every violation is collected (with the line it came from when it can be
located) before anything is reported.  Parameter names are unique across
sections so a scenario point is just a flat dict; sections only group
them for humans.
"""

from __future__ import annotations

import hashlib
import math
import re
import sys
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import tomli_w

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

COMPUTATIONS = (
    "risc-profile", "rytov", "nc", "losc", "gg-pdf",
    "attenuation", "link-budget", "capacity", "channel-sample",
)


def _positive(v):
    return None if v > 0 else "must be > 0"


def _nonneg(v):
    return None if v >= 0 else "must be >= 0"


def _any(v):
    return None


def _count(v):
    return None if v >= 1 else "must be >= 1"


def _choice(*options):
    def check(v):
        return None if v in options else f"must be one of {', '.join(options)}"
    return check


@dataclass(frozen=True)
class Param:
    section: str
    kind: type
    default: Any
    check: Any = _any
    unit: str = "-"
    sweepable: bool = True


# default None means "derived" (spacing -> lambda/2, sigma_r2 -> from cn2)
PARAMS: Dict[str, Param] = {
    "frequency": Param("link", float, 300e9, _positive, "Hz"),
    "distance": Param("link", float, 1000.0, _positive, "m"),
    "altitude": Param("link", float, 0.0, _nonneg, "m"),
    "tx_power_dbm": Param("link", float, 10.0, _any, "dBm"),
    "bandwidth": Param("link", float, 1e9, _positive, "Hz"),
    "noise_psd_dbm_hz": Param("link", float, -174.0, _any, "dBm/Hz"),
    "include_absorption": Param("link", bool, False, sweepable=False),
    "scattering": Param("link", bool, False, sweepable=False),
    "scatterer_index_re": Param("link", float, 2.5, lambda v: None if v >= 1 else "must be >= 1"),
    "scatterer_index_im": Param("link", float, 1.0, _nonneg),
    "absorption_scale_height": Param("link", float, 2000.0, _positive, "m"),
    "tx_nx": Param("arrays", int, 32, _count),
    "tx_ny": Param("arrays", int, 32, _count),
    "rx_nx": Param("arrays", int, 32, _count),
    "rx_ny": Param("arrays", int, 32, _count),
    "spacing": Param("arrays", float, None, _positive, "m"),
    "model": Param("turbulence", str, "constant", _choice("constant", "hufnagel-valley"), sweepable=False),
    "cn2": Param("turbulence", float, 1e-9, _nonneg, "m^-2/3"),
    "terrestrial_risc": Param("turbulence", float, 1.7e-14, _nonneg, "m^-2/3"),
    "wind_speed": Param("turbulence", float, 21.0, _nonneg, "m/s"),
    "temperature": Param("turbulence", float, 288.15, _positive, "K"),
    "pressure": Param("turbulence", float, 1013.25, _positive, "mbar"),
    "vapour_pressure": Param("turbulence", float, 0.0, _nonneg, "mbar"),
    "thz_transform": Param("turbulence", bool, True, sweepable=False),
    "enabled": Param("fading", bool, True, sweepable=False),
    "correlation": Param("fading", bool, False, sweepable=False),
    "printed_argument": Param("fading", bool, False, sweepable=False),
    "psi": Param("fading", float, 1.0, _positive),
    "sigma_r2": Param("fading", float, None, _positive),
    "dt_elements": Param("nc", float, 0.0, _nonneg, "spacing"),
    "dr_elements": Param("nc", float, 1.0, _nonneg, "spacing"),
    "numeric": Param("nc", bool, False, sweepable=False),
    "theta_t": Param("channel", float, 0.0, _any, "rad"),
    "phi_t": Param("channel", float, 0.0, _any, "rad"),
    "theta_r": Param("channel", float, 0.0, _any, "rad"),
    "phi_r": Param("channel", float, 0.0, _any, "rad"),
}

# sweep/series-only names
VIRTUAL = {
    "array_size": Param("arrays", int, None, _count),
    "draw": Param("channel", int, None, _nonneg),
}

SECTIONS = sorted({p.section for p in PARAMS.values()})
TOP_LEVEL = {"computation", "seed", "sweep", "series", "output"} | set(SECTIONS)
SWEEP_KEYS = {"parameter", "start", "stop", "points", "scale"}
OUTPUT_KEYS = {"path", "format"}


def param_info(name) -> Param:
    return PARAMS.get(name) or VIRTUAL[name]


@dataclass(frozen=True)
class ConfigIssue:
    key: str
    message: str
    line: Optional[int] = None

    def __str__(self):
        where = f"line {self.line}: " if self.line else ""
        return f"{where}{self.key}: {self.message}"


class ConfigError(ValueError):
    def __init__(self, issues: List[ConfigIssue]):
        self.issues = list(issues)
        super().__init__("\n".join(str(i) for i in self.issues))


@dataclass(frozen=True)
class Sweep:
    parameter: str
    start: float
    stop: float
    points: int
    scale: str = "lin"

    def values(self):
        if self.scale == "log":
            v = np.logspace(math.log10(self.start), math.log10(self.stop), self.points)
        else:
            v = np.linspace(self.start, self.stop, self.points)
        if param_info(self.parameter).kind is int:
            return [int(round(x)) for x in v]
        return [float(x) for x in v]


@dataclass(frozen=True)
class ScenarioConfig:
    computation: Optional[str]
    seed: int
    params: Dict[str, Any]
    sweep: Sweep
    series: Tuple[Dict[str, Any], ...] = ()
    output_path: Optional[str] = None
    output_format: str = "csv"
    _canonical: str = field(default="", repr=False, compare=False)
    _digest: str = field(default="", repr=False, compare=False)

    def canonical(self) -> str:
        return self._canonical

    def digest(self) -> str:
        """sha256 of the canonical form without [output], so the target path does not leak in."""
        return self._digest

    def with_overrides(self, computation=None, seed=None, output_path=None, output_format=None):
        return build_config(
            _raw_from(self, computation, seed, output_path, output_format)
        )


class _LineIndex:
    """Best-effort key -> line lookup on the raw text (TOML parsers drop positions)."""

    _header = re.compile(r"^\s*\[\[?\s*([A-Za-z0-9_.\-]+)\s*\]\]?")
    _key = re.compile(r"^\s*([A-Za-z0-9_\-]+)\s*=")

    def __init__(self, text):
        self.lines = {}
        section = ""
        counts: Dict[str, int] = {}
        for n, line in enumerate(text.splitlines(), start=1):
            m = self._header.match(line)
            if m:
                section = m.group(1)
                counts[section] = counts.get(section, 0) + 1
                self.lines.setdefault(section, n)
                self.lines.setdefault(f"{section}#{counts[section]}", n)
                continue
            m = self._key.match(line)
            if m:
                self.lines.setdefault(f"{section}.{m.group(1)}" if section else m.group(1), n)

    def find(self, key):
        return self.lines.get(key)


def _coerce(name, value, kind, issues, line):
    if kind is bool:
        if isinstance(value, bool):
            return value
    elif kind is int:
        if isinstance(value, int) and not isinstance(value, bool):
            return value
        if isinstance(value, float) and value.is_integer():
            return int(value)
    elif kind is float:
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            value = float(value)
            if math.isfinite(value):
                return value
            issues.append(ConfigIssue(name, "must be finite", line))
            return None
    elif kind is str:
        if isinstance(value, str):
            return value
    issues.append(ConfigIssue(name, f"expected {kind.__name__}, got {type(value).__name__}", line))
    return None


def _check_param(name, value, where, issues, idx):
    p = param_info(name)
    v = _coerce(where, value, p.kind, issues, idx.find(where))
    if v is None:
        return None
    msg = p.check(v)
    if msg:
        issues.append(ConfigIssue(where, msg, idx.find(where)))
        return None
    return v


def _validate_sweep(raw, issues, idx):
    if isinstance(raw, list):
        if len(raw) != 1:
            issues.append(ConfigIssue("sweep", f"exactly one sweep axis is required, found {len(raw)}",
                                      idx.find("sweep")))
            return None
        raw = raw[0]
    if not isinstance(raw, dict):
        issues.append(ConfigIssue("sweep", "must be a table", idx.find("sweep")))
        return None
    for key in sorted(set(raw) - SWEEP_KEYS):
        issues.append(ConfigIssue(f"sweep.{key}", "unknown key", idx.find(f"sweep.{key}")))
    n_before = len(issues)
    param = raw.get("parameter")
    if isinstance(param, list):
        issues.append(ConfigIssue("sweep.parameter", "exactly one sweep axis is required",
                                  idx.find("sweep.parameter")))
        return None
    if param is None:
        issues.append(ConfigIssue("sweep.parameter", "missing", idx.find("sweep")))
        return None
    info = PARAMS.get(param) or VIRTUAL.get(param)
    if info is None or not info.sweepable:
        issues.append(ConfigIssue("sweep.parameter", f"{param!r} is not a sweepable parameter",
                                  idx.find("sweep.parameter")))
        return None
    vals = {}
    for key in ("start", "stop"):
        if key not in raw:
            issues.append(ConfigIssue(f"sweep.{key}", "missing", idx.find("sweep")))
            continue
        vals[key] = _check_param(param, raw[key], f"sweep.{key}", issues, idx)
    points = raw.get("points")
    if points is None:
        issues.append(ConfigIssue("sweep.points", "missing", idx.find("sweep")))
    elif not isinstance(points, int) or isinstance(points, bool) or points < 2:
        issues.append(ConfigIssue("sweep.points", "must be an integer >= 2", idx.find("sweep.points")))
    scale = raw.get("scale", "lin")
    if scale not in ("lin", "log"):
        issues.append(ConfigIssue("sweep.scale", "must be 'lin' or 'log'", idx.find("sweep.scale")))
    if len(issues) > n_before or None in vals.values():
        return None
    start, stop = vals["start"], vals["stop"]
    if scale == "log" and not (start > 0 and stop > 0):
        issues.append(ConfigIssue("sweep.start", "log sweep needs start, stop > 0", idx.find("sweep.start")))
        return None
    sweep = Sweep(param, start, stop, points, scale)
    if info.kind is int:
        grid = np.linspace(start, stop, points) if scale == "lin" else np.logspace(
            math.log10(start), math.log10(stop), points)
        if not np.allclose(grid, np.round(grid), rtol=0, atol=1e-9):
            issues.append(ConfigIssue("sweep.points", f"{param} sweep must land on integers",
                                      idx.find("sweep.points")))
            return None
    return sweep


def _validate_series(raw, issues, idx):
    if not isinstance(raw, list):
        issues.append(ConfigIssue("series", "must be an array of tables ([[series]])", idx.find("series")))
        return ()
    out = []
    for n, entry in enumerate(raw, start=1):
        tag = f"series#{n}"
        if not isinstance(entry, dict) or not entry:
            issues.append(ConfigIssue(tag, "must be a non-empty table", idx.find(tag)))
            continue
        clean = {}
        for key in sorted(entry):
            info = PARAMS.get(key) or VIRTUAL.get(key)
            if info is None or not info.sweepable:
                issues.append(ConfigIssue(f"{tag}.{key}", "unknown or non-sweepable parameter", idx.find(tag)))
                continue
            v = _check_param(key, entry[key], f"{tag}.{key}", issues, idx)
            if v is not None:
                clean[key] = v
        out.append(clean)
    return tuple(out)


def validate_data(data: Dict[str, Any], text: str = "") -> ScenarioConfig:
    idx = _LineIndex(text)
    issues: List[ConfigIssue] = []

    for key in sorted(set(data) - TOP_LEVEL):
        issues.append(ConfigIssue(key, "unknown key", idx.find(key)))

    computation = data.get("computation")
    if computation is not None and computation not in COMPUTATIONS:
        issues.append(ConfigIssue("computation", f"unknown computation {computation!r}; "
                                  f"expected one of {', '.join(COMPUTATIONS)}", idx.find("computation")))
        computation = None

    seed = data.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        issues.append(ConfigIssue("seed", "must be a non-negative integer", idx.find("seed")))
        seed = 0

    params = {name: p.default for name, p in PARAMS.items()}
    for section in SECTIONS:
        body = data.get(section, {})
        if not isinstance(body, dict):
            issues.append(ConfigIssue(section, "must be a table", idx.find(section)))
            continue
        for key in sorted(body):
            where = f"{section}.{key}"
            p = PARAMS.get(key)
            if p is None or p.section != section:
                issues.append(ConfigIssue(where, "unknown key", idx.find(where)))
                continue
            v = _check_param(key, body[key], where, issues, idx)
            if v is not None:
                params[key] = v

    sweep = None
    if "sweep" not in data:
        issues.append(ConfigIssue("sweep", "exactly one sweep axis is required, found 0"))
    else:
        sweep = _validate_sweep(data["sweep"], issues, idx)

    series = _validate_series(data["series"], issues, idx) if "series" in data else ()
    if sweep is not None:
        for n, entry in enumerate(series, start=1):
            if sweep.parameter in entry:
                issues.append(ConfigIssue(f"series#{n}.{sweep.parameter}",
                                          "series may not override the sweep parameter", idx.find(f"series#{n}")))

    out = data.get("output", {})
    out_path, out_fmt = None, "csv"
    if not isinstance(out, dict):
        issues.append(ConfigIssue("output", "must be a table", idx.find("output")))
    else:
        for key in sorted(set(out) - OUTPUT_KEYS):
            issues.append(ConfigIssue(f"output.{key}", "unknown key", idx.find(f"output.{key}")))
        out_path = out.get("path")
        if out_path is not None and not isinstance(out_path, str):
            issues.append(ConfigIssue("output.path", "must be a string", idx.find("output.path")))
            out_path = None
        out_fmt = out.get("format", "csv")
        if out_fmt not in ("csv", "json"):
            issues.append(ConfigIssue("output.format", "must be 'csv' or 'json'", idx.find("output.format")))
            out_fmt = "csv"

    if issues:
        raise ConfigError(issues)

    cfg = ScenarioConfig(computation, seed, params, sweep, series, out_path, out_fmt)
    raw = _to_raw(cfg)
    canonical = tomli_w.dumps(raw)
    del raw["output"]
    digest = hashlib.sha256(tomli_w.dumps(raw).encode("utf-8")).hexdigest()
    return ScenarioConfig(computation, seed, params, sweep, series, out_path, out_fmt,
                          _canonical=canonical, _digest=digest)


def validate_config(text: str) -> ScenarioConfig:
    """Parse and validate raw TOML; raises :class:`ConfigError` listing every problem."""
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        m = re.search(r"line (\d+)", str(exc))
        raise ConfigError([ConfigIssue("<syntax>", str(exc), int(m.group(1)) if m else None)]) from None
    return validate_data(data, text)


def load_config(path) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return validate_config(fh.read())


def _to_raw(cfg: ScenarioConfig) -> Dict[str, Any]:
    raw: Dict[str, Any] = {}
    if cfg.computation is not None:
        raw["computation"] = cfg.computation
    raw["seed"] = cfg.seed
    for section in SECTIONS:
        body = {k: v for k, v in cfg.params.items() if PARAMS[k].section == section and v is not None}
        if body:
            raw[section] = dict(sorted(body.items()))
    s = cfg.sweep
    raw["sweep"] = {"parameter": s.parameter, "start": s.start, "stop": s.stop,
                    "points": s.points, "scale": s.scale}
    if cfg.series:
        raw["series"] = [dict(sorted(e.items())) for e in cfg.series]
    out = {"format": cfg.output_format}
    if cfg.output_path is not None:
        out["path"] = cfg.output_path
    raw["output"] = out
    return raw


def _raw_from(cfg, computation, seed, output_path, output_format):
    raw = _to_raw(cfg)
    if computation is not None:
        raw["computation"] = computation
    if seed is not None:
        raw["seed"] = seed
    if output_path is not None:
        raw["output"]["path"] = output_path
    if output_format is not None:
        raw["output"]["format"] = output_format
    return raw


def build_config(raw: Dict[str, Any]) -> ScenarioConfig:
    return validate_data(raw)
