"""Flat ``key = value`` run configuration with typed keys and CLI overrides.

Precedence: command-line ``--key=value`` > config file > defaults.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .errors import ConfigError

COMMANDS = ("field-map", "potential-cut", "trap-report", "sweep-radius", "sweep-phase")
FORMATS = ("csv", "report")
REGION_AXES = ("x", "y", "z", "radius", "omega")


def _bool(text):
    t = text.strip().lower()
    if t in ("true", "yes", "1", "on"):
        return True
    if t in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _float(text):
    v = float(text)
    if not math.isfinite(v):
        raise ValueError("must be finite")
    return v


def _positive(text):
    v = _float(text)
    if v <= 0:
        raise ValueError("must be positive")
    return v


def _index(text):
    v = _float(text)
    if v < 1:
        raise ValueError("refractive index must be >= 1")
    return v


def _nonneg(text):
    v = _float(text)
    if v < 0:
        raise ValueError("must be >= 0")
    return v


def _optional_float(text):
    return None if text.strip().lower() in ("", "auto") else _float(text)


def _odd_int(text):
    v = int(text)
    if v < 1 or v % 2 == 0:
        raise ValueError("must be an odd positive integer")
    return v


def _choice(options):
    def parse(text):
        t = text.strip()
        if t not in options:
            raise ValueError(f"must be one of {', '.join(options)}")
        return t
    return parse


def _text(text):
    return text.strip()


@dataclass(frozen=True)
class Region:
    axis: str
    start: float
    stop: float
    step: float

    def values(self):
        n = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return [self.start + i * self.step for i in range(n)]

    def __str__(self):
        return f"{self.axis}:{self.start!r}:{self.stop!r}:{self.step!r}"


def parse_region(text):
    """``axis:min:max:step`` entries separated by whitespace or ';'."""
    out = []
    for part in re.split(r"[;\s]+", text.strip()):
        if not part:
            continue
        bits = part.split(":")
        if len(bits) != 4:
            raise ValueError(f"region entry {part!r} is not axis:min:max:step")
        axis = bits[0]
        if axis not in REGION_AXES:
            raise ValueError(f"unknown region axis {axis!r}")
        lo, hi, st = (_float(b) for b in bits[1:])
        if st <= 0 or hi < lo:
            raise ValueError(f"region entry {part!r} needs min <= max and step > 0")
        out.append(Region(axis, lo, hi, st))
    if len({r.axis for r in out}) != len(out):
        raise ValueError("region repeats an axis")
    return tuple(out)


def _region_text(regions):
    return " ".join(str(r) for r in regions)


# key -> (parser, default)
SCHEMA = {
    "task.command": (_choice(COMMANDS), "trap-report"),
    "task.region": (parse_region, ()),
    "task.z_site_m": (_float, 0.0),
    "grating.period_m": (_positive, 1.05e-06),
    "grating.slat_width_m": (_positive, 5e-08),
    "grating.depth_m": (_nonneg, 2e-06),
    "grating.slat_index": (_index, 1.45),
    "grating.substrate_index": (_index, 1.45),
    "grating.slat_center_m": (_optional_float, None),
    "grating.truncation": (_odd_int, 3),
    "fiber.radius_m": (_positive, 3e-07),
    "fiber.index": (_index, 1.45),
    "beam.wavelength_m": (_positive, 9.37e-07),
    "beam.theta_deg": (_float, 0.0),
    "beam.power_w": (_nonneg, 0.25),
    "beam.waist_m": (_positive, 1e-05),
    "beam.dual": (_bool, False),
    "beam.omega_deg": (_float, 180.0),
    "output.path": (_text, "-"),
    "output.format": (_choice(FORMATS), "report"),
}


def format_value(key, value):
    if key == "task.region":
        return _region_text(value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "auto"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def defaults():
    return {k: v[1] for k, v in SCHEMA.items()}


def set_value(cfg, key, text, where):
    if key not in SCHEMA:
        raise ConfigError(f"unknown key {key!r}", where)
    try:
        cfg[key] = SCHEMA[key][0](text)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {exc}", where) from None


def parse_text(text, source="<config>", base=None):
    cfg = dict(defaults() if base is None else base)
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", f"{source}:{lineno}")
        key, _, value = line.partition("=")
        set_value(cfg, key.strip(), value, f"{source}:{lineno}")
    return cfg


def apply_overrides(cfg, args):
    cfg = dict(cfg)
    for arg in args:
        if not arg.startswith("--") or "=" not in arg:
            raise ConfigError("overrides must look like --key=value", f"argument {arg!r}")
        key, _, value = arg[2:].partition("=")
        set_value(cfg, key, value, f"argument {arg!r}")
    return cfg


def dump(cfg):
    """Serialise to config-file text; ``parse_text(dump(c)) == c``."""
    return "".join(f"{k} = {format_value(k, cfg[k])}\n" for k in sorted(cfg))
