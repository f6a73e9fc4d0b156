"""Command-line front end.

    nanotrap [COMMAND] [--config FILE] [--key=value ...]

Exit codes: 0 success, 2 configuration or domain error, 3 numerical guard
tripped, 4 I/O error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import replace

import numpy as np

from . import config as cfgmod
from .composer import DeviceSpec, IlluminationSpec, TrapField, sample_region
from .cylinder import FiberSpec
from .errors import ConfigError, DomainError, NumericalInstabilityError
from .grating import GratingSpec
from .potential import TrapPotential, total_potential
from .traps import analyze_sites, sweep_phase, sweep_radius

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4

DEFAULT_REGIONS = {
    "sweep-radius": "radius:2e-07:4e-07:2.5e-08",
    "sweep-phase": "omega:0:350:10",
}


def build(cfg):
    g = GratingSpec(cfg["grating.period_m"], cfg["grating.slat_width_m"], cfg["grating.depth_m"],
                    slat_index=cfg["grating.slat_index"], substrate_index=cfg["grating.substrate_index"],
                    slat_center=cfg["grating.slat_center_m"])
    device = DeviceSpec(g, FiberSpec(cfg["fiber.radius_m"], cfg["fiber.index"]), cfg["grating.truncation"])
    illum = IlluminationSpec(cfg["beam.wavelength_m"], math.radians(cfg["beam.theta_deg"]), cfg["beam.power_w"],
                             cfg["beam.waist_m"], cfg["beam.dual"], math.radians(cfg["beam.omega_deg"] % 360.0))
    return device, illum


def _regions(cfg, allowed, count=None):
    regions = cfg["task.region"]
    if not regions and cfg["task.command"] in DEFAULT_REGIONS:
        regions = cfgmod.parse_region(DEFAULT_REGIONS[cfg["task.command"]])
    if not regions:
        raise ConfigError(f"{cfg['task.command']} needs task.region", "task.region")
    for r in regions:
        if r.axis not in allowed:
            raise ConfigError(f"axis {r.axis!r} not allowed here (use {', '.join(allowed)})", "task.region")
    if count is not None and len(regions) not in count:
        raise ConfigError(f"expected {' or '.join(map(str, count))} region axes", "task.region")
    return regions


def _num(v):
    return f"{v:.9g}"


def _round(v):
    if isinstance(v, float):
        return float(f"{v:.9g}")
    if isinstance(v, dict):
        return {k: _round(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_round(x) for x in v]
    return v


def _csv(cfg, columns, rows):
    head = "".join(f"# {k} = {cfgmod.format_value(k, cfg[k])}\n" for k in sorted(cfg))
    body = ",".join(columns) + "\n"
    body += "".join(",".join(_num(float(v)) for v in row) + "\n" for row in rows)
    return head + body


def _report(cfg, results):
    doc = {"config": {k: cfgmod.format_value(k, cfg[k]) for k in sorted(cfg)}, "results": _round(results)}
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _grid(cfg, model):
    regions = _regions(cfg, ("x", "y", "z"), (1, 2, 3))
    axes = {r.axis: np.array(r.values()) for r in regions}
    fixed = {"x": -cfg["fiber.radius_m"] - 1e-7, "y": 0.0, "z": cfg["task.z_site_m"]}
    return sample_region(model, axes, {k: v for k, v in fixed.items() if k not in axes})


def _grid_columns(grid):
    x, y, z = grid.coordinates()
    return [x.ravel(), y.ravel(), z.ravel()]


def run_field_map(cfg, device, illum):
    grid = _grid(cfg, TrapField(device, illum))
    E = grid.samples.reshape(-1, 3)
    cols = ["x_m", "y_m", "z_m", "Ex_re_unit", "Ex_im_unit", "Ey_re_unit", "Ey_im_unit", "Ez_re_unit",
            "Ez_im_unit", "E2_unit"]
    data = _grid_columns(grid) + [f(E[:, i]) for i in range(3) for f in (np.real, np.imag)]
    data.append(grid.intensity.ravel())
    if cfg["output.format"] == "csv":
        return _csv(cfg, cols, zip(*data))
    return _report(cfg, {"columns": cols, "rows": [list(map(float, r)) for r in zip(*data)]})


def run_potential_cut(cfg, device, illum):
    grid = _grid(cfg, TrapField(device, illum))
    pg = total_potential(grid, device.fiber, illum)
    cols = ["x_m", "y_m", "z_m", "E2_unit", "U_opt_mK", "U_vdW_mK", "U_mK"]
    data = _grid_columns(grid) + [grid.intensity.ravel(), pg.u_opt.ravel(), pg.u_vdw.ravel(), pg.u_total.ravel()]
    if cfg["output.format"] == "csv":
        return _csv(cfg, cols, zip(*data))
    return _report(cfg, {"columns": cols, "rows": [list(map(float, r)) for r in zip(*data)]})


REPORT_COLUMNS = ["position_m", "distance_from_surface_m", "depth_mK", "frequency_kHz",
                  "angular_frequency_krad_s", "curvature_J_m2"]


def _report_row(r):
    d = r.as_dict()
    return [math.nan if d[c] is None else d[c] for c in REPORT_COLUMNS]


def run_trap_report(cfg, device, illum):
    pot = TrapPotential(TrapField(device, illum))
    sites = analyze_sites(pot, z_site=cfg["task.z_site_m"])
    if cfg["output.format"] == "csv":
        rows = [[i, "xyz".index(r.axis)] + _report_row(r) for i, s in enumerate(sites, 1) for r in s.reports]
        return _csv(cfg, ["site", "axis_index"] + REPORT_COLUMNS, rows)
    out = [{"site": i, "traps": [r.as_dict() for r in s.reports]} for i, s in enumerate(sites, 1)]
    return _report(cfg, {"sites": out})


def _sweep_output(cfg, curve, values, name, unit_values):
    if cfg["output.format"] == "csv":
        rows = [[v] + ([math.nan] * len(REPORT_COLUMNS) if r is None else _report_row(r)) + [int(i in curve.jumps)]
                for i, (v, r) in enumerate(zip(unit_values, curve.reports))]
        return _csv(cfg, [name] + REPORT_COLUMNS + ["jump"], rows)
    pts = [{name: v, "trap": None if r is None else r.as_dict()} for v, r in zip(unit_values, curve.reports)]
    return _report(cfg, {"points": pts, "jumps": [unit_values[i] for i in curve.jumps]})


def run_sweep_radius(cfg, device, illum):
    (region,) = _regions(cfg, ("radius",), (1,))
    radii = region.values()
    curve = sweep_radius(device, radii, illum)
    return _sweep_output(cfg, curve, radii, "radius_m", radii)


def run_sweep_phase(cfg, device, illum):
    (region,) = _regions(cfg, ("omega",), (1,))
    deg = region.values()
    curve = sweep_phase(device, [math.radians(d) for d in deg], replace(illum, dual=True))
    return _sweep_output(cfg, curve, deg, "omega_deg", deg)


RUNNERS = {
    "field-map": run_field_map,
    "potential-cut": run_potential_cut,
    "trap-report": run_trap_report,
    "sweep-radius": run_sweep_radius,
    "sweep-phase": run_sweep_phase,
}


def resolve(argv):
    parser = argparse.ArgumentParser(prog="nanotrap", description="Nanofiber-on-grating atom trap simulator.")
    parser.add_argument("command", nargs="?", choices=cfgmod.COMMANDS)
    parser.add_argument("--config", help="flat key = value configuration file")
    parser.add_argument("--dump-config", action="store_true", help="print the resolved configuration and exit")
    args, rest = parser.parse_known_args(argv)
    cfg = cfgmod.defaults()
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            cfg = cfgmod.parse_text(fh.read(), args.config)
    cfg = cfgmod.apply_overrides(cfg, rest)
    if args.command:
        cfg["task.command"] = args.command
    return cfg, args


def run(cfg):
    """Execute a resolved configuration and return the output text."""
    device, illum = build(cfg)
    return RUNNERS[cfg["task.command"]](cfg, device, illum)


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg, args = resolve(argv)
        if args.dump_config:
            sys.stdout.write(cfgmod.dump(cfg))
            return EXIT_OK
        text = run(cfg)
        if cfg["output.path"] == "-":
            sys.stdout.write(text)
        else:
            with open(cfg["output.path"], "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
    except (ConfigError, DomainError) as exc:
        print(f"nanotrap: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalInstabilityError as exc:
        print(f"nanotrap: numerical guard [{exc.module}/{exc.guard}]: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"nanotrap: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK
