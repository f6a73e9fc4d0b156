"""Trap location, depth and harmonic frequencies on 1-D potential cuts, plus sweeps.

A cut is a potential sampled on a uniform 1-D grid ``s`` together with an
optional callable ``U(s)`` used to polish the minimum and evaluate the
curvature off-grid.  For the x-cut, ``s`` is the distance from the fiber
surface; for y and z cuts it is the coordinate itself.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import constants as sc
from scipy.optimize import minimize_scalar

from .composer import TrapField
from .cylinder import FiberSpec
from .errors import DegenerateTrapError, DomainError
from .potential import CS_MASS, TrapPotential, optical_potential

X_START = 10e-9
X_STOP = 1.5e-6
STEP = 2e-9
Y_HALF = 1e-6
TRACK_DEPTH_MK = 1e-3
JUMP_M = 50e-9


@dataclass
class Cut:
    axis: str
    s: np.ndarray
    u: np.ndarray
    func: object = None

    @property
    def step(self):
        return float(self.s[1] - self.s[0])


@dataclass(frozen=True)
class Minimum:
    index: int
    position: float
    value: float


@dataclass(frozen=True)
class TrapReport:
    axis: str
    position: float
    distance_from_surface: float | None
    depth_mK: float
    frequency_kHz: float
    angular_frequency_krad_s: float
    curvature: float
    well_resolved: bool

    def as_dict(self):
        return {
            "axis": self.axis,
            "position_m": self.position,
            "distance_from_surface_m": self.distance_from_surface,
            "depth_mK": self.depth_mK,
            "frequency_kHz": self.frequency_kHz,
            "angular_frequency_krad_s": self.angular_frequency_krad_s,
            "curvature_J_m2": self.curvature,
            "well_resolved": self.well_resolved,
        }


def _parabolic(s, u, i):
    d = u[i - 1] - 2 * u[i] + u[i + 1]
    if d <= 0:
        return s[i], u[i]
    off = 0.5 * (u[i - 1] - u[i + 1]) / d
    h = s[1] - s[0]
    return s[i] + off * h, u[i] - 0.25 * (u[i - 1] - u[i + 1]) * off


def locate_minima(cut):
    """Interior local minima, refined by 3-point parabola and, if available, the callable."""
    s, u = np.asarray(cut.s), np.asarray(cut.u)
    if s.size < 5:
        raise DomainError("a potential cut needs at least 5 samples")
    out = []
    for i in range(1, s.size - 1):
        if u[i] < u[i - 1] and u[i] <= u[i + 1]:
            pos, val = _parabolic(s, u, i)
            if cut.func is not None:
                h = cut.step
                res = minimize_scalar(lambda v: float(cut.func(v)), bounds=(s[i] - h, s[i] + h),
                                      method="bounded", options={"xatol": 1e-13})
                if res.fun <= val:
                    pos, val = float(res.x), float(res.fun)
            out.append(Minimum(i, float(pos), float(val)))
    return out


def _barrier(u, i, direction):
    j = i
    while 0 <= j + direction < u.size and u[j + direction] >= u[j]:
        j += direction
    return u[j]


def depth(cut, minimum):
    """Smaller of the two escape barriers around the well, in mK."""
    u = np.asarray(cut.u)
    lo = _barrier(u, minimum.index, -1)
    hi = _barrier(u, minimum.index, +1)
    return float(min(lo, hi) - minimum.value)


def curvature(cut, minimum, h=None):
    """U'' in mK/m^2 from a 5-point stencil (callable if present, else the samples)."""
    if cut.func is not None:
        h = cut.step if h is None else h
        p = minimum.position
        v = [float(cut.func(p + k * h)) for k in (-2, -1, 0, 1, 2)]
    else:
        u, i = np.asarray(cut.u), minimum.index
        if i < 2 or i > u.size - 3:
            return float("nan")
        h = cut.step
        v = u[i - 2:i + 3]
    return (-v[0] + 16 * v[1] - 30 * v[2] + 16 * v[3] - v[4]) / (12 * h * h)


def trap_metrics(cut, minimum, mass=CS_MASS, surface=None):
    """Depth, curvature and harmonic frequency of one well.

    ``surface`` maps the cut coordinate to the distance from the fiber surface
    (x-cuts only).
    """
    c_mk = curvature(cut, minimum)
    if not c_mk > 0:
        raise DegenerateTrapError(
            f"non-positive curvature at {cut.axis}={minimum.position:.6g}", module="traps", guard="curvature")
    c_si = c_mk * 1e-3 * sc.k
    w = math.sqrt(c_si / mass)
    dep = depth(cut, minimum)
    i = minimum.index
    resolved = bool(2 <= i <= len(cut.s) - 3 and dep >= TRACK_DEPTH_MK)
    return TrapReport(cut.axis, minimum.position, None if surface is None else surface(minimum.position), dep,
                      w / (2 * math.pi) / 1e3, w / 1e3, c_si, resolved)


@dataclass
class TrapSite:
    """A trap found on the x-cut with its x, y and z analyses."""

    point: tuple
    x: TrapReport
    y: TrapReport | None = None
    z: TrapReport | None = None

    @property
    def reports(self):
        return [r for r in (self.x, self.y, self.z) if r is not None]


def x_cut(potential, z=0.0, step=STEP, start=X_START, stop=X_STOP):
    """Cut along -x at y = 0, parameterised by the distance s from the fiber surface."""
    a = potential.fiber.radius
    s = np.arange(start, stop + 0.5 * step, step)

    def f(v):
        v = np.asarray(v, dtype=np.float64)
        return potential(-a - v, 0 * v, 0 * v + z)

    return Cut("x", s, f(s), f)


def line_cut(potential, axis, center, half_width, step=STEP):
    """Cut along y or z through ``center = (x, y, z)``."""
    k = "xyz".index(axis)
    s = np.arange(-half_width, half_width + 0.5 * step, step) + center[k]

    def f(v):
        v = np.asarray(v, dtype=np.float64)
        pts = [np.full(v.shape, c) for c in center]
        pts[k] = v
        return potential(*pts)

    return Cut(axis, s, f(s), f)


def analyze_sites(potential, z_site=0.0, step=STEP, transverse=True, min_depth=0.0):
    """All wells on the x-cut through ``z_site``, each with y and z analyses."""
    a = potential.fiber.radius
    period = potential.model.device.grating.period
    cut = x_cut(potential, z_site, step)
    sites = []
    for m in locate_minima(cut):
        rx = trap_metrics(cut, m, surface=lambda s: s)
        rx = replace(rx, position=-a - rx.position)
        if rx.depth_mK < min_depth:
            continue
        point = (rx.position, 0.0, z_site)
        site = TrapSite(point, rx)
        if transverse:
            site.y = _transverse(potential, "y", point, Y_HALF, step)
            site.z = _transverse(potential, "z", point, 0.5 * period, step)
        sites.append(site)
    return sites


def _transverse(potential, axis, point, half_width, step):
    cut = line_cut(potential, axis, point, half_width, step)
    target = point["xyz".index(axis)]
    mins = locate_minima(cut)
    if not mins:
        return None
    m = min(mins, key=lambda v: abs(v.position - target))
    return trap_metrics(cut, m)


def nearest_trap(reports, min_depth=TRACK_DEPTH_MK):
    """Report of the well nearest the surface with depth above ``min_depth``."""
    good = [r for r in reports if r.depth_mK > min_depth]
    return min(good, key=lambda r: r.distance_from_surface) if good else None


@dataclass
class SweepCurve:
    parameter: str
    values: np.ndarray
    reports: list
    jumps: list = field(default_factory=list)

    def distances(self):
        return np.array([np.nan if r is None else r.distance_from_surface for r in self.reports])

    def depths(self):
        return np.array([np.nan if r is None else r.depth_mK for r in self.reports])


def _mark_jumps(reports):
    jumps = []
    for i in range(1, len(reports)):
        a, b = reports[i - 1], reports[i]
        if (a is None) != (b is None):
            jumps.append(i)
        elif a is not None and abs(a.distance_from_surface - b.distance_from_surface) > JUMP_M:
            jumps.append(i)
    return jumps


def sweep_radius(device, radii, illum, step=STEP, min_depth=TRACK_DEPTH_MK):
    """Nearest-well x-cut analysis at y = z = 0 for each fiber radius."""
    reports = []
    for a in radii:
        dev = replace(device, fiber=FiberSpec(float(a), device.fiber.index))
        pot = TrapPotential(TrapField(dev, replace(illum, dual=False)))
        sites = analyze_sites(pot, step=step, transverse=False)
        reports.append(nearest_trap([s.x for s in sites], min_depth))
    return SweepCurve("radius_m", np.asarray(radii, dtype=np.float64), reports, _mark_jumps(reports))


def sweep_phase(device, omegas, illum, step=STEP, min_depth=TRACK_DEPTH_MK):
    """Nearest-well x-cut analysis for each relative phase (radians) of the dual beams.

    The single-illumination and beam-2 fields on the cut are evaluated once
    and recombined per phase.
    """
    model = TrapField(device, replace(illum, dual=True))
    pot = TrapPotential(model)
    a = device.fiber.radius
    s = np.arange(X_START, X_STOP + 0.5 * step, step)
    x, y, z = -a - s, 0 * s, 0 * s
    e1 = model.single(x, y, z)
    e2 = model.beam2_part(x, y, z)
    u_vdw = pot.vdw(x, y, z)
    reports = []
    for om in omegas:
        p = TrapPotential(model.with_phase(om), pot.alpha)
        e = e1 + np.exp(1j * om) * e2
        u = optical_potential(np.sum(np.abs(e) ** 2, axis=-1), p.chi, p.alpha) + u_vdw
        f = (lambda pp: lambda v: pp(-a - np.asarray(v), 0 * np.asarray(v), 0 * np.asarray(v)))(p)
        cut = Cut("x", s, u, f)
        rs = []
        for m in locate_minima(cut):
            r = trap_metrics(cut, m, surface=lambda v: v)
            rs.append(replace(r, position=-a - r.position))
        reports.append(nearest_trap(rs, min_depth))
    return SweepCurve("omega_rad", np.asarray(omegas, dtype=np.float64), reports, _mark_jumps(reports))
