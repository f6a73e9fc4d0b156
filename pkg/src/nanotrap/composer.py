"""Trap fields: grating output plus fiber scattering, single and dual illumination.

Coordinates: fiber axis along z through the origin, grating output plane at
x = +a (the fiber rests on it), atoms on the far side x < -a.  All fields are
for a unit-amplitude incident beam; physical scaling happens in
:mod:`nanotrap.potential`.

Each propagating grating order l is a plane wave ``exp(i(p z - t x))`` and is
scattered by the fiber as an oblique wave with incidence angle
``zeta = pi - beta_l`` (``beta_l`` measured from +z along the propagation
direction).  Beam 2 is a plane wave ``exp(i Omega) exp(i k x) e_y`` from -x
that bypasses the grating.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import cylinder, grating
from .errors import DomainError


@dataclass(frozen=True)
class DeviceSpec:
    grating: grating.GratingSpec
    fiber: cylinder.FiberSpec
    truncation: int = 3


@dataclass(frozen=True)
class IlluminationSpec:
    wavelength: float = 937e-9
    theta: float = 0.0
    power: float = 0.25
    waist: float = 10e-6
    dual: bool = False
    omega: float = math.pi

    def __post_init__(self):
        if not self.wavelength > 0:
            raise DomainError("wavelength must be positive")
        if not self.power >= 0:
            raise DomainError("beam power must be non-negative")
        if not self.waist > 0:
            raise DomainError("waist radius must be positive")
        if not math.isfinite(self.omega):
            raise DomainError("relative phase must be finite")

    @property
    def k(self):
        return 2 * math.pi / self.wavelength


def paper_device(radius=300e-9, **grating_kw):
    """Default device: 1050 nm period, 50 nm slats, 2 um deep, silica throughout."""
    kw = dict(period=1050e-9, slat_width=50e-9, depth=2e-6)
    kw.update(grating_kw)
    return DeviceSpec(grating.GratingSpec(**kw), cylinder.FiberSpec(radius))


@dataclass
class _OrderTerm:
    order: grating.DiffractionOrder
    amplitude: complex
    coeffs: cylinder.ScatterCoeffs


class TrapField:
    """Composed trap field for one device and illumination.

    Grating solution and per-order scattering coefficients are computed once
    and cached.  ``amplitudes`` optionally overrides the order amplitudes
    ``T_l`` (dict ``{l: T}``), e.g. to remove the grating.
    """

    def __init__(self, device, illum, amplitudes=None):
        self.device = device
        self.illum = illum
        self.solution = grating.solve(device.grating, illum.wavelength, illum.theta, device.truncation)
        a = device.fiber.radius
        self.terms = []
        for o in self.solution.propagating:
            amp = o.T if amplitudes is None else complex(amplitudes.get(o.index, 0.0))
            zeta = math.pi - o.beta
            coeffs = cylinder.scattering_coefficients(device.fiber, illum.wavelength, zeta)
            self.terms.append(_OrderTerm(o, amp * np.exp(1j * o.t.real * a), coeffs))
        self.beam2 = cylinder.scattering_coefficients(device.fiber, illum.wavelength, math.pi / 2)

    def with_phase(self, omega):
        """Same device with a different relative phase; caches are shared."""
        new = object.__new__(TrapField)
        new.__dict__.update(self.__dict__)
        new.illum = replace(self.illum, omega=float(omega))
        return new

    def check_domain(self, x, y, z):
        x, y, z = np.broadcast_arrays(*(np.asarray(v, dtype=np.float64) for v in (x, y, z)))
        a = self.device.fiber.radius
        bad = (x >= -a) | (np.hypot(x, y) <= a) | ~np.isfinite(x) | ~np.isfinite(y) | ~np.isfinite(z)
        if np.any(bad):
            pts = np.stack([x[bad], y[bad], z[bad]], axis=-1)
            shown = ", ".join(f"({p[0]:.4g}, {p[1]:.4g}, {p[2]:.4g})" for p in pts[:5])
            more = f" and {len(pts) - 5} more" if len(pts) > 5 else ""
            raise DomainError(f"{len(pts)} point(s) outside the trap region x < -a: {shown}{more}")
        return x, y, z

    def grating_part(self, x, y, z):
        x, y, z = self.check_domain(x, y, z)
        out = np.zeros(x.shape + (3,), dtype=np.complex128)
        for term in self.terms:
            o = term.order
            out[..., 1] += term.amplitude * np.exp(1j * (o.p * z - o.t.real * x))
        return out

    def scattered_part(self, x, y, z):
        x, y, z = self.check_domain(x, y, z)
        out = np.zeros(x.shape + (3,), dtype=np.complex128)
        for term in self.terms:
            out += term.amplitude * cylinder.scattered_field(term.coeffs, x, y, z)
        return out

    def beam2_part(self, x, y, z):
        """Beam-2 field without its phase factor exp(i Omega)."""
        x, y, z = self.check_domain(x, y, z)
        out = cylinder.scattered_field(self.beam2, x, y, z, mirror_x=True)
        out[..., 1] += np.exp(1j * self.illum.k * x)
        return out

    def single(self, x, y, z):
        return self.grating_part(x, y, z) + self.scattered_part(x, y, z)

    def __call__(self, x, y, z):
        out = self.single(x, y, z)
        if self.illum.dual:
            out += np.exp(1j * self.illum.omega) * self.beam2_part(x, y, z)
        return out


def trap_field_single(device, illum, x, y, z):
    return TrapField(device, replace(illum, dual=False))(x, y, z)


def trap_field_dual(device, illum, x, y, z):
    return TrapField(device, replace(illum, dual=True))(x, y, z)


def intensity(E):
    """|E|^2 summed over Cartesian components."""
    return np.sum(np.abs(E) ** 2, axis=-1)


@dataclass
class FieldGrid:
    """Field samples on a tensor grid; ``axes`` maps axis name to coordinates."""

    axes: dict
    fixed: dict
    samples: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def intensity(self):
        return intensity(self.samples)

    def coordinates(self):
        """Broadcast x, y, z arrays matching ``samples.shape[:-1]``."""
        names = list(self.axes)
        mesh = np.meshgrid(*[self.axes[n] for n in names], indexing="ij")
        out = {}
        for c in "xyz":
            out[c] = mesh[names.index(c)] if c in names else np.full(mesh[0].shape, self.fixed[c])
        return out["x"], out["y"], out["z"]


def sample_region(model, axes, fixed=None):
    """Sample ``model`` on the tensor grid spanned by ``axes`` (ordered dict of 1-D arrays)."""
    fixed = dict(fixed or {})
    axes = {k: np.asarray(v, dtype=np.float64) for k, v in axes.items()}
    for c in "xyz":
        if c not in axes:
            fixed.setdefault(c, 0.0)
    grid = FieldGrid(axes, {c: float(fixed[c]) for c in "xyz" if c not in axes}, None)
    x, y, z = grid.coordinates()
    grid.samples = model(x, y, z)
    return grid


def sample_line(model, axis, values, **fixed):
    return sample_region(model, {axis: values}, fixed)


def sample_plane(model, axis1, values1, axis2, values2, **fixed):
    return sample_region(model, {axis1: values1, axis2: values2}, fixed)
