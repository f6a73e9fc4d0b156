"""Optical dipole and van der Waals potentials for ground-state 133Cs.

Everything is computed in SI and reported in millikelvin (energy / k_B).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import constants as sc

from .errors import DomainError

CS_MASS = 2.20695e-25  # kg
GROUND_WEIGHT = 2
VDW_COEFF = 4.1e-5  # mK um^3, flat silica surface
ATOMIC_POLARIZABILITY = 4 * math.pi * sc.epsilon_0 * sc.physical_constants["Bohr radius"][0] ** 3


@dataclass(frozen=True)
class CsLine:
    wavelength: float  # m
    rate: float  # transition strength A, s^-1
    weight: int

    @property
    def omega(self):
        return 2 * math.pi * sc.c / self.wavelength

    @property
    def linewidth(self):
        # linewidth taken equal to the transition strength
        return self.rate


CS_LINES = (
    CsLine(852.113e-9, 3.276e7, 4),
    CsLine(894.347e-9, 2.87e7, 2),
    CsLine(455.528e-9, 1.88e6, 4),
    CsLine(459.317e-9, 8e5, 2),
)


def cs_polarizability(wavelength, lines=CS_LINES, include_linewidth=True):
    """Scalar ground-state polarizability (SI, C m^2 / V) at the trap wavelength."""
    if not wavelength > 0:
        raise DomainError("wavelength must be positive")
    omega = 2 * math.pi * sc.c / wavelength
    total = 0.0
    for line in lines:
        if abs(wavelength - line.wavelength) < 0.01e-9:
            warnings.warn(f"trap wavelength within 0.01 nm of the {line.wavelength * 1e9:.3f} nm line",
                          RuntimeWarning, stacklevel=2)
        wj = line.omega
        den = (wj * wj - omega * omega) ** 2
        if include_linewidth:
            den += (line.linewidth * omega) ** 2
        total += line.weight / GROUND_WEIGHT * line.rate * (1 - omega * omega / (wj * wj)) / den
    return 2 * math.pi * sc.epsilon_0 * sc.c ** 3 * total


def intensity_scale(power, waist):
    """chi = I_peak / (eps0 c) with I_peak = 2 P / (pi w^2): converts |E_unit|^2 to |E|^2 in V^2/m^2."""
    if not (power >= 0 and waist > 0):
        raise DomainError("need power >= 0 and waist > 0")
    return 2 * power / (math.pi * waist * waist) / (sc.epsilon_0 * sc.c)


def to_mK(energy):
    return np.asarray(energy) / sc.k * 1e3


def optical_potential(e2, chi, alpha):
    """U_opt = -alpha chi |E|^2 / 4 in mK for unit-amplitude squared field ``e2``."""
    return to_mK(-0.25 * alpha * chi * np.asarray(e2, dtype=np.float64))


def vdw_potential(x, y, fiber):
    """Surface potential -C3/(r - a)^3 in mK, distances in um."""
    r = np.hypot(np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64))
    gap = (r - fiber.radius) * 1e6
    if np.any(gap <= 0):
        raise DomainError("van der Waals potential requested at or inside the fiber surface")
    return -VDW_COEFF / gap ** 3


@dataclass
class PotentialGrid:
    """Potential samples in mK; ``u_total = u_opt + u_vdw`` pointwise."""

    axes: dict
    fixed: dict
    chi: float
    u_opt: np.ndarray
    u_vdw: np.ndarray

    @property
    def u_total(self):
        return self.u_opt + self.u_vdw


def total_potential(field_grid, fiber, illum, alpha=None):
    if alpha is None:
        alpha = cs_polarizability(illum.wavelength)
    chi = intensity_scale(illum.power, illum.waist)
    x, y, _ = field_grid.coordinates()
    return PotentialGrid(field_grid.axes, field_grid.fixed, chi,
                         optical_potential(field_grid.intensity, chi, alpha), vdw_potential(x, y, fiber))


class TrapPotential:
    """Callable total potential U(x, y, z) in mK for a composed trap field."""

    def __init__(self, model, alpha=None):
        self.model = model
        illum = model.illum
        self.alpha = cs_polarizability(illum.wavelength) if alpha is None else alpha
        self.chi = intensity_scale(illum.power, illum.waist)

    @property
    def fiber(self):
        return self.model.device.fiber

    def optical(self, x, y, z):
        return optical_potential(np.sum(np.abs(self.model(x, y, z)) ** 2, axis=-1), self.chi, self.alpha)

    def vdw(self, x, y, z):
        return vdw_potential(x, y, self.fiber) + 0 * np.asarray(z, dtype=np.float64)

    def __call__(self, x, y, z):
        return self.optical(x, y, z) + self.vdw(x, y, z)
