"""Modal-method (Knop) solver for a lamellar dielectric grating.

Geometry, with the grating output plane at ``x = offset`` and light arriving
from the substrate at ``x = +inf``::

    substrate (n0) | slat layer, depth d | vacuum  ->  output field, x < offset

The layer permittivity is expanded in a truncated Fourier series, the modes of
the periodic layer are found from ``A e = g^2 e`` and the boundary conditions
at both faces give ``U T = Y``.  Only the retained orders are kept; with the
default truncation of three these are exactly the propagating orders of a
first-order grating.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NumericalInstabilityError

COND_LIMIT = 1e12
MAX_TRUNCATION = 21


@dataclass(frozen=True)
class GratingSpec:
    """Lamellar grating: slats of width ``slat_width`` repeated every ``period``.

    ``slat_center`` is the z coordinate of a slat centre inside the unit cell.
    The default (half a period) puts a groove centre at z = 0, which is where
    the trap sites form.
    """

    period: float
    slat_width: float
    depth: float
    slat_index: float = 1.45
    groove_index: float = 1.0
    substrate_index: float = 1.45
    slat_center: float | None = None

    def __post_init__(self):
        if not (self.period > 0 and 0 < self.slat_width <= self.period):
            raise DomainError("need 0 < slat_width <= period")
        if not self.depth >= 0:
            raise DomainError("grating depth must be >= 0")
        if min(self.slat_index, self.groove_index, self.substrate_index) < 1:
            raise DomainError("refractive indices must be >= 1")

    @property
    def center(self):
        return 0.5 * self.period if self.slat_center is None else self.slat_center


@dataclass(frozen=True)
class DiffractionOrder:
    index: int
    p: float
    t: complex
    r: complex
    T: complex
    R: complex
    propagating: bool

    @property
    def beta(self):
        """Propagation angle from the +z (fiber) axis; None if evanescent."""
        return diffraction_angle(self.p, self.t) if self.propagating else None


@dataclass(frozen=True)
class ModalSystem:
    truncation: int
    orders: np.ndarray
    A: np.ndarray
    g2: np.ndarray
    g: np.ndarray
    E: np.ndarray
    U: np.ndarray | None = None
    Y: np.ndarray | None = None

    def residual(self):
        """Max relative eigen-residual ``|A e - g^2 e| / (|A| |e|)`` over modes."""
        r = self.A @ self.E - self.E * self.g2[None, :]
        scale = np.linalg.norm(self.A, 2) * np.linalg.norm(self.E, axis=0)
        return float(np.max(np.linalg.norm(r, axis=0) / scale))


@dataclass(frozen=True)
class GratingSolution:
    spec: GratingSpec
    wavelength: float
    theta: float
    system: ModalSystem
    orders: tuple = field(default_factory=tuple)

    @property
    def k(self):
        return 2 * math.pi / self.wavelength

    def order(self, index):
        for o in self.orders:
            if o.index == index:
                return o
        raise KeyError(index)

    @property
    def propagating(self):
        return tuple(o for o in self.orders if o.propagating)

    @property
    def T(self):
        return np.array([o.T for o in self.orders])

    def power_balance(self):
        """Transmitted + reflected flux over incident flux (1 for a lossless grating)."""
        r0 = self.order(0).r.real
        out = 0.0
        for o in self.orders:
            if o.propagating:
                out += o.t.real * abs(o.T) ** 2
            if abs(o.r.imag) == 0 and o.r.real > 0:
                out += o.r.real * abs(o.R) ** 2
        return out / r0


def _branch_sqrt(v):
    # principal root with Im >= 0: evanescent fields decay away from the grating
    s = cmath.sqrt(complex(v))
    if s.imag < 0 or (s.imag == 0 and s.real < 0):
        s = -s
    return s


def permittivity_fourier(spec, order):
    """Fourier coefficient of the layer permittivity profile for ``order``."""
    frac = spec.slat_width / spec.period
    contrast = spec.slat_index ** 2 - spec.groove_index ** 2
    if order == 0:
        return complex(spec.groove_index ** 2 + contrast * frac)
    amp = contrast * math.sin(math.pi * order * frac) / (math.pi * order)
    return amp * cmath.exp(-2j * math.pi * order * spec.center / spec.period)


def order_wavenumbers(spec, wavelength, theta, order):
    """``(p, t, r)``: z wavenumber and x wavenumbers on the output and substrate sides."""
    if not wavelength > 0:
        raise DomainError("wavelength must be positive")
    if not abs(theta) < math.pi / 2:
        raise DomainError("|theta| must be below pi/2")
    k = 2 * math.pi / wavelength
    p = 2 * math.pi * order / spec.period + k * math.sin(theta)
    t = _branch_sqrt(k * k - p * p)
    r = _branch_sqrt((spec.substrate_index * k) ** 2 - p * p)
    return p, t, r


def diffraction_angle(p, t):
    """Angle of the order's propagation direction from the +z axis.

    Equivalent to ``delta_{l,-1} pi + atan(t/p)`` for the first orders and
    pi/2 for the zeroth order at normal incidence.
    """
    t = complex(t)
    if t.imag != 0 or t.real <= 0:
        return None
    return math.atan2(t.real, p)


def _check_truncation(n):
    if n % 2 != 1 or n < 1 or n > MAX_TRUNCATION:
        raise DomainError(f"truncation must be an odd integer in [1, {MAX_TRUNCATION}], got {n}")


def modal_eigensystem(spec, wavelength, theta=0.0, truncation=3):
    """Modes of the periodic layer for the retained orders ``-M..M``."""
    _check_truncation(truncation)
    m = truncation // 2
    ells = np.arange(-m, m + 1)
    k = 2 * math.pi / wavelength
    p = np.array([order_wavenumbers(spec, wavelength, theta, int(l))[0] for l in ells])
    coef = {q: permittivity_fourier(spec, q) for q in range(-2 * m, 2 * m + 1)}
    A = np.array([[k * k * coef[int(eta - ell)] for ell in ells] for eta in ells], dtype=np.complex128)
    A[np.diag_indices(truncation)] -= p ** 2
    g2, E = np.linalg.eig(A)
    # sort for reproducible mode ordering
    idx = np.lexsort((g2.imag, -g2.real))
    g2, E = g2[idx], E[:, idx]
    if np.linalg.cond(E) > COND_LIMIT:
        raise NumericalInstabilityError(
            f"defective modal basis at truncation N={truncation}", module="grating", guard="eigenvector condition")
    g = np.array([_branch_sqrt(v) for v in g2])
    return ModalSystem(truncation, ells, A, g2, g, E)


def _sin_over(g, d):
    out = np.empty_like(g)
    for i, gi in enumerate(g):
        out[i] = d if abs(gi) * d < 1e-12 else cmath.sin(gi * d) / gi
    return out


def transmission_coefficients(spec, wavelength, theta=0.0, truncation=3):
    """Solve ``U T = Y`` for the order amplitudes at the grating output."""
    sys_ = modal_eigensystem(spec, wavelength, theta, truncation)
    d = spec.depth
    ells = sys_.orders
    pts = [order_wavenumbers(spec, wavelength, theta, int(l)) for l in ells]
    p = np.array([v[0] for v in pts])
    t = np.array([v[1] for v in pts])
    r = np.array([v[2] for v in pts])
    E = sys_.E
    Einv = np.linalg.solve(E, np.eye(truncation))
    g = sys_.g
    cos_gd = np.cos(g * d)
    C = (E * cos_gd) @ Einv
    S = (E * _sin_over(g, d)) @ Einv
    GS = (E * (g * np.sin(g * d))) @ Einv
    U = (r[:, None] + t[None, :]) * C - 1j * (GS + r[:, None] * t[None, :] * S)
    if not np.all(np.isfinite(U)) or np.linalg.cond(U) > COND_LIMIT:
        raise NumericalInstabilityError(
            f"ill-conditioned coupling matrix at truncation N={truncation}", module="grating", guard="U condition")
    center = truncation // 2
    Y = np.zeros(truncation, dtype=np.complex128)
    incident = cmath.exp(-1j * r[center] * d)
    Y[center] = 2 * r[center] * incident
    T = np.linalg.solve(U, Y)
    # reflected amplitudes at the substrate face
    R = (C - 1j * S * t[None, :]) @ T
    R[center] -= incident
    sys_ = ModalSystem(sys_.truncation, ells, sys_.A, sys_.g2, g, E, U, Y)
    orders = tuple(
        DiffractionOrder(int(l), float(p[i]), complex(t[i]), complex(r[i]), complex(T[i]), complex(R[i]),
                         bool(t[i].imag == 0 and t[i].real > 0))
        for i, l in enumerate(ells))
    return GratingSolution(spec, wavelength, theta, sys_, orders)


def solve(spec, wavelength, theta=0.0, truncation=3, require_first_order=True):
    """Full grating solution; checks the first-order window ``lambda < period < 2 lambda``."""
    if require_first_order and not (wavelength < spec.period < 2 * wavelength):
        raise DomainError(
            f"period {spec.period:g} m is not a first-order grating for wavelength {wavelength:g} m")
    return transmission_coefficients(spec, wavelength, theta, truncation)


def grating_field(solution, x, z, offset=0.0):
    """y component of the grating output field at ``(x, z)``; evanescent orders dropped.

    ``offset`` is the x position of the output plane (the fiber radius in the
    composite device); the field there equals ``sum T_l exp(i p_l z)``.
    """
    x = np.asarray(x, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    out = np.zeros(np.broadcast(x, z).shape, dtype=np.complex128)
    for o in solution.propagating:
        t = o.t.real
        out = out + o.T * np.exp(1j * t * offset) * np.exp(1j * (o.p * z - t * x))
    return out
