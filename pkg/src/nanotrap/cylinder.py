"""Oblique-incidence scattering by an infinite dielectric cylinder.

The incident wave is ``e_y exp(-i k (x sin(beta) + z cos(beta)))``: it travels
toward -x with a -z component, so ``beta`` is measured between the cylinder
axis and the reversed propagation direction (the usual convention for the
oblique cylinder problem).  The field polarisation is perpendicular to the
plane containing the axis and the wave vector.

Scattered field::

    E_s = sum_n (-i)^n / (k sin beta) [i a_n M_n + b_n N_n]

with outgoing (Hankel H^(1), ``exp(-i w t)``) vector cylindrical harmonics.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _accel
from .errors import ConvergenceError, DomainError
from .specfun import _jy_point, hankel_table, jy_table

N_CEILING = 60
SERIES_TOL = 1e-12


@dataclass(frozen=True)
class FiberSpec:
    radius: float
    index: float = 1.45

    def __post_init__(self):
        if not self.radius > 0:
            raise DomainError("fiber radius must be positive")
        if not self.index >= 1:
            raise DomainError("fiber index must be >= 1")


@dataclass(frozen=True, eq=False)
class ScatterCoeffs:
    """Series coefficients for one incidence angle.

    ``a`` and ``b`` are indexed ``n = -nmax..nmax`` (``a[nmax]`` is ``a_0``);
    ``aux`` holds the auxiliary quantities A, C, D, V, W on the same index.
    """

    fiber: FiberSpec
    wavelength: float
    beta: float
    nmax: int
    a: np.ndarray
    b: np.ndarray
    xi: float
    eta: float
    aux: dict = field(repr=False, default_factory=dict)

    @property
    def k(self):
        return 2 * math.pi / self.wavelength

    @property
    def h(self):
        return -self.k * math.cos(self.beta)

    @property
    def orders(self):
        return np.arange(-self.nmax, self.nmax + 1)

    def coefficient(self, n):
        if abs(n) > self.nmax:
            return 0j, 0j
        return complex(self.a[n + self.nmax]), complex(self.b[n + self.nmax])

    @property
    def a_pos(self):
        return np.ascontiguousarray(self.a[self.nmax:])

    @property
    def b_pos(self):
        return np.ascontiguousarray(self.b[self.nmax:])


def _raw_coefficients(fiber, wavelength, beta, nmax):
    k = 2 * math.pi / wavelength
    x = k * fiber.radius
    m2 = fiber.index ** 2
    cb = math.cos(beta)
    xi = x * math.sin(beta)
    eta = x * math.sqrt(m2 - cb * cb)
    jx, yx = jy_table(nmax + 1, xi)
    je, _ = jy_table(nmax + 1, eta)
    n = np.arange(nmax + 1)
    hx = jx + 1j * yx

    def deriv(c):
        out = np.empty(nmax + 1, dtype=c.dtype)
        out[0] = -c[1]
        out[1:] = 0.5 * (c[:nmax] - c[2:nmax + 2])
        return out

    jx_p, je_p, hx_p = deriv(jx), deriv(je), deriv(hx)
    jx, je, hx = jx[:nmax + 1], je[:nmax + 1], hx[:nmax + 1]
    ratio = xi * xi / (eta * eta) - 1.0
    A = 1j * xi * (xi * je_p * jx - eta * je * jx_p)
    C = n * cb * eta * je * jx * ratio
    D = n * cb * eta * je * hx * ratio
    V = xi * (m2 * xi * je_p * hx - eta * je * hx_p)
    W = 1j * xi * (eta * je * hx_p - xi * je_p * hx)
    den = W * V + 1j * D * D
    a = -(A * V - 1j * C * D) / den
    b = -1j * (C * W + A * D) / den
    return a, b, xi, eta, dict(A=A, C=C, D=D, V=V, W=W, den=den)


def _mirror_orders(pos, odd):
    # a_{-n} = a_n, b_{-n} = -b_n (and the same parity for the auxiliaries)
    neg = pos[:0:-1] * (-1 if odd else 1)
    return np.concatenate([neg, pos])


def scattering_coefficients(fiber, wavelength, beta, tol=SERIES_TOL, n_ceiling=N_CEILING):
    """Coefficients a_n, b_n with adaptive truncation.

    The series is cut at the first order whose ``|a_n| + |b_n|`` drops below
    ``tol`` times the largest term, both bare and weighted by ``|H_n(xi)|``
    (the size of each term on the fiber surface).
    """
    if not wavelength > 0:
        raise DomainError("wavelength must be positive")
    if not 0 < beta < math.pi or math.sin(beta) < 1e-12:
        raise DomainError(f"incidence angle beta={beta!r} must lie strictly inside (0, pi)")
    a, b, xi, eta, aux = _raw_coefficients(fiber, wavelength, beta, n_ceiling)
    mag = np.abs(a) + np.abs(b)
    # weight by |H_n| at the surface, where high orders contribute most
    jx, yx = jy_table(n_ceiling, xi)
    weighted = mag * np.hypot(jx, yx)
    peak = mag.max()
    if peak == 0:
        nmax = 0
    else:
        small = np.nonzero((mag < tol * peak) & (weighted < tol * weighted.max()))[0]
        if small.size == 0:
            raise ConvergenceError(
                f"cylinder series not converged by n={n_ceiling}", module="cylinder", guard="series ceiling")
        nmax = int(small[0])
    sl = slice(0, nmax + 1)
    odd = {"C": True, "D": True}
    aux_full = {key: _mirror_orders(val[sl], odd.get(key, False)) for key, val in aux.items()}
    aux_full["den"] = _mirror_orders(aux["den"][sl], False)
    return ScatterCoeffs(fiber, wavelength, beta, nmax,
                         _mirror_orders(a[sl], False), _mirror_orders(b[sl], True), xi, eta, aux_full)


def cylindrical(x, y):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    return np.hypot(x, y), np.arctan2(y, x)


def _to_cartesian(er, ephi, ez, phi):
    c, s = np.cos(phi), np.sin(phi)
    return np.stack([er * c - ephi * s, er * s + ephi * c, ez], axis=-1)


def _harmonic_parts(n, k, beta, x, y, z):
    r, phi = cylindrical(x, y)
    kt = k * math.sin(beta)
    rho = r * kt
    if np.any(rho <= 0):
        raise DomainError("vector harmonics are singular on the cylinder axis")
    m = abs(n)
    h, hp = hankel_table(m, rho)
    sg = -1.0 if (n < 0 and m % 2) else 1.0
    hn, hpn = sg * h[m], sg * hp[m]
    phase = np.exp(1j * (n * phi - k * math.cos(beta) * np.asarray(z, dtype=np.float64)))
    return hn, hpn, rho, phi, phase


def vector_harmonic_M(n, k, beta, x, y, z):
    """M_n = k sin(beta) (i n H_n/rho e_r - H_n' e_phi) exp(i(n phi - k cos(beta) z)), Cartesian."""
    hn, hpn, rho, phi, phase = _harmonic_parts(n, k, beta, x, y, z)
    kt = k * math.sin(beta)
    er = kt * 1j * n * hn / rho * phase
    ephi = -kt * hpn * phase
    return _to_cartesian(er, ephi, np.zeros_like(er), phi)


def vector_harmonic_N(n, k, beta, x, y, z):
    """N_n = curl(M_n)/k, Cartesian components."""
    hn, hpn, rho, phi, phase = _harmonic_parts(n, k, beta, x, y, z)
    sb, cb = math.sin(beta), math.cos(beta)
    h = -k * cb
    er = sb * 1j * h * hpn * phase
    ephi = -sb * h * n * hn / rho * phase
    ez = sb * k * sb * hn * phase
    return _to_cartesian(er, ephi, ez, phi)


def _series_numpy(a, b, nmax, k, sinb, cosb, r, phi, z):
    kt = k * sinb
    h = -k * cosb
    rho = r * kt
    jt, yt = jy_table(nmax + 1, rho, use_numba=False)
    H = jt + 1j * yt
    Hp = np.empty_like(H[:nmax + 1])
    Hp[0] = -H[1]
    Hp[1:] = 0.5 * (H[:nmax] - H[2:nmax + 2])
    er = np.zeros(r.shape, dtype=np.complex128)
    ephi = np.zeros_like(er)
    ez = np.zeros_like(er)
    quarter = (1, -1j, -1, 1j)
    for n in range(-nmax, nmax + 1):
        m = abs(n)
        sg = -1.0 if (n < 0 and m % 2) else 1.0
        hn = sg * H[m]
        hpn = sg * Hp[m]
        an = a[m]
        bn = b[m] if n >= 0 else -b[m]
        f = quarter[n % 4] * np.exp(1j * n * phi)
        er += f * (1j * an * (1j * n * hn / rho) + bn / k * (1j * h * hpn))
        ephi += f * (-1j * an * hpn - bn / k * h * n * hn / rho)
        ez += f * (bn / k * kt * hn)
    e = np.exp(1j * h * z)
    return er * e, ephi * e, ez * e


@_accel.njit
def _series_loops(a, b, nmax, k, sinb, cosb, r, phi, z):
    npts = r.shape[0]
    kt = k * sinb
    h = -k * cosb
    er = np.zeros(npts, dtype=np.complex128)
    ephi = np.zeros(npts, dtype=np.complex128)
    ez = np.zeros(npts, dtype=np.complex128)
    jcol = np.empty(nmax + 2)
    ycol = np.empty(nmax + 2)
    H = np.empty(nmax + 2, dtype=np.complex128)
    Hp = np.empty(nmax + 1, dtype=np.complex128)
    quarter = np.array([1.0 + 0j, -1j, -1.0 + 0j, 1j])
    for i in range(npts):
        rho = r[i] * kt
        _jy_point(nmax + 1, rho, jcol, ycol)
        for n in range(nmax + 2):
            H[n] = jcol[n] + 1j * ycol[n]
        Hp[0] = -H[1]
        for n in range(1, nmax + 1):
            Hp[n] = 0.5 * (H[n - 1] - H[n + 1])
        sr = 0j
        sp = 0j
        sz = 0j
        for n in range(-nmax, nmax + 1):
            m = abs(n)
            sg = -1.0 if (n < 0 and m % 2 == 1) else 1.0
            hn = sg * H[m]
            hpn = sg * Hp[m]
            an = a[m]
            bn = b[m] if n >= 0 else -b[m]
            f = quarter[n % 4] * np.exp(1j * n * phi[i])
            sr += f * (1j * an * (1j * n * hn / rho) + bn / k * (1j * h * hpn))
            sp += f * (-1j * an * hpn - bn / k * h * n * hn / rho)
            sz += f * (bn / k * kt * hn)
        e = np.exp(1j * h * z[i])
        er[i] = sr * e
        ephi[i] = sp * e
        ez[i] = sz * e
    return er, ephi, ez


def series_sum(coeffs, r, phi, z, use_numba=None):
    """Cylindrical components (E_r, E_phi, E_z) of the scattered series at flat point arrays."""
    if use_numba is None:
        use_numba = _accel.USE_NUMBA
    fn = _series_loops if use_numba else _series_numpy
    args = (coeffs.a_pos, coeffs.b_pos, coeffs.nmax, coeffs.k, math.sin(coeffs.beta), math.cos(coeffs.beta),
            np.ascontiguousarray(r, dtype=np.float64), np.ascontiguousarray(phi, dtype=np.float64),
            np.ascontiguousarray(z, dtype=np.float64))
    return fn(*args)


def scattered_field(coeffs, x, y, z, mirror_x=False, use_numba=None):
    """Scattered field (Cartesian, shape ``(..., 3)``) outside the cylinder.

    With ``mirror_x`` the field is that of the same wave arriving from -x:
    the series is evaluated at the reflected point and its x component flipped.
    """
    x, y, z = np.broadcast_arrays(*(np.asarray(v, dtype=np.float64) for v in (x, y, z)))
    shape = x.shape
    xs = -x if mirror_x else x
    r, phi = cylindrical(xs.ravel(), y.ravel())
    if np.any(r <= coeffs.fiber.radius):
        raise DomainError("scattered field requested inside or on the fiber surface")
    er, ephi, ez = series_sum(coeffs, r, phi, z.ravel(), use_numba)
    out = _to_cartesian(er, ephi, ez, phi)
    if mirror_x:
        out[:, 0] = -out[:, 0]
    return out.reshape(shape + (3,))


def incident_field(wavelength, beta, x, y, z):
    """Unit y-polarised plane wave matching the scattering geometry."""
    k = 2 * math.pi / wavelength
    x, y, z = np.broadcast_arrays(*(np.asarray(v, dtype=np.float64) for v in (x, y, z)))
    out = np.zeros(x.shape + (3,), dtype=np.complex128)
    out[..., 1] = np.exp(-1j * k * (x * math.sin(beta) + z * math.cos(beta)))
    return out


def total_field(coeffs, x, y, z):
    return incident_field(coeffs.wavelength, coeffs.beta, x, y, z) + scattered_field(coeffs, x, y, z)


def efficiencies(coeffs):
    """Extinction and scattering efficiencies ``(Q_ext, Q_sca)`` per unit length.

    For a lossless cylinder these agree (optical theorem), which makes them an
    end-to-end check on the coefficient formulas.
    """
    x = coeffs.k * coeffs.fiber.radius
    q_ext = 2.0 / x * float(np.real(np.sum(coeffs.a)))
    q_sca = 2.0 / x * float(np.sum(np.abs(coeffs.a) ** 2 + np.abs(coeffs.b) ** 2))
    return q_ext, q_sca
