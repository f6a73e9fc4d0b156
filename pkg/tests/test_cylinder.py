import math

import numpy as np
import pytest
from scipy import special

from nanotrap import cylinder
from nanotrap.cylinder import FiberSpec
from nanotrap.errors import ConvergenceError, DomainError

LAM = 937e-9
K = 2 * math.pi / LAM
FIBER = FiberSpec(300e-9)
RNG = np.random.default_rng(7)


def exterior_points(n, rmin=350e-9, rmax=2e-6):
    r = RNG.uniform(rmin, rmax, n)
    phi = RNG.uniform(-math.pi, math.pi, n)
    z = RNG.uniform(-1e-6, 1e-6, n)
    return r * np.cos(phi), r * np.sin(phi), z


def helmholtz_residual(func, x, y, z, h=1e-9):
    c = func(x, y, z)
    lap = -6 * c
    for d in np.eye(3) * h:
        lap = lap + func(x + d[0], y + d[1], z + d[2]) + func(x - d[0], y - d[1], z - d[2])
    lap /= h * h
    return np.linalg.norm(lap + K * K * c) / np.linalg.norm(K * K * c)


@pytest.mark.parametrize("beta", [0.4, 1.1, math.pi / 2, 2.3])
def test_optical_theorem(beta):
    q_ext, q_sca = cylinder.efficiencies(cylinder.scattering_coefficients(FIBER, LAM, beta))
    assert q_ext == pytest.approx(q_sca, rel=1e-10)


def test_index_one_scatters_nothing():
    c = cylinder.scattering_coefficients(FiberSpec(300e-9, 1.0), LAM, 1.0)
    assert np.max(np.abs(c.a)) < 1e-12 and np.max(np.abs(c.b)) < 1e-12
    x, y, z = exterior_points(10)
    assert np.max(np.abs(cylinder.scattered_field(c, x, y, z))) < 1e-12


def test_b_vanishes_at_normal_incidence():
    c = cylinder.scattering_coefficients(FIBER, LAM, math.pi / 2)
    assert np.max(np.abs(c.b)) <= 1e-15 * np.max(np.abs(c.a))


def test_coefficient_parity():
    c = cylinder.scattering_coefficients(FIBER, LAM, 0.8)
    np.testing.assert_array_equal(c.a, c.a[::-1])
    np.testing.assert_array_equal(c.b, -c.b[::-1])


def test_coefficient_decay_at_normal_incidence():
    c = cylinder.scattering_coefficients(FIBER, LAM, math.pi / 2)
    mag = np.abs(c.a) + np.abs(c.b)
    tail = mag[np.abs(c.orders) >= 12]
    assert np.all(tail < 1e-12 * mag.max())
    assert c.nmax <= 20


def test_born_limit_thin_weak_fiber():
    # thin weak fiber in a transverse drive: Born amplitude with the static
    # depolarisation 2/(m^2 + 1) and the dyadic Green's term d_y^2 G / k^2
    a, m = 5e-9, 1.001
    c = cylinder.scattering_coefficients(FiberSpec(a, m), LAM, math.pi / 2)
    for R in (1e-6, 5e-6):
        es = cylinder.scattered_field(c, -R, 0.0, 0.0)[1]
        green = 0.25j * (special.hankel1(0, K * R) - special.hankel1(1, K * R) / (K * R))
        born = K**2 * (m**2 - 1) * 2 / (m**2 + 1) * green * math.pi * a**2
        assert abs(es / born - 1) < 1e-4


@pytest.mark.parametrize("n", [-2, 0, 1, 3])
@pytest.mark.parametrize("beta", [0.7, math.pi / 2, 2.0])
def test_harmonics_solve_helmholtz(n, beta):
    x, y, z = exterior_points(20)
    for fn in (cylinder.vector_harmonic_M, cylinder.vector_harmonic_N):
        res = helmholtz_residual(lambda *p: fn(n, K, beta, *p), x, y, z)
        assert res < 1e-4


@pytest.mark.parametrize("beta", [0.7, math.pi / 2, 2.0])
def test_total_field_solves_helmholtz(beta):
    c = cylinder.scattering_coefficients(FIBER, LAM, beta)
    x, y, z = exterior_points(20)
    assert helmholtz_residual(lambda *p: cylinder.total_field(c, *p), x, y, z) < 1e-4


def test_harmonic_divergence_free():
    x, y, z = exterior_points(10)
    h = 1e-10
    for fn in (cylinder.vector_harmonic_M, cylinder.vector_harmonic_N):
        f = lambda *p: fn(2, K, 1.0, *p)
        div = sum((f(*(np.array([x, y, z]) + d[:, None]))[..., i] - f(*(np.array([x, y, z]) - d[:, None]))[..., i])
                  / (2 * h) for i, d in enumerate(np.eye(3) * h))
        assert np.max(np.abs(div)) < 1e-6 * K * np.max(np.abs(f(x, y, z)))


def test_m_has_no_z_component():
    x, y, z = exterior_points(5)
    assert np.all(cylinder.vector_harmonic_M(3, K, 1.2, x, y, z)[..., 2] == 0)


def test_rotation_phase():
    x, y, z = exterior_points(5)
    dphi = 0.37
    c, s = math.cos(dphi), math.sin(dphi)
    a = cylinder.vector_harmonic_M(2, K, 1.2, x, y, z)
    b = cylinder.vector_harmonic_M(2, K, 1.2, c * x - s * y, s * x + c * y, z)
    # cylindrical components pick up exp(i n dphi); compare E_z-free magnitudes and the radial projection
    r = np.hypot(x, y)
    ra = (a[..., 0] * x + a[..., 1] * y) / r
    rb = (b[..., 0] * (c * x - s * y) + b[..., 1] * (s * x + c * y)) / r
    np.testing.assert_allclose(rb, ra * np.exp(2j * dphi), rtol=1e-12)


def test_z_period_of_n():
    beta = 1.0
    x, y, z = exterior_points(5)
    period = 2 * math.pi / (K * math.cos(beta))
    a = cylinder.vector_harmonic_N(1, K, beta, x, y, z)
    b = cylinder.vector_harmonic_N(1, K, beta, x, y, z + period)
    np.testing.assert_allclose(a, b, rtol=1e-9, atol=1e-12 * np.max(np.abs(a)))


def test_far_field_decay():
    c = cylinder.scattering_coefficients(FIBER, LAM, 1.1)
    for phi in (0.3, 2.0, 3.0):
        e1 = cylinder.scattered_field(c, 20e-6 * math.cos(phi), 20e-6 * math.sin(phi), 0.0)
        e2 = cylinder.scattered_field(c, 80e-6 * math.cos(phi), 80e-6 * math.sin(phi), 0.0)
        assert np.linalg.norm(e1) / np.linalg.norm(e2) == pytest.approx(2.0, rel=0.01)


def test_mirror_flag():
    c = cylinder.scattering_coefficients(FIBER, LAM, math.pi / 2)
    x, y, z = exterior_points(8)
    plain = cylinder.scattered_field(c, x, y, z)
    mirrored = cylinder.scattered_field(c, -x, y, z, mirror_x=True)
    np.testing.assert_allclose(mirrored[..., 1:], plain[..., 1:], rtol=1e-13)
    np.testing.assert_allclose(mirrored[..., 0], -plain[..., 0], rtol=1e-13)


def test_normal_incidence_symmetries():
    c = cylinder.scattering_coefficients(FIBER, LAM, math.pi / 2)
    x, y, z = exterior_points(8)
    i0 = np.sum(np.abs(cylinder.scattered_field(c, x, y, z)) ** 2, axis=-1)
    for p in ((x, -y, z), (x, y, -z)):
        np.testing.assert_allclose(np.sum(np.abs(cylinder.scattered_field(c, *p)) ** 2, axis=-1), i0, rtol=1e-12)


def test_adaptive_truncation_is_converged():
    x, y, z = exterior_points(10, rmin=310e-9)
    c = cylinder.scattering_coefficients(FIBER, LAM, 1.3)
    c_more = cylinder.scattering_coefficients(FIBER, LAM, 1.3, tol=1e-24)
    assert c_more.nmax > c.nmax
    a, b = cylinder.scattered_field(c, x, y, z), cylinder.scattered_field(c_more, x, y, z)
    assert np.max(np.abs(a - b)) < 1e-10 * np.max(np.abs(b))


def test_denominators_bounded_in_parameter_box():
    worst = np.inf
    for a in np.linspace(150e-9, 400e-9, 6):
        for beta in np.radians(np.linspace(20, 160, 8)):
            aux = cylinder.scattering_coefficients(FiberSpec(a), LAM, beta).aux
            worst = min(worst, np.min(np.abs(aux["den"]) / np.abs(aux["V"] * aux["W"])))
    assert worst > 1e-3


@pytest.mark.parametrize("use_numba", [False, True])
def test_backends_agree(use_numba):
    c = cylinder.scattering_coefficients(FIBER, LAM, 0.9)
    x, y, z = exterior_points(50)
    ref = cylinder.scattered_field(c, x, y, z, use_numba=not use_numba)
    np.testing.assert_allclose(cylinder.scattered_field(c, x, y, z, use_numba=use_numba), ref, rtol=1e-12,
                               atol=1e-15)


def test_explicit_harmonic_sum_matches_series():
    beta = 1.1
    c = cylinder.scattering_coefficients(FIBER, LAM, beta)
    x, y, z = exterior_points(6)
    total = 0
    for n in range(-c.nmax, c.nmax + 1):
        an, bn = c.coefficient(n)
        total = total + (-1j) ** n / (K * math.sin(beta)) * (
            1j * an * cylinder.vector_harmonic_M(n, K, beta, x, y, z)
            + bn * cylinder.vector_harmonic_N(n, K, beta, x, y, z))
    np.testing.assert_allclose(cylinder.scattered_field(c, x, y, z), total, rtol=1e-11, atol=1e-16)


@pytest.mark.parametrize("beta", [0.0, math.pi, -0.1])
def test_grazing_incidence_rejected(beta):
    with pytest.raises(DomainError):
        cylinder.scattering_coefficients(FIBER, LAM, beta)


def test_interior_points_rejected():
    c = cylinder.scattering_coefficients(FIBER, LAM, 1.0)
    with pytest.raises(DomainError):
        cylinder.scattered_field(c, 100e-9, 0.0, 0.0)
    with pytest.raises(DomainError):
        cylinder.vector_harmonic_M(0, K, 1.0, 0.0, 0.0, 0.0)


def test_series_ceiling():
    with pytest.raises(ConvergenceError):
        cylinder.scattering_coefficients(FiberSpec(20e-6), LAM, 1.0)


def test_fiber_validation():
    with pytest.raises(DomainError):
        FiberSpec(0.0)
    with pytest.raises(DomainError):
        FiberSpec(1e-7, 0.9)
