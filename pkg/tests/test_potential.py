import math
import warnings
from dataclasses import replace

import numpy as np
import pytest
from scipy import constants as sc

from nanotrap import potential
from nanotrap.composer import IlluminationSpec, TrapField, paper_device, sample_line
from nanotrap.cylinder import FiberSpec
from nanotrap.errors import DomainError

FIBER = FiberSpec(300e-9)


def test_polarizability_sign():
    assert potential.cs_polarizability(937e-9) > 0
    assert potential.cs_polarizability(840e-9) < 0


def test_polarizability_atomic_units_range():
    au = potential.cs_polarizability(937e-9) / potential.ATOMIC_POLARIZABILITY
    assert 1000 < au < 5000


def test_linewidth_terms_negligible():
    a = potential.cs_polarizability(937e-9)
    b = potential.cs_polarizability(937e-9, include_linewidth=False)
    assert abs(a - b) < 1e-6 * abs(a)


def test_single_line_static_limit():
    # static limit of one line with g_j = g_a: alpha = 2 pi eps0 c^3 A / w_j^4
    line = potential.CsLine(852e-9, 3e7, 2)
    a = potential.cs_polarizability(1e-3, lines=(line,), include_linewidth=False)
    assert a == pytest.approx(2 * math.pi * sc.epsilon_0 * sc.c**3 * 3e7 / line.omega**4, rel=1e-6)


def test_near_resonance_warning():
    with pytest.warns(RuntimeWarning):
        potential.cs_polarizability(852.115e-9)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        potential.cs_polarizability(937e-9)


def test_intensity_scale():
    chi = potential.intensity_scale(0.25, 10e-6)
    assert chi * sc.epsilon_0 * sc.c == pytest.approx(1.59155e9, rel=1e-5)
    assert potential.intensity_scale(0.5, 10e-6) == 2 * chi


def test_optical_potential_linear_and_negative():
    a = potential.cs_polarizability(937e-9)
    chi = potential.intensity_scale(0.25, 10e-6)
    assert potential.optical_potential(0.0, chi, a) == 0
    u1 = potential.optical_potential(1.3, chi, a)
    assert u1 < 0
    assert potential.optical_potential(2.6, chi, a) == pytest.approx(2 * u1, rel=1e-15)


@pytest.mark.parametrize("gap,expect", [(0.1, -0.041), (0.2, -5.125e-3)])
def test_vdw_values(gap, expect):
    assert potential.vdw_potential(-(0.3 + gap) * 1e-6, 0.0, FIBER) == pytest.approx(expect, rel=1e-9)


def test_vdw_monotone_and_small_far_away():
    x = -np.linspace(0.31e-6, 5e-6, 200)
    u = potential.vdw_potential(x, 0 * x, FIBER)
    assert np.all(np.diff(u) > 0)  # rises toward 0 with distance
    assert np.all(u < 0)
    assert abs(potential.vdw_potential(-2.4e-6, 0.0, FIBER)) < 1e-5


def test_vdw_domain():
    with pytest.raises(DomainError):
        potential.vdw_potential(-0.3e-6, 0.0, FIBER)


@pytest.fixture(scope="module")
def grid_and_model():
    m = TrapField(paper_device(), IlluminationSpec())
    return m, sample_line(m, "x", -0.3e-6 - np.arange(20e-9, 1.2e-6, 10e-9))


def test_total_is_sum_of_parts(grid_and_model):
    m, g = grid_and_model
    pg = potential.total_potential(g, FIBER, m.illum)
    np.testing.assert_allclose(pg.u_total, pg.u_opt + pg.u_vdw)
    assert np.all(pg.u_opt < 0) and np.all(pg.u_vdw <= 0)


def test_zero_power_leaves_vdw(grid_and_model):
    m, g = grid_and_model
    pg = potential.total_potential(g, FIBER, replace(m.illum, power=0.0))
    np.testing.assert_array_equal(pg.u_total, pg.u_vdw)


def test_affine_in_power(grid_and_model):
    m, g = grid_and_model
    u = [potential.total_potential(g, FIBER, replace(m.illum, power=p)).u_total for p in (0.1, 0.2, 0.3)]
    np.testing.assert_allclose(u[2] - u[1], u[1] - u[0], rtol=1e-12, atol=1e-15)


def test_trap_scale_is_millikelvin(grid_and_model):
    m, _ = grid_and_model
    u = potential.TrapPotential(m)(-0.3e-6 - 316e-9, 0.0, 0.0)
    assert 0.1 < abs(u) < 10


def test_trap_potential_matches_grid(grid_and_model):
    m, g = grid_and_model
    pg = potential.total_potential(g, FIBER, m.illum)
    x, y, z = g.coordinates()
    np.testing.assert_allclose(potential.TrapPotential(m)(x, y, z), pg.u_total, rtol=1e-13)
