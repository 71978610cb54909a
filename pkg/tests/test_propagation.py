import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from thzturb.constants import DB_PER_NEPER_POWER, SPEED_OF_LIGHT, wavenumber
from thzturb.errors import DomainError, TableRangeError
from thzturb.propagation import (
    AbsorptionTable,
    LinkGeometry,
    MieMedium,
    ParticleSizeDistribution,
    absorption_coefficient,
    db_per_km_to_per_m,
    extinction_cross_section,
    extinction_efficiency,
    los_path_gain,
    mie_coefficients,
    mie_truncation_order,
    path_loss_db,
    scattering_coefficient,
    water_vapour_ratio,
)

WATER = MieMedium.constant(complex(2.5, 1.2))


# absorption

def test_absorption_ground_and_scale_height():
    table = AbsorptionTable((1e11, 1e12), (1e-3, 1e-1))
    assert absorption_coefficient(1e11, 0.0, table) == 1e-3
    assert absorption_coefficient(1e11, table.scale_height, table) == pytest.approx(1e-3 / math.e, rel=1e-15)


def test_absorption_log_interpolation_is_geometric_mean():
    table = AbsorptionTable((2e11, 4e11), (1e-4, 1e-2))
    assert absorption_coefficient(3e11, 0.0, table) == pytest.approx(1e-3, rel=1e-13)


def test_absorption_table_range():
    table = AbsorptionTable.default()
    with pytest.raises(TableRangeError):
        absorption_coefficient(2e12, 0.0, table)
    with pytest.raises(DomainError):
        water_vapour_ratio(-5.0)


def test_default_table_hits_rows_exactly():
    table = AbsorptionTable.default()
    for f, k in zip(table.frequencies, table.coefficients):
        assert absorption_coefficient(f, 0.0, table) == pytest.approx(k, rel=1e-14)


@pytest.mark.parametrize("f,k", [((1e11,), (1e-3,)), ((2e11, 1e11), (1, 1)), ((1e11, 2e11), (1, -1))])
def test_absorption_table_validation(f, k):
    with pytest.raises(DomainError):
        AbsorptionTable(f, k)


def test_absorption_csv_header_checked(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("f,k\n1,2\n3,4\n")
    with pytest.raises(DomainError):
        AbsorptionTable.from_csv(p)
    p.write_text("freq_hz,k_abs_per_m\n1e11,1e-3\n2e11,2e-3\n")
    assert AbsorptionTable.from_csv(p).coefficients == (1e-3, 2e-3)


# Mie

@pytest.mark.parametrize("x,m", [(0.3, complex(1.33, 0.01)), (2.0, complex(2.5, 1.2)),
                                 (10.0, complex(1.5, 0.0)), (25.0, complex(4.0, 2.5))])
def test_mie_coefficients_against_extended_precision(x, m):
    n = mie_truncation_order(x)
    a, b = mie_coefficients(x, m)
    a_ref, b_ref = oracles.mie_ab_reference(x, m, n)
    scale = max(np.abs(a_ref).max(), np.abs(b_ref).max())
    assert np.abs(a - a_ref).max() <= 1e-10 * scale
    assert np.abs(b - b_ref).max() <= 1e-10 * scale
    assert extinction_efficiency(x, m) == pytest.approx(oracles.qext_reference(x, m, n), rel=1e-10)


def test_rayleigh_limit_is_tiny():
    a, _ = mie_coefficients(1e-6, complex(2.5, 1.2))
    assert abs(a[0]) < 1e-17


def test_matched_index_does_not_scatter():
    a, b = mie_coefficients(3.0, 1.0)
    assert np.abs(a).max() < 1e-14 and np.abs(b).max() < 1e-14
    assert extinction_cross_section(3e11, 1e-3, MieMedium.constant(1.0)) == 0.0


def test_large_sphere_extinction_paradox():
    assert 1.5 < extinction_efficiency(100.0, complex(1.33, 0.05)) < 2.5


def test_cross_section_grows_with_radius():
    assert extinction_cross_section(3e11, 2e-4, WATER) > extinction_cross_section(3e11, 1e-4, WATER)


def test_medium_validation_and_interpolation():
    with pytest.raises(DomainError):
        MieMedium.constant(complex(0.9, 0.0))
    with pytest.raises(DomainError):
        MieMedium.constant(complex(1.5, -0.1))
    med = MieMedium((1e11, 3e11), (complex(2, 1), complex(4, 3)))
    assert med.index_at(2e11) == complex(3, 2)
    with pytest.raises(TableRangeError):
        med.index_at(5e11)


@settings(max_examples=40, deadline=None)
@given(x=st.floats(0.01, 40.0), re=st.floats(1.01, 5.0), im=st.floats(0.0, 3.0))
def test_partial_waves_bounded(x, re, im):
    a, b = mie_coefficients(x, complex(re, im))
    assert np.all(np.abs(a) <= 1 + 1e-12) and np.all(np.abs(b) <= 1 + 1e-12)
    # passive sphere: extinction is never negative
    assert extinction_efficiency(x, complex(re, im)) >= -1e-12


# scattering

def test_no_particles_no_loss():
    dist = ParticleSizeDistribution.uniform(0.0, 5000.0)
    assert scattering_coefficient(3e11, 0.0, dist, WATER) == 0.0


def test_constant_cross_section_integrates_in_closed_form():
    sigma0, n0, rho0 = 1e-7, 1e6, 4000.0
    dist = ParticleSizeDistribution.uniform(n0, rho0)
    got = scattering_coefficient(3e11, 0.0, dist, WATER, sigma_ext=lambda f, r: sigma0)
    assert got == pytest.approx(DB_PER_NEPER_POWER * 1000 * sigma0 * n0 / rho0, rel=1e-9)


def test_rain_like_distribution_against_trapezoid():
    n0, rho0, f = 8e6, 5060.0, 3e11
    dist = ParticleSizeDistribution.uniform(n0, rho0)
    got = scattering_coefficient(f, 0.0, dist, WATER)
    ref = oracles.trapezoid_extinction(lambda r: extinction_cross_section(f, r, WATER), n0, rho0,
                                       r_max=12 / rho0, n_points=6001)
    assert got == pytest.approx(DB_PER_NEPER_POWER * 1000 * ref, rel=1e-2)


def test_scattering_linear_in_n0():
    one = scattering_coefficient(3e11, 0.0, ParticleSizeDistribution.uniform(1e6, 5000.0), WATER)
    two = scattering_coefficient(3e11, 0.0, ParticleSizeDistribution.uniform(2e6, 5000.0), WATER)
    assert two == pytest.approx(2 * one, rel=1e-12)


def test_particle_table_lookup():
    dist = ParticleSizeDistribution.default()
    assert dist.at(0.0) == (1.6e7, 5040.0)
    assert dist.at(1500.0) == (8.0e6, 5040.0)
    assert dist.at(1e4)[0] == 0.0
    with pytest.raises(TableRangeError):
        ParticleSizeDistribution((100.0,), (1.0,), (1.0,)).at(0.0)


def test_db_per_km_round_trip():
    assert db_per_km_to_per_m(DB_PER_NEPER_POWER * 1000.0 * 3e-4) == pytest.approx(3e-4, rel=1e-15)


# path gain

def test_free_space_gain_at_300ghz_1km():
    g = los_path_gain(LinkGeometry(frequency=300e9, distance=1000.0))
    assert g == pytest.approx(SPEED_OF_LIGHT / (4 * math.pi * 3e14), rel=1e-15)
    # the quoted 7.9577e-8 rounds c to 3e8 m/s
    assert g == pytest.approx(7.9577e-8, rel=1e-3)
    assert path_loss_db(g) == pytest.approx(20 * math.log10(4 * math.pi * 1000.0 * 3e11 / SPEED_OF_LIGHT), abs=1e-12)
    assert path_loss_db(g) == pytest.approx(141.98, abs=0.02)


def test_extinction_adds_exact_decibels():
    geom = LinkGeometry(frequency=3e11, distance=1000.0)
    k = 20.0 / (DB_PER_NEPER_POWER * 1000.0)
    extra = path_loss_db(los_path_gain(geom, k_abs=k)) - path_loss_db(los_path_gain(geom))
    assert extra == pytest.approx(20.0, rel=1e-12)
    split = los_path_gain(geom, k_abs=k / 2, k_sca=k / 2)
    assert split == pytest.approx(los_path_gain(geom, k_abs=k), rel=1e-15)


@pytest.mark.parametrize("kwargs", [dict(frequency=0.0), dict(distance=-1.0), dict(altitude=-1.0),
                                    dict(tx_power=-1.0), dict(bandwidth=0.0)])
def test_geometry_validation(kwargs):
    with pytest.raises(DomainError):
        LinkGeometry(**kwargs)


def test_geometry_derived():
    g = LinkGeometry(frequency=3e11)
    assert g.wavenumber == wavenumber(3e11)
    assert g.wavelength == pytest.approx(1e-3, rel=1e-3)


@settings(max_examples=50, deadline=None)
@given(f=st.floats(1e11, 1e12), L=st.floats(1.0, 1e5))
def test_inverse_distance_law(f, L):
    g1 = los_path_gain(LinkGeometry(frequency=f, distance=L))
    g2 = los_path_gain(LinkGeometry(frequency=f, distance=2 * L))
    assert g1 / g2 == pytest.approx(2.0, rel=1e-13)
