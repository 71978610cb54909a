import math
import warnings

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from thzturb.atmosphere import (
    KolmogorovSpectrum,
    QuadratureConfig,
    TurbulenceProfile,
    dn_dT_infrared,
    dn_dT_thz,
    kolmogorov_phi,
    risc_infrared,
    risc_thz,
    rytov_variance,
    structure_function,
    structure_function_check,
    thz_scale_factor,
    turbulence_regime,
)
from thzturb.constants import wavenumber
from thzturb.errors import DomainError, NumericalError

HV = TurbulenceProfile()


def test_ground_value_is_sum_of_surface_terms():
    assert risc_infrared(0.0, HV) == pytest.approx(2.7e-16 + 1.7e-14, rel=1e-15)


def test_hv_at_one_kilometre_by_hand():
    h = 1000.0
    want = (0.00594 * (21 / 27) ** 2 * (1e-5 * h) ** 10 * math.exp(-1)
            + 2.7e-16 * math.exp(-h / 1500) + 1.7e-14 * math.exp(-10))
    assert risc_infrared(h, HV) == pytest.approx(want, rel=1e-14)


def test_array_altitudes_match_scalar_calls():
    hs = np.array([0.0, 500.0, 5e3, 2e4])
    vec = risc_infrared(hs, HV)
    assert vec.shape == hs.shape
    assert np.allclose(vec, [risc_infrared(h, HV) for h in hs], rtol=0, atol=0)


def test_negative_altitude_rejected():
    with pytest.raises(DomainError):
        risc_infrared(-1.0, HV)


def test_constant_override_ignores_altitude():
    p = TurbulenceProfile(constant_cn2=1e-13)
    assert risc_infrared(0.0, p) == risc_infrared(12e3, p) == 1e-13


@pytest.mark.parametrize("kwargs", [dict(terrestrial_risc=-1.0), dict(wind_speed=-1.0), dict(constant_cn2=0.0)])
def test_profile_validation(kwargs):
    with pytest.raises(DomainError):
        TurbulenceProfile(**kwargs)


def test_dry_air_scale_is_coefficient_ratio_squared():
    assert thz_scale_factor(288.15, 1013.25, 0.0) == pytest.approx((77.6 / 79.0) ** 2, rel=1e-15)
    assert risc_thz(0.0, HV) == pytest.approx(risc_infrared(0.0, HV) * (77.6 / 79) ** 2, rel=1e-15)


def test_approximate_flag_returns_infrared_value():
    assert risc_thz(300.0, HV, approximate=True) == risc_infrared(300.0, HV)


def test_refractivity_slopes_against_symbolic_derivative():
    T, Pa, Pv = sp.symbols("T P_a P_v", positive=True)
    n_thz = 77.6e-6 * (Pa / T + 4810 * Pv / T**2)
    n_ir = 79e-6 * Pa / T
    point = {T: 280.0, Pa: 950.0, Pv: 12.0}
    assert dn_dT_thz(280.0, 950.0, 12.0) == pytest.approx(float(sp.diff(n_thz, T).subs(point)), rel=1e-13)
    assert dn_dT_infrared(280.0, 950.0) == pytest.approx(float(sp.diff(n_ir, T).subs(point)), rel=1e-13)


def test_humidity_raises_thz_strength():
    assert thz_scale_factor(300.0, 1000.0, 20.0) > thz_scale_factor(300.0, 1000.0, 0.0)


@pytest.mark.parametrize("args", [(0.0, 1000.0, 0.0), (300.0, 0.0, 0.0), (300.0, 1000.0, -1.0)])
def test_scale_factor_validation(args):
    with pytest.raises(DomainError):
        thz_scale_factor(*args)


def test_kolmogorov_value_and_domain():
    assert kolmogorov_phi(2.0, 1e-14) == pytest.approx(0.033e-14 * 2.0 ** (-11 / 3), rel=1e-15)
    with pytest.raises(DomainError):
        kolmogorov_phi(0.0, 1e-14)
    spec = KolmogorovSpectrum(1e-14)
    assert spec(3.0) == kolmogorov_phi(3.0, 1e-14)


def test_rytov_closed_form_and_zero():
    k = wavenumber(300e9)
    assert rytov_variance(1e-11, 300e9, 1e3) == pytest.approx(0.5e-11 * k ** (7 / 6) * 1e3 ** (11 / 6), rel=1e-14)
    assert rytov_variance(0.0, 300e9, 1e3) == 0.0
    with pytest.raises(DomainError):
        rytov_variance(1e-11, 0.0, 1e3)


def test_rytov_length_scaling():
    ratio = rytov_variance(1e-12, 5e11, 2e3) / rytov_variance(1e-12, 5e11, 1e3)
    assert ratio == pytest.approx(2 ** (11 / 6), rel=1e-14)


@pytest.mark.parametrize("s2,regime", [(0.05, "weak"), (0.1, "strong"), (10.0, "strong"), (10.5, "saturated")])
def test_regime_boundaries(s2, regime):
    assert turbulence_regime(s2) == regime


def test_structure_function_two_thirds_law():
    assert structure_function_check(1e-14, 0.5) < 1e-3
    # scales exactly as r^(2/3) in cn2 and r
    assert structure_function(2e-14, 1.0) / structure_function(1e-14, 1.0) == pytest.approx(2.0, rel=1e-12)


def test_structure_function_warns_outside_inertial_range():
    spec = KolmogorovSpectrum(1e-14, inner_scale=0.01, outer_scale=1.0)
    with pytest.warns(UserWarning):
        structure_function_check(1e-14, 5.0, spectrum=spec)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        structure_function_check(1e-14, 0.5, spectrum=spec)


def test_structure_function_reports_unconverged_quadrature():
    with pytest.raises(NumericalError):
        structure_function(1e-14, 1.0, QuadratureConfig(limit=1, epsrel=1e-10, max_rel_error=1e-16))


@settings(max_examples=40, deadline=None)
@given(h1=st.floats(0, 3e4), dh=st.floats(1.0, 1e4))
def test_profile_decreasing_in_low_layer(h1, dh):
    # with the default wind the profile is monotone below the tropopause bump
    if h1 + dh > 5000:
        return
    assert risc_infrared(h1 + dh, HV) < risc_infrared(h1, HV)


@settings(max_examples=60, deadline=None)
@given(cn2=st.floats(1e-17, 1e-8), f=st.floats(1e10, 1e13), L=st.floats(1.0, 1e5))
def test_rytov_positive_and_linear_in_cn2(cn2, f, L):
    s = rytov_variance(cn2, f, L)
    assert s > 0
    assert rytov_variance(2 * cn2, f, L) == pytest.approx(2 * s, rel=1e-14)


def test_rytov_long_path_direct_evaluation():
    # the 0.5 constant gives about 198 here, half the often-quoted 396
    assert rytov_variance(1e-11, 300e9, 100e3) == pytest.approx(198.24268, rel=1e-6)
