"""Physical constants and model defaults."""

import math

SPEED_OF_LIGHT = 299_792_458.0  # m/s

# Rytov-variance regime boundaries (weak < 0.1 <= strong <= 10 < saturated)
WEAK_TURBULENCE_LIMIT = 0.1
SATURATION_LIMIT = 10.0

# Kolmogorov inertial-range bounds; only used for validity warnings
DEFAULT_INNER_SCALE = 1e-3  # m
DEFAULT_OUTER_SCALE = 100.0  # m

DB_PER_NEPER_POWER = 10.0 / math.log(10.0)  # 4.343


def wavelength(f):
    return SPEED_OF_LIGHT / f


def wavenumber(f):
    return 2.0 * math.pi * f / SPEED_OF_LIGHT
