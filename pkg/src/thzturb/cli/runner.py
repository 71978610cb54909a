"""Scenario runner: expands the sweep (times any series) into points and
dispatches each to one computation, collecting a :class:`SweepTable`.

dB conventions used throughout the output: power dB = -20 log10(amplitude
gain); losses are reported as positive dB.
"""

from __future__ import annotations

import math
from typing import Callable, Dict, List, Tuple

import numpy as np

from .. import __version__
from ..atmosphere import (
    TurbulenceProfile,
    risc_infrared,
    risc_thz,
    rytov_variance,
    turbulence_regime,
)
from ..coherence import (
    CapacityInputs,
    NCQuery,
    PlanarArray,
    array_gain_turbulent,
    channel_matrix_sample,
    ergodic_capacity_bound,
    losc_loss,
    nc_closed_form,
    nc_numeric,
)
from ..constants import SPEED_OF_LIGHT, wavenumber
from ..errors import DomainError, NumericalError, SingularPointError
from ..fading import (
    andrews_params,
    aperture_param,
    gamma_gamma_pdf,
    scintillation_index,
    turbulence_attenuation_db,
)
from ..propagation import (
    AbsorptionTable,
    LinkGeometry,
    MieMedium,
    ParticleSizeDistribution,
    absorption_coefficient,
    dbm_to_watt,
    los_path_gain,
    path_loss_db,
    scattering_extinction,
)
from .config import ScenarioConfig, param_info
from .emit import SweepTable

NAN = float("nan")
REGIME_CODES = {"weak": 0, "strong": 1, "saturated": 2}


class ScenarioError(NumericalError):
    """A numerical failure annotated with the sweep point that caused it."""


class PointDomainError(DomainError):
    """An out-of-domain input reached at a particular sweep point."""


Output = List[Tuple[str, str, object]]


# point helpers ---------------------------------------------------------------

def _spacing(P):
    return P["spacing"] if P["spacing"] is not None else SPEED_OF_LIGHT / P["frequency"] / 2.0


def _arrays(P):
    s = _spacing(P)
    return PlanarArray(P["tx_nx"], P["tx_ny"], s), PlanarArray(P["rx_nx"], P["rx_ny"], s)


def _profile(P):
    return TurbulenceProfile(P["terrestrial_risc"], P["wind_speed"])


def _cn2(P):
    """C_n^2 seen by the link: the flat value, or the profile at the link altitude."""
    if P["model"] == "constant":
        return P["cn2"]
    return risc_thz(P["altitude"], _profile(P), P["temperature"], P["pressure"],
                    P["vapour_pressure"], approximate=not P["thz_transform"])


def _sigma_r2(P):
    if P["sigma_r2"] is not None:
        return P["sigma_r2"]
    return rytov_variance(_cn2(P), P["frequency"], P["distance"])


def _geometry(P):
    return LinkGeometry(P["frequency"], P["distance"], P["altitude"], dbm_to_watt(P["tx_power_dbm"]),
                        P["bandwidth"], dbm_to_watt(P["noise_psd_dbm_hz"]))


def _extinction(P):
    k_abs = k_sca = 0.0
    if P["include_absorption"]:
        table = AbsorptionTable.default(scale_height=P["absorption_scale_height"])
        k_abs = absorption_coefficient(P["frequency"], P["altitude"], table)
    if P["scattering"]:
        medium = MieMedium.constant(complex(P["scatterer_index_re"], P["scatterer_index_im"]))
        k_sca = scattering_extinction(P["frequency"], P["altitude"], ParticleSizeDistribution.default(), medium)
    return k_abs, k_sca


def _turbulence_db(P):
    """Turbulence attenuation in dB, or None at the singular point."""
    if not P["enabled"]:
        return 0.0
    s2 = _sigma_r2(P)
    if s2 == 0.0:
        return 0.0
    try:
        return turbulence_attenuation_db(s2, aperture_param(P["frequency"], P["distance"]))
    except SingularPointError:
        return None


# computations ----------------------------------------------------------------

def _risc_profile(P, rng) -> Output:
    prof = _profile(P)
    h = P["altitude"]
    return [
        ("cn2_infrared", "m^-2/3", risc_infrared(h, prof)),
        ("cn2_thz", "m^-2/3", risc_thz(h, prof, P["temperature"], P["pressure"], P["vapour_pressure"],
                                       approximate=not P["thz_transform"])),
    ]


def _rytov(P, rng) -> Output:
    s2 = rytov_variance(_cn2(P), P["frequency"], P["distance"])
    return [("sigma_r2", "-", s2), ("regime", "0=weak,1=strong,2=saturated", REGIME_CODES[turbulence_regime(s2)])]


def _nc(P, rng) -> Output:
    s = _spacing(P)
    q = NCQuery(P["dt_elements"] * s, P["dr_elements"] * s, _cn2(P), wavenumber(P["frequency"]), P["distance"])
    out = [("dt", "m", q.dt), ("dr", "m", q.dr), ("rho", "-", nc_closed_form(q))]
    if P["numeric"]:
        out.append(("rho_numeric", "-", nc_numeric(q)))
    return out


def _losc(P, rng) -> Output:
    tx, rx = _arrays(P)
    k = wavenumber(P["frequency"])
    cn2 = _cn2(P)
    return [
        ("losc_db", "dB", losc_loss(tx, rx, cn2, k, P["distance"])),
        ("array_gain", "-", array_gain_turbulent(tx, rx, cn2, k, P["distance"])),
    ]


def _gg_pdf(P, rng) -> Output:
    s2 = _sigma_r2(P)
    p = andrews_params(s2, aperture_param(P["frequency"], P["distance"]))
    return [
        ("sigma_r2", "-", s2),
        ("alpha", "-", p.alpha),
        ("beta", "-", p.beta),
        ("pdf", "-", gamma_gamma_pdf(P["psi"], p, printed_argument=P["printed_argument"])),
    ]


def _attenuation(P, rng) -> Output:
    s2 = _sigma_r2(P)
    d2 = aperture_param(P["frequency"], P["distance"])
    var = scintillation_index(s2, d2)
    try:
        db = turbulence_attenuation_db(s2, d2) if s2 > 0 else 0.0
        singular = 0
    except SingularPointError:
        db, singular = NAN, 1
    return [("sigma_r2", "-", s2), ("d_ra2", "-", d2), ("scintillation_index", "-", var),
            ("attenuation_db", "dB", db), ("singular", "-", singular)]


def _link_budget(P, rng) -> Output:
    geom = _geometry(P)
    k_abs, k_sca = _extinction(P)
    fspl = path_loss_db(los_path_gain(geom))
    with_abs = path_loss_db(los_path_gain(geom, k_abs))
    los = path_loss_db(los_path_gain(geom, k_abs, k_sca))
    turb = _turbulence_db(P)
    tx, rx = _arrays(P)
    losc = losc_loss(tx, rx, _cn2(P), geom.wavenumber, geom.distance)
    singular = int(turb is None)
    turb = NAN if turb is None else turb
    return [
        ("fspl_db", "dB", fspl),
        ("absorption_db", "dB", with_abs - fspl),
        ("scattering_db", "dB", los - with_abs),
        ("turbulence_db", "dB", turb),
        ("losc_db", "dB", losc),
        ("total_db", "dB", los + turb + losc),
        ("singular", "-", singular),
    ]


def _capacity(P, rng) -> Output:
    geom = _geometry(P)
    k_abs, k_sca = _extinction(P)
    alpha_los = los_path_gain(geom, k_abs, k_sca)
    turb = _turbulence_db(P)
    tx, rx = _arrays(P)
    cn2 = _cn2(P)
    losc = losc_loss(tx, rx, cn2, geom.wavenumber, geom.distance)
    if turb is None:
        return [("alpha_turb", "-", NAN), ("losc_db", "dB", losc), ("capacity", "bit/s", NAN),
                ("spectral_efficiency", "bit/s/Hz", NAN), ("singular", "-", 1)]
    alpha_turb = 10.0 ** (-turb / 20.0)
    inputs = CapacityInputs(geom.bandwidth, geom.tx_power, geom.noise_psd, alpha_los, alpha_turb, tx, rx)
    c = ergodic_capacity_bound(inputs, cn2, geom.wavenumber, geom.distance)
    return [("alpha_turb", "-", alpha_turb), ("losc_db", "dB", losc), ("capacity", "bit/s", c),
            ("spectral_efficiency", "bit/s/Hz", c / geom.bandwidth), ("singular", "-", 0)]


def _channel_sample(P, rng) -> Output:
    geom = _geometry(P)
    tx, rx = _arrays(P)
    alpha_los = los_path_gain(geom, *_extinction(P))
    fading = None
    cn2 = _cn2(P)
    if P["enabled"]:
        s2 = _sigma_r2(P)
        if s2 > 0:
            fading = andrews_params(s2, aperture_param(geom.frequency, geom.distance))
    H = channel_matrix_sample(tx, rx, (P["theta_t"], P["phi_t"], P["theta_r"], P["phi_r"]), alpha_los,
                              geom.wavenumber, fading=fading, correlation=P["correlation"], seed=rng,
                              cn2=cn2, L=geom.distance)
    psi = np.abs(H) / alpha_los
    return [
        ("psi_mean", "-", float(psi.mean())),
        ("psi_var", "-", float(psi.var())),
        ("gain_db", "dB", 20.0 * math.log10(np.linalg.norm(H, 2))),
        ("h00_re", "-", float(H[0, 0].real)),
        ("h00_im", "-", float(H[0, 0].imag)),
    ]


COMPUTATIONS: Dict[str, Callable] = {
    "risc-profile": _risc_profile,
    "rytov": _rytov,
    "nc": _nc,
    "losc": _losc,
    "gg-pdf": _gg_pdf,
    "attenuation": _attenuation,
    "link-budget": _link_budget,
    "capacity": _capacity,
    "channel-sample": _channel_sample,
}


# driver ----------------------------------------------------------------------

def _apply(P, name, value):
    if name == "array_size":
        for key in ("tx_nx", "tx_ny", "rx_nx", "rx_ny"):
            P[key] = value
    elif name != "draw":
        P[name] = value


def point_seed(master: int, index: int) -> np.random.Generator:
    """Independent stream for sweep point ``index``, fixed by (master, index) alone."""
    return np.random.default_rng(np.random.SeedSequence(master, spawn_key=(index,)))


def scenario_points(cfg: ScenarioConfig):
    """Yield (index, series overrides, sweep value, flat parameter dict) in output order."""
    series = cfg.series or ({},)
    index = 0
    for entry in series:
        for value in cfg.sweep.values():
            P = dict(cfg.params)
            for k, v in sorted(entry.items()):
                _apply(P, k, v)
            _apply(P, cfg.sweep.parameter, value)
            yield index, entry, value, P
            index += 1


def run_scenario(cfg: ScenarioConfig, computation: str = None) -> SweepTable:
    name = computation or cfg.computation
    if name not in COMPUTATIONS:
        raise ValueError(f"unknown computation {name!r}; expected one of {', '.join(COMPUTATIONS)}")
    fn = COMPUTATIONS[name]
    series_keys = sorted({k for e in cfg.series for k in e})
    sweep_name = cfg.sweep.parameter
    table = None
    for index, entry, value, P in scenario_points(cfg):
        try:
            out = fn(P, point_seed(cfg.seed, index))
        except (NumericalError, DomainError) as exc:
            where = (f" [at point {index}: {sweep_name}={value}"
                     + "".join(f", {k}={entry[k]}" for k in sorted(entry)) + "]")
            kind = ScenarioError if isinstance(exc, NumericalError) else PointDomainError
            raise kind(f"{exc}{where}") from exc
        if table is None:
            cols = [sweep_name] + series_keys + [c for c, _, _ in out]
            units = ([param_info(sweep_name).unit] + [param_info(k).unit for k in series_keys]
                     + [u for _, u, _ in out])
            table = SweepTable(cols, units, meta={
                "computation": name,
                "config_sha256": cfg.digest(),
                "seed": cfg.seed,
                "version": __version__,
            })
        table.append([value] + [entry.get(k, NAN) for k in series_keys] + [v for _, _, v in out])
    return table
