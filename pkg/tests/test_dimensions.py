"""Unit-annotated fixtures: every closed form re-expressed with sympy units.

Each check asserts the expected output dimension and that the SI magnitude
equals the library's float result.
"""

import math

import pytest
import sympy as sp
from sympy.physics import units as u

from interworld import constants as k
from interworld import decoherence as dec
from interworld.drive import pi_pulse_field

hbar = k.HBAR * u.joule * u.second
h = k.H * u.joule * u.second
kB = k.K_B * u.joule / u.kelvin
eps0 = k.EPSILON0 * u.farad / u.meter
c = k.C_LIGHT * u.meter / u.second

SI = [u.meter, u.second, u.kilogram, u.kelvin, u.ampere]


def si(expr, unit):
    """Magnitude of ``expr`` in ``unit``; fails if the dimensions differ."""
    ratio = sp.simplify(u.convert_to(expr / unit, SI))
    assert ratio.is_number, f"dimension mismatch: {ratio}"
    return float(ratio)


def test_rest_gas_flux_is_per_area_per_time():
    p = 1.333e-7 * u.pascal
    T = 300 * u.kelvin
    m = 3.347e-27 * u.kilogram
    flux = p / (kB * T) * sp.sqrt(8 * kB * T / (sp.pi * m))
    got = dec.rest_gas_flux(
        dec.TrapConfig(300.0, 1.333e-7, 3.347e-27, 2.4e-18, 1e3, 1e-10, 1.0, 1e-6, 3.3e-25)
    )
    assert si(flux, 1 / (u.meter**2 * u.second)) == pytest.approx(got, rel=1e-12)


def test_decoherence_time_is_seconds():
    sigma = 2.4e-18 * u.meter**2
    phi = 5.7e16 / (u.meter**2 * u.second)
    assert si(1 / (sigma * phi), u.second) == pytest.approx(
        dec.decoherence_time(dec.ScatteringChannel("g", 2.4e-18, 5.7e16)), rel=1e-12
    )


def test_pi_field_is_volts_per_metre():
    dipole = k.DIPOLE_MU_B_OVER_C * u.coulomb * u.meter
    t_p = 1 * u.second
    assert si(sp.pi * hbar / (t_p * dipole), u.volt / u.meter) == pytest.approx(pi_pulse_field(1.0), rel=1e-12)


def test_microwave_flux_dimension():
    E = 1.071e-2 * u.volt / u.meter
    omega = 4.05e10 / u.second
    flux = eps0 * c * E**2 / (hbar * omega)
    assert si(flux, 1 / (u.meter**2 * u.second)) == pytest.approx(dec.microwave_flux(1.071e-2, 4.05e10), rel=1e-12)


def test_microwave_elastic_time_dimension():
    dipole = k.DIPOLE_MU_B_OVER_C * u.coulomb * u.meter
    t_p = 1 * u.second
    sigma = 5.2e-40 * u.meter**2
    omega = 4.05e10 / u.second
    t = t_p**2 * dipole**2 * omega / (eps0 * c * sp.pi**2 * hbar * sigma)
    assert si(t, u.second) == pytest.approx(
        dec.microwave_elastic_decoherence_time(k.DIPOLE_MU_B_OVER_C, 1.0, 5.2e-40, 4.05e10), rel=1e-12
    )


def test_trap_field_time_dimension():
    t = hbar * (1 / u.second) / (eps0 * c * (1000 * u.volt / u.meter) ** 2 * 5.2e-40 * u.meter**2)
    assert si(t, u.second) == pytest.approx(dec.trap_field_decoherence_time(5.2e-40, 1.0, 1000.0, 1.0), rel=1e-12)


def test_mixing_time_dimension():
    t = 2e-18 * u.meter * 1e-6 * u.meter * 3.3e-25 * u.kilogram / h
    assert si(t, u.second) == pytest.approx(dec.mixing_timescale(2e-18, 1e-6, 3.3e-25), rel=1e-12)


def test_rabi_phase_dimensionless():
    nu_t = k.DIPOLE_MU_B_OVER_C * u.coulomb * u.meter * (1.0 * u.volt / u.meter) * u.second / (2 * math.sqrt(2) * hbar)
    si(nu_t, sp.Integer(1))


def test_single_collision_ratio_dimensionless():
    si(2.4e-18 * u.meter**2 / (4 * sp.pi * (1e-3 * u.meter) ** 2), sp.Integer(1))
