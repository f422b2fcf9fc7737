"""Physical constants (CODATA, via scipy.constants) and reference inputs."""

from dataclasses import dataclass

import scipy.constants as sc


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = sc.hbar  # J s
    h: float = sc.h  # J s
    k_boltzmann: float = sc.k  # J/K
    epsilon0: float = sc.epsilon_0  # F/m
    c_light: float = sc.c  # m/s
    bohr_magneton: float = sc.physical_constants["Bohr magneton"][0]  # J/T

    def __post_init__(self):
        for name, value in vars(self).items():
            if not value > 0:
                raise ValueError(f"constant {name} must be positive, got {value}")


CONSTANTS = PhysicalConstants()

HBAR = CONSTANTS.hbar
H = CONSTANTS.h
K_B = CONSTANTS.k_boltzmann
EPSILON0 = CONSTANTS.epsilon0
C_LIGHT = CONSTANTS.c_light
MU_B = CONSTANTS.bohr_magneton

TORR = sc.torr  # Pa
NBAR = 1e-4  # Pa
ATOMIC_MASS = sc.atomic_mass  # kg

# Magnetic dipole transition element approximated by the Bohr magneton,
# expressed in C m so that dipole * E has units of energy.
DIPOLE_MU_B_OVER_C = MU_B / C_LIGHT

# 199Hg+ F=0 -> F=1 hyperfine transition, used as a plain number in s^-1.
HYPERFINE_OMEGA = 4.05e10

H2_MASS = 2.01588 * ATOMIC_MASS
HG199_MASS = 198.968 * ATOMIC_MASS

# H2-Hg elastic cross section near room temperature.
SIGMA_H2_HG = 2.4e-18  # m^2
# Angle-averaged Thomson cross section of the ion.
SIGMA_THOMSON_ION = 5.2e-40  # m^2


def thomson_cross_section(mass, charge=sc.e):
    """Total Thomson cross section 8*pi/3 * r_c**2 of a point charge."""
    r_c = charge**2 / (4 * sc.pi * EPSILON0 * mass * C_LIGHT**2)
    return 8 * sc.pi / 3 * r_c**2
