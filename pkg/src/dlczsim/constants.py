"""Physical constants used throughout the simulator."""

from scipy.constants import c as SPEED_OF_LIGHT  # m/s
from scipy.constants import k as BOLTZMANN  # J/K

# Caesium-133 atomic mass in kg.
CS_MASS = 2.2069e-25

# D2-line wavelength of caesium, used for wavevector magnitudes.
CS_D2_WAVELENGTH = 852.347e-9

# Ground-state hyperfine splitting of caesium in Hz.
CS_HYPERFINE_SPLITTING = 9.2e9

__all__ = [
    "SPEED_OF_LIGHT",
    "BOLTZMANN",
    "CS_MASS",
    "CS_D2_WAVELENGTH",
    "CS_HYPERFINE_SPLITTING",
]
