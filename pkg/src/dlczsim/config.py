"""Configuration types, validation, and derived quantities.

All quantities are stored in SI units (metres, seconds, joules, kelvin, Hz).
Celsius and picojoule values are accepted only at the config-file / CLI
boundary and converted on ingestion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .constants import BOLTZMANN, CS_HYPERFINE_SPLITTING, CS_MASS

__all__ = [
    "AtomEnsembleParams",
    "PulseParams",
    "DetectionParams",
    "NoiseParams",
    "ExperimentConfig",
    "ConfigViolation",
    "ConfigValidationError",
    "config_violations",
    "validate_config",
    "thermal_speed",
]


@dataclass(frozen=True)
class AtomEnsembleParams:
    """Vapour-cell ensemble parameters.

    ``beam_waist`` is the 1/e^2 intensity radius of the (shared) write/read
    beam.  ``diffusion_coefficient`` is a direct input rather than a quantity
    derived from buffer-gas pressure; see :mod:`dlczsim.calibration` for the
    value calibrated against the default operating point.
    """

    cell_length: float = 0.075              # m
    temperature: float = 334.45             # K (61.3 C)
    buffer_gas_pressure: float = 10.0       # Torr
    optical_depth: float = 400.0
    atomic_mass: float = CS_MASS            # kg
    hyperfine_splitting: float = CS_HYPERFINE_SPLITTING  # Hz
    beam_waist: float = 90e-6               # m, 1/e^2 intensity radius
    diffusion_coefficient: float = 0.037434916  # m^2/s, calibrated


@dataclass(frozen=True)
class PulseParams:
    """Write/read pulse parameters (single shared pulse energy)."""

    duration_fwhm: float = 2.3e-9           # s
    energy: float = 129e-12                 # J
    detuning_read: float = 4e9              # Hz
    detuning_write: float = 13.2e9          # Hz, read detuning + splitting
    bandwidth: float = 200e6                # Hz


@dataclass(frozen=True)
class DetectionParams:
    """Click-detector and collection-chain scalars."""

    detector_efficiency: float = 0.6        # per arm
    dark_count_probability: float = 1e-6    # per trial per detector
    transmission_chain: float = 0.584       # cascade + coupling
    coincidence_scheme: str = "cross"       # "cross" | "auto_hbt"


@dataclass(frozen=True)
class NoiseParams:
    """Uncorrelated background photons, as pre-detection means per trial.

    Slopes are in photons per joule of pulse energy so that different
    operating powers share a single parameter.  ``detuning_noise_profile``
    is an optional table mapping read detuning (Hz) to additional mean
    noise photons, a phenomenological stand-in for fluorescence leakage
    near the resonances.
    """

    unconditional_noise_slope: float = 7.79e-5 / 30e-12  # photons/J, read arm
    write_noise_slope: float = 7.79e-5 / 30e-12          # photons/J, Stokes arm
    detuning_noise_profile: tuple[tuple[float, float], ...] = ()


@dataclass(frozen=True)
class ExperimentConfig:
    """Full parameterization of one simulated run."""

    atoms: AtomEnsembleParams = field(default_factory=AtomEnsembleParams)
    pulses: PulseParams = field(default_factory=PulseParams)
    detection: DetectionParams = field(default_factory=DetectionParams)
    noise: NoiseParams = field(default_factory=NoiseParams)
    excitation_slope: float = (1.0 / 5.83) / 129e-12  # lambda per joule
    trials: int = 1_000_000
    storage_time: float = 30e-9             # s
    rng_seed: int = 20260809


@dataclass(frozen=True)
class ConfigViolation:
    field: str
    value: object
    constraint: str

    def __str__(self) -> str:
        return f"{self.field} = {self.value!r} violates: {self.constraint}"


class ConfigValidationError(ValueError):
    """Raised with the complete list of invariant violations."""

    def __init__(self, violations: list[ConfigViolation]):
        self.violations = violations
        lines = "\n  ".join(str(v) for v in violations)
        super().__init__(f"invalid configuration:\n  {lines}")


_DETUNING_MATCH_TOL = 1.0  # Hz


def config_violations(cfg: ExperimentConfig) -> list[ConfigViolation]:
    """Return every invariant violation in ``cfg`` (empty list if valid)."""
    v: list[ConfigViolation] = []
    a, p, d, n = cfg.atoms, cfg.pulses, cfg.detection, cfg.noise

    def positive(name: str, value: float) -> None:
        if not (value > 0):
            v.append(ConfigViolation(name, value, "must be > 0"))

    positive("atoms.cell_length", a.cell_length)
    positive("atoms.temperature", a.temperature)
    positive("atoms.buffer_gas_pressure", a.buffer_gas_pressure)
    positive("atoms.optical_depth", a.optical_depth)
    positive("atoms.atomic_mass", a.atomic_mass)
    positive("atoms.hyperfine_splitting", a.hyperfine_splitting)
    positive("atoms.beam_waist", a.beam_waist)
    positive("atoms.diffusion_coefficient", a.diffusion_coefficient)
    if a.beam_waist > 0 and a.cell_length > 0 and not (a.beam_waist < a.cell_length):
        v.append(ConfigViolation("atoms.beam_waist", a.beam_waist,
                                 "must be < cell_length"))

    positive("pulses.duration_fwhm", p.duration_fwhm)
    if p.energy < 0:
        v.append(ConfigViolation("pulses.energy", p.energy, "must be >= 0"))
    positive("pulses.bandwidth", p.bandwidth)
    gap = p.detuning_write - p.detuning_read
    if abs(gap - a.hyperfine_splitting) > _DETUNING_MATCH_TOL:
        v.append(ConfigViolation(
            "pulses.detuning_write", p.detuning_write,
            f"detuning_write - detuning_read must equal the hyperfine "
            f"splitting ({a.hyperfine_splitting:g} Hz) within "
            f"{_DETUNING_MATCH_TOL:g} Hz; got {gap:g} Hz"))

    for name, value in (
        ("detection.detector_efficiency", d.detector_efficiency),
        ("detection.dark_count_probability", d.dark_count_probability),
        ("detection.transmission_chain", d.transmission_chain),
    ):
        if not (0.0 <= value <= 1.0):
            v.append(ConfigViolation(name, value, "must be in [0, 1]"))
    if d.coincidence_scheme not in ("cross", "auto_hbt"):
        v.append(ConfigViolation("detection.coincidence_scheme",
                                 d.coincidence_scheme,
                                 "must be 'cross' or 'auto_hbt'"))

    if n.unconditional_noise_slope < 0:
        v.append(ConfigViolation("noise.unconditional_noise_slope",
                                 n.unconditional_noise_slope, "must be >= 0"))
    if n.write_noise_slope < 0:
        v.append(ConfigViolation("noise.write_noise_slope",
                                 n.write_noise_slope, "must be >= 0"))
    for det, mean in n.detuning_noise_profile:
        if mean < 0:
            v.append(ConfigViolation("noise.detuning_noise_profile",
                                     (det, mean),
                                     "profile noise means must be >= 0"))

    if cfg.excitation_slope < 0:
        v.append(ConfigViolation("excitation_slope", cfg.excitation_slope,
                                 "must be >= 0"))
    if cfg.trials < 1:
        v.append(ConfigViolation("trials", cfg.trials, "must be >= 1"))
    if cfg.storage_time < 0:
        v.append(ConfigViolation("storage_time", cfg.storage_time,
                                 "must be >= 0"))
    if not (0 <= cfg.rng_seed < 2**64):
        v.append(ConfigViolation("rng_seed", cfg.rng_seed,
                                 "must fit in an unsigned 64-bit integer"))
    return v


def validate_config(cfg: ExperimentConfig) -> ExperimentConfig:
    """Return ``cfg`` unchanged if valid, else raise with all violations."""
    violations = config_violations(cfg)
    if violations:
        raise ConfigValidationError(violations)
    return cfg


def thermal_speed(atoms: AtomEnsembleParams) -> float:
    """One-dimensional rms thermal speed sqrt(k_B T / m) in m/s."""
    if atoms.temperature <= 0:
        raise ValueError("temperature must be > 0")
    if atoms.atomic_mass <= 0:
        raise ValueError("atomic_mass must be > 0")
    return math.sqrt(BOLTZMANN * atoms.temperature / atoms.atomic_mass)


def with_energy(cfg: ExperimentConfig, energy: float) -> ExperimentConfig:
    """Copy of ``cfg`` with the write/read pulse energy replaced (joules)."""
    return replace(cfg, pulses=replace(cfg.pulses, energy=energy))
