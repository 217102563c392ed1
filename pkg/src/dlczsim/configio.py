"""Config-file ingestion and emission.

The on-disk format is a flat INI file with one section per parameter group::

    [atoms]
    temperature_c = 61.3
    beam_waist_m = 90e-6
    ...

    [pulses]
    energy_pj = 129
    ...

Keys carry unit suffixes.  Temperatures may be given either as
``temperature_c`` (Celsius) or ``temperature_k`` (kelvin); energies are
given in picojoules.  Unknown sections or keys are a hard error.
"""

from __future__ import annotations

import configparser
from dataclasses import replace
from pathlib import Path

from .config import (
    AtomEnsembleParams,
    DetectionParams,
    ExperimentConfig,
    NoiseParams,
    PulseParams,
    validate_config,
)

__all__ = ["ConfigFileError", "load_config", "dump_config", "apply_key", "KNOWN_KEYS"]


class ConfigFileError(ValueError):
    """Malformed config file: unknown keys, bad values, or bad structure."""


# section -> key -> (dataclass field, converter to SI)
_PJ = 1e-12

_SCHEMA: dict[str, dict[str, tuple[str, object]]] = {
    "atoms": {
        "cell_length_m": ("cell_length", float),
        "temperature_k": ("temperature", float),
        "temperature_c": ("temperature", lambda s: float(s) + 273.15),
        "buffer_gas_pressure_torr": ("buffer_gas_pressure", float),
        "optical_depth": ("optical_depth", float),
        "atomic_mass_kg": ("atomic_mass", float),
        "hyperfine_splitting_hz": ("hyperfine_splitting", float),
        "beam_waist_m": ("beam_waist", float),
        "diffusion_coefficient_m2_s": ("diffusion_coefficient", float),
    },
    "pulses": {
        "duration_fwhm_s": ("duration_fwhm", float),
        "energy_pj": ("energy", lambda s: float(s) * _PJ),
        "energy_j": ("energy", float),
        "detuning_read_hz": ("detuning_read", float),
        "detuning_write_hz": ("detuning_write", float),
        "bandwidth_hz": ("bandwidth", float),
    },
    "detection": {
        "detector_efficiency": ("detector_efficiency", float),
        "dark_count_probability": ("dark_count_probability", float),
        "transmission_chain": ("transmission_chain", float),
        "coincidence_scheme": ("coincidence_scheme", str),
    },
    "noise": {
        "unconditional_noise_slope_per_j": ("unconditional_noise_slope", float),
        "write_noise_slope_per_j": ("write_noise_slope", float),
        "detuning_noise_profile": ("detuning_noise_profile", None),
    },
    "experiment": {
        "excitation_slope_per_j": ("excitation_slope", float),
        "trials": ("trials", int),
        "storage_time_s": ("storage_time", float),
        "rng_seed": ("rng_seed", int),
    },
}

KNOWN_KEYS = tuple(
    f"{section}.{key}" for section, keys in _SCHEMA.items() for key in keys
)

_GROUP_TYPES = {
    "atoms": AtomEnsembleParams,
    "pulses": PulseParams,
    "detection": DetectionParams,
    "noise": NoiseParams,
}


def _parse_profile(text: str) -> tuple[tuple[float, float], ...]:
    """Parse ``detuning_hz:mean, detuning_hz:mean, ...`` pairs."""
    entries = []
    for chunk in text.replace(";", ",").split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if ":" not in chunk:
            raise ConfigFileError(
                f"detuning_noise_profile entry {chunk!r} is not 'detuning:mean'")
        left, right = chunk.split(":", 1)
        entries.append((float(left), float(right)))
    return tuple(entries)


def _read_parser(path: str | Path) -> configparser.ConfigParser:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    text = Path(path).read_text()
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as exc:
        raise ConfigFileError(f"cannot parse {path}: {exc}") from exc
    return parser


def load_config(path: str | Path, validate: bool = True) -> ExperimentConfig:
    """Load an :class:`ExperimentConfig` from ``path``.

    Unknown sections or keys raise :class:`ConfigFileError` listing every
    offender.  Missing keys fall back to the built-in defaults.
    """
    parser = _read_parser(path)
    unknown: list[str] = []
    for section in parser.sections():
        if section not in _SCHEMA:
            unknown.append(f"[{section}]")
            continue
        for key in parser[section]:
            if key not in _SCHEMA[section]:
                unknown.append(f"[{section}] {key}")
    if unknown:
        raise ConfigFileError("unknown config entries: " + ", ".join(sorted(unknown)))

    cfg = ExperimentConfig()
    for section, keys in _SCHEMA.items():
        if not parser.has_section(section):
            continue
        if section == "atoms" and (
            parser.has_option(section, "temperature_k")
            and parser.has_option(section, "temperature_c")
        ):
            raise ConfigFileError(
                "[atoms] gives both temperature_k and temperature_c; pick one")
        if section == "pulses" and (
            parser.has_option(section, "energy_pj")
            and parser.has_option(section, "energy_j")
        ):
            raise ConfigFileError(
                "[pulses] gives both energy_pj and energy_j; pick one")
        updates: dict[str, object] = {}
        for key, raw in parser[section].items():
            fieldname, conv = keys[key]
            try:
                if key == "detuning_noise_profile":
                    updates[fieldname] = _parse_profile(raw)
                else:
                    updates[fieldname] = conv(raw)
            except ConfigFileError:
                raise
            except ValueError as exc:
                raise ConfigFileError(
                    f"[{section}] {key} = {raw!r}: {exc}") from exc
        if section == "experiment":
            cfg = replace(cfg, **updates)
        else:
            group = replace(getattr(cfg, section), **updates)
            cfg = replace(cfg, **{section: group})
    if validate:
        validate_config(cfg)
    return cfg


def apply_key(cfg: ExperimentConfig, dotted_key: str, raw_value: str) -> ExperimentConfig:
    """Apply one ``section.key`` assignment (config-file units) to ``cfg``."""
    if dotted_key.count(".") != 1:
        raise ConfigFileError(f"expected 'section.key', got {dotted_key!r}")
    section, key = dotted_key.split(".")
    if section not in _SCHEMA or key not in _SCHEMA[section]:
        raise ConfigFileError(f"unknown config entry {dotted_key!r}")
    fieldname, conv = _SCHEMA[section][key]
    if key == "detuning_noise_profile":
        value: object = _parse_profile(raw_value)
    else:
        value = conv(raw_value)
    if section == "experiment":
        return replace(cfg, **{fieldname: value})
    group = replace(getattr(cfg, section), **{fieldname: value})
    return replace(cfg, **{section: group})


def _fmt(value: object) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def dump_config(cfg: ExperimentConfig, path: str | Path) -> None:
    """Write ``cfg`` in the config-file format, round-trippable bit-exactly."""
    lines = []
    lines.append("[atoms]")
    a = cfg.atoms
    lines.append(f"cell_length_m = {_fmt(a.cell_length)}")
    lines.append(f"temperature_k = {_fmt(a.temperature)}")
    lines.append(f"buffer_gas_pressure_torr = {_fmt(a.buffer_gas_pressure)}")
    lines.append(f"optical_depth = {_fmt(a.optical_depth)}")
    lines.append(f"atomic_mass_kg = {_fmt(a.atomic_mass)}")
    lines.append(f"hyperfine_splitting_hz = {_fmt(a.hyperfine_splitting)}")
    lines.append(f"beam_waist_m = {_fmt(a.beam_waist)}")
    lines.append(f"diffusion_coefficient_m2_s = {_fmt(a.diffusion_coefficient)}")
    lines.append("")
    lines.append("[pulses]")
    p = cfg.pulses
    lines.append(f"duration_fwhm_s = {_fmt(p.duration_fwhm)}")
    # Prefer the human-friendly pJ key, but only when it loses no bits.
    if float(_fmt(p.energy / _PJ)) * _PJ == p.energy:
        lines.append(f"energy_pj = {_fmt(p.energy / _PJ)}")
    else:
        lines.append(f"energy_j = {_fmt(p.energy)}")
    lines.append(f"detuning_read_hz = {_fmt(p.detuning_read)}")
    lines.append(f"detuning_write_hz = {_fmt(p.detuning_write)}")
    lines.append(f"bandwidth_hz = {_fmt(p.bandwidth)}")
    lines.append("")
    lines.append("[detection]")
    d = cfg.detection
    lines.append(f"detector_efficiency = {_fmt(d.detector_efficiency)}")
    lines.append(f"dark_count_probability = {_fmt(d.dark_count_probability)}")
    lines.append(f"transmission_chain = {_fmt(d.transmission_chain)}")
    lines.append(f"coincidence_scheme = {d.coincidence_scheme}")
    lines.append("")
    lines.append("[noise]")
    n = cfg.noise
    lines.append(f"unconditional_noise_slope_per_j = {_fmt(n.unconditional_noise_slope)}")
    lines.append(f"write_noise_slope_per_j = {_fmt(n.write_noise_slope)}")
    if n.detuning_noise_profile:
        pairs = ", ".join(f"{_fmt(f)}:{_fmt(m)}" for f, m in n.detuning_noise_profile)
        lines.append(f"detuning_noise_profile = {pairs}")
    lines.append("")
    lines.append("[experiment]")
    lines.append(f"excitation_slope_per_j = {_fmt(cfg.excitation_slope)}")
    lines.append(f"trials = {cfg.trials}")
    lines.append(f"storage_time_s = {_fmt(cfg.storage_time)}")
    lines.append(f"rng_seed = {cfg.rng_seed}")
    lines.append("")
    Path(path).write_text("\n".join(lines))
