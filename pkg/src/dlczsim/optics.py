"""Filtering and collection chain: cascaded Fabry-Perot transmission.

The cascade of three etalons is parameterized as

    T(f) = T0 / [(1 + A sin^2(d (f-f0)))
                 (1 + B sin^2(h (f-f0)))
                 (1 + C sin^2(g (f-f0)))]

with contrasts A, B, C (dimensionless) and phase slopes d, h, g in rad/Hz,
so each factor is periodic in f with free spectral range pi/slope.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import SampledSpectrum

__all__ = [
    "CavityFitParams",
    "ArmEfficiency",
    "cascade_transmission",
    "single_cavity_params",
    "extinction_ratio",
    "apply_filter",
    "cavity_for_fwhm",
]


@dataclass(frozen=True)
class CavityFitParams:
    """Parameters of the triple-cavity transmission profile."""

    T0: float
    A: float
    B: float
    C: float
    d: float
    h: float
    g: float
    f0: float = 0.0

    def __post_init__(self) -> None:
        if not (0.0 < self.T0 <= 1.0):
            raise ValueError("T0 must be in (0, 1]")
        if min(self.A, self.B, self.C) < 0:
            raise ValueError("contrasts A, B, C must be >= 0")
        if min(self.d, self.h, self.g) <= 0:
            raise ValueError("phase slopes d, h, g must be > 0")


@dataclass(frozen=True)
class ArmEfficiency:
    """End-to-end efficiency of one detection arm, as independent factors."""

    cavity_transmission: float
    other_optics: float
    detector: float

    def __post_init__(self) -> None:
        for name in ("cavity_transmission", "other_optics", "detector"):
            value = getattr(self, name)
            if not (0.0 <= value <= 1.0):
                raise ValueError(f"{name} must be in [0, 1]")

    @property
    def total(self) -> float:
        return self.cavity_transmission * self.other_optics * self.detector


def cascade_transmission(f, p: CavityFitParams):
    """Cascade transmission at frequency ``f`` (Hz); accepts arrays."""
    x = np.asarray(f, dtype=float) - p.f0
    t = p.T0 / ((1.0 + p.A * np.sin(p.d * x) ** 2)
                * (1.0 + p.B * np.sin(p.h * x) ** 2)
                * (1.0 + p.C * np.sin(p.g * x) ** 2))
    if np.ndim(f) == 0:
        return float(t)
    return t


def single_cavity_params(p: CavityFitParams, index: int) -> CavityFitParams:
    """Parameters describing one cavity of the cascade in isolation.

    ``index`` selects the (A, d), (B, h) or (C, g) pair; the other two
    contrasts are zeroed, so the returned profile has unit peak.
    """
    pairs = [(p.A, p.d), (p.B, p.h), (p.C, p.g)]
    if not 0 <= index < 3:
        raise IndexError("cavity index must be 0, 1 or 2")
    contrast, slope = pairs[index]
    return CavityFitParams(T0=1.0, A=contrast, B=0.0, C=0.0,
                           d=slope, h=slope, g=slope, f0=p.f0)


def extinction_ratio(p: CavityFitParams, offset: float) -> float:
    """Peak-to-offset transmission ratio T(f0) / T(f0 + offset)."""
    if offset == 0.0:
        return 1.0
    return cascade_transmission(p.f0, p) / cascade_transmission(p.f0 + offset, p)


def apply_filter(spectrum: SampledSpectrum, p: CavityFitParams) -> SampledSpectrum:
    """Pointwise product of a sampled spectrum with the cascade transmission."""
    t = cascade_transmission(spectrum.frequencies, p)
    return SampledSpectrum(spectrum.f_start, spectrum.f_step,
                           spectrum.values * t)


def cavity_for_fwhm(fwhm: float, free_spectral_range: float,
                    peak_transmission: float = 1.0,
                    f0: float = 0.0) -> CavityFitParams:
    """Single-cavity parameters with a given transmission-window FWHM.

    The contrast solves ``1 + A sin^2(d * fwhm/2) = 2`` for the phase slope
    implied by the free spectral range (``d = pi / FSR``).
    """
    if not (0 < fwhm < free_spectral_range):
        raise ValueError("need 0 < fwhm < free_spectral_range")
    d = np.pi / free_spectral_range
    a = 1.0 / np.sin(d * fwhm / 2.0) ** 2
    return CavityFitParams(T0=peak_transmission, A=a, B=0.0, C=0.0,
                           d=d, h=d, g=d, f0=f0)
