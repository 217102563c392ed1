"""Write-process emission model and the unconditional noise floor.

One write attempt creates ``n`` excitation/Stokes pairs with the single-mode
thermal distribution

    P(n) = lam^n / (1 + lam)^(n+1),

whose mean is ``lam``.  Uncorrelated background photons on each arm are
Poisson-distributed and independent of the pair process.  Noise means are
quoted at the pre-detection level (photons per trial entering the filter
chain); normalized correlations are invariant under common thinning of an
arm, so these means can be compared across different chain efficiencies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import NoiseParams

__all__ = [
    "EmissionModel",
    "TrialEmission",
    "DegenerateIntensityError",
    "excitation_probability",
    "sample_pair_number",
    "sample_emission",
    "analytic_g2",
    "unconditional_noise_mean",
    "detuning_profile_noise",
]


@dataclass(frozen=True)
class EmissionModel:
    """Mean pair number per attempt plus per-arm uncorrelated noise means."""

    lam: float
    noise_mean_stokes: float = 0.0
    noise_mean_antistokes: float = 0.0

    def __post_init__(self) -> None:
        if self.lam < 0:
            raise ValueError("lam must be >= 0")
        if self.noise_mean_stokes < 0 or self.noise_mean_antistokes < 0:
            raise ValueError("noise means must be >= 0")


@dataclass(frozen=True)
class TrialEmission:
    """Photon numbers created in one write/read attempt."""

    pair_count: int
    stokes_noise_count: int = 0
    antistokes_noise_count: int = 0

    def __post_init__(self) -> None:
        if min(self.pair_count, self.stokes_noise_count,
               self.antistokes_noise_count) < 0:
            raise ValueError("photon counts must be >= 0")


class DegenerateIntensityError(ZeroDivisionError):
    """A normalized correlation was requested for an arm with zero mean."""


def excitation_probability(write_energy: float, slope: float) -> float:
    """Excitation probability (mean pairs per attempt) for a write energy.

    Linear model: ``lam = slope * write_energy`` with the slope in units of
    pairs per joule.
    """
    if write_energy < 0:
        raise ValueError("write_energy must be >= 0")
    if slope < 0:
        raise ValueError("slope must be >= 0")
    return slope * write_energy


def sample_pair_number(lam: float, rng: np.random.Generator,
                       size: int | None = None):
    """Draw pair numbers from the thermal distribution with mean ``lam``.

    Returns a scalar int when ``size`` is None, else an int array.
    """
    if lam < 0:
        raise ValueError("lam must be >= 0")
    if lam == 0.0:
        return 0 if size is None else np.zeros(size, dtype=np.int64)
    # P(n) = lam^n/(1+lam)^(n+1) is geometric counting failures before the
    # first success with success probability 1/(1+lam).
    draw = rng.geometric(1.0 / (1.0 + lam), size=size)
    if size is None:
        return int(draw) - 1
    return draw.astype(np.int64) - 1


def sample_emission(model: EmissionModel, rng: np.random.Generator) -> TrialEmission:
    """Realize one write attempt from the emission model."""
    return TrialEmission(
        pair_count=sample_pair_number(model.lam, rng),
        stokes_noise_count=int(rng.poisson(model.noise_mean_stokes)),
        antistokes_noise_count=int(rng.poisson(model.noise_mean_antistokes)),
    )


def analytic_g2(model: EmissionModel,
                retrieval_efficiency: float = 1.0) -> tuple[float, float, float]:
    """Normalized second-order correlations of the two-arm photon numbers.

    The anti-Stokes arm receives a binomial thinning of the pair number with
    probability ``retrieval_efficiency``; both arms add their independent
    Poisson noise.  Returns ``(g2_cross, g2_auto_stokes, g2_auto_antistokes)``
    as photon-number moment ratios:

        g2_cross = <s a> / (<s><a>),  g2_auto = <x(x-1)> / <x>^2.

    With zero noise this reduces to ``g2_cross = 2 + 1/lam`` and both
    auto-correlations equal to 2.
    """
    if not (0.0 <= retrieval_efficiency <= 1.0):
        raise ValueError("retrieval_efficiency must be in [0, 1]")
    lam = model.lam
    nu_s = model.noise_mean_stokes
    nu_a = model.noise_mean_antistokes
    eta = retrieval_efficiency

    mean_s = lam + nu_s
    mean_a = eta * lam + nu_a
    if mean_s == 0.0 or mean_a == 0.0:
        raise DegenerateIntensityError(
            f"zero mean arm intensity (stokes={mean_s:g}, antistokes={mean_a:g})")

    # Thermal moments: <n^2> = 2 lam^2 + lam, <n(n-1)> = 2 lam^2.
    cross = (eta * (2.0 * lam**2 + lam) + lam * nu_a + nu_s * eta * lam
             + nu_s * nu_a) / (mean_s * mean_a)
    auto_s = (2.0 * lam**2 + 2.0 * lam * nu_s + nu_s**2) / mean_s**2
    mu_a = eta * lam  # thinning preserves thermal statistics
    auto_a = (2.0 * mu_a**2 + 2.0 * mu_a * nu_a + nu_a**2) / mean_a**2
    return cross, auto_s, auto_a


def detuning_profile_noise(noise: NoiseParams, detuning: float) -> float:
    """Additional mean noise photons at a read detuning, from the profile.

    The profile is a table of (detuning Hz, mean photons); lookups
    interpolate linearly between entries and clamp outside the table.
    An empty profile contributes zero.
    """
    profile = noise.detuning_noise_profile
    if not profile:
        return 0.0
    pts = sorted(profile)
    xs = np.array([p[0] for p in pts])
    ys = np.array([p[1] for p in pts])
    return float(np.interp(detuning, xs, ys))


def unconditional_noise_mean(read_energy: float, noise: NoiseParams, *,
                             dark_count_probability: float = 0.0,
                             detuning: float | None = None) -> float:
    """Mean anti-Stokes-arm noise photons per trial with the write disabled.

    Linear in the read energy:  slope * energy, plus the dark-count
    contribution and, when a detuning and profile are given, the
    fluorescence-leakage term.
    """
    if read_energy < 0:
        raise ValueError("read_energy must be >= 0")
    mean = noise.unconditional_noise_slope * read_energy + dark_count_probability
    if detuning is not None:
        mean += detuning_profile_noise(noise, detuning)
    return mean
