"""Storage and retrieval of the collective excitation.

The stored excitation carries a position-dependent phase exp(i dk . r) with
dk the write/Stokes wavevector mismatch.  Retrieval projects the moved,
phase-shifted ensemble back onto the Gaussian beam mode, so atomic motion
(diffusive in buffer gas, optionally ballistic) degrades the retrieval
efficiency through both transverse escape from the beam and longitudinal
dephasing of the stored grating.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import AtomEnsembleParams, thermal_speed
from .constants import CS_D2_WAVELENGTH, SPEED_OF_LIGHT
from .pairsource import EmissionModel, analytic_g2

__all__ = [
    "WaveVectors",
    "RetrievalCurve",
    "LifetimeFitParams",
    "EfficiencyEstimate",
    "collinear_wavevectors",
    "spin_wave_mismatch",
    "retrieval_efficiency_mc",
    "diffusion_efficiency_analytic",
    "g2_vs_time",
    "lifetime_1e",
    "efficiency_lifetime_mc",
]

_PHASE_MATCH_TOL = 1e-6


@dataclass(frozen=True)
class WaveVectors:
    """Write/read/Stokes/anti-Stokes wavevectors (rad/m, lab frame)."""

    k_write: np.ndarray
    k_read: np.ndarray
    k_stokes: np.ndarray
    k_antistokes: np.ndarray

    def __post_init__(self) -> None:
        for name in ("k_write", "k_read", "k_stokes", "k_antistokes"):
            vec = np.asarray(getattr(self, name), dtype=float)
            if vec.shape != (3,):
                raise ValueError(f"{name} must be a 3-vector")
            object.__setattr__(self, name, vec)
        mismatch = self.k_write + self.k_read - self.k_stokes - self.k_antistokes
        scale = np.linalg.norm(self.k_write)
        if scale == 0 or np.linalg.norm(mismatch) > _PHASE_MATCH_TOL * scale:
            raise ValueError(
                "phase matching violated: |k_W + k_R - k_S - k_AS| = "
                f"{np.linalg.norm(mismatch):.3g} rad/m")


@dataclass(frozen=True)
class RetrievalCurve:
    """Retrieval efficiency and cross-correlation versus storage time."""

    times: np.ndarray
    efficiency: np.ndarray
    efficiency_err: np.ndarray
    g2_cross: np.ndarray
    g2_err: np.ndarray

    def __post_init__(self) -> None:
        arrays = {}
        for name in ("times", "efficiency", "efficiency_err", "g2_cross", "g2_err"):
            arrays[name] = np.asarray(getattr(self, name), dtype=float)
            object.__setattr__(self, name, arrays[name])
        n = arrays["times"].size
        if any(a.size != n for a in arrays.values()):
            raise ValueError("all curve columns must have the same length")
        if np.any(np.diff(arrays["times"]) <= 0):
            raise ValueError("times must be strictly increasing")
        eff = arrays["efficiency"]
        if np.any((eff < 0) | (eff > 1)):
            raise ValueError("efficiencies must be in [0, 1]")

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["time_ns", "efficiency", "efficiency_err",
                             "g2", "g2_err"])
            for row in zip(self.times * 1e9, self.efficiency,
                           self.efficiency_err, self.g2_cross, self.g2_err):
                writer.writerow([format(v, ".10g") for v in row])


@dataclass(frozen=True)
class LifetimeFitParams:
    """Parameters of the decay model g2(t) = 1 + C/(1 + A t^2 + B t).

    The quadratic term reflects motion through the interaction region and
    is non-negative for physical fits; the linear term is a correction of
    either sign.
    """

    C: float
    A: float
    B: float

    def __post_init__(self) -> None:
        if self.C <= 0:
            raise ValueError("contrast C must be > 0")

    @property
    def is_physical(self) -> bool:
        return self.A >= 0


@dataclass(frozen=True)
class EfficiencyEstimate:
    value: float
    std_error: float


def collinear_wavevectors(atoms: AtomEnsembleParams,
                          wavelength: float = CS_D2_WAVELENGTH) -> WaveVectors:
    """Collinear beam geometry along +z with the hyperfine frequency offsets.

    The Stokes photon is red-shifted from the write beam by the ground-state
    splitting; the anti-Stokes balances the phase-matching sum.
    """
    k = 2.0 * np.pi / wavelength
    dk = 2.0 * np.pi * atoms.hyperfine_splitting / SPEED_OF_LIGHT
    z = np.array([0.0, 0.0, 1.0])
    k_write = k * z
    k_read = k * z
    k_stokes = (k - dk) * z
    k_antistokes = (k + dk) * z
    return WaveVectors(k_write, k_read, k_stokes, k_antistokes)


def spin_wave_mismatch(geometry: WaveVectors) -> float:
    """Magnitude of the stored-grating wavevector |k_write - k_stokes|."""
    return float(np.linalg.norm(geometry.k_write - geometry.k_stokes))


def _motion_displacements(atoms: AtomEnsembleParams, t: float, n: int,
                          rng: np.random.Generator, motion: str) -> np.ndarray:
    if motion == "diffusive":
        sigma = math.sqrt(2.0 * atoms.diffusion_coefficient * t)
        return rng.normal(0.0, sigma, size=(n, 3))
    if motion == "ballistic":
        v = rng.normal(0.0, thermal_speed(atoms), size=(n, 3))
        return v * t
    raise ValueError("motion must be 'diffusive' or 'ballistic'")


def retrieval_efficiency_mc(t: float, atoms: AtomEnsembleParams, dk: float,
                            rng: np.random.Generator, n_atoms: int = 200_000,
                            motion: str = "diffusive") -> EfficiencyEstimate:
    """Monte Carlo retrieval efficiency after a storage time ``t``.

    Atom creation positions are importance-sampled from the beam intensity;
    each atom then moves by the chosen motion model and contributes the
    complex weight

        exp(i dk dz) * u(r + dr) / u(r)

    with u the Gaussian mode amplitude (1/e^2 intensity radius
    ``beam_waist``).  The efficiency is the squared modulus of the mean
    weight, exactly 1 at t = 0.
    """
    if t < 0:
        raise ValueError("storage time must be >= 0")
    if n_atoms < 100:
        raise ValueError("need n_atoms >= 100")
    if t == 0.0:
        return EfficiencyEstimate(1.0, 0.0)
    w = atoms.beam_waist
    # intensity exp(-2 r^2/w^2) per transverse axis -> std w/2
    r0 = rng.normal(0.0, w / 2.0, size=(n_atoms, 2))
    dr = _motion_displacements(atoms, t, n_atoms, rng, motion)
    amp_ratio = np.exp(-(2.0 * (r0 * dr[:, :2]).sum(axis=1)
                         + (dr[:, :2] ** 2).sum(axis=1)) / w**2)
    phase = dk * dr[:, 2]
    wr = amp_ratio * np.cos(phase)
    wi = amp_ratio * np.sin(phase)
    mean_r = wr.mean()
    mean_i = wi.mean()
    eff = mean_r**2 + mean_i**2
    var_r = wr.var(ddof=1) / n_atoms
    var_i = wi.var(ddof=1) / n_atoms
    # first-order propagation of |mean|^2
    err = 2.0 * math.sqrt(mean_r**2 * var_r + mean_i**2 * var_i)
    return EfficiencyEstimate(float(min(eff, 1.0)), float(err))


def diffusion_efficiency_analytic(t, atoms: AtomEnsembleParams, dk: float = 0.0):
    """Closed form of the diffusive retrieval decay (drift-free Gaussian beam).

    eta(t) = exp(-2 D dk^2 t) / (1 + 2 D t / w^2)^2; useful as an
    independent check of the Monte Carlo estimator.
    """
    t = np.asarray(t, dtype=float)
    a = 2.0 * atoms.diffusion_coefficient * t / atoms.beam_waist**2
    return np.exp(-2.0 * atoms.diffusion_coefficient * dk**2 * t) / (1.0 + a) ** 2


def g2_vs_time(model: EmissionModel, times, efficiencies,
               efficiency_errs=None) -> RetrievalCurve:
    """Compose the cross-correlation curve from an efficiency-vs-time curve.

    Each point evaluates the analytic correlation with the retrieval
    efficiency at that time; the noise means stay fixed.  Efficiency errors
    propagate to g2 through the derivative of the analytic expression.
    """
    times = np.asarray(times, dtype=float)
    eff = np.asarray(efficiencies, dtype=float)
    if efficiency_errs is None:
        errs = np.zeros_like(eff)
    else:
        errs = np.asarray(efficiency_errs, dtype=float)

    g2 = np.empty_like(eff)
    g2e = np.empty_like(eff)
    for i, (e, se) in enumerate(zip(eff, errs)):
        g2[i] = analytic_g2(model, e)[0]
        if se > 0:
            step = max(1e-6, se / 10.0)
            lo = max(e - step, 0.0)
            hi = min(e + step, 1.0)
            slope = (analytic_g2(model, hi)[0] - analytic_g2(model, lo)[0]) / (hi - lo)
            g2e[i] = abs(slope) * se
        else:
            g2e[i] = 0.0
    return RetrievalCurve(times, eff, errs, g2, g2e)


def lifetime_1e(fit: LifetimeFitParams) -> float:
    """Storage time at which the excess correlation g2 - 1 falls to 1/e.

    Solves C/(1 + A t^2 + B t) = C/e, i.e. the positive root of
    A t^2 + B t = e - 1.  The 1/e point refers to g2 - 1 (not g2 itself):
    with only accidental coincidences left, g2 tends to 1, so the excess is
    the decaying quantity.
    """
    target = math.e - 1.0
    if fit.A == 0.0 and fit.B == 0.0:
        raise ValueError("no positive root: A = B = 0 never decays")
    if fit.A == 0.0:
        t = target / fit.B
        if t <= 0:
            raise ValueError("no positive root for the given B")
        return t
    disc = fit.B**2 + 4.0 * fit.A * target
    if disc < 0:
        raise ValueError("no real root for the given A, B")
    t = (-fit.B + math.sqrt(disc)) / (2.0 * fit.A)
    if t <= 0:
        raise ValueError("no positive root for the given A, B")
    return t


def efficiency_lifetime_mc(atoms: AtomEnsembleParams, dk: float, seed: int,
                           n_atoms: int = 200_000, motion: str = "diffusive",
                           t_max: float | None = None,
                           n_points: int = 48) -> float:
    """1/e point of the Monte Carlo retrieval-efficiency curve, in seconds.

    Scans a time grid, then interpolates the crossing of 1/e.  The grid
    upper end defaults to several analytic 1/e times of the diffusive model.
    """
    if t_max is None:
        t_unit = (math.sqrt(math.e) - 1.0) * atoms.beam_waist**2 / (
            2.0 * atoms.diffusion_coefficient)
        t_max = 4.0 * t_unit
    times = np.linspace(0.0, t_max, n_points)
    effs = np.empty_like(times)
    for i, t in enumerate(times):
        rng = np.random.default_rng(np.random.SeedSequence([seed, i]))
        effs[i] = retrieval_efficiency_mc(float(t), atoms, dk, rng,
                                          n_atoms=n_atoms, motion=motion).value
    target = 1.0 / math.e
    below = np.flatnonzero(effs < target)
    if below.size == 0:
        raise ValueError("efficiency never reached 1/e on the scanned grid")
    j = int(below[0])
    if j == 0:
        raise ValueError("efficiency already below 1/e at t = 0")
    frac = (effs[j - 1] - target) / (effs[j - 1] - effs[j])
    return float(times[j - 1] + frac * (times[j] - times[j - 1]))
