"""Click detectors, count accumulation, and correlation estimators.

Detectors are threshold (non-photon-number-resolving) avalanche-photodiode
style: a detector clicks when at least one photon survives its arm or a
dark count fires.  One trial is one write/read attempt and is its own
coincidence window.  The click-based correlation estimator

    g2 = n_coincidence * trials / (n_singles_1 * n_singles_2)

converges to the photon-number correlation in the low-efficiency (linear)
regime; at high arm efficiency and high pair rate it is biased low because
multi-photon events produce single clicks.

Trial batches draw from generator streams derived deterministically from
(seed, stream index, batch index), so accumulated counts are reproducible
for a fixed seed regardless of how batches are distributed over workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .config import DetectionParams
from .optics import ArmEfficiency
from .pairsource import EmissionModel, TrialEmission

__all__ = [
    "ClickRecord",
    "CountsTable",
    "G2Estimate",
    "CSResult",
    "InsufficientCountsError",
    "simulate_trial",
    "simulate_counts",
    "g2_cross_estimate",
    "g2_auto_estimate",
    "cauchy_schwarz_test",
    "heralding_efficiency",
    "DEFAULT_BATCH_SIZE",
]

DEFAULT_BATCH_SIZE = 250_000


class InsufficientCountsError(ValueError):
    """An estimator denominator count is zero."""


@dataclass(frozen=True)
class ClickRecord:
    """Detector outcomes of a single trial."""

    stokes_click: bool = False
    antistokes_click: bool = False
    hbt_arm1_click: bool = False
    hbt_arm2_click: bool = False


@dataclass(frozen=True)
class CountsTable:
    """Accumulated trial and click counters.

    Cross-scheme trials fill the singles/coincidence counters; HBT
    (auto-correlation) trials fill the arm counters.  Merging tables is a
    plain field-wise sum, so accumulation is associative and commutative.
    """

    trials: int = 0
    n_stokes: int = 0
    n_antistokes: int = 0
    n_coincidence: int = 0
    n_arm1: int = 0
    n_arm2: int = 0
    n_arm_coincidence: int = 0

    def __post_init__(self) -> None:
        counts = (self.n_stokes, self.n_antistokes, self.n_coincidence,
                  self.n_arm1, self.n_arm2, self.n_arm_coincidence)
        if self.trials < 0 or min(counts) < 0:
            raise ValueError("counts must be >= 0")
        if max(counts) > self.trials:
            raise ValueError("no count can exceed the number of trials")
        if self.n_coincidence > min(self.n_stokes, self.n_antistokes):
            raise ValueError("coincidences cannot exceed either singles count")
        if self.n_arm_coincidence > min(self.n_arm1, self.n_arm2):
            raise ValueError("arm coincidences cannot exceed either arm count")

    def __add__(self, other: "CountsTable") -> "CountsTable":
        return CountsTable(
            trials=self.trials + other.trials,
            n_stokes=self.n_stokes + other.n_stokes,
            n_antistokes=self.n_antistokes + other.n_antistokes,
            n_coincidence=self.n_coincidence + other.n_coincidence,
            n_arm1=self.n_arm1 + other.n_arm1,
            n_arm2=self.n_arm2 + other.n_arm2,
            n_arm_coincidence=self.n_arm_coincidence + other.n_arm_coincidence,
        )


@dataclass(frozen=True)
class G2Estimate:
    """A correlation value with its Poissonian standard error."""

    value: float
    std_error: float

    def __post_init__(self) -> None:
        if self.value < 0 or self.std_error < 0:
            raise ValueError("value and std_error must be >= 0")


@dataclass(frozen=True)
class CSResult:
    """Outcome of the Cauchy-Schwarz test (g2_cross^2 vs g2_SS * g2_ASAS)."""

    ratio: float
    excess: float
    significance: float


def simulate_trial(emission: TrialEmission, retrieval_eff: float,
                   arm_stokes: ArmEfficiency, arm_antistokes: ArmEfficiency,
                   det: DetectionParams, rng: np.random.Generator,
                   hbt_species: str = "stokes") -> ClickRecord:
    """Simulate the detection of one emitted trial.

    Every photon independently survives its arm with the composed arm
    efficiency; a detector clicks when at least one photon survives or a
    dark count fires.  In the ``auto_hbt`` scheme the photons of
    ``hbt_species`` pass a fair 50:50 splitter onto two detectors and the
    cross-channel fields of the record stay unset.
    """
    dark = det.dark_count_probability
    if det.coincidence_scheme == "auto_hbt":
        if hbt_species == "stokes":
            photons = emission.pair_count + emission.stokes_noise_count
            e_tot = arm_stokes.total
        elif hbt_species == "antistokes":
            retrieved = rng.binomial(emission.pair_count, retrieval_eff)
            photons = retrieved + emission.antistokes_noise_count
            e_tot = arm_antistokes.total
        else:
            raise ValueError("hbt_species must be 'stokes' or 'antistokes'")
        n1 = rng.binomial(photons, e_tot / 2.0)
        rest = photons - n1
        n2 = rng.binomial(rest, (e_tot / 2.0) / (1.0 - e_tot / 2.0)) \
            if e_tot < 2.0 else rest
        click1 = n1 > 0 or rng.random() < dark
        click2 = n2 > 0 or rng.random() < dark
        return ClickRecord(hbt_arm1_click=bool(click1),
                           hbt_arm2_click=bool(click2))

    s_photons = emission.pair_count + emission.stokes_noise_count
    s_survivors = rng.binomial(s_photons, arm_stokes.total)
    retrieved = rng.binomial(emission.pair_count, retrieval_eff)
    a_photons = retrieved + emission.antistokes_noise_count
    a_survivors = rng.binomial(a_photons, arm_antistokes.total)
    s_click = s_survivors > 0 or rng.random() < dark
    a_click = a_survivors > 0 or rng.random() < dark
    return ClickRecord(stokes_click=bool(s_click),
                       antistokes_click=bool(a_click))


def _batch_counts(model: EmissionModel, retrieval_eff: float,
                  e_stokes: float, e_antistokes: float, dark: float,
                  scheme: str, hbt_species: str, n: int,
                  rng: np.random.Generator) -> tuple[int, ...]:
    """Simulate one batch of trials with vectorized draws.

    Clicks are sampled from the exact conditional no-click probabilities
    given the photon numbers; detectors are conditionally independent, so
    one uniform per detector reproduces the per-photon thinning statistics.
    """
    lam = model.lam
    if lam > 0:
        pairs = rng.geometric(1.0 / (1.0 + lam), size=n).astype(np.int64) - 1
    else:
        pairs = np.zeros(n, dtype=np.int64)

    if scheme == "auto_hbt":
        if hbt_species == "stokes":
            photons = pairs + rng.poisson(model.noise_mean_stokes, size=n)
            e_tot = e_stokes
        else:
            retrieved = rng.binomial(pairs, retrieval_eff)
            photons = retrieved + rng.poisson(model.noise_mean_antistokes, size=n)
            e_tot = e_antistokes
        half = e_tot / 2.0
        p_no1 = (1.0 - half) ** photons
        p_none = (1.0 - e_tot) ** photons
        u1 = rng.random(n)
        u2 = rng.random(n)
        # joint: P(no1, no2) = p_none, marginals p_no1 each; sample arm1
        # from its marginal, then arm2 from the conditional.
        no1 = u1 < p_no1
        cond = np.where(no1, p_none / np.maximum(p_no1, 1e-300),
                        (p_no1 - p_none) / np.maximum(1.0 - p_no1, 1e-300))
        no2 = u2 < cond
        d1 = rng.random(n) < dark
        d2 = rng.random(n) < dark
        c1 = ~no1 | d1
        c2 = ~no2 | d2
        return (n, 0, 0, 0, int(c1.sum()), int(c2.sum()), int((c1 & c2).sum()))

    s_photons = pairs + rng.poisson(model.noise_mean_stokes, size=n)
    retrieved = rng.binomial(pairs, retrieval_eff)
    a_photons = retrieved + rng.poisson(model.noise_mean_antistokes, size=n)
    p_no_s = (1.0 - e_stokes) ** s_photons * (1.0 - dark)
    p_no_a = (1.0 - e_antistokes) ** a_photons * (1.0 - dark)
    c_s = rng.random(n) >= p_no_s
    c_a = rng.random(n) >= p_no_a
    return (n, int(c_s.sum()), int(c_a.sum()), int((c_s & c_a).sum()), 0, 0, 0)


def simulate_counts(model: EmissionModel, retrieval_eff: float,
                    arm_stokes: ArmEfficiency, arm_antistokes: ArmEfficiency,
                    det: DetectionParams, trials: int, seed: int,
                    stream: int = 0, hbt_species: str = "stokes",
                    threads: int = 1,
                    batch_size: int = DEFAULT_BATCH_SIZE) -> CountsTable:
    """Accumulate a CountsTable over ``trials`` attempts.

    The trial stream is split into fixed-size batches; batch ``i`` draws
    from the generator seeded by ``(seed, stream, i)``.  Results are
    therefore identical for any ``threads`` value and any batch scheduling.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    scheme = det.coincidence_scheme
    sizes = [batch_size] * (trials // batch_size)
    if trials % batch_size:
        sizes.append(trials % batch_size)

    def run_batch(i: int) -> tuple[int, ...]:
        rng = np.random.default_rng(np.random.SeedSequence([seed, stream, i]))
        return _batch_counts(model, retrieval_eff, arm_stokes.total,
                             arm_antistokes.total, det.dark_count_probability,
                             scheme, hbt_species, sizes[i], rng)

    if threads > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_batch, range(len(sizes))))
    else:
        results = [run_batch(i) for i in range(len(sizes))]

    totals = [0] * 7
    for row in results:  # fixed batch order keeps the merge reproducible
        for j, value in enumerate(row):
            totals[j] += value
    return CountsTable(*totals)


def _poisson_rel_err(*counts: int) -> float:
    return math.sqrt(sum(1.0 / max(c, 1) for c in counts))


def g2_cross_estimate(counts: CountsTable) -> G2Estimate:
    """Cross-correlation estimate from singles and coincidence counts.

    ``g2 = n_coincidence * trials / (n_stokes * n_antistokes)`` with the
    standard error from first-order propagation of independent Poisson
    fluctuations on the three counts.  A zero coincidence count keeps the
    value at zero and reports the error computed as if one coincidence had
    been seen.
    """
    if counts.n_stokes == 0 or counts.n_antistokes == 0:
        raise InsufficientCountsError(
            "need nonzero Stokes and anti-Stokes singles counts")
    value = counts.n_coincidence * counts.trials / (
        counts.n_stokes * counts.n_antistokes)
    scale = value if counts.n_coincidence > 0 else (
        counts.trials / (counts.n_stokes * counts.n_antistokes))
    err = scale * _poisson_rel_err(counts.n_coincidence, counts.n_stokes,
                                   counts.n_antistokes)
    return G2Estimate(value, err)


def g2_auto_estimate(counts: CountsTable) -> G2Estimate:
    """Auto-correlation estimate from the split-arm counts (same estimator)."""
    if counts.n_arm1 == 0 or counts.n_arm2 == 0:
        raise InsufficientCountsError("need nonzero counts on both HBT arms")
    value = counts.n_arm_coincidence * counts.trials / (
        counts.n_arm1 * counts.n_arm2)
    scale = value if counts.n_arm_coincidence > 0 else (
        counts.trials / (counts.n_arm1 * counts.n_arm2))
    err = scale * _poisson_rel_err(counts.n_arm_coincidence, counts.n_arm1,
                                   counts.n_arm2)
    return G2Estimate(value, err)


def cauchy_schwarz_test(cross: G2Estimate, auto_s: G2Estimate,
                        auto_as: G2Estimate) -> CSResult:
    """Cauchy-Schwarz test with first-order error propagation.

    Classical fields satisfy (g2_cross)^2 <= g2_SS * g2_ASAS; a positive
    ``excess`` certifies nonclassical correlation, quantified by
    ``significance = excess / sigma_excess``.
    """
    ratio = cross.value**2 / (auto_s.value * auto_as.value)
    excess = cross.value**2 - auto_s.value * auto_as.value
    var = ((2.0 * cross.value * cross.std_error) ** 2
           + (auto_as.value * auto_s.std_error) ** 2
           + (auto_s.value * auto_as.std_error) ** 2)
    sigma = math.sqrt(var)
    significance = excess / sigma if sigma > 0 else math.inf
    return CSResult(ratio=ratio, excess=excess, significance=significance)


def heralding_efficiency(counts: CountsTable, antistokes_chain_eff: float) -> float:
    """Retrieval probability per herald, corrected for the detection chain.

    Divides the coincidence count by the Stokes singles count and the total
    detection efficiency of the anti-Stokes photons.
    """
    if counts.n_stokes == 0:
        raise InsufficientCountsError("no Stokes counts to herald on")
    if not (0.0 < antistokes_chain_eff <= 1.0):
        raise ValueError("antistokes_chain_eff must be in (0, 1]")
    return counts.n_coincidence / (counts.n_stokes * antistokes_chain_eff)
