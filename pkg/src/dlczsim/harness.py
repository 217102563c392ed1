"""Scenario runner: wires the modules into end-to-end measurement
reproductions, manages seeds, and emits CSV data, SVG plots, and a
structured JSON run report.

Every random number in a scenario derives from ``(config seed, stream,
batch)`` through fixed-size batches, so outputs are byte-identical for a
fixed seed no matter how many worker threads execute the sweep.
"""

from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import calibration, spectral
from .config import ExperimentConfig, validate_config
from .configio import KNOWN_KEYS, apply_key
from .detection import (
    CountsTable,
    cauchy_schwarz_test,
    g2_auto_estimate,
    g2_cross_estimate,
    heralding_efficiency,
    simulate_counts,
)
from .optics import cascade_transmission
from .pairsource import EmissionModel, analytic_g2, unconditional_noise_mean
from .spectral import (
    DeconvolutionSettings,
    SampledSpectrum,
    convolve_spectra,
    deconvolve_spectrum,
    fit_cavity_profile,
    fit_gaussian_scan,
    fit_lifetime_curve,
    format_fit_report,
    fwhm,
    gaussian_scan_model,
    spectrum_to_csv,
)
from .spinwave import g2_vs_time, lifetime_1e, retrieval_efficiency_mc
from .svgplot import PlotSpec, export_svg

__all__ = [
    "SCENARIOS",
    "ScenarioSpec",
    "RunReport",
    "run_scenario",
    "run_from_report",
    "time_bandwidth_product",
    "PHOTON_BANDWIDTH_STOKES",
    "PHOTON_BANDWIDTH_ANTISTOKES",
]

SCENARIOS = (
    "noise_vs_read_power",
    "g2_vs_power",
    "lambda_vs_power",
    "bandwidth_measurement",
    "lifetime_vs_time",
    "cs_violation",
    "tbp_report",
)

# Target photon bandwidths used by the bandwidth scenario's forward model.
PHOTON_BANDWIDTH_STOKES = 504e6
PHOTON_BANDWIDTH_ANTISTOKES = 537e6

_PJ = 1e-12

# stream roles: keep sub-runs of one sweep point on disjoint streams
_ROLE_CROSS, _ROLE_AUTO_S, _ROLE_AUTO_AS, _ROLE_NOISE = 0, 1, 2, 3
_STREAMS_PER_POINT = 8


@dataclass(frozen=True)
class ScenarioSpec:
    """One scenario invocation: scenario id, config, optional sweep."""

    scenario_id: str
    base_config: ExperimentConfig
    sweep: tuple[str, tuple[float, ...]] | None = None
    output_dir: str = "."
    threads: int = 1

    def __post_init__(self) -> None:
        if self.scenario_id not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario_id!r}; "
                             f"choose from {SCENARIOS}")
        if self.sweep is not None:
            name, values = self.sweep
            if name not in KNOWN_KEYS:
                raise ValueError(f"sweep parameter {name!r} is not a config "
                                 "key; see the config-file schema")
            if len(values) == 0:
                raise ValueError("sweep value list must be non-empty")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")


@dataclass
class RunReport:
    """Structured record of one scenario run."""

    scenario_id: str
    seed: int
    config: dict
    points: list[dict] = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    artifacts: list[str] = field(default_factory=list)
    failed_points: list[int] = field(default_factory=list)
    wall_time_s: float = 0.0

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(asdict(self), indent=2,
                                         sort_keys=True) + "\n")

    @staticmethod
    def load(path: str | Path) -> "RunReport":
        data = json.loads(Path(path).read_text())
        return RunReport(**data)


def time_bandwidth_product(lifetime: float, pulse_duration: float,
                           bandwidth: float) -> dict[str, float]:
    """Both time-bandwidth-product figures, labeled.

    The two conventions (lifetime over pulse duration; lifetime times
    acceptance bandwidth) do not agree in general, so both are always
    reported and neither is silently preferred.
    """
    if min(lifetime, pulse_duration, bandwidth) <= 0:
        raise ValueError("lifetime, pulse_duration and bandwidth must be > 0")
    return {
        "tbp_by_duration": lifetime / pulse_duration,
        "tbp_by_bandwidth": lifetime * bandwidth,
    }


# ---------------------------------------------------------------------------
# helpers


def _config_to_dict(cfg: ExperimentConfig) -> dict:
    return asdict(cfg)


def _config_from_dict(data: dict) -> ExperimentConfig:
    from .config import (AtomEnsembleParams, DetectionParams, NoiseParams,
                         PulseParams)

    noise = dict(data["noise"])
    noise["detuning_noise_profile"] = tuple(
        tuple(pair) for pair in noise.get("detuning_noise_profile", ()))
    return ExperimentConfig(
        atoms=AtomEnsembleParams(**data["atoms"]),
        pulses=PulseParams(**data["pulses"]),
        detection=DetectionParams(**data["detection"]),
        noise=NoiseParams(**noise),
        excitation_slope=data["excitation_slope"],
        trials=data["trials"],
        storage_time=data["storage_time"],
        rng_seed=data["rng_seed"],
    )


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([format(v, ".10g") if isinstance(v, float) else v
                             for v in row])


def _sweep_configs(spec: ScenarioSpec) -> list[tuple[float, ExperimentConfig]]:
    if spec.sweep is None:
        return [(float("nan"), spec.base_config)]
    name, values = spec.sweep
    out = []
    for value in values:
        cfg = apply_key(spec.base_config, name, repr(value))
        out.append((float(value), cfg))
    return out


def _run_points(spec: ScenarioSpec, worker) -> tuple[list[dict], list[int]]:
    """Run one worker per sweep point, tolerating per-point failures."""
    configs = _sweep_configs(spec)

    def guarded(i: int) -> dict:
        value, cfg = configs[i]
        try:
            out = worker(i, value, cfg)
            out["failed"] = False
            return out
        except Exception as exc:  # point failures must not kill the sweep
            return {"point": i, "sweep_value": value, "failed": True,
                    "error": f"{type(exc).__name__}: {exc}"}

    if spec.threads > 1 and len(configs) > 1:
        with ThreadPoolExecutor(max_workers=spec.threads) as pool:
            points = list(pool.map(guarded, range(len(configs))))
    else:
        points = [guarded(i) for i in range(len(configs))]
    failed = [p["point"] for p in points if p["failed"]]
    return points, failed


# ---------------------------------------------------------------------------
# scenario workers


def _noise_scenario(spec: ScenarioSpec, out: Path, report: RunReport) -> None:
    base = spec.base_config
    if spec.sweep is None:
        spec = ScenarioSpec(spec.scenario_id, base,
                            sweep=("pulses.energy_pj",
                                   (0.0, 10.0, 20.0, 30.0, 40.0, 50.0, 60.0)),
                            output_dir=spec.output_dir, threads=spec.threads)
    _, arm_as = calibration.arm_pair(base)

    def worker(i: int, value: float, cfg: ExperimentConfig) -> dict:
        noise_mean = unconditional_noise_mean(
            cfg.pulses.energy, cfg.noise,
            dark_count_probability=cfg.detection.dark_count_probability)
        model = EmissionModel(lam=0.0, noise_mean_stokes=0.0,
                              noise_mean_antistokes=cfg.noise.unconditional_noise_slope
                              * cfg.pulses.energy)
        counts = simulate_counts(
            model, 0.0, calibration.STOKES_ARM, arm_as, cfg.detection,
            cfg.trials, cfg.rng_seed,
            stream=i * _STREAMS_PER_POINT + _ROLE_NOISE)
        clicks = counts.n_antistokes / counts.trials
        err = np.sqrt(max(counts.n_antistokes, 1)) / counts.trials
        expected = 1.0 - (1.0 - cfg.detection.dark_count_probability) * np.exp(
            -arm_as.total * model.noise_mean_antistokes)
        return {"point": i, "sweep_value": value,
                "read_pj": cfg.pulses.energy / _PJ,
                "noise_mean_photons": noise_mean,
                "clicks_per_trial": clicks, "clicks_err": float(err),
                "expected_clicks": float(expected)}

    points, failed = _run_points(spec, worker)
    rows = [[p["read_pj"], p["noise_mean_photons"], p["clicks_per_trial"],
             p["clicks_err"], p["expected_clicks"]]
            for p in points if not p["failed"]]
    csv_path = out / "noise_vs_read_power.csv"
    _write_csv(csv_path, ["read_pj", "noise_mean_photons", "clicks_per_trial",
                          "clicks_err", "expected_clicks"], rows)
    svg = export_svg(csv_path, PlotSpec("read_pj", "clicks_per_trial",
                                        yerr="clicks_err",
                                        title="Unconditional noise vs read energy"),
                     out / "noise_vs_read_power.svg")
    report.points = points
    report.failed_points = failed
    report.artifacts += [csv_path.name, Path(svg).name]


def _g2_power_scenario(spec: ScenarioSpec, out: Path, report: RunReport) -> None:
    base = spec.base_config
    if spec.sweep is None:
        spec = ScenarioSpec(spec.scenario_id, base,
                            sweep=("pulses.energy_pj",
                                   (20.0, 40.0, 60.0, 80.0, 100.0, 129.0,
                                    160.0, 200.0)),
                            output_dir=spec.output_dir, threads=spec.threads)
    arm_s, arm_as = calibration.arm_pair(base)

    def worker(i: int, value: float, cfg: ExperimentConfig) -> dict:
        model = calibration.emission_model_for(cfg)
        counts = simulate_counts(
            model, calibration.RETRIEVAL_EFFICIENCY, arm_s, arm_as,
            cfg.detection, cfg.trials, cfg.rng_seed,
            stream=i * _STREAMS_PER_POINT + _ROLE_CROSS)
        est = g2_cross_estimate(counts)
        analytic = analytic_g2(model, calibration.RETRIEVAL_EFFICIENCY)[0]
        return {"point": i, "sweep_value": value,
                "energy_pj": cfg.pulses.energy / _PJ,
                "g2_cross": est.value, "g2_err": est.std_error,
                "g2_analytic": analytic}

    points, failed = _run_points(spec, worker)
    rows = [[p["energy_pj"], p["g2_cross"], p["g2_err"], p["g2_analytic"]]
            for p in points if not p["failed"]]
    csv_path = out / "g2_vs_power.csv"
    _write_csv(csv_path, ["energy_pj", "g2_cross", "g2_err", "g2_analytic"], rows)
    svg = export_svg(csv_path, PlotSpec("energy_pj", "g2_cross", yerr="g2_err",
                                        title="Cross-correlation vs pulse energy"),
                     out / "g2_vs_power.svg")
    report.points = points
    report.failed_points = failed
    report.artifacts += [csv_path.name, Path(svg).name]


def _lambda_power_scenario(spec: ScenarioSpec, out: Path, report: RunReport) -> None:
    base = spec.base_config
    if spec.sweep is None:
        spec = ScenarioSpec(spec.scenario_id, base,
                            sweep=("pulses.energy_pj",
                                   (20.0, 40.0, 60.0, 80.0, 100.0, 129.0,
                                    160.0, 200.0)),
                            output_dir=spec.output_dir, threads=spec.threads)
    arm_s, arm_as = calibration.arm_pair(base)

    def worker(i: int, value: float, cfg: ExperimentConfig) -> dict:
        model = calibration.emission_model_for(cfg)
        counts = simulate_counts(
            model, calibration.RETRIEVAL_EFFICIENCY, arm_s, arm_as,
            cfg.detection, cfg.trials, cfg.rng_seed,
            stream=i * _STREAMS_PER_POINT + _ROLE_CROSS)
        # invert the thermal click probability for an unbiased rate estimate
        e_s = arm_s.total
        p_no = 1.0 - counts.n_stokes / counts.trials
        correction = np.exp(-e_s * model.noise_mean_stokes) * (
            1.0 - cfg.detection.dark_count_probability)
        lam_est = (correction / p_no - 1.0) / e_s if p_no > 0 else float("nan")
        p = counts.n_stokes / counts.trials
        dp = np.sqrt(p * (1.0 - p) / counts.trials)
        lam_err = correction / (p_no**2 * e_s) * dp if p_no > 0 else float("nan")
        return {"point": i, "sweep_value": value,
                "energy_pj": cfg.pulses.energy / _PJ,
                "lambda_model": model.lam, "lambda_est": float(lam_est),
                "lambda_err": float(lam_err)}

    points, failed = _run_points(spec, worker)
    rows = [[p["energy_pj"], p["lambda_model"], p["lambda_est"], p["lambda_err"]]
            for p in points if not p["failed"]]
    csv_path = out / "lambda_vs_power.csv"
    _write_csv(csv_path, ["energy_pj", "lambda_model", "lambda_est",
                          "lambda_err"], rows)
    svg = export_svg(csv_path, PlotSpec("energy_pj", "lambda_est",
                                        yerr="lambda_err",
                                        title="Excitation probability vs energy"),
                     out / "lambda_vs_power.svg")
    report.points = points
    report.failed_points = failed
    report.artifacts += [csv_path.name, Path(svg).name]


def _bandwidth_scenario(spec: ScenarioSpec, out: Path, report: RunReport) -> None:
    cfg = spec.base_config
    rng = np.random.default_rng(np.random.SeedSequence([cfg.rng_seed, 0]))
    grid_start, step, n = -3e9, 10e6, 601
    freqs = grid_start + step * np.arange(n)
    truth = calibration.default_cascade()
    settings = DeconvolutionSettings()

    points = []
    for idx, (species, target) in enumerate(
            (("stokes", PHOTON_BANDWIDTH_STOKES),
             ("antistokes", PHOTON_BANDWIDTH_ANTISTOKES))):
        t_clean = cascade_transmission(freqs, truth)
        scan = t_clean * (1.0 + 0.01 * rng.standard_normal(n))
        scan_spec = SampledSpectrum(grid_start, step, np.maximum(scan, 0.0))
        fitted, cavity_fit = fit_cavity_profile(
            scan_spec,
            initial_params=np.array([truth.T0, truth.A, truth.B, truth.C,
                                     truth.d, truth.h, truth.g, truth.f0]),
            sigma=0.01 * np.maximum(scan_spec.values, 1e-6 * truth.T0))

        d_param = target / np.sqrt(2.0 * np.log(2.0))
        s_true = SampledSpectrum(grid_start, step,
                                 gaussian_scan_model(freqs, 100.0, 0.0,
                                                     d_param, 0.0))
        u_clean = convolve_spectra(s_true, SampledSpectrum(grid_start, step,
                                                           t_clean))
        signal = u_clean.values * (100.0 / u_clean.values.max())
        u_noisy = signal * (1.0 + 0.01 * rng.standard_normal(n)) + 2.0
        u_spec = SampledSpectrum(grid_start, step, np.maximum(u_noisy, 0.0))
        scan_fit, _ = fit_gaussian_scan(u_spec)

        kernel = SampledSpectrum(grid_start, step,
                                 cascade_transmission(freqs, fitted))
        result = deconvolve_spectrum(u_spec, scan_fit.U0, kernel, settings)
        recovered = fwhm(result.spectrum)

        scan_name = f"cavity_scan_{species}.csv"
        u_name = f"photon_scan_{species}.csv"
        rec_name = f"recovered_{species}.csv"
        fit_name = f"cavity_fit_{species}.txt"
        spectrum_to_csv(scan_spec, out / scan_name, value_name="transmission")
        spectrum_to_csv(u_spec, out / u_name, value_name="counts")
        spectrum_to_csv(result.spectrum, out / rec_name,
                        value_name="spectral_density")
        (out / fit_name).write_text(
            format_fit_report(cavity_fit, title=f"{species} cascade"))
        svg = export_svg(out / rec_name,
                         PlotSpec("freq_MHz", "spectral_density",
                                  title=f"Recovered {species} spectrum"),
                         out / f"recovered_{species}.svg")
        report.artifacts += [scan_name, u_name, rec_name, fit_name,
                             Path(svg).name]
        points.append({
            "point": idx, "sweep_value": float("nan"), "species": species,
            "target_fwhm_mhz": target / 1e6,
            "recovered_fwhm_mhz": recovered / 1e6,
            "scan_fwhm_mhz": scan_fit.fwhm / 1e6,
            "baseline": scan_fit.U0,
            "clipped_fraction": result.clipped_fraction,
        })

    csv_path = out / "bandwidth_measurement.csv"
    _write_csv(csv_path,
               ["species", "target_fwhm_mhz", "recovered_fwhm_mhz",
                "scan_fwhm_mhz", "clipped_fraction"],
               [[p["species"], p["target_fwhm_mhz"], p["recovered_fwhm_mhz"],
                 p["scan_fwhm_mhz"], p["clipped_fraction"]] for p in points])
    report.artifacts.append(csv_path.name)
    for p in points:
        p["failed"] = False
    report.points = points
    report.summary = {f"{p['species']}_fwhm_mhz": p["recovered_fwhm_mhz"]
                      for p in points}


def _lifetime_curve(cfg: ExperimentConfig, n_points: int = 12,
                    t_max: float = 3e-6, n_atoms: int = 200_000):
    """Composed g2(t) curve at the calibrated operating point."""
    from .spinwave import collinear_wavevectors, spin_wave_mismatch

    model = calibration.emission_model_for(cfg)
    dk = spin_wave_mismatch(collinear_wavevectors(cfg.atoms))
    times = np.linspace(0.0, t_max, n_points)
    effs = np.empty(n_points)
    errs = np.empty(n_points)
    for i, t in enumerate(times):
        rng = np.random.default_rng(np.random.SeedSequence([cfg.rng_seed, 7, i]))
        est = retrieval_efficiency_mc(float(t), cfg.atoms, dk, rng,
                                      n_atoms=n_atoms)
        effs[i] = est.value * calibration.RETRIEVAL_EFFICIENCY
        errs[i] = est.std_error * calibration.RETRIEVAL_EFFICIENCY
    curve = g2_vs_time(model, times, effs, errs)
    # the t = 0 estimate is exact; give it a finite weight for the fit
    g2_err = np.maximum(curve.g2_err, 1e-3)
    from .spinwave import RetrievalCurve

    return RetrievalCurve(curve.times, curve.efficiency, curve.efficiency_err,
                          curve.g2_cross, g2_err)


def _lifetime_scenario(spec: ScenarioSpec, out: Path, report: RunReport) -> None:
    cfg = spec.base_config
    curve = _lifetime_curve(cfg)
    params, fit = fit_lifetime_curve(curve)
    lifetime = lifetime_1e(params)

    csv_path = out / "lifetime_vs_time.csv"
    curve.to_csv(csv_path)
    fit_path = out / "lifetime_fit.txt"
    fit_path.write_text(format_fit_report(fit, title="storage-time decay"))
    svg = export_svg(csv_path, PlotSpec("time_ns", "g2", yerr="g2_err",
                                        title="Cross-correlation vs storage time"),
                     out / "lifetime_vs_time.svg")
    report.points = [{
        "point": i, "sweep_value": float(t), "failed": False,
        "time_ns": float(t * 1e9),
        "efficiency": float(e), "g2": float(g),
    } for i, (t, e, g) in enumerate(zip(curve.times, curve.efficiency,
                                        curve.g2_cross))]
    report.summary = {
        "fit_C": float(params.C), "fit_A": float(params.A),
        "fit_B": float(params.B),
        "lifetime_1e_ns": lifetime * 1e9,
    }
    report.artifacts += [csv_path.name, fit_path.name, Path(svg).name]


def _cs_scenario(spec: ScenarioSpec, out: Path, report: RunReport) -> None:
    cfg = spec.base_config
    model = calibration.emission_model_for(cfg)
    arm_s, arm_as = calibration.arm_pair(cfg)
    eta = calibration.RETRIEVAL_EFFICIENCY
    from dataclasses import replace

    det_cross = replace(cfg.detection, coincidence_scheme="cross")
    det_auto = replace(cfg.detection, coincidence_scheme="auto_hbt")

    cross_counts = simulate_counts(model, eta, arm_s, arm_as, det_cross,
                                   cfg.trials, cfg.rng_seed,
                                   stream=_ROLE_CROSS, threads=spec.threads)
    auto_s_counts = simulate_counts(model, eta, arm_s, arm_as, det_auto,
                                    cfg.trials, cfg.rng_seed,
                                    stream=_ROLE_AUTO_S, hbt_species="stokes",
                                    threads=spec.threads)
    auto_as_counts = simulate_counts(model, eta, arm_s, arm_as, det_auto,
                                     cfg.trials, cfg.rng_seed,
                                     stream=_ROLE_AUTO_AS,
                                     hbt_species="antistokes",
                                     threads=spec.threads)
    cross = g2_cross_estimate(cross_counts)
    auto_s = g2_auto_estimate(auto_s_counts)
    auto_as = g2_auto_estimate(auto_as_counts)
    cs = cauchy_schwarz_test(cross, auto_s, auto_as)
    herald = heralding_efficiency(cross_counts, arm_as.total)

    rows = [
        ["g2_cross", cross.value, cross.std_error],
        ["g2_auto_stokes", auto_s.value, auto_s.std_error],
        ["g2_auto_antistokes", auto_as.value, auto_as.std_error],
        ["cs_ratio", cs.ratio, 0.0],
        ["cs_excess", cs.excess, 0.0],
        ["cs_significance", cs.significance, 0.0],
        ["heralding_efficiency", herald, 0.0],
    ]
    csv_path = out / "cs_violation.csv"
    _write_csv(csv_path, ["quantity", "value", "std_error"], rows)
    report.points = [{"point": 0, "sweep_value": float("nan"), "failed": False,
                      "counts_cross": asdict(cross_counts),
                      "counts_auto_stokes": asdict(auto_s_counts),
                      "counts_auto_antistokes": asdict(auto_as_counts)}]
    report.summary = {name: value for name, value, _ in rows}
    report.artifacts.append(csv_path.name)


def _tbp_scenario(spec: ScenarioSpec, out: Path, report: RunReport) -> None:
    cfg = spec.base_config
    from .spinwave import diffusion_efficiency_analytic

    model = calibration.emission_model_for(cfg)
    times = np.linspace(0.0, 3e-6, 25)
    effs = calibration.RETRIEVAL_EFFICIENCY * diffusion_efficiency_analytic(
        times, cfg.atoms)
    curve = g2_vs_time(model, times, effs)
    from .spinwave import RetrievalCurve

    curve = RetrievalCurve(curve.times, curve.efficiency, curve.efficiency_err,
                           curve.g2_cross, np.full_like(curve.g2_cross, 1e-3))
    params, _ = fit_lifetime_curve(curve)
    lifetime = lifetime_1e(params)
    tbp = time_bandwidth_product(lifetime, cfg.pulses.duration_fwhm,
                                 PHOTON_BANDWIDTH_ANTISTOKES)

    rows = [
        ["lifetime_ns", lifetime * 1e9],
        ["pulse_duration_ns", cfg.pulses.duration_fwhm * 1e9],
        ["photon_bandwidth_mhz", PHOTON_BANDWIDTH_ANTISTOKES / 1e6],
        ["tbp_by_duration", tbp["tbp_by_duration"]],
        ["tbp_by_bandwidth", tbp["tbp_by_bandwidth"]],
    ]
    csv_path = out / "tbp_report.csv"
    _write_csv(csv_path, ["quantity", "value"], rows)
    report.points = [{"point": 0, "sweep_value": float("nan"), "failed": False}]
    report.summary = {name: value for name, value in rows}
    report.artifacts.append(csv_path.name)


_WORKERS = {
    "noise_vs_read_power": _noise_scenario,
    "g2_vs_power": _g2_power_scenario,
    "lambda_vs_power": _lambda_power_scenario,
    "bandwidth_measurement": _bandwidth_scenario,
    "lifetime_vs_time": _lifetime_scenario,
    "cs_violation": _cs_scenario,
    "tbp_report": _tbp_scenario,
}


def run_scenario(spec: ScenarioSpec) -> RunReport:
    """Execute one scenario and write its artifacts.

    Per-point failures are recorded in the report (``failed_points``)
    without aborting the remaining sweep points.
    """
    validate_config(spec.base_config)
    out = Path(spec.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    report = RunReport(scenario_id=spec.scenario_id,
                       seed=spec.base_config.rng_seed,
                       config=_config_to_dict(spec.base_config))
    started = time.perf_counter()
    _WORKERS[spec.scenario_id](spec, out, report)
    report.wall_time_s = time.perf_counter() - started
    report.save(out / f"{spec.scenario_id}_report.json")
    report.artifacts.append(f"{spec.scenario_id}_report.json")
    return report


def run_from_report(report_path: str | Path, output_dir: str | Path,
                    threads: int = 1) -> RunReport:
    """Re-run a scenario from a saved report's config snapshot."""
    report = RunReport.load(report_path)
    cfg = _config_from_dict(report.config)
    spec = ScenarioSpec(report.scenario_id, cfg, output_dir=str(output_dir),
                        threads=threads)
    return run_scenario(spec)
