"""Simulator and analysis toolkit for a far off-resonance DLCZ quantum memory.

Subpackages by concern:

* :mod:`dlczsim.config` - parameter types, validation, thermal speed
* :mod:`dlczsim.configio` - config-file ingestion and emission
* :mod:`dlczsim.pairsource` - pair-emission statistics and noise floor
* :mod:`dlczsim.spinwave` - storage/retrieval decay and lifetime
* :mod:`dlczsim.optics` - cascaded Fabry-Perot filter chain
* :mod:`dlczsim.detection` - click simulation and correlation estimators
* :mod:`dlczsim.spectral` - least-squares fits, deconvolution, widths
* :mod:`dlczsim.harness` - end-to-end scenarios, reports, CSV/SVG output
* :mod:`dlczsim.calibration` - the calibrated default operating point
"""

from .calibration import default_config
from .config import (
    AtomEnsembleParams,
    DetectionParams,
    ExperimentConfig,
    NoiseParams,
    PulseParams,
    thermal_speed,
    validate_config,
)
from .configio import dump_config, load_config
from .detection import (
    CountsTable,
    G2Estimate,
    cauchy_schwarz_test,
    g2_auto_estimate,
    g2_cross_estimate,
    heralding_efficiency,
    simulate_counts,
    simulate_trial,
)
from .harness import RunReport, ScenarioSpec, run_scenario, time_bandwidth_product
from .optics import (
    ArmEfficiency,
    CavityFitParams,
    apply_filter,
    cascade_transmission,
    extinction_ratio,
)
from .pairsource import (
    EmissionModel,
    TrialEmission,
    analytic_g2,
    excitation_probability,
    sample_pair_number,
    unconditional_noise_mean,
)
from .spectral import (
    DeconvolutionSettings,
    GaussianScanFit,
    SampledSpectrum,
    deconvolve_spectrum,
    fit_cavity_profile,
    fit_gaussian_scan,
    fit_lifetime_curve,
    fwhm,
    least_squares_fit,
)
from .spinwave import (
    LifetimeFitParams,
    RetrievalCurve,
    WaveVectors,
    collinear_wavevectors,
    g2_vs_time,
    lifetime_1e,
    retrieval_efficiency_mc,
    spin_wave_mismatch,
)

__version__ = "0.1.0"
