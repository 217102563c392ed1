"""Numerical pipeline: nonlinear least-squares fits, Fourier deconvolution,
and width extraction for sampled spectra.

The fit engine wraps a damped least-squares solver (trust-region reflective)
behind a small model registry.  Deconvolution uses a regularized
(Wiener-style) spectral division; the bare convolution-theorem division is
ill-posed for any noisy scan, so the denominator is floored at a small
fraction of the kernel's peak power.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import least_squares as _scipy_least_squares

__all__ = [
    "SampledSpectrum",
    "GaussianScanFit",
    "DeconvolutionSettings",
    "DeconvolutionResult",
    "FitResult",
    "FitNonConvergenceError",
    "SingularJacobianWarning",
    "MultimodalSpectrumWarning",
    "NegativeCurvatureWarning",
    "EdgePeakError",
    "GridMismatchError",
    "MODELS",
    "least_squares_fit",
    "fit_cavity_profile",
    "fit_gaussian_scan",
    "fit_lifetime_curve",
    "gaussian_scan_model",
    "cavity_cascade_model",
    "lifetime_decay_model",
    "convolve_spectra",
    "deconvolve_spectrum",
    "fwhm",
    "spectrum_to_csv",
    "spectrum_from_csv",
    "format_fit_report",
]


# ---------------------------------------------------------------------------
# data types


@dataclass(frozen=True)
class SampledSpectrum:
    """Values on a uniform frequency grid."""

    f_start: float
    f_step: float
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if self.f_step <= 0:
            raise ValueError("f_step must be > 0")
        if values.ndim != 1 or values.size < 16:
            raise ValueError("need a 1-D grid with at least 16 points")
        if not np.all(np.isfinite(values)):
            raise ValueError("values must be finite")
        if np.any(values < 0):
            raise ValueError("values must be non-negative")

    @property
    def frequencies(self) -> np.ndarray:
        return self.f_start + self.f_step * np.arange(self.values.size)

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class GaussianScanFit:
    """Parameters of the Gaussian scan model a*exp(-2(f-b)^2/d^2) + U0."""

    a: float
    b: float
    d: float
    U0: float

    def __post_init__(self) -> None:
        if self.a <= 0:
            raise ValueError("amplitude a must be > 0")
        if self.d <= 0:
            raise ValueError("width parameter d must be > 0")
        if self.U0 < 0:
            raise ValueError("baseline U0 must be >= 0")

    @property
    def fwhm(self) -> float:
        return self.d * np.sqrt(2.0 * np.log(2.0))


@dataclass(frozen=True)
class DeconvolutionSettings:
    """Regularization and conditioning options for spectral deconvolution."""

    regularization_epsilon: float = 1e-3  # fraction of peak |F{T}|^2
    window: str = "none"                  # "none" | "raised_cosine"
    zero_padding_factor: int = 2

    def __post_init__(self) -> None:
        if self.regularization_epsilon <= 0:
            raise ValueError("regularization_epsilon must be > 0")
        if self.window not in ("none", "raised_cosine"):
            raise ValueError("window must be 'none' or 'raised_cosine'")
        if self.zero_padding_factor < 1:
            raise ValueError("zero_padding_factor must be >= 1")


@dataclass(frozen=True)
class DeconvolutionResult:
    spectrum: SampledSpectrum
    clipped_fraction: float


# ---------------------------------------------------------------------------
# fit engine


class FitNonConvergenceError(RuntimeError):
    """Fit did not converge; carries the best parameters found so far."""

    def __init__(self, message: str, best: "FitResult"):
        super().__init__(message)
        self.best = best


class SingularJacobianWarning(UserWarning):
    pass


class MultimodalSpectrumWarning(UserWarning):
    pass


class NegativeCurvatureWarning(UserWarning):
    pass


class EdgePeakError(ValueError):
    pass


class GridMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class FitResult:
    """Outcome of one least-squares fit."""

    params: np.ndarray
    param_names: tuple[str, ...]
    covariance: np.ndarray
    residual_norm: float
    iterations: int
    converged: bool
    singular_jacobian: bool
    message: str

    @property
    def std_errors(self) -> np.ndarray:
        return np.sqrt(np.maximum(np.diag(self.covariance), 0.0))


def gaussian_scan_model(f, a, b, d, U0):
    """Gaussian scan profile a*exp(-2(f-b)^2/d^2) + U0."""
    f = np.asarray(f, dtype=float)
    return a * np.exp(-2.0 * (f - b) ** 2 / d**2) + U0


def cavity_cascade_model(f, T0, A, B, C, d, h, g, f0):
    """Triple-cavity transmission profile; see :mod:`dlczsim.optics`."""
    x = np.asarray(f, dtype=float) - f0
    return T0 / ((1.0 + A * np.sin(d * x) ** 2)
                 * (1.0 + B * np.sin(h * x) ** 2)
                 * (1.0 + C * np.sin(g * x) ** 2))


def lifetime_decay_model(t, C, A, B):
    """Storage-time decay of the cross-correlation: 1 + C/(1 + A t^2 + B t)."""
    t = np.asarray(t, dtype=float)
    return 1.0 + C / (1.0 + A * t**2 + B * t)


@dataclass(frozen=True)
class _ModelSpec:
    fn: object
    param_names: tuple[str, ...]
    lower: tuple[float, ...]
    upper: tuple[float, ...]
    x_scale: tuple[float, ...] | None = None


_TINY = 1e-300

MODELS: dict[str, _ModelSpec] = {
    "cavity_cascade": _ModelSpec(
        cavity_cascade_model,
        ("T0", "A", "B", "C", "d", "h", "g", "f0"),
        lower=(_TINY, 0.0, 0.0, 0.0, _TINY, _TINY, _TINY, -np.inf),
        upper=(1.0, np.inf, np.inf, np.inf, np.inf, np.inf, np.inf, np.inf),
    ),
    "gaussian_scan": _ModelSpec(
        gaussian_scan_model,
        ("a", "b", "d", "U0"),
        lower=(_TINY, -np.inf, _TINY, 0.0),
        upper=(np.inf, np.inf, np.inf, np.inf),
    ),
    "lifetime_decay": _ModelSpec(
        lifetime_decay_model,
        ("C", "A", "B"),
        lower=(_TINY, -np.inf, -np.inf),
        upper=(np.inf, np.inf, np.inf),
    ),
}


def _fit_xy(model_id: str, x: np.ndarray, y: np.ndarray,
            initial_params, sigma: np.ndarray | None = None,
            max_nfev: int = 2000) -> FitResult:
    """Damped least squares of a registered model on (x, y) data."""
    if model_id not in MODELS:
        raise KeyError(f"unknown model {model_id!r}; have {sorted(MODELS)}")
    spec = MODELS[model_id]
    p0 = np.asarray(initial_params, dtype=float)
    if p0.size != len(spec.param_names):
        raise ValueError(f"{model_id} takes {len(spec.param_names)} parameters "
                         f"{spec.param_names}, got {p0.size}")
    if x.size < p0.size:
        raise ValueError("need at least as many data points as parameters")
    lower = np.asarray(spec.lower)
    upper = np.asarray(spec.upper)
    p0 = np.clip(p0, lower, upper)
    if sigma is not None:
        sigma = np.asarray(sigma, dtype=float)
        if np.any(sigma <= 0):
            raise ValueError("weights require strictly positive sigmas")

    def residuals(p):
        r = spec.fn(x, *p) - y
        return r / sigma if sigma is not None else r

    res = _scipy_least_squares(
        residuals, p0, bounds=(lower, upper), method="trf", x_scale="jac",
        xtol=1e-12, ftol=1e-12, gtol=1e-10, max_nfev=max_nfev)

    # Covariance from the Jacobian at the optimum.  Rank deficiency is
    # judged on the column-normalized Jacobian so that wildly different
    # parameter units (phase slopes ~1e-10 vs contrasts ~1e3) do not read
    # as degeneracy.
    jac = res.jac
    col_norms = np.linalg.norm(jac, axis=0)
    zero_cols = col_norms <= 0
    scaled = jac / np.where(zero_cols, 1.0, col_norms)
    _, s, vt = np.linalg.svd(scaled, full_matrices=False)
    singular = bool(np.any(zero_cols) or s[0] <= 0 or s[-1] / s[0] < 1e-10)
    threshold = 1e-10 * (s[0] if s.size else 0.0)
    s_inv = np.array([1.0 / si if si > threshold else 0.0 for si in s])
    cov_scaled = (vt.T * s_inv**2) @ vt
    inv_norms = np.where(zero_cols, 0.0, 1.0 / np.where(zero_cols, 1.0, col_norms))
    cov = cov_scaled * np.outer(inv_norms, inv_norms)
    dof = max(x.size - p0.size, 1)
    if sigma is None:
        cov = cov * (2.0 * res.cost / dof)  # scale by residual variance
    if singular:
        warnings.warn(f"singular Jacobian in {model_id} fit; covariance is a "
                      "pseudo-inverse and some parameters are undetermined",
                      SingularJacobianWarning, stacklevel=3)

    result = FitResult(
        params=res.x,
        param_names=spec.param_names,
        covariance=cov,
        residual_norm=float(np.sqrt(2.0 * res.cost)),
        iterations=int(res.nfev),
        converged=bool(res.status > 0),
        singular_jacobian=singular,
        message=str(res.message),
    )
    if res.status <= 0:
        raise FitNonConvergenceError(
            f"{model_id} fit did not converge after {res.nfev} evaluations",
            best=result)
    return result


def least_squares_fit(model_id: str, data: SampledSpectrum, initial_params,
                      sigma: np.ndarray | None = None) -> FitResult:
    """Fit a registered model to a sampled spectrum.

    Returns the local least-squares optimum with covariance from the
    Jacobian, the residual norm, and the evaluation count.  Raises
    :class:`FitNonConvergenceError` (carrying the best-so-far result) if the
    solver hits its evaluation budget, and emits
    :class:`SingularJacobianWarning` for degenerate fits.
    """
    return _fit_xy(model_id, data.frequencies, data.values, initial_params,
                   sigma=sigma)


def _cavity_initial_guess(data: SampledSpectrum) -> np.ndarray:
    values = data.values
    freqs = data.frequencies
    f0 = float(freqs[int(np.argmax(values))])
    t0 = min(float(values.max()), 1.0)
    try:
        width = fwhm(data)
    except (EdgePeakError, ValueError):
        width = data.f_step * len(data) / 4.0
    # Treat the cascade as three similar cavities; a triple stack narrows a
    # single window by about half, and the design free spectral ranges are
    # staggered around 30 GHz.
    single = width / 0.51
    fsrs = np.array([22e9, 30e9, 40e9])
    slopes = np.pi / fsrs
    contrasts = 1.0 / np.sin(slopes * single / 2.0) ** 2
    return np.array([t0, contrasts[0], contrasts[1], contrasts[2],
                     slopes[0], slopes[1], slopes[2], f0])


def fit_cavity_profile(data: SampledSpectrum, initial_params=None,
                       sigma: np.ndarray | None = None):
    """Fit the triple-cavity transmission profile; returns (params, fit).

    With ``initial_params=None`` a heuristic guess is derived from the data:
    the fit then locks to the transmission peak nearest that guess, so data
    showing several free-spectral-range peaks resolves to the one nearest
    the initial center frequency.

    An unweighted fit sees only the absolute residuals near the peak, which
    leaves the individual cavity contrasts nearly degenerate (the wing
    suppression is far below any additive noise floor).  When the scan noise
    is relative (photon counting, multiplicative drift), pass matching
    per-point ``sigma`` values to pin the contrasts from the wings.
    """
    from .optics import CavityFitParams  # local import, avoids module cycle

    if initial_params is None:
        initial_params = _cavity_initial_guess(data)
    fit = least_squares_fit("cavity_cascade", data, initial_params, sigma=sigma)
    t0, a, b, c, d, h, g, f0 = fit.params
    return CavityFitParams(T0=t0, A=a, B=b, C=c, d=d, h=h, g=g, f0=f0), fit


def fit_gaussian_scan(data: SampledSpectrum, initial_params=None):
    """Fit the Gaussian scan model; returns (GaussianScanFit, fit)."""
    values = data.values
    freqs = data.frequencies
    if initial_params is None:
        u0 = float(values.min())
        a = float(values.max()) - u0
        b = float(freqs[int(np.argmax(values))])
        try:
            d = fwhm(data) / np.sqrt(2.0 * np.log(2.0))
        except (EdgePeakError, ValueError):
            d = data.f_step * len(data) / 4.0
        initial_params = np.array([max(a, _TINY), b, d, u0])
    fit = least_squares_fit("gaussian_scan", data, initial_params)
    a, b, d, u0 = fit.params
    return GaussianScanFit(a=a, b=b, d=d, U0=u0), fit


def fit_lifetime_curve(curve, initial_params=None):
    """Weighted fit of the storage-time decay model to a retrieval curve.

    ``curve`` is a :class:`dlczsim.spinwave.RetrievalCurve`; points are
    weighted by 1/sigma^2 from its ``g2_err`` column.  Returns
    ``(LifetimeFitParams, FitResult)``.  A negative fitted quadratic
    coefficient is unphysical and is reported via
    :class:`NegativeCurvatureWarning` rather than clamped.
    """
    from .spinwave import LifetimeFitParams  # local import, avoids cycle

    t = np.asarray(curve.times, dtype=float)
    g2 = np.asarray(curve.g2_cross, dtype=float)
    sigma = np.asarray(curve.g2_err, dtype=float)
    good = np.isfinite(g2) & np.isfinite(sigma) & (sigma > 0)
    if good.sum() < 4:
        raise ValueError("need at least 4 time points with finite g2 and errors")
    t, g2, sigma = t[good], g2[good], sigma[good]

    if initial_params is None:
        c0 = max(float(g2.max()) - 1.0, 1e-6)
        tail = max(float(g2[-1]) - 1.0, c0 * 1e-3)
        a0 = max((c0 / tail - 1.0) / t[-1] ** 2, 0.0) if t[-1] > 0 else 0.0
        initial_params = np.array([c0, a0, 0.0])

    fit = _fit_xy("lifetime_decay", t, g2, initial_params, sigma=sigma)
    c, a, b = fit.params
    if a < 0:
        warnings.warn(f"fitted quadratic coefficient is negative ({a:.3g}); "
                      "unphysical for motion-induced decay",
                      NegativeCurvatureWarning, stacklevel=2)
    return LifetimeFitParams(C=c, A=a, B=b), fit


# ---------------------------------------------------------------------------
# convolution / deconvolution


def _kernel_on_step(t: SampledSpectrum, f_step: float) -> np.ndarray:
    """Kernel samples of ``t`` on the requested step (linear resampling)."""
    if abs(t.f_step - f_step) <= 1e-9 * f_step:
        return t.values.copy()
    span = t.f_step * (len(t) - 1)
    n = int(np.floor(span / f_step)) + 1
    if n < 3:
        raise GridMismatchError(
            f"kernel span {span:g} Hz is unresolvable at step {f_step:g} Hz")
    grid = t.f_start + f_step * np.arange(n)
    return np.interp(grid, t.frequencies, t.values)


def _raised_cosine_taper(n: int, fraction: float = 0.1) -> np.ndarray:
    w = np.ones(n)
    edge = max(int(round(n * fraction)), 1)
    ramp = 0.5 * (1.0 - np.cos(np.pi * np.arange(edge) / edge))
    w[:edge] = ramp
    w[-edge:] = ramp[::-1]
    return w


def _padded_length(n: int, factor: int) -> int:
    from scipy.fft import next_fast_len

    return int(next_fast_len(factor * n))


def convolve_spectra(s: SampledSpectrum, t: SampledSpectrum) -> SampledSpectrum:
    """Convolution of spectrum ``s`` with kernel ``t`` on s's grid.

    The kernel is aligned at its maximum, so a peak of ``s`` stays at the
    same grid position. Amplitudes carry the grid-step factor of the
    discretized convolution integral.
    """
    kernel = _kernel_on_step(t, s.f_step)
    n = len(s)
    length = _padded_length(n + kernel.size, 2)
    spad = np.zeros(length)
    spad[:n] = s.values
    kpad = np.zeros(length)
    kpad[:kernel.size] = kernel
    kpad = np.roll(kpad, -int(np.argmax(kernel)))
    out = np.fft.irfft(np.fft.rfft(spad) * np.fft.rfft(kpad), length)[:n]
    out = np.maximum(out, 0.0) * s.f_step
    return SampledSpectrum(s.f_start, s.f_step, out)


def deconvolve_spectrum(u: SampledSpectrum, u0: float, t: SampledSpectrum,
                        settings: DeconvolutionSettings | None = None
                        ) -> DeconvolutionResult:
    """Recover the source spectrum S from a measured scan U = T (*) S + U0.

    Applies the convolution theorem with a regularized division,

        F{S} = F{U - U0} conj(F{T}) / (|F{T}|^2 + eps * max |F{T}|^2),

    inverse-transforms, clips negative excursions (ringing) to zero, and
    reports the clipped fraction of the total absolute mass.  The result is
    aligned with U's grid (the kernel is referenced at its maximum).
    """
    if settings is None:
        settings = DeconvolutionSettings()
    if not np.any(t.values > 0):
        raise ValueError("kernel spectrum is identically zero")
    kernel = _kernel_on_step(t, u.f_step)

    signal = u.values - u0
    if settings.window == "raised_cosine":
        signal = signal * _raised_cosine_taper(signal.size)

    n = len(u)
    length = _padded_length(n + kernel.size, settings.zero_padding_factor)
    upad = np.zeros(length)
    upad[:n] = signal
    kpad = np.zeros(length)
    kpad[:kernel.size] = kernel
    kpad = np.roll(kpad, -int(np.argmax(kernel)))

    fu = np.fft.rfft(upad)
    fk = np.fft.rfft(kpad)
    power = np.abs(fk) ** 2
    floor = settings.regularization_epsilon * power.max()
    fs = fu * np.conj(fk) / (power + floor)
    s = np.fft.irfft(fs, length)[:n] / u.f_step

    negative = -s[s < 0].sum()
    total = np.abs(s).sum()
    clipped = float(negative / total) if total > 0 else 0.0
    return DeconvolutionResult(
        spectrum=SampledSpectrum(u.f_start, u.f_step, np.maximum(s, 0.0)),
        clipped_fraction=clipped,
    )


# ---------------------------------------------------------------------------
# width extraction


def fwhm(s: SampledSpectrum) -> float:
    """Full width at half maximum above the baseline (minimum of s), in Hz.

    Crossings of the half level are located by linear interpolation.  A
    run of equal maximal samples is treated as one peak at its midpoint;
    more than two half-level crossings emit
    :class:`MultimodalSpectrumWarning` and the crossings bracketing the
    peak are used.
    """
    values = s.values
    vmax = float(values.max())
    vmin = float(values.min())
    if vmax == vmin:
        raise ValueError("spectrum is flat; width undefined")
    peak_idx = np.flatnonzero(values == vmax)
    runs = np.split(peak_idx, np.flatnonzero(np.diff(peak_idx) > 1) + 1)
    if len(runs) > 1:
        warnings.warn("several separated maxima; using the first",
                      MultimodalSpectrumWarning, stacklevel=2)
    left_peak = int(runs[0][0])
    right_peak = int(runs[0][-1])
    if left_peak == 0 or right_peak == values.size - 1:
        raise EdgePeakError("global maximum sits on the grid edge")

    half = vmin + 0.5 * (vmax - vmin)
    above = values >= half
    n_crossings = int(np.count_nonzero(np.diff(above.astype(int)) != 0))
    if n_crossings > 2:
        warnings.warn(f"{n_crossings} half-maximum crossings; spectrum looks "
                      "multi-modal, using the crossings around the main peak",
                      MultimodalSpectrumWarning, stacklevel=2)

    i = left_peak
    while i > 0 and values[i - 1] >= half:
        i -= 1
    if i == 0 and values[0] >= half:
        raise EdgePeakError("half-maximum level never crossed on the left")
    frac = (half - values[i - 1]) / (values[i] - values[i - 1])
    f_left = s.f_start + s.f_step * (i - 1 + frac)

    j = right_peak
    while j < values.size - 1 and values[j + 1] >= half:
        j += 1
    if j == values.size - 1 and values[-1] >= half:
        raise EdgePeakError("half-maximum level never crossed on the right")
    frac = (values[j] - half) / (values[j] - values[j + 1])
    f_right = s.f_start + s.f_step * (j + frac)
    return float(f_right - f_left)


# ---------------------------------------------------------------------------
# I/O


def spectrum_to_csv(s: SampledSpectrum, path: str | Path,
                    value_name: str = "value") -> None:
    """Write a spectrum as two-column CSV (freq_MHz, value)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["freq_MHz", value_name])
        for f, v in zip(s.frequencies, s.values):
            writer.writerow([format(f / 1e6, ".10g"), format(v, ".10g")])


def spectrum_from_csv(path: str | Path) -> SampledSpectrum:
    """Read a two-column CSV (freq_MHz, value) back into a spectrum."""
    freqs: list[float] = []
    vals: list[float] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if len(header) < 2:
            raise ValueError("expected two columns (freq_MHz, value)")
        for row in reader:
            freqs.append(float(row[0]) * 1e6)
            vals.append(float(row[1]))
    if len(freqs) < 2:
        raise ValueError("spectrum CSV needs at least two rows")
    steps = np.diff(freqs)
    if not np.allclose(steps, steps[0], rtol=1e-6):
        raise GridMismatchError("CSV frequency grid is not uniform")
    return SampledSpectrum(freqs[0], float(steps[0]), np.array(vals))


def format_fit_report(fit: FitResult, title: str = "fit") -> str:
    """Readable multi-line fit report: parameters, sigmas, residual norm."""
    lines = [f"# {title}",
             f"converged: {fit.converged}",
             f"residual_norm: {fit.residual_norm:.6g}",
             f"evaluations: {fit.iterations}",
             f"singular_jacobian: {fit.singular_jacobian}"]
    errs = fit.std_errors
    for name, value, err in zip(fit.param_names, fit.params, errs):
        lines.append(f"{name} = {value:.8g} +- {err:.3g}")
    return "\n".join(lines) + "\n"
