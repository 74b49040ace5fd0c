"""Spike detection, phase locking and regime classification for series data.

The detector is deliberately simple and fully deterministic: deviations from
a running-median baseline are compared against a threshold measured in
running-MAD units, so spike positions are invariant under positive rescaling
of the series and equivariant under time shifts.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import median_filter
from scipy.signal import find_peaks

from .series import TimeSeries


@dataclass(frozen=True)
class SpikeConfig:
    threshold_sigma: float = 4.0
    min_separation: float = 1.0       # in time units of the series
    baseline_window_frac: float = 0.10
    detect_dips: bool = True


@dataclass
class SpikeTrain:
    spike_times: np.ndarray
    amplitudes: np.ndarray
    kinds: tuple[str, ...]            # "peak" or "dip" per spike
    baseline: np.ndarray
    threshold: np.ndarray
    config: SpikeConfig

    def __len__(self):
        return len(self.spike_times)


@dataclass
class SyncReport:
    lock_ratio: float
    mean_phase_offset: float
    regime: str                       # "locked" | "drifting" | "damped"
    n_spikes: int
    phases: np.ndarray = field(repr=False, default=None)


@dataclass
class RegimeReport:
    label: str                        # "localized" | "delocalized" | "mixed"
    mean: float
    amplitude: float
    zero_crossings: int


def _odd_window(n_samples: int, frac: float) -> int:
    w = max(3, int(round(frac * n_samples)))
    return w if w % 2 == 1 else w + 1


def detect_spikes(series: TimeSeries, config: SpikeConfig = SpikeConfig()) -> SpikeTrain:
    """Local extrema exceeding the running baseline by threshold_sigma MADs.

    Baseline and MAD use a running median over a window of 10% of the
    series; extrema closer than min_separation keep only the larger one.
    NaN-masked samples (e.g. from g2 normalisation) are interpolated over
    before detection.
    """
    values = np.asarray(series.values, dtype=float).copy()
    n = len(values)
    if n < 16:
        raise ValueError(f"series too short for spike detection ({n} < 16 samples)")
    bad = ~np.isfinite(values)
    if bad.any():
        good = ~bad
        if good.sum() < 16:
            raise ValueError("series too short after masking non-finite samples")
        values[bad] = np.interp(series.t[bad], series.t[good], values[good])

    window = _odd_window(n, config.baseline_window_frac)
    baseline = median_filter(values, size=window, mode="nearest")
    dev = values - baseline
    mad = median_filter(np.abs(dev), size=window, mode="nearest")
    threshold = config.threshold_sigma * mad
    distance = max(1, int(round(config.min_separation / series.dt)))

    peak_idx, _ = find_peaks(dev, height=threshold, distance=distance)
    candidates = [(int(i), "peak") for i in peak_idx]
    if config.detect_dips:
        dip_idx, _ = find_peaks(-dev, height=threshold, distance=distance)
        candidates += [(int(i), "dip") for i in dip_idx]
    candidates.sort()

    idx = np.array([i for i, _ in candidates], dtype=int)
    kinds = tuple(k for _, k in candidates)
    return SpikeTrain(
        spike_times=series.t[idx] if len(idx) else np.empty(0),
        amplitudes=values[idx] if len(idx) else np.empty(0),
        kinds=kinds,
        baseline=baseline,
        threshold=threshold,
        config=config,
    )


def _extrema_phase_track(reference: TimeSeries) -> tuple[np.ndarray, np.ndarray]:
    """Times and cumulative phases of the reference extrema (max=2*pi*m, min=+pi)."""
    vals = np.asarray(reference.values, dtype=float)
    span = float(np.nanmax(vals) - np.nanmin(vals))
    prom = 0.02 * span if span > 0 else None
    maxima, _ = find_peaks(vals, prominence=prom)
    minima, _ = find_peaks(-vals, prominence=prom)
    if len(maxima) + len(minima) < 2:
        raise ValueError("reference series is not oscillatory (fewer than 2 extrema)")
    order = np.argsort(np.concatenate([maxima, minima]))
    times = reference.t[np.concatenate([maxima, minima])][order]
    kinds = np.concatenate([np.zeros(len(maxima)), np.ones(len(minima))])[order]
    # cumulative phase: +pi per alternation; repeated same-kind extrema get +2*pi
    phases = np.empty(len(times))
    phases[0] = 0.0 if kinds[0] == 0 else np.pi
    for i in range(1, len(times)):
        step = np.pi if kinds[i] != kinds[i - 1] else 2.0 * np.pi
        phases[i] = phases[i - 1] + step
    return times, phases


def phase_locking(spikes: SpikeTrain, reference: TimeSeries) -> SyncReport:
    """Phase of each spike relative to the reference oscillation.

    Spikes get a phase by linear interpolation of the cumulative extrema
    phase; lock_ratio is the fraction within pi/4 of the circular mean.
    Regime: "locked" above 0.8 lock ratio, "damped" when the reference
    envelope loses more than half its amplitude over the window, else
    "drifting".
    """
    ext_t, ext_phase = _extrema_phase_track(reference)
    inside = (spikes.spike_times >= ext_t[0]) & (spikes.spike_times <= ext_t[-1])
    times = spikes.spike_times[inside]
    if len(times) == 0:
        return SyncReport(lock_ratio=0.0, mean_phase_offset=0.0,
                          regime="drifting", n_spikes=0, phases=np.empty(0))
    phases = np.mod(np.interp(times, ext_t, ext_phase), 2.0 * np.pi)
    mean_vec = np.mean(np.exp(1j * phases))
    mean_phase = float(np.angle(mean_vec))
    offsets = np.angle(np.exp(1j * (phases - mean_phase)))
    lock_ratio = float(np.mean(np.abs(offsets) < np.pi / 4))

    ref_vals = np.asarray(reference.values, dtype=float)
    centre = float(np.nanmedian(ref_vals))
    env = np.abs(ref_vals[np.searchsorted(reference.t, ext_t)] - centre)
    damped = len(env) >= 2 and env[-1] < 0.5 * env[0]

    if lock_ratio > 0.8:
        regime = "locked"
    elif damped:
        regime = "damped"
    else:
        regime = "drifting"
    return SyncReport(lock_ratio=lock_ratio, mean_phase_offset=mean_phase,
                      regime=regime, n_spikes=len(times), phases=phases)


def classify_regime(z: TimeSeries) -> RegimeReport:
    """Label an imbalance trace as localized, delocalized or mixed.

    Delocalized: at least two zero crossings with oscillation amplitude
    above 0.1.  Localized: |mean| above 0.5 with amplitude below 0.25.
    Everything else is reported as mixed, always with the raw statistics.
    """
    vals = np.asarray(z.values, dtype=float)
    vals = vals[np.isfinite(vals)]
    if len(vals) < 32:
        raise ValueError("need at least 32 finite samples to classify a regime")
    signs = np.sign(vals[vals != 0.0])
    crossings = int(np.sum(signs[1:] != signs[:-1])) if len(signs) > 1 else 0
    amplitude = 0.5 * float(vals.max() - vals.min())
    mean = float(vals.mean())
    if crossings >= 2 and amplitude > 0.1:
        label = "delocalized"
    elif abs(mean) > 0.5 and amplitude < 0.25:
        label = "localized"
    else:
        label = "mixed"
    return RegimeReport(label=label, mean=mean, amplitude=amplitude,
                        zero_crossings=crossings)


@dataclass
class GainReport:
    ratio: TimeSeries
    transmitted_mask: np.ndarray
    summary: float
    transmitted_fraction: float


def gain_ratio(n1: TimeSeries, n2: TimeSeries) -> GainReport:
    """Pointwise n2/n1 with a median summary over transmitted windows.

    Transmitted windows are the samples with n2 > n1; the median is robust
    against the spike transients at window boundaries.  Samples with
    vanishing n1 are NaN-masked.
    """
    if len(n1.t) != len(n2.t):
        raise ValueError("series have different lengths")
    a = np.asarray(n1.values, dtype=float)
    b = np.asarray(n2.values, dtype=float)
    ratio = np.full(a.shape, np.nan)
    ok = a > 1e-12
    ratio[ok] = b[ok] / a[ok]
    transmitted = ok & (b > a)
    summary = float(np.median(ratio[transmitted])) if transmitted.any() else float("nan")
    return GainReport(
        ratio=TimeSeries(t=n1.t, values=ratio, label="n2_over_n1",
                         meta={"mask": ok}),
        transmitted_mask=transmitted,
        summary=summary,
        transmitted_fraction=float(np.mean(transmitted)),
    )
