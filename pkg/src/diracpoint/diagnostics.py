"""Observables extracted from simulation output.

Everything here consumes recorded traces and snapshots; nothing mutates
simulation state.  The headline quantities are the windowed power spectrum
of the origin trace, its mass fraction inside the frequency gap, the
flatness of the per-component modulus, and the local distance of a
snapshot to the family of two-frequency solitary waves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import NoGapPeak, WindowTooShort
from .evolution import RunResult, SimConfig, TraceSeries, free_step
from .model import ModelParams, SpinorField
from .solitary import profile_shape

MIN_WINDOW_SAMPLES = 1024


@dataclass(frozen=True)
class Peak:
    omega: float
    mass_fraction: float
    power: float


@dataclass
class SpectrumReport:
    t0: float
    t1: float
    m: float
    delta: float
    omega: np.ndarray
    power: np.ndarray  # (2, n_bins), normalized so the sum is mean |y|^2
    peaks: Tuple[List[Peak], List[Peak]]
    gap_mass: Tuple[float, float]
    tapered: bool


def _window_slice(trace: TraceSeries, window: Tuple[float, float]):
    t0, t1 = window
    idx = np.nonzero((trace.times >= t0 - 1e-12) & (trace.times <= t1 + 1e-12))[0]
    return idx, trace.times[idx]


def trace_spectrum(trace: TraceSeries, window: Tuple[float, float], m: float,
                   taper: bool = True, delta: Optional[float] = None,
                   noise_floor: float = 5.0) -> SpectrumReport:
    """Windowed power spectrum of the origin trace.

    Sign convention: power at omega belongs to time dependence
    e^(-i omega t).  The gap mass is the power fraction inside
    [-m - delta, m + delta] with delta defaulting to 0.1 m.  Peaks are
    local maxima above `noise_floor` times the median bin power, each
    reported with the mass fraction of its +-2 bin neighborhood.
    """
    if delta is None:
        delta = 0.1 * m
    idx, times = _window_slice(trace, window)
    n = len(idx)
    if n < MIN_WINDOW_SAMPLES:
        raise WindowTooShort(f"window holds {n} samples < {MIN_WINDOW_SAMPLES}")
    dt_s = float(np.median(np.diff(times)))
    y = trace.y[idx]
    win = np.hanning(n) if taper else np.ones(n)
    spec = np.fft.fftshift(np.fft.ifft(y * win[:, None], axis=0), axes=0)
    omega = 2.0 * np.pi * np.fft.fftshift(np.fft.fftfreq(n, d=dt_s))
    power = np.abs(spec.T) ** 2  # (2, n)

    in_gap = np.abs(omega) <= m + delta
    gap_mass = []
    peaks: list[list[Peak]] = []
    for j in range(2):
        pj = power[j]
        total = float(pj.sum())
        gap_mass.append(float(pj[in_gap].sum() / total) if total > 0 else 1.0)
        found = []
        if total > 0:
            thr = noise_floor * float(np.median(pj))
            for i in range(1, n - 1):
                if pj[i] > thr and pj[i] > pj[i - 1] and pj[i] >= pj[i + 1]:
                    lo, hi = max(0, i - 2), min(n, i + 3)
                    found.append(Peak(
                        omega=float(omega[i]),
                        mass_fraction=float(pj[lo:hi].sum() / total),
                        power=float(pj[i]),
                    ))
            found.sort(key=lambda pk: -pk.power)
        peaks.append(found)
    return SpectrumReport(
        t0=float(times[0]), t1=float(times[-1]), m=m, delta=delta,
        omega=omega, power=power, peaks=(peaks[0], peaks[1]),
        gap_mass=(gap_mass[0], gap_mass[1]), tapered=taper,
    )


def modulus_flatness(trace: TraceSeries,
                     window: Tuple[float, float]) -> Tuple[float, float]:
    """(max - min)/max of |y_j| over the window, per component."""
    idx, _ = _window_slice(trace, window)
    out = []
    for j in range(2):
        mod = np.abs(trace.y[idx, j])
        out.append(float((mod.max() - mod.min()) / max(mod.max(), 1e-12)))
    return out[0], out[1]


def split_free(initial: SpinorField, cfg: SimConfig,
               times: Optional[Sequence[float]] = None
               ) -> Dict[float, SpinorField]:
    """Free-flow snapshots from the same initial data.

    Subtracting these from the full run isolates the driven part of the
    solution.  The free flow is evaluated by exact jumps, so any time is
    admissible.
    """
    if times is None:
        times = cfg.snapshot_times
    return {float(t): free_step(initial, float(t), cfg.model) for t in times}


@dataclass
class AttractorFit:
    omega1: float
    omega2: float
    C1: complex
    C2: complex
    residual: float
    R: float


def _golden_min(f: Callable[[float], float], lo: float, hi: float,
                iters: int = 48) -> float:
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


class _WindowLSQ:
    """Least squares onto profile shapes in the local H1 inner product.

    Derivatives of the snapshot and of the candidate profiles are all
    taken spectrally on the full periodic grid before windowing, so a
    snapshot that is exactly a sampled solitary wave fits with zero
    residual despite the cusp at the origin.
    """

    def __init__(self, snapshot: SpinorField, m: float, R: float):
        self.grid = snapshot.grid
        self.m = m
        self.mask = np.abs(self.grid.x) <= R
        self.snap = snapshot.values
        self.dsnap = self._spectral_derivative(self.snap)

    def _spectral_derivative(self, values: np.ndarray) -> np.ndarray:
        return np.fft.ifft(1j * self.grid.k * np.fft.fft(values, axis=1), axis=1)

    def _dot(self, a, da, b, db) -> complex:
        mask = self.mask
        acc = 0.0 + 0.0j
        for comp in range(2):
            acc += np.sum(np.conj(da[comp][mask]) * db[comp][mask])
            acc += self.m**2 * np.sum(np.conj(a[comp][mask]) * b[comp][mask])
        return self.grid.dx * acc

    def snap_norm(self) -> float:
        return math.sqrt(max(self._dot(self.snap, self.dsnap,
                                       self.snap, self.dsnap).real, 0.0))

    def solve(self, omegas: Sequence[Optional[float]]):
        """Best complex amplitudes for the given frequencies; returns
        (C1, C2, residual)."""
        cols = []
        slots = []
        for kind, w in ((1, omegas[0]), (2, omegas[1])):
            if w is None:
                continue
            vals, _ = profile_shape(w, self.m, self.grid.x, kind)
            cols.append((vals, self._spectral_derivative(vals)))
            slots.append(kind)
        coeff = {1: 0.0 + 0.0j, 2: 0.0 + 0.0j}
        if cols:
            k = len(cols)
            gram = np.empty((k, k), dtype=complex)
            rhs = np.empty(k, dtype=complex)
            for i, (ai, dai) in enumerate(cols):
                rhs[i] = self._dot(ai, dai, self.snap, self.dsnap)
                for jj, (aj, daj) in enumerate(cols):
                    gram[i, jj] = self._dot(ai, dai, aj, daj)
            sol = np.linalg.solve(gram, rhs)
            for kind, c in zip(slots, sol):
                coeff[kind] = complex(c)
        resid = self.snap.copy()
        dresid = self.dsnap.copy()
        for (vals, dvals), kind in zip(cols, slots):
            resid = resid - coeff[kind] * vals
            dresid = dresid - coeff[kind] * dvals
        rnorm = math.sqrt(max(self._dot(resid, dresid, resid, dresid).real, 0.0))
        return coeff[1], coeff[2], rnorm


def _gap_peak(report: SpectrumReport, j: int) -> Optional[float]:
    m = report.m
    for pk in report.peaks[j - 1]:
        if abs(pk.omega) < m * (1.0 - 1e-12):
            return pk.omega
    return None


def fit_solitary(snapshot: SpinorField, trace: TraceSeries, p: ModelParams,
                 R: Optional[float] = None,
                 window: Optional[Tuple[float, float]] = None) -> AttractorFit:
    """Closest two-frequency solitary wave in the H1(-R, R) distance.

    Frequencies start from the per-component dominant gap peaks of the
    trace spectrum (component 1 owns omega_1, component 2 owns omega_2),
    amplitudes are linear least squares, and the frequencies are refined
    by coordinate golden-section search.
    """
    m = p.m
    if R is None:
        R = 5.0 / m
    lsq = _WindowLSQ(snapshot, m, R)
    base = lsq.snap_norm()
    if base < 1e-13:
        return AttractorFit(0.0, 0.0, 0.0j, 0.0j, base, R)

    if window is None:
        t1 = float(trace.times[-1])
        window = (max(float(trace.times[0]), t1 - 200.0 / m), t1)
    report = trace_spectrum(trace, window, m)
    omegas: list[Optional[float]] = [_gap_peak(report, 1), _gap_peak(report, 2)]
    if omegas[0] is None and omegas[1] is None:
        raise NoGapPeak("no spectral peak inside the gap for either component")

    bin_width = 2.0 * np.pi / (report.t1 - report.t0)
    lim = m * (1.0 - 1e-9)

    def objective(slot: int, w: float) -> float:
        trial = list(omegas)
        trial[slot] = w
        return lsq.solve(trial)[2]

    for _ in range(2):
        for slot in (0, 1):
            w = omegas[slot]
            if w is None:
                continue
            lo = max(-lim, w - 2.0 * bin_width)
            hi = min(lim, w + 2.0 * bin_width)
            omegas[slot] = _golden_min(lambda v: objective(slot, v), lo, hi)

    c1, c2, resid = lsq.solve(omegas)
    return AttractorFit(
        omega1=omegas[0] if omegas[0] is not None else 0.0,
        omega2=omegas[1] if omegas[1] is not None else 0.0,
        C1=c1, C2=c2, residual=resid, R=R,
    )


@dataclass
class WindowMetrics:
    t0: float
    t1: float
    gap_mass: Tuple[float, float]
    flatness: Tuple[float, float]
    fit: AttractorFit
    spectrum: SpectrumReport


def attraction_metrics(result: RunResult, p: ModelParams,
                       windows: Sequence[Tuple[float, float]],
                       R: Optional[float] = None,
                       taper: bool = True) -> List[WindowMetrics]:
    """Spectrum, flatness, and manifold-distance series over late windows.

    Each window needs a stored snapshot at its right endpoint; the fit is
    evaluated there.
    """
    out = []
    for (t0, t1) in windows:
        report = trace_spectrum(result.trace, (t0, t1), p.m, taper=taper)
        flat = modulus_flatness(result.trace, (t0, t1))
        snap = None
        for t, fieldval in result.snapshots.items():
            if abs(t - t1) <= 1e-9 * max(1.0, abs(t1)):
                snap = fieldval
                break
        if snap is None:
            raise KeyError(f"no snapshot stored at window end t = {t1}")
        fit = fit_solitary(snap, result.trace, p, R=R, window=(t0, t1))
        out.append(WindowMetrics(t0=t0, t1=t1, gap_mass=report.gap_mass,
                                 flatness=flat, fit=fit, spectrum=report))
    return out
