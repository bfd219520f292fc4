"""Exact piecewise waveforms.

Two shapes cover everything the package produces: inverter voltages are
piecewise constant, and integrated quantities (flux ripple, torque ripple,
sampled currents) are piecewise linear. Both keep their breakpoints so that
Fourier coefficients, peaks and RMS values can be computed in closed form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class PiecewiseConstant:
    """Periodic step waveform.

    Segment ``i`` holds ``levels[i]`` on ``[starts[i], starts[i+1])``; the last
    segment runs to ``starts[0] + period``. ``levels`` may be 1-D or carry one
    column per channel.
    """

    starts: np.ndarray
    levels: np.ndarray
    period: float

    def __post_init__(self):
        starts = _frozen(self.starts)
        levels = _frozen(self.levels)
        if starts.ndim != 1 or starts.size == 0:
            raise ValueError("starts must be a non-empty 1-D array")
        if levels.shape[0] != starts.size:
            raise ValueError("levels and starts lengths differ")
        if np.any(np.diff(starts) < 0):
            raise ValueError("starts must be non-decreasing")
        if not self.period > starts[-1] - starts[0]:
            raise ValueError("period shorter than the breakpoint span")
        object.__setattr__(self, "starts", starts)
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "period", float(self.period))

    @property
    def ends(self):
        return np.append(self.starts[1:], self.starts[0] + self.period)

    @property
    def durations(self):
        return self.ends - self.starts

    def __call__(self, t):
        """Evaluate at time(s) ``t``, wrapping periodically."""
        tt = self.starts[0] + np.mod(np.asarray(t, dtype=float) - self.starts[0], self.period)
        idx = np.searchsorted(self.starts, tt, side="right") - 1
        return self.levels[idx]

    def scaled(self, a):
        return PiecewiseConstant(self.starts, a * self.levels, self.period)

    def shifted(self, delta):
        return PiecewiseConstant(self.starts + delta, self.levels, self.period)

    def mean(self):
        d = self.durations
        return np.tensordot(d, self.levels, axes=(0, 0)) / self.period


@dataclass(frozen=True)
class PiecewiseLinear:
    """Continuous piecewise-linear function through ``(times[i], values[i])``.

    The first and last breakpoints bound the waveform; when it is used as one
    period of a periodic signal, ``times[-1] - times[0]`` is the period.
    """

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        times = _frozen(self.times)
        values = _frozen(self.values)
        if times.ndim != 1 or times.size == 0:
            raise ValueError("times must be a non-empty 1-D array")
        if values.shape[0] != times.size:
            raise ValueError("values and times lengths differ")
        if np.any(np.diff(times) < 0):
            raise ValueError("times must be non-decreasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    @property
    def span(self):
        return float(self.times[-1] - self.times[0])

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.values.ndim == 1:
            return np.interp(t, self.times, self.values)
        return np.stack(
            [np.interp(t, self.times, col) for col in self.values.T], axis=-1
        )

    def scaled(self, a):
        return PiecewiseLinear(self.times, a * self.values)

    def peak_to_peak(self):
        # Extremes of a piecewise-linear function sit on breakpoints.
        return np.ptp(self.values, axis=0)

    def rms(self):
        """Exact RMS over ``[times[0], times[-1]]``."""
        h = np.diff(self.times)
        a, b = self.values[:-1], self.values[1:]
        # integral of a linear segment squared: h (a^2 + ab + b^2) / 3
        seg = (a * a + a * b + b * b) / 3.0
        total = np.tensordot(h, seg, axes=(0, 0))
        span = self.span
        if span <= 0:
            return np.sqrt(self.values[0] ** 2)
        return np.sqrt(total / span)
