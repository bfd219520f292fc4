"""Exact Fourier analysis of piecewise waveforms, the k solver and THD."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from ._csv import write_table
from .errors import DomainError, NoSolutionError
from .svpwm_core import SEQUENCES, DriveConfig, pole_voltage_waveform
from .waveforms import PiecewiseConstant, PiecewiseLinear

_SERIES_CUTOFF = 0.1
_SERIES_TERMS = 12


def _ramp_kernels(x):
    """g0 = int_0^1 e^{-jx u} du and g1 = int_0^1 u e^{-jx u} du, elementwise."""
    x = np.asarray(x, dtype=float)
    g0 = np.empty(x.shape, dtype=complex)
    g1 = np.empty(x.shape, dtype=complex)
    small = np.abs(x) < _SERIES_CUTOFF
    xs = x[small]
    if xs.size:
        term = np.ones(xs.shape, dtype=complex)  # (-jx)^p / p!
        s0 = np.zeros(xs.shape, dtype=complex)
        s1 = np.zeros(xs.shape, dtype=complex)
        for p in range(_SERIES_TERMS):
            s0 += term / (p + 1)
            s1 += term / (p + 2)
            term = term * (-1j * xs) / (p + 1)
        g0[small] = s0
        g1[small] = s1
    xl = x[~small]
    if xl.size:
        e = np.exp(-1j * xl)
        g0[~small] = (1 - e) / (1j * xl)
        g1[~small] = 1j * e / xl - (1 - e) / xl**2
    return g0, g1


def _coeff_constant(w, n):
    T = w.period
    omega = 2 * math.pi * n / T
    d = w.durations
    mid = w.starts + d / 2
    # int over a segment = d * exp(-j w mid) * sin(w d / 2) / (w d / 2)
    kern = d * np.exp(-1j * omega * mid) * np.sinc(omega * d / (2 * math.pi))
    return np.tensordot(kern, w.levels, axes=(0, 0)) / T


def _coeff_linear(w, n):
    T = w.span
    omega = 2 * math.pi * n / T
    h = np.diff(w.times)
    a = w.times[:-1]
    g0, g1 = _ramp_kernels(omega * h)
    base = h * np.exp(-1j * omega * a)
    wa = base * (g0 - g1)
    wb = base * g1
    return (
        np.tensordot(wa, w.values[:-1], axes=(0, 0))
        + np.tensordot(wb, w.values[1:], axes=(0, 0))
    ) / T


def fourier_coefficient(w, n):
    """Complex coefficient ``c_n = (1/T) int f(t) exp(-j 2 pi n t / T) dt``.

    Integration is closed-form over every segment, so the result carries no
    sampling error. ``w`` is a :class:`PiecewiseConstant` (period ``w.period``)
    or a :class:`PiecewiseLinear` (period = its span). Multi-channel waveforms
    return one coefficient per channel.
    """
    if isinstance(w, PiecewiseConstant):
        if w.starts.size == 0:
            raise DomainError("w", w, "a non-empty waveform")
        return _coeff_constant(w, n)
    if isinstance(w, PiecewiseLinear):
        if w.times.size < 2 or w.span <= 0:
            raise DomainError("w", "degenerate", "at least two breakpoints spanning a period")
        return _coeff_linear(w, n)
    raise TypeError(f"unsupported waveform type {type(w).__name__}")


@dataclass(frozen=True)
class SpectrumResult:
    """Two-sided Fourier coefficients ``c_1..c_nmax`` of a periodic signal."""

    fundamental_hz: float
    coefficients: dict

    @property
    def n_max(self):
        return max(self.coefficients)

    def magnitude(self, n):
        return abs(self.coefficients[n])

    def relative(self, n):
        return abs(self.coefficients[n]) / abs(self.coefficients[1])

    @property
    def reference_rms(self):
        """RMS of the fundamental, sqrt(2) |c_1|."""
        return math.sqrt(2.0) * abs(self.coefficients[1])

    def harmonic_rms(self, n):
        return math.sqrt(2.0) * abs(self.coefficients[n])

    def to_csv(self, path, comment=None):
        c1 = abs(self.coefficients[1])
        rows = [
            (n, abs(c), math.atan2(c.imag, c.real), abs(c) / c1 if c1 else float("nan"))
            for n, c in sorted(self.coefficients.items())
        ]
        write_table(path, ("n", "magnitude", "phase_rad", "magnitude_rel_fundamental"), rows, comment)


def spectrum(w, n_max):
    """Coefficients for harmonic orders 1..n_max of a single-channel waveform."""
    if n_max < 1:
        raise DomainError("n_max", n_max, ">= 1")
    period = w.period if isinstance(w, PiecewiseConstant) else w.span
    coeffs = {n: complex(fourier_coefficient(w, n)) for n in range(1, int(n_max) + 1)}
    return SpectrumResult(1.0 / period, coeffs)


class ThdResult(NamedTuple):
    percent: float
    linear_sum_percent: float  # sum of I_n / I_1, the un-squared form, for comparison

    def __float__(self):
        return self.percent


def thd(s, n_max=None):
    """Total harmonic distortion in percent, RMS definition, orders 2..n_max."""
    n_max = min(49, s.n_max) if n_max is None else min(int(n_max), s.n_max)
    i1 = abs(s.coefficients[1])
    if i1 == 0:
        raise DomainError("fundamental", 0.0, "a non-zero fundamental")
    mags = np.array([abs(s.coefficients[n]) for n in range(2, n_max + 1)])
    return ThdResult(
        100.0 * math.sqrt(float(np.sum(mags**2))) / i1,
        100.0 * float(np.sum(mags)) / i1,
    )


# -- dwell-division coefficient ------------------------------------------------


@dataclass(frozen=True)
class EliminationSolution:
    k: float
    target_harmonic: int
    residual: float  # |c_target| / |c_1| at k
    m: float
    brackets: tuple = ()
    roots: tuple = ()


def harmonic_projection(m, k, target, config=DriveConfig()):
    """Signed size of harmonic ``target`` in the SVHE phase-a pole voltage.

    The coefficient is rotated so the fundamental has zero phase; what is left
    is real for this waveform family, and its sign change marks the zero.
    Returned relative to ``|c_1|``.
    """
    w = pole_voltage_waveform(SEQUENCES["SVHE"], m, k, config).phase(0)
    c1 = complex(fourier_coefficient(w, 1))
    ch = complex(fourier_coefficient(w, target))
    aligned = ch * np.exp(-1j * target * math.atan2(c1.imag, c1.real))
    return aligned.real / abs(c1)


def elimination_residual(m, k, target, config=DriveConfig()):
    w = pole_voltage_waveform(SEQUENCES["SVHE"], m, k, config).phase(0)
    return abs(complex(fourier_coefficient(w, target))) / abs(complex(fourier_coefficient(w, 1)))


def solve_k(m, target, config=DriveConfig(), tol=1e-9, n_scan=1000, bracket=(0.0, 1.0)):
    """Find k in (0, 1) that removes harmonic ``target`` (5 or 7) from the SVHE pole voltage.

    Coarse scan of ``n_scan`` interior points, then Brent's method on every
    sign-change bracket down to ``tol``. Several roots are possible; the
    one closest to 0.5 is returned and all of them are reported.
    """
    if target not in (5, 7):
        raise DomainError("target", target, "5 or 7")
    if not (0.0 < m <= 1.0):
        raise DomainError("m", m, "0 < m <= 1")
    if not tol > 0:
        raise DomainError("tol", tol, "> 0")
    lo, hi = bracket
    lo, hi = max(lo, 0.0), min(hi, 1.0)
    ks = np.linspace(lo, hi, n_scan + 2)[1:-1]
    g = np.array([harmonic_projection(m, k, target, config) for k in ks])

    def g_of(k):
        return harmonic_projection(m, k, target, config)

    brackets, roots = [], []
    for i in range(len(ks) - 1):
        if g[i] == 0.0:
            brackets.append((float(ks[i]), float(ks[i])))
            roots.append(float(ks[i]))
        elif g[i] * g[i + 1] < 0:
            brackets.append((float(ks[i]), float(ks[i + 1])))
            roots.append(float(brentq(g_of, ks[i], ks[i + 1], xtol=tol, rtol=4 * np.finfo(float).eps)))
    if g[-1] == 0.0:
        roots.append(float(ks[-1]))
        brackets.append((float(ks[-1]), float(ks[-1])))

    if not roots:
        i = int(np.argmin(np.abs(g)))
        raise NoSolutionError(m, target, float(abs(g[i])), float(ks[i]))

    k = min(roots, key=lambda r: abs(r - 0.5))
    return EliminationSolution(
        k=k,
        target_harmonic=target,
        residual=elimination_residual(m, k, target, config),
        m=m,
        brackets=tuple(brackets),
        roots=tuple(roots),
    )


def write_solutions(path, solutions, comment=None):
    """Solve-k report, one row per m: ``m, k5, residual5, k7, residual7``.

    ``solutions`` holds :class:`EliminationSolution` objects or ``(m, target)``
    tuples for cells without a root; those are written as ``none``/``nan``.
    """
    rows = {}
    for s in solutions:
        if isinstance(s, EliminationSolution):
            m, target, cell = s.m, s.target_harmonic, (s.k, s.residual)
        else:
            (m, target), cell = s, ("none", "nan")
        rows.setdefault(m, {})[target] = cell
    body = []
    for m in sorted(rows):
        k5, r5 = rows[m].get(5, ("none", "nan"))
        k7, r7 = rows[m].get(7, ("none", "nan"))
        body.append((m, k5, r5, k7, r7))
    write_table(path, ("m", "k5", "residual5", "k7", "residual7"), body, comment)
