"""Stator-flux ripple and torque ripple of a PWM sequence.

The error between the applied vector and the reference is resolved in a
synchronous frame whose q-axis lies along ``V_ref``. Its time integral is the
stator-flux ripple; the q component scaled by machine constants is the
torque ripple.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._csv import write_table
from .errors import DomainError
from .svpwm_core import (
    SEQUENCES,
    DriveConfig,
    dwell_times,
    get_sequence,
    sample_plan,
    subcycle_playlist,
)
from .waveforms import PiecewiseLinear


@dataclass(frozen=True)
class MachineParams:
    """Induction-machine constants. Leakage coefficients are L_leak / L_O."""

    p_rated: float = 7500.0
    poles: int = 4
    r_s: float = 1.1667
    r_r: float = 3.2105
    l_o: float = 0.3025
    sigma_s: float = 0.0392
    sigma_r: float = 0.0392

    def __post_init__(self):
        for name in ("p_rated", "poles", "r_s", "r_r", "l_o", "sigma_s", "sigma_r"):
            if not getattr(self, name) > 0:
                raise DomainError(name, getattr(self, name), "> 0")
        if not self.sigma_s + self.sigma_r < 1:
            raise DomainError("sigma_s + sigma_r", self.sigma_s + self.sigma_r, "< 1")

    @property
    def leakage_factor(self):
        """1/(sigma_s + sigma_r) - 1."""
        return 1.0 / (self.sigma_s + self.sigma_r) - 1.0

    def rated_torque(self, f_base=50.0):
        """Rated power over synchronous mechanical speed at ``f_base``."""
        return self.p_rated / (2 * math.pi * f_base / (self.poles / 2))


REFERENCE_MACHINE = MachineParams()


# -- error voltage and flux ripple --------------------------------------------


@dataclass(frozen=True)
class ErrorVoltageSegments:
    durations: np.ndarray
    vq: np.ndarray
    vd: np.ndarray
    alpha: float
    ts: float
    sequence: str
    k: float
    sample_index: int = 0


def error_constants(m, alpha, config=DriveConfig()):
    """K1..K6 of the q-axis error voltage at sample angle ``alpha`` (degrees)."""
    a = math.radians(alpha)
    vl = config.vector_length
    k1 = -config.v_ref(m)
    k2 = vl * math.cos(a)
    k3 = vl * math.cos(math.pi / 3 - a)
    return {"K1": k1, "K2": k2, "K3": k3, "K4": k2 + k1, "K5": k3 + k1, "K6": k3 - k2}


def role_error_voltage(role, m, alpha, config=DriveConfig()):
    """(vq, vd) error for a sector-1 role: zero vector, V1 or V2."""
    a = math.radians(alpha)
    vl = config.vector_length
    vref = config.v_ref(m)
    if role in (0, 7):
        return -vref, 0.0
    if role == 1:
        return vl * math.cos(a) - vref, -vl * math.sin(a)
    if role == 2:
        return vl * math.cos(math.pi / 3 - a) - vref, vl * math.sin(math.pi / 3 - a)
    raise DomainError("role", role, "0, 1, 2 or 7")


def error_voltage_segments(seq, m, alpha, ts, k=0.5, config=DriveConfig(), sample_index=0):
    """Piecewise-constant (vq, vd) error voltage over one subcycle."""
    seq = get_sequence(seq) if isinstance(seq, str) else seq
    dwell = dwell_times(m, alpha, ts)
    playlist = subcycle_playlist(seq, dwell, k, sample_index)
    errs = [role_error_voltage(role, m, alpha, config) for role, _ in playlist]
    return ErrorVoltageSegments(
        durations=np.array([d for _, d in playlist]),
        vq=np.array([e[0] for e in errs]),
        vd=np.array([e[1] for e in errs]),
        alpha=alpha,
        ts=ts,
        sequence=seq.name,
        k=k,
        sample_index=sample_index,
    )


@dataclass(frozen=True)
class FluxRippleWaveform:
    """Piecewise-linear (psi_q, psi_d) in volt-seconds."""

    t: np.ndarray
    psi_q: np.ndarray
    psi_d: np.ndarray

    @property
    def q(self):
        return PiecewiseLinear(self.t, self.psi_q)

    @property
    def d(self):
        return PiecewiseLinear(self.t, self.psi_d)

    @property
    def span(self):
        return float(self.t[-1] - self.t[0])

    def __call__(self, t):
        return np.interp(t, self.t, self.psi_q), np.interp(t, self.t, self.psi_d)


def flux_ripple(segments, t0=0.0):
    """Integrate the error voltage from zero; exact at every breakpoint."""
    t = t0 + np.concatenate(([0.0], np.cumsum(segments.durations)))
    psi_q = np.concatenate(([0.0], np.cumsum(segments.vq * segments.durations)))
    psi_d = np.concatenate(([0.0], np.cumsum(segments.vd * segments.durations)))
    return FluxRippleWaveform(t, psi_q, psi_d)


def _concat(waves):
    t = [waves[0].t]
    q = [waves[0].psi_q]
    d = [waves[0].psi_d]
    for w in waves[1:]:
        # drop the duplicated joint; flux is continuous across subcycles
        t.append(w.t[1:])
        q.append(w.psi_q[1:])
        d.append(w.psi_d[1:])
    return FluxRippleWaveform(np.concatenate(t), np.concatenate(q), np.concatenate(d))


def sector_flux_ripple(seq, m, k=0.5, config=DriveConfig()):
    """Flux ripple over one sector: 2 Ts for two samples per sector, 3 Ts for three."""
    seq = get_sequence(seq) if isinstance(seq, str) else seq
    plan = sample_plan(seq, m, config)[: seq.samples_per_sector]
    waves, t0 = [], 0.0
    for i, (_, alpha, ts) in enumerate(plan):
        waves.append(flux_ripple(error_voltage_segments(seq, m, alpha, ts, k, config, i), t0))
        t0 += ts
    return _concat(waves)


def cycle_flux_ripple(seq, m, k=0.5, config=DriveConfig()):
    """Flux ripple over a full fundamental cycle (the sector pattern repeated six times)."""
    sector = sector_flux_ripple(seq, m, k, config)
    span = sector.span
    waves = [FluxRippleWaveform(sector.t + s * span, sector.psi_q, sector.psi_d) for s in range(6)]
    return _concat(waves)


# -- closed forms for the SVHE 0121-7212 pair -----------------------------------


def svhe_flux_q_closed_form(t, m, k, config=DriveConfig(), alphas=(15.0, 45.0)):
    """q-axis flux ripple of SVHE over ``0 <= t <= 2 Ts`` from the piecewise formulas.

    Sample 1 (``0121``) covers ``[0, Ts]`` at ``alphas[0]``; sample 2 (``7212``)
    covers ``[Ts, 2 Ts]`` at ``alphas[1]``. Kept independent of the
    segment integrator so the two can check each other.
    """
    t = np.asarray(t, dtype=float)
    ts = 1.0 / (6.0 * config.f1(m) * 2)
    out = np.full(t.shape, np.nan)
    eps = 1e-12 * ts  # cumulative-sum breakpoints may overshoot by an ulp

    a1 = alphas[0]
    c = error_constants(m, a1, config)
    T1, T2, T0, _ = dwell_times(m, a1, ts)
    K1, K2, K3, K4, K5 = c["K1"], c["K2"], c["K3"], c["K4"], c["K5"]
    b1, b2, b3 = T0, T0 + k * T1, ts - (1 - k) * T1
    s = (t >= -eps) & (t <= ts)
    tt = t[s]
    out[s] = np.select(
        [tt <= b1, tt <= b2, tt <= b3],
        [
            K1 * tt,
            K4 * tt - K2 * T0,
            K2 * k * T1 + K5 * tt - K3 * (T0 + k * T1),
        ],
        K4 * (tt - T2) - K2 * T0 + K5 * T2,
    )

    a2 = alphas[1]
    c = error_constants(m, a2, config)
    T1, T2, T7, _ = dwell_times(m, a2, ts)
    K1, K3, K4, K5, K6 = c["K1"], c["K3"], c["K4"], c["K5"], c["K6"]
    b1, b2, b3 = ts + T7, ts + T7 + (1 - k) * T2, 2 * ts - k * T2
    s = (t > ts) & (t <= 2 * ts + eps)
    tt = t[s]
    out[s] = np.select(
        [tt <= b1, tt <= b2, tt <= b3],
        [
            K1 * (tt - ts),
            K5 * (tt - ts) - K3 * T7,
            K6 * (T7 + (1 - k) * T2) - K3 * T7 + K4 * (tt - ts),
        ],
        K5 * (tt - ts - T1) - K3 * T7 + K4 * T1,
    )
    return out


def pp_flux_svhe(m, v_dc=1.0, alpha1=15.0):
    """Peak-to-peak q flux ripple of SVHE, V_ref * T0 at the first sample (V s)."""
    if not (0.0 < m <= 1.0):
        raise DomainError("m", m, "0 < m <= 1")
    a = math.radians(alpha1)
    ts1 = 1.0 / (600.0 * m)
    vref = math.sqrt(3) / 2 * m * v_dc
    return vref * ts1 * (1 - m * (math.sin(a) + math.sin(math.pi / 3 - a)))


def pp_flux_csv(m, v_dc=1.0, alpha2=10.0):
    """Peak-to-peak q flux ripple of CSV (V s).

    Assumes the extremes are set at the first sample, which holds for
    m >= 0.75; below that the sector scan gives a larger value.
    """
    if not (0.0 < m <= 1.0):
        raise DomainError("m", m, "0 < m <= 1")
    a = math.radians(alpha2)
    ts2 = 1.0 / (900.0 * m)
    vref = math.sqrt(3) / 2 * m * v_dc
    return ts2 * (
        vref * (1 - m * (math.sin(a) + math.sin(math.pi / 3 - a)))
        + (vref - v_dc * math.cos(math.pi / 3 - a)) * 2 * m * math.sin(a)
    )


def crossover_m(alpha1=15.0, alpha2=10.0):
    """Modulation index above which SVHE has less q ripple than CSV."""
    for name, a in (("alpha1", alpha1), ("alpha2", alpha2)):
        if not (0.0 < a < 60.0):
            raise DomainError(name, a, "0 < alpha < 60 degrees")
    a1, a2 = math.radians(alpha1), math.radians(alpha2)
    sixty = math.pi / 3
    num = 0.5 + 2 * math.sin(a2) * math.cos(sixty - a2) / math.cos(math.pi / 6)
    den = 1.5 * (math.sin(a1) + math.sin(sixty - a1)) + math.sin(a2) - math.sin(sixty - a2)
    if abs(den) < 1e-15:
        raise DomainError("alpha1, alpha2", (alpha1, alpha2), "a non-zero denominator")
    return num / den


# -- torque ---------------------------------------------------------------------


def torque_scale(machine, m, config=DriveConfig()):
    """Newton-metres per volt-second of q flux ripple."""
    f1 = config.f1(m)
    if not f1 > 0:
        raise DomainError("f1", f1, "> 0")
    return (
        (2.0 / 3.0)
        * (machine.poles / 2.0)
        * config.v_ref(m)
        / (2 * math.pi * f1)
        / machine.l_o
        * machine.leakage_factor
    )


def torque_ripple(psi_q, machine, m, config=DriveConfig()):
    """Torque ripple waveform (N m), a pure scaling of the q flux ripple."""
    if isinstance(psi_q, FluxRippleWaveform):
        psi_q = psi_q.q
    return psi_q.scaled(torque_scale(machine, m, config))


def peak_to_peak(w):
    if isinstance(w, PiecewiseLinear):
        return float(w.peak_to_peak())
    v = np.asarray(w, dtype=float)
    return float(np.ptp(v)) if v.size else 0.0


def rms_ripple(w):
    """Exact RMS of a piecewise-linear ripple waveform."""
    return float(w.rms())


def torque_ripple_pp(seq, m, k=0.5, machine=REFERENCE_MACHINE, config=DriveConfig()):
    """Peak-to-peak torque ripple over a sector by scanning the exact waveform."""
    flux = sector_flux_ripple(seq, m, k, config)
    return peak_to_peak(torque_ripple(flux, machine, m, config))


def write_ripple_csv(path, flux, machine, m, config=DriveConfig(), comment=None):
    torque = flux.psi_q * torque_scale(machine, m, config)
    rows = zip(flux.t, flux.psi_q, flux.psi_d, torque)
    write_table(path, ("t_s", "psi_q_Vs", "psi_d_Vs", "torque_Nm"), rows, comment)


# -- published analytic table and calibration ----------------------------------

RIPPLE_M = (0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95)
RIPPLE_COLUMNS = ("csv", "abc1", "abc2", "svhe", "svhe_h5", "svhe_h7")
REFERENCE_RIPPLE = {
    0.6: (20.066, 55.046, 55.07, 27.57, 27.57, 27.57),
    0.65: (17.011, 48.547, 48.618, 24.4, 24.4, 24.4),
    0.7: (14.958, 42.442, 42.432, 21.24, 21.24, 21.24),
    0.75: (13.025, 36.066, 36.038, 18.06, 18.06, 18.06),
    0.8: (11.7, 29.723, 29.588, 14.9, 14.9, 14.9),
    0.85: (10.432, 23.719, 23.741, 11.74, 11.74, 11.74),
    0.9: (9.136, 17.763, 17.812, 8.569, 8.569, 8.569),
    0.95: (7.844, 11.893, 11.908, 5.398, 5.756, 5.942),
}


def column_k(column, m, config=DriveConfig()):
    """k used for a ripple-table column: 0.5, or the solved value for H5/H7."""
    from .harmonic_elim import solve_k

    if column == "svhe_h5":
        return solve_k(m, 5, config).k
    if column == "svhe_h7":
        return solve_k(m, 7, config).k
    return 0.5


_COLUMN_SEQ = {"csv": "CSV", "abc1": "ABC1", "abc2": "ABC2", "svhe": "SVHE", "svhe_h5": "SVHE", "svhe_h7": "SVHE"}


def ripple_table(m_values=RIPPLE_M, machine=REFERENCE_MACHINE, config=DriveConfig(), ks=None):
    """Peak-to-peak torque ripple per (m, column); ``ks`` may pre-supply solved k values."""
    table = {}
    for m in m_values:
        row = []
        for col in RIPPLE_COLUMNS:
            k = ks[(m, col)] if ks and (m, col) in ks else column_k(col, m, config)
            row.append(torque_ripple_pp(SEQUENCES[_COLUMN_SEQ[col]], m, k, machine, config))
        table[m] = tuple(row)
    return table


@dataclass(frozen=True)
class Calibration:
    v_dc: float
    relative_residuals: dict  # (m, column) -> model / published - 1

    @property
    def spread(self):
        r = np.array(list(self.relative_residuals.values()))
        return float(r.max() - r.min())

    @property
    def worst(self):
        return max(self.relative_residuals.items(), key=lambda kv: abs(kv[1]))


def calibrate_vdc(machine=REFERENCE_MACHINE, f_base=50.0, published=REFERENCE_RIPPLE, columns=RIPPLE_COLUMNS):
    """Fit v_dc so the modelled ripple table matches ``published``.

    Torque ripple scales with v_dc squared, so the fit is linear in
    ``s = v_dc**2``: minimise sum((s x_i / y_i - 1)^2).
    """
    unit = DriveConfig(v_dc=1.0, f_base=f_base)
    model = ripple_table(sorted(published), machine, unit)
    idx = [RIPPLE_COLUMNS.index(c) for c in columns]
    r = np.array([model[m][i] / published[m][i] for m in sorted(published) for i in idx])
    s = float(np.sum(r) / np.sum(r * r))
    residuals = {
        (m, RIPPLE_COLUMNS[i]): s * model[m][i] / published[m][i] - 1.0
        for m in sorted(published)
        for i in idx
    }
    return Calibration(math.sqrt(s), residuals)


def write_ripple_table(path, table, comment=None):
    rows = [(m, *table[m]) for m in sorted(table)]
    header = ("m", "csv_pp_Nm", "abc1_pp_Nm", "abc2_pp_Nm", "svhe_pp_Nm", "svhe_h5_pp_Nm", "svhe_h7_pp_Nm")
    write_table(path, header, rows, comment)
