"""No-load induction-machine simulation driven by synthesised pole voltages.

Two-axis model in the stationary frame with stator and rotor flux linkages as
states. The rotor turns at synchronous electrical speed, so the model is
linear and time-invariant between switching instants; integration uses
fixed-step RK4 with every step boundary on a switching instant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._csv import write_table
from .errors import DomainError, SimulationError
from .harmonic_elim import spectrum, thd
from .ripple_analysis import REFERENCE_MACHINE, sector_flux_ripple, torque_ripple
from .svpwm_core import DriveConfig, ThreePhaseWaveform, get_sequence, pole_voltage_waveform
from .waveforms import PiecewiseLinear

SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class SimConfig:
    dt: float | None = None  # None: shortest switching interval / steps_per_slot
    steps_per_slot: int = 20
    n_settle_cycles: int = 10
    n_measure_cycles: int = 1
    initial_state: str = "periodic"  # or "zero"

    def __post_init__(self):
        if self.n_settle_cycles < 0 or self.n_measure_cycles < 1:
            raise DomainError("cycles", (self.n_settle_cycles, self.n_measure_cycles), "settle >= 0, measure >= 1")
        if self.steps_per_slot < 1:
            raise DomainError("steps_per_slot", self.steps_per_slot, ">= 1")
        if self.dt is not None and not self.dt > 0:
            raise DomainError("dt", self.dt, "> 0")
        if self.initial_state not in ("periodic", "zero"):
            raise DomainError("initial_state", self.initial_state, "'periodic' or 'zero'")


@dataclass(frozen=True)
class SinusoidalSupply:
    """Balanced sinusoidal phase voltages equal to the PWM fundamental at ``m``."""

    m: float
    drive: DriveConfig = DriveConfig()

    @property
    def period(self):
        return 1.0 / self.drive.f1(self.m)

    @property
    def amplitude(self):
        # peak phase voltage of linear-range SVPWM: m v_dc / sqrt(3)
        return self.m * self.drive.v_dc / SQRT3

    def alpha_beta(self, t):
        w = 2 * math.pi / self.period
        return self.amplitude * np.array([math.cos(w * t), math.sin(w * t)])


def _state_matrices(machine, omega_r):
    ls = machine.l_o * (1 + machine.sigma_s)
    lr = machine.l_o * (1 + machine.sigma_r)
    lm = machine.l_o
    det = ls * lr - lm * lm
    # currents from fluxes: i_s = C_s x, i_r = C_r x
    c_s = np.array([[lr, 0, -lm, 0], [0, lr, 0, -lm]]) / det
    c_r = np.array([[-lm, 0, ls, 0], [0, -lm, 0, ls]]) / det
    a = np.zeros((4, 4))
    a[0:2] = -machine.r_s * c_s
    a[2:4] = -machine.r_r * c_r
    a[2, 3] -= omega_r
    a[3, 2] += omega_r
    b = np.zeros((4, 2))
    b[0, 0] = b[1, 1] = 1.0
    return a, b, c_s


def rk4_step(f, t, x, h):
    """One classical Runge-Kutta step of ``x' = f(t, x)``."""
    k1 = f(t, x)
    k2 = f(t + h / 2, x + h / 2 * k1)
    k3 = f(t + h / 2, x + h / 2 * k2)
    k4 = f(t + h, x + h * k3)
    return x + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def rk4_linear_map(a, b, h):
    """RK4 step of ``x' = A x + B u`` with ``u`` held constant, as ``x -> M x + N u``.

    Algebraically identical to :func:`rk4_step` for this right-hand side.
    """
    ha = h * a
    eye = np.eye(a.shape[0])
    ha2 = ha @ ha
    ha3 = ha2 @ ha
    m = eye + ha + ha2 / 2 + ha3 / 6 + ha3 @ ha / 24
    n = h * (eye + ha / 2 + ha2 / 6 + ha3 / 24) @ b
    return m, n


@dataclass(frozen=True)
class SimResult:
    t: np.ndarray
    ia: np.ndarray
    ib: np.ndarray
    ic: np.ndarray
    torque: np.ndarray
    period: float
    cycle_bounds: tuple  # indices into t where each measured cycle starts/ends
    dt: float

    @property
    def window_start(self):
        return float(self.t[0])

    def cycle(self, i=-1):
        """Index slice of measured cycle ``i``."""
        n = len(self.cycle_bounds) - 1
        i = i % n
        return slice(self.cycle_bounds[i], self.cycle_bounds[i + 1] + 1)

    def currents(self):
        return np.stack([self.ia, self.ib, self.ic], axis=1)

    def to_csv(self, path, comment=None):
        rows = zip(self.t, self.ia, self.ib, self.ic, self.torque)
        write_table(path, ("t_s", "ia_A", "ib_A", "ic_A", "torque_Nm"), rows, comment)


def _auto_dt(durations, cfg):
    d_min = float(np.min(durations[durations > 0]))
    limit = d_min / 20.0
    if cfg.dt is None:
        return d_min / max(cfg.steps_per_slot, 20)
    if cfg.dt > limit * (1 + 1e-9):
        raise DomainError("dt", cfg.dt, f"<= {limit:.3e} s (shortest switching interval / 20)")
    return cfg.dt


def _check_finite(x, dt):
    if not np.all(np.isfinite(x)) or np.max(np.abs(x)) > 1e9:
        raise SimulationError("state diverged during integration", dt)


def simulate_no_load(machine=REFERENCE_MACHINE, drive=DriveConfig(), w=None, cfg=SimConfig()):
    """Integrate the machine fed by ``w`` (pole voltages or a :class:`SinusoidalSupply`)."""
    if w is None:
        raise DomainError("w", None, "a ThreePhaseWaveform or SinusoidalSupply")
    period = w.period
    if isinstance(w, ThreePhaseWaveform) and not math.isnan(w.m):
        expected = 1.0 / drive.f1(w.m)
        if abs(period - expected) > 1e-9 * expected:
            raise DomainError("w.period", period, f"1/f1 = {expected}")
    omega_r = 2 * math.pi / period  # synchronous, electrical
    a, b, c_s = _state_matrices(machine, omega_r)

    if isinstance(w, SinusoidalSupply):
        dt = cfg.dt if cfg.dt is not None else period / 4000
        n_steps = max(1, int(math.ceil(period / dt - 1e-9)))
        h = period / n_steps

        def f(t, x):
            return a @ x + b @ w.alpha_beta(t)

        def run(x, record):
            xs = [x] if record else None
            for j in range(n_steps):
                x = rk4_step(f, j * h, x, h)
                if record:
                    xs.append(x)
            return x, xs

        step_times = np.arange(n_steps + 1) * h
        homogeneous = None
    else:
        durs = w.durations
        keep = durs > 0
        durs = durs[keep]
        lv = w.levels[keep]
        v_ab = np.stack(
            [(2 * lv[:, 0] - lv[:, 1] - lv[:, 2]) / 3.0, (lv[:, 1] - lv[:, 2]) / SQRT3], axis=1
        )
        dt = _auto_dt(durs, cfg)
        cache = {}
        plan = []
        for d, u in zip(durs, v_ab):
            n = max(1, int(math.ceil(d / dt - 1e-9)))
            h = d / n
            key = round(h, 18)
            if key not in cache:
                mm, nn = rk4_linear_map(a, b, h)
                if np.max(np.abs(np.linalg.eigvals(mm))) >= 1.0:
                    raise SimulationError("RK4 step is unstable for this machine", h)
                cache[key] = (mm, nn)
            mm, nn = cache[key]
            plan.append((n, h, mm, nn @ u))

        def run(x, record):
            xs = [x] if record else None
            for n, _, mm, g in plan:
                for _ in range(n):
                    x = mm @ x + g
                    if record:
                        xs.append(x)
            return x, xs

        step_times = np.concatenate(([0.0], np.cumsum([h for n, h, _, _ in plan for _ in range(n)])))

        def homogeneous():
            phi = np.eye(4)
            for n, _, mm, _ in plan:
                phi = np.linalg.matrix_power(mm, n) @ phi
            return phi

    x = np.zeros(4)
    if cfg.initial_state == "periodic":
        g_period, _ = run(np.zeros(4), False)
        if homogeneous is not None:
            phi = homogeneous()
        else:
            phi = np.column_stack([run(e, False)[0] - g_period for e in np.eye(4)])
        x = np.linalg.solve(np.eye(4) - phi, g_period)
    _check_finite(x, dt)

    for _ in range(cfg.n_settle_cycles):
        x, _ = run(x, False)
        _check_finite(x, dt)

    t_all, x_all, bounds = [], [], [0]
    t0 = cfg.n_settle_cycles * period
    for c in range(cfg.n_measure_cycles):
        x_end, xs = run(x, True)
        _check_finite(x_end, dt)
        xs = np.array(xs)
        ts = t0 + c * period + step_times
        if c > 0:
            xs, ts = xs[1:], ts[1:]
        x_all.append(xs)
        t_all.append(ts)
        bounds.append(bounds[-1] + len(step_times) - 1)
        x = x_end
    xs = np.concatenate(x_all)
    ts = np.concatenate(t_all)

    i_ab = xs @ c_s.T
    ia = i_ab[:, 0]
    ib = -0.5 * i_ab[:, 0] + SQRT3 / 2 * i_ab[:, 1]
    ic = -0.5 * i_ab[:, 0] - SQRT3 / 2 * i_ab[:, 1]
    torque = 1.5 * (machine.poles / 2) * (xs[:, 0] * i_ab[:, 1] - xs[:, 1] * i_ab[:, 0])
    freeze = [ts, ia, ib, ic, torque]
    for arr in freeze:
        arr.setflags(write=False)
    return SimResult(ts, ia, ib, ic, torque, period, tuple(bounds), dt)


def line_current_spectra(r, n_max=49):
    """Spectra of the three line currents over the last measured cycle."""
    sl = r.cycle(-1)
    t = r.t[sl]
    return [spectrum(PiecewiseLinear(t, i[sl]), n_max) for i in (r.ia, r.ib, r.ic)]


def line_current_thd(r, n_max=49):
    """Per-phase current THD (%) over one steady-state cycle."""
    sl = r.cycle(-1)
    if r.t[sl][-1] - r.t[sl][0] < r.period * (1 - 1e-9):
        raise DomainError("measure window", r.t[sl][-1] - r.t[sl][0], f">= one period ({r.period})")
    return [thd(s, n_max).percent for s in line_current_spectra(r, n_max)]


def sector_window(r, sector=0):
    sl = r.cycle(-1)
    t = r.t[sl]
    start = t[0] + sector * r.period / 6
    tol = 1e-9 * r.period
    mask = (t >= start - tol) & (t <= start + r.period / 6 + tol)
    return t[mask], r.torque[sl][mask]


def torque_pp_from_sim(r, sector=0):
    """Peak-to-peak electromagnetic torque over one sector of the last measured cycle."""
    _, tq = sector_window(r, sector)
    return float(np.ptp(tq))


@dataclass(frozen=True)
class TorqueAgreement:
    pearson: float
    pp_sim: float
    pp_analytic: float

    @property
    def pp_ratio(self):
        return self.pp_sim / self.pp_analytic


def torque_agreement(seq, m, k=0.5, machine=REFERENCE_MACHINE, drive=DriveConfig(), cfg=SimConfig()):
    """Compare simulated torque with the analytic ripple over the first sector."""
    seq = get_sequence(seq) if isinstance(seq, str) else seq
    w = pole_voltage_waveform(seq, m, k, drive)
    r = simulate_no_load(machine, drive, w, cfg)
    t, tq = sector_window(r, 0)
    analytic = torque_ripple(sector_flux_ripple(seq, m, k, drive), machine, m, drive)
    ya = analytic(t - t[0])
    pearson = float(np.corrcoef(ya, tq)[0, 1])
    return TorqueAgreement(pearson, float(np.ptp(tq)), float(analytic.peak_to_peak()))


# -- published THD table ------------------------------------------------------------

THD_COLUMNS = ("csv", "svhe", "svhe_h5", "svhe_h7")
REFERENCE_THD = {
    0.6: (71.84, 87.83, 84.57, 97.71),
    0.65: (68.32, 79.67, 75.96, 90.96),
    0.7: (65.12, 71.85, 67.58, 84.34),
    0.75: (62.32, 64.45, 59.48, 78.23),
    0.8: (59.95, 57.82, 52.01, 72.64),
    0.85: (58.06, 52.22, 45.36, 67.68),
    0.9: (56.9, 47.62, 39.67, 63.31),
    0.95: (56.43, 44.84, 35.78, 60.03),
}


def thd_cell(column, m, machine=REFERENCE_MACHINE, drive=DriveConfig(), cfg=SimConfig(), n_max=49):
    """Phase-averaged line-current THD (%) for one table cell."""
    from .ripple_analysis import column_k

    seq = get_sequence("CSV" if column == "csv" else "SVHE")
    k = column_k(column, m, drive)
    w = pole_voltage_waveform(seq, m, k, drive)
    r = simulate_no_load(machine, drive, w, cfg)
    return float(np.mean(line_current_thd(r, n_max)))


def thd_table(m_values=tuple(REFERENCE_THD), machine=REFERENCE_MACHINE, drive=DriveConfig(), cfg=SimConfig(), n_max=49):
    """THD per (m, column); a failing cell is recorded as NaN and the sweep continues."""
    table = {}
    for m in m_values:
        row = []
        for col in THD_COLUMNS:
            try:
                row.append(thd_cell(col, m, machine, drive, cfg, n_max))
            except (ArithmeticError, ValueError):
                row.append(float("nan"))
        table[m] = tuple(row)
    return table


def write_thd_table(path, table, comment=None):
    rows = [(m, *table[m]) for m in sorted(table)]
    header = ("m", "csv_thd_pct", "svhe_hne_thd_pct", "svhe_h5_thd_pct", "svhe_h7_thd_pct")
    write_table(path, header, rows, comment)
