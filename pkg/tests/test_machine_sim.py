import math
from dataclasses import replace

import numpy as np
import pytest

from svhe_ripple import (
    SEQUENCES,
    REFERENCE_MACHINE,
    DomainError,
    DriveConfig,
    SimConfig,
    SimulationError,
    SinusoidalSupply,
    fourier_coefficient,
    line_current_thd,
    pole_voltage_waveform,
    simulate_no_load,
    solve_k,
    torque_pp_from_sim,
)
from svhe_ripple._csv import read_table
from svhe_ripple.machine_sim import (
    REFERENCE_THD,
    line_current_spectra,
    rk4_linear_map,
    rk4_step,
    thd_cell,
    thd_table,
    torque_agreement,
    write_thd_table,
)

A = np.exp(2j * np.pi / 3)


def harmonic_circuit_thd(w, machine, n_max=49):
    """Line-current THD from per-harmonic equivalent circuits, no time stepping.

    Each space-vector harmonic at angular frequency W sees
    Z = Rs + jW Lls + 1 / (1/(jW Lm) + s/(Rr + j s W Llr)) with slip
    s = (W - w_r)/W and the rotor at synchronous speed w_r.
    """
    wr = 2 * np.pi / w.period
    lm = machine.l_o
    lls, llr = machine.sigma_s * lm, machine.sigma_r * lm

    def current(n):
        ca, cb, cc = (fourier_coefficient(w.phase(i), n) for i in range(3))
        v = 2 / 3 * (ca + A * cb + A * A * cc)
        W = n * wr
        s = (W - wr) / W
        z = machine.r_s + 1j * W * lls + 1 / (1 / (1j * W * lm) + s / (machine.r_r + 1j * s * W * llr))
        return v / z

    def ia(n):
        # ia = Re(i_s); its coefficient at +n mixes the +n and -n space-vector lines
        return 0.5 * (current(n) + np.conj(current(-n)))

    i1 = abs(ia(1))
    return 100 * math.sqrt(sum(abs(ia(n)) ** 2 for n in range(2, n_max + 1))) / i1


class TestRk4:
    def test_linear_map_matches_generic_step(self):
        rng = np.random.default_rng(1)
        a = rng.normal(size=(4, 4))
        b = rng.normal(size=(4, 2))
        u = rng.normal(size=2)
        x = rng.normal(size=4)
        m, n = rk4_linear_map(a, b, 0.01)
        np.testing.assert_allclose(m @ x + n @ u, rk4_step(lambda t, y: a @ y + b @ u, 0.0, x, 0.01), rtol=1e-13)

    def test_fourth_order(self):
        errs = [abs(rk4_step(lambda t, y: -y, 0.0, np.array([1.0]), h)[0] - math.exp(-h)) for h in (0.1, 0.05)]
        assert errs[0] / errs[1] == pytest.approx(32, rel=0.05)  # local error O(h^5)


class TestSinusoidal:
    r = simulate_no_load(w=SinusoidalSupply(0.8))

    def test_no_distortion(self):
        assert max(line_current_thd(self.r)) < 0.1

    def test_no_ripple(self):
        assert torque_pp_from_sim(self.r) < 0.01 * REFERENCE_MACHINE.rated_torque()

    def test_magnetising_current(self):
        # at zero slip the rotor branch is open: |I| = V / |Rs + jW Ls|
        sup = SinusoidalSupply(0.8)
        wr = 2 * np.pi / sup.period
        ls = REFERENCE_MACHINE.l_o * (1 + REFERENCE_MACHINE.sigma_s)
        expected = sup.amplitude / abs(REFERENCE_MACHINE.r_s + 1j * wr * ls)
        assert np.ptp(self.r.ia) / 2 == pytest.approx(expected, rel=1e-4)


@pytest.fixture(scope="module")
def csv08():
    w = pole_voltage_waveform(SEQUENCES["CSV"], 0.8)
    return w, simulate_no_load(w=w)


class TestPwm:
    def test_result_shape(self, csv08):
        w, r = csv08
        assert np.all(np.diff(r.t) > 0)
        assert r.t[0] == pytest.approx(10 * w.period)
        assert r.t[-1] - r.t[0] == pytest.approx(w.period, rel=1e-12)
        assert not r.t.flags.writeable

    def test_balanced_currents(self, csv08):
        _, r = csv08
        np.testing.assert_allclose(r.ia + r.ib + r.ic, 0.0, atol=1e-9)
        thds = line_current_thd(r)
        assert max(thds) - min(thds) < 0.5

    def test_mean_torque_near_zero(self, csv08):
        _, r = csv08
        sl = r.cycle(-1)
        assert abs(np.trapezoid(r.torque[sl], r.t[sl]) / r.period) < 0.02 * np.ptp(r.torque)

    @pytest.mark.parametrize("name,m", [("CSV", 0.8), ("SVHE", 0.6), ("SVHE", 0.95), ("ABC1", 0.7)])
    def test_matches_harmonic_circuit(self, name, m):
        w = pole_voltage_waveform(SEQUENCES[name], m, 0.5)
        r = simulate_no_load(w=w)
        assert line_current_thd(r)[0] == pytest.approx(harmonic_circuit_thd(w, REFERENCE_MACHINE), rel=1e-4)

    def test_dt_halving(self):
        w = pole_voltage_waveform(SEQUENCES["SVHE"], 0.8, 0.5)
        a = simulate_no_load(w=w)
        b = simulate_no_load(w=w, cfg=SimConfig(dt=a.dt / 2))
        assert abs(line_current_thd(a)[0] - line_current_thd(b)[0]) < 0.5
        assert torque_pp_from_sim(a) == pytest.approx(torque_pp_from_sim(b), rel=0.01)

    def test_vdc_scaling(self):
        out = []
        for v in (300.0, 600.0):
            drive = DriveConfig(v_dc=v)
            out.append(simulate_no_load(drive=drive, w=pole_voltage_waveform(SEQUENCES["CSV"], 0.8, 0.5, drive)))
        i1 = [abs(line_current_spectra(r, 1)[0].coefficients[1]) for r in out]
        assert i1[1] == pytest.approx(2 * i1[0], rel=1e-9)
        assert abs(line_current_thd(out[0])[0] - line_current_thd(out[1])[0]) < 0.1

    def test_zero_initial_state_converges(self):
        w = pole_voltage_waveform(SEQUENCES["CSV"], 0.8)
        a = simulate_no_load(w=w)
        b = simulate_no_load(w=w, cfg=SimConfig(initial_state="zero", n_settle_cycles=60))
        assert line_current_thd(b)[0] == pytest.approx(line_current_thd(a)[0], abs=0.05)

    def test_several_measure_cycles(self):
        w = pole_voltage_waveform(SEQUENCES["SVHE"], 0.9)
        r = simulate_no_load(w=w, cfg=SimConfig(n_measure_cycles=3))
        assert len(r.cycle_bounds) == 4
        a, b = r.cycle(0), r.cycle(2)
        np.testing.assert_allclose(r.ia[a], r.ia[b], atol=1e-9 * np.max(np.abs(r.ia)))

    def test_harmonic_five_absent_after_elimination(self):
        m = 0.8
        w = pole_voltage_waveform(SEQUENCES["SVHE"], m, solve_k(m, 5, n_scan=100).k)
        s = line_current_spectra(simulate_no_load(w=w), 7)[0]
        assert s.relative(5) < 1e-5
        assert s.relative(7) > 1e-3


class TestErrors:
    def test_dt_too_large(self):
        w = pole_voltage_waveform(SEQUENCES["CSV"], 0.8)
        with pytest.raises(DomainError):
            simulate_no_load(w=w, cfg=SimConfig(dt=1e-4))

    def test_period_mismatch(self):
        w = pole_voltage_waveform(SEQUENCES["CSV"], 0.8, config=DriveConfig(f_base=60.0))
        with pytest.raises(DomainError):
            simulate_no_load(drive=DriveConfig(f_base=50.0), w=w)

    def test_unstable_machine_names_dt(self):
        w = pole_voltage_waveform(SEQUENCES["CSV"], 0.8)
        with pytest.raises(SimulationError) as exc:
            simulate_no_load(machine=replace(REFERENCE_MACHINE, r_s=1e6), w=w)
        assert exc.value.dt > 0

    def test_missing_waveform(self):
        with pytest.raises(DomainError):
            simulate_no_load()

    @pytest.mark.parametrize("bad", [dict(n_measure_cycles=0), dict(dt=-1.0), dict(initial_state="warm")])
    def test_config(self, bad):
        with pytest.raises(DomainError):
            SimConfig(**bad)


class TestTables:
    def test_torque_agreement_svhe(self):
        ag = torque_agreement("svhe", 0.8)
        assert ag.pearson > 0.95
        assert ag.pp_ratio == pytest.approx(1.0, abs=0.1)

    def test_thd_cell_examples(self):
        assert thd_cell("csv", 0.8) == pytest.approx(REFERENCE_THD[0.8][0], rel=0.1)
        assert thd_cell("svhe_h5", 0.95) == pytest.approx(REFERENCE_THD[0.95][2], rel=0.1)

    def test_failed_cell_is_nan(self, tmp_path):
        table = thd_table([0.8], machine=replace(REFERENCE_MACHINE, r_s=1e6))
        assert all(math.isnan(v) for v in table[0.8])
        write_thd_table(tmp_path / "t.csv", table)
        header, rows = read_table(tmp_path / "t.csv")
        assert header == ["m", "csv_thd_pct", "svhe_hne_thd_pct", "svhe_h5_thd_pct", "svhe_h7_thd_pct"]
        assert rows[0][1:] == ["nan"] * 4

    def test_sim_csv(self, tmp_path, csv08):
        _, r = csv08
        r.to_csv(tmp_path / "s.csv")
        header, rows = read_table(tmp_path / "s.csv")
        assert header == ["t_s", "ia_A", "ib_A", "ic_A", "torque_Nm"]
        assert len(rows) == len(r.t)
