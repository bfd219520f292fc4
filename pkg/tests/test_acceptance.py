"""Acceptance criteria, each at its stated tolerance.

Run ``pytest tests/test_acceptance.py -v``; the terminal summary prints one
PASS/FAIL line per criterion.
"""

import time
import timeit

import numpy as np
import pytest

from svhe_ripple import (
    DEFAULT_VDC,
    SEQUENCES,
    DriveConfig,
    crossover_m,
    error_voltage_segments,
    flux_ripple,
    pole_voltage_waveform,
    sector_flux_ripple,
    simulate_no_load,
    solve_k,
    switching_count,
    torque_ripple_pp,
)
from svhe_ripple.machine_sim import REFERENCE_THD, THD_COLUMNS, line_current_spectra, thd_table, torque_agreement
from svhe_ripple.ripple_analysis import (
    REFERENCE_RIPPLE,
    RIPPLE_COLUMNS,
    RIPPLE_M,
    calibrate_vdc,
    ripple_table,
    svhe_flux_q_closed_form,
)

criterion = pytest.mark.criterion
M_GRID = [round(0.05 * i, 2) for i in range(1, 21)]


# 1 -----------------------------------------------------------------------------


@criterion(1, "crossover_m(15, 10) = 0.8847 +/- 1e-4, < 1 ms")
def test_c1_crossover_value():
    assert abs(crossover_m(15.0, 10.0) - 0.8847) <= 1e-4


@criterion(1, "crossover_m(15, 10) = 0.8847 +/- 1e-4, < 1 ms")
def test_c1_crossover_runtime():
    per_call = min(timeit.repeat(lambda: crossover_m(15.0, 10.0), number=1000, repeat=3)) / 1000
    assert per_call < 1e-3


# 2 -----------------------------------------------------------------------------


@criterion(2, "CSV/SVHE peak-to-peak ratio within 1 % of the table, sweep < 1 s")
@pytest.mark.parametrize("m", RIPPLE_M)
def test_c2_ratio(m):
    ratio = torque_ripple_pp(SEQUENCES["CSV"], m) / torque_ripple_pp(SEQUENCES["SVHE"], m, 0.5)
    published = REFERENCE_RIPPLE[m][0] / REFERENCE_RIPPLE[m][3]
    print(f"m={m}: model {ratio:.4f} published {published:.4f}")
    assert ratio == pytest.approx(published, rel=0.01)


@criterion(2, "CSV/SVHE peak-to-peak ratio within 1 % of the table, sweep < 1 s")
def test_c2_runtime():
    t0 = time.perf_counter()
    for m in RIPPLE_M:
        torque_ripple_pp(SEQUENCES["CSV"], m)
        torque_ripple_pp(SEQUENCES["SVHE"], m, 0.5)
    assert time.perf_counter() - t0 < 1.0


# 3 -----------------------------------------------------------------------------


@pytest.fixture(scope="module")
def calibration():
    return calibrate_vdc()


@pytest.fixture(scope="module")
def calibrated_table(calibration):
    return ripple_table(RIPPLE_M, config=DriveConfig(v_dc=calibration.v_dc))


@criterion(3, "calibrated table: fit spread < 1 %, every cell within 2 %")
def test_c3_fit_spread(calibration):
    print(f"v_dc = {calibration.v_dc:.3f} V, spread = {100 * calibration.spread:.2f} %, worst = {calibration.worst}")
    assert abs(calibration.v_dc - DEFAULT_VDC) < 0.05
    assert calibration.spread < 0.01


@criterion(3, "calibrated table: fit spread < 1 %, every cell within 2 %")
@pytest.mark.parametrize("col", RIPPLE_COLUMNS)
@pytest.mark.parametrize("m", RIPPLE_M)
def test_c3_cell(calibrated_table, m, col):
    i = RIPPLE_COLUMNS.index(col)
    model, published = calibrated_table[m][i], REFERENCE_RIPPLE[m][i]
    print(f"m={m} {col}: model {model:.3f} published {published:.3f}")
    assert model == pytest.approx(published, rel=0.02)


# 4 -----------------------------------------------------------------------------


def _random_pairs(n=50, seed=2024):
    rng = np.random.default_rng(seed)
    return list(zip(rng.uniform(0.05, 1.0, n), rng.uniform(0.01, 0.99, n)))


@criterion(4, "closed-form q ripple equals integrated error voltage within 1e-10")
@pytest.mark.parametrize("m,k", _random_pairs())
def test_c4_closed_form(m, k):
    cfg = DriveConfig()
    f = sector_flux_ripple(SEQUENCES["SVHE"], m, k, cfg)
    scale = np.max(np.abs(f.psi_q))
    err_bp = np.max(np.abs(svhe_flux_q_closed_form(f.t, m, k, cfg) - f.psi_q))
    t = np.random.default_rng(int(m * 1e6)).uniform(0.0, f.span, 100)
    err_in = np.max(np.abs(svhe_flux_q_closed_form(t, m, k, cfg) - f.q(t)))
    assert max(err_bp, err_in) <= 1e-10 * scale


# 5 -----------------------------------------------------------------------------


@criterion(5, "q and d flux ripple close at every subcycle within 1e-10 V_ref Ts")
@pytest.mark.parametrize("name", list(SEQUENCES))
def test_c5_closure(name):
    seq, cfg = SEQUENCES[name], DriveConfig()
    worst = 0.0
    for m in M_GRID:
        ts = 1.0 / (6 * cfg.f1(m) * seq.samples_per_sector)
        for i, alpha in enumerate(seq.sample_angles):
            f = flux_ripple(error_voltage_segments(seq, m, alpha, ts, 0.37, cfg, i))
            worst = max(worst, abs(f.psi_q[-1]) / (cfg.v_ref(m) * ts), abs(f.psi_d[-1]) / (cfg.v_ref(m) * ts))
    assert worst <= 1e-10


# 6 -----------------------------------------------------------------------------


@criterion(6, "solved k: pole-voltage residual < 1e-6, line-current harmonic < 1e-5")
@pytest.mark.parametrize("target", [5, 7])
@pytest.mark.parametrize("m", RIPPLE_M)
def test_c6_elimination(m, target):
    sol = solve_k(m, target)
    w = pole_voltage_waveform(SEQUENCES["SVHE"], m, sol.k)
    current = line_current_spectra(simulate_no_load(w=w), target)
    worst = max(s.relative(target) for s in current)
    print(f"m={m} h{target}: k={sol.k:.6f} voltage {sol.residual:.2e} current {worst:.2e}")
    assert 0 < sol.k < 1
    assert sol.residual < 1e-6
    assert worst < 1e-5


# 7 -----------------------------------------------------------------------------


@criterion(7, "SVHE torque ripple independent of k for m <= 0.9 within 1e-9")
@pytest.mark.parametrize("m", [m for m in RIPPLE_M if m <= 0.9])
def test_c7_k_invariance(m):
    ks = [0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, solve_k(m, 5).k, solve_k(m, 7).k]
    pps = np.array([torque_ripple_pp(SEQUENCES["SVHE"], m, k) for k in ks])
    assert np.ptp(pps) <= 1e-9 * pps.max()
    assert REFERENCE_RIPPLE[m][3] == REFERENCE_RIPPLE[m][4] == REFERENCE_RIPPLE[m][5]


# 8 -----------------------------------------------------------------------------


@pytest.fixture(scope="module")
def thd_sweep():
    t0 = time.perf_counter()
    table = thd_table(sorted(REFERENCE_THD))
    return table, time.perf_counter() - t0


@criterion(8, "simulated THD within 10 % of every cell, orderings held, < 5 min")
@pytest.mark.parametrize("col", THD_COLUMNS)
@pytest.mark.parametrize("m", sorted(REFERENCE_THD))
def test_c8_cell(thd_sweep, m, col):
    i = THD_COLUMNS.index(col)
    sim, published = thd_sweep[0][m][i], REFERENCE_THD[m][i]
    print(f"m={m} {col}: simulated {sim:.2f} % published {published:.2f} %")
    assert sim == pytest.approx(published, rel=0.10)


@criterion(8, "simulated THD within 10 % of every cell, orderings held, < 5 min")
def test_c8_orderings(thd_sweep):
    table = thd_sweep[0]
    for m, (csv, hne, h5, h7) in table.items():
        if m >= 0.75:
            assert h5 < csv, m
        if m >= 0.8:
            assert hne < csv, m
        assert h7 > csv, m


@criterion(8, "simulated THD within 10 % of every cell, orderings held, < 5 min")
def test_c8_runtime(thd_sweep):
    print(f"THD sweep took {thd_sweep[1]:.1f} s")
    assert thd_sweep[1] < 300


# 9 -----------------------------------------------------------------------------


@criterion(9, "CSV switches 18 times per phase per cycle; other counts stable")
@pytest.mark.parametrize("name", list(SEQUENCES))
def test_c9_switching(name):
    counts = {m: switching_count(pole_voltage_waveform(SEQUENCES[name], m, 0.4))[0] for m in M_GRID}
    print(f"{name}: {sorted(set(counts.values()))}")
    assert len(set(counts.values())) == 1
    if name == "CSV":
        assert set(counts.values()) == {(18, 18, 18)}


# 10 ----------------------------------------------------------------------------


@criterion(10, "simulated vs analytic torque at m = 0.8: r > 0.95, pp within 10 %")
@pytest.mark.parametrize("name", list(SEQUENCES))
def test_c10_waveform_agreement(name):
    ag = torque_agreement(name, 0.8)
    print(f"{name}: r={ag.pearson:.4f} pp sim {ag.pp_sim:.2f} analytic {ag.pp_analytic:.2f}")
    assert ag.pearson > 0.95
    assert ag.pp_ratio == pytest.approx(1.0, abs=0.10)
