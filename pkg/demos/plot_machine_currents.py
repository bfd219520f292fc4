"""
Line currents and torque of the machine at no load
==================================================

The pole voltages drive a two-axis induction-machine model turning at
synchronous speed. The line-current THD falls when the 5th harmonic is
removed, and rises when the 7th is removed instead.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from svhe_ripple import SEQUENCES, line_current_thd, pole_voltage_waveform, simulate_no_load, solve_k

m = 0.9
cases = {
    "CSV": pole_voltage_waveform(SEQUENCES["CSV"], m),
    "SVHE k=0.5": pole_voltage_waveform(SEQUENCES["SVHE"], m, 0.5),
    "SVHE 5th removed": pole_voltage_waveform(SEQUENCES["SVHE"], m, solve_k(m, 5).k),
    "SVHE 7th removed": pole_voltage_waveform(SEQUENCES["SVHE"], m, solve_k(m, 7).k),
}

fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True, figsize=(8, 6))
for label, w in cases.items():
    r = simulate_no_load(w=w)
    thd = line_current_thd(r)[0]
    t = (r.t - r.t[0]) * 1e3
    ax1.plot(t, r.ia, lw=0.8, label=f"{label}  THD {thd:.1f} %")
    ax2.plot(t, r.torque, lw=0.8)
    print(f"{label:18s} THD {thd:6.2f} %")
ax1.set_ylabel("i_a [A]")
ax1.legend(fontsize=8)
ax2.set_ylabel("torque [N m]")
ax2.set_xlabel("time [ms]")
fig.tight_layout()
fig.savefig("machine_currents.png", dpi=120)
print("wrote machine_currents.png")
