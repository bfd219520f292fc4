"""
Pole voltages of the four sequences
===================================

One fundamental cycle of the phase-a pole voltage for each sequence at
m = 0.8, with the number of transitions per phase.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from svhe_ripple import SEQUENCES, DriveConfig, pole_voltage_waveform, switching_count

drive = DriveConfig(v_dc=600.0)
m = 0.8

fig, axes = plt.subplots(len(SEQUENCES), 1, sharex=True, figsize=(8, 7))
for ax, (name, seq) in zip(axes, SEQUENCES.items()):
    w = pole_voltage_waveform(seq, m, 0.5, drive)
    counts, _ = switching_count(w)
    va = w.phase(0)
    # a step plot wants the last level repeated at the period end
    t = np.append(va.starts, va.period) * 1e3
    ax.step(t, np.append(va.levels, va.levels[-1]), where="post", lw=0.8)
    ax.set_ylabel(name)
    ax.set_title(f"{counts[0]} switchings per phase per cycle", fontsize=8, loc="right")
axes[-1].set_xlabel("time [ms]")
fig.suptitle(f"phase-a pole voltage, m = {m}")
fig.savefig("pole_voltages.png", dpi=120)
print("wrote pole_voltages.png")
