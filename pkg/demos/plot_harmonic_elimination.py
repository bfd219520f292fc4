"""
Removing the 5th or 7th harmonic with k
=======================================

Splitting an active dwell time unevenly (k versus 1 - k) moves the low-order
harmonics of the pole voltage. For each m there is a k that nulls the 5th,
and another that nulls the 7th.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from svhe_ripple import SEQUENCES, pole_voltage_waveform, solve_k, spectrum

m_values = np.round(np.arange(0.6, 0.951, 0.05), 2)
k5 = [solve_k(m, 5).k for m in m_values]
k7 = [solve_k(m, 7).k for m in m_values]
for m, a, b in zip(m_values, k5, k7):
    print(f"m={m:.2f}  k5={a:.5f}  k7={b:.5f}")

m = 0.8
fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
ax1.plot(m_values, k5, "o-", label="5th removed")
ax1.plot(m_values, k7, "s-", label="7th removed")
ax1.set_xlabel("m")
ax1.set_ylabel("k")
ax1.legend()

orders = np.arange(2, 26)
for label, k in [("k=0.5", 0.5), ("k5", k5[list(m_values).index(m)]), ("k7", k7[list(m_values).index(m)])]:
    s = spectrum(pole_voltage_waveform(SEQUENCES["SVHE"], m, k).phase(0), orders[-1])
    ax2.semilogy(orders, [max(s.relative(n), 1e-9) for n in orders], ".-", label=label)
ax2.set_xlabel("harmonic order")
ax2.set_ylabel("|c_n| / |c_1|")
ax2.set_title(f"SVHE pole voltage, m = {m}")
ax2.legend()
fig.tight_layout()
fig.savefig("harmonic_elimination.png", dpi=120)
print("wrote harmonic_elimination.png")
