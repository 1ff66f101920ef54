"""Classical picture of the pumped signal: two wells and a saddle.

The mean-field amplitude has stable fixed points at +-i sqrt(drive /
nonlinearity) and an unstable origin. Trajectories starting off the
real axis fall into one of the two wells at the relaxation rate;
starts exactly on the real axis ride the stable manifold into the
origin instead.
"""

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from catpump import meanfield

p = meanfield.MeanFieldParams(g_nl=1.0, omega_p=4.0, gamma_p=10.0)
origin, plus, minus = meanfield.fixed_points(p)
rate = meanfield.relaxation_rate(p)
print(f"fixed points: {origin:.3g}, {plus:.3g}, {minus:.3g}; relaxation rate {rate:.3g}")

fig, (ax_t, ax_d) = plt.subplots(1, 2, figsize=(10, 4.5))

starts = [2.8 * np.exp(1j * k * np.pi / 6) for k in range(12) if k % 6 != 0]
starts += [2.8 + 0j, -2.8 + 0j]
for a0 in starts:
    on_axis = abs(a0.imag) < 1e-12
    _, amps = meanfield.simulate_amplitude(a0, p, t_final=12.0 / rate)
    ax_t.plot(amps.real, amps.imag, lw=0.9, color="tab:gray" if on_axis else "tab:blue")
ax_t.plot([plus.real, minus.real], [plus.imag, minus.imag], "o", color="tab:red", ms=8)
ax_t.plot([0], [0], "x", color="black", ms=8)
ax_t.set_aspect("equal")
ax_t.set_xlabel("Re A")
ax_t.set_ylabel("Im A")
ax_t.set_title("flow in the complex amplitude plane")

times, amps = meanfield.simulate_amplitude(plus + 0.01j, p)
delta = np.abs(amps - plus)
ax_d.semilogy(times, delta, label="|A - A+|")
ax_d.semilogy(times, delta[0] * np.exp(-rate * times), "--", color="gray",
              label=f"slope -{rate:.2g}")
ax_d.set_xlabel("time")
ax_d.set_ylabel("distance to the well")
ax_d.set_title("relaxation at the linearized rate")
ax_d.legend()

fig.tight_layout()
out = __file__.replace(".py", ".png")
fig.savefig(out, dpi=150)
print(f"wrote {out}")
print(f"final distance {delta[-1]:.2e} after t = {times[-1]:.1f}")
