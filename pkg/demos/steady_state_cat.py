"""Drive the continuous two-photon model from vacuum into its steady cat.

Left panel: fidelity to the steady-state cat versus time for a pump at
twice the two-photon loss rate. Right panel: Wigner function of the
final state, interference fringes included.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from catpump import analysis, dynamics, fock

DIM = 40

params = dynamics.AdiabaticParams(two_photon_pump=0.2, two_photon_loss=0.1)
target = params.steady_amplitude()
print(f"steady-state cat amplitude: {target:.3g}")

vac = fock.coherent_state(0j, DIM).density()
sample_times = [round(0.25 * k, 10) for k in range(121)]
final, samples = dynamics.evolve_adiabatic(vac, params, 30.0, sample_times=sample_times)

times = np.array([t for t, _ in samples])
fids = np.array([analysis.fidelity(rho, target) for _, rho in samples])
print(f"fidelity at t=30: {fids[-1]:.4f}")

grid = analysis.wigner(final, extent=3.5, n_points=121)

fig, (ax_f, ax_w) = plt.subplots(1, 2, figsize=(10, 4))

ax_f.plot(times, fids)
ax_f.axhline(0.99, color="gray", lw=0.8, ls="--")
ax_f.set_xlabel("time (inverse nonlinear rate)")
ax_f.set_ylabel("fidelity to steady cat")
ax_f.set_title("relaxation onto the cat manifold")

vmax = 2.0 / np.pi
im = ax_w.pcolormesh(
    grid.x_axis, grid.p_axis, grid.values.T, cmap="RdBu_r", vmin=-vmax, vmax=vmax
)
ax_w.set_aspect("equal")
ax_w.set_xlabel("x")
ax_w.set_ylabel("p")
ax_w.set_title(f"Wigner function at t=30 (min {grid.values.min():.3f})")
fig.colorbar(im, ax=ax_w)

fig.tight_layout()
out = __file__.replace(".py", ".png")
fig.savefig(out, dpi=150)
print(f"wrote {out}")
