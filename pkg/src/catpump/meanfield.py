"""Classical amplitude dynamics of the pumped signal mode.

After the pump mode is eliminated, the signal amplitude obeys a single
complex ODE whose static solutions are the vacuum and a pair of opposite
amplitudes on the imaginary axis. ``relaxation_rate`` gives the linearized
decay rate toward either nonzero solution, which equals the product of the
steady photon number and the two-photon loss rate of the effective model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError


@dataclass(frozen=True)
class MeanFieldParams:
    """Nonlinear coupling, pump drive, and pump loss of the amplitude ODE."""

    g_nl: float
    omega_p: float
    gamma_p: float

    def __post_init__(self) -> None:
        if self.g_nl <= 0:
            raise InvalidParameterError(f"g_nl {self.g_nl} must be > 0")
        if self.gamma_p <= 0:
            raise InvalidParameterError(f"gamma_p {self.gamma_p} must be > 0")


def amplitude_rhs(a: complex, p: MeanFieldParams) -> complex:
    """Time derivative of the signal amplitude."""
    return (
        -2.0 * p.g_nl * p.g_nl * abs(a) ** 2 * a
        - 2.0 * p.g_nl * p.omega_p * np.conj(a)
    ) / p.gamma_p


def fixed_points(p: MeanFieldParams) -> tuple[complex, complex, complex]:
    """The three static amplitudes: zero and a conjugate pair on the imaginary axis."""
    if p.omega_p < 0:
        raise InvalidParameterError(
            f"omega_p {p.omega_p} < 0 is outside the model; flip the drive phase instead"
        )
    r = math.sqrt(p.omega_p / p.g_nl)
    return (0j, 1j * r, -1j * r)


def relaxation_rate(p: MeanFieldParams) -> float:
    """Linearized decay rate of a perturbation of either nonzero fixed point."""
    if p.omega_p <= 0:
        raise InvalidParameterError(
            f"omega_p {p.omega_p} must be > 0 for a nonzero fixed point"
        )
    return 4.0 * p.g_nl * p.omega_p / p.gamma_p


def simulate_amplitude(
    a0: complex,
    p: MeanFieldParams,
    t_final: float | None = None,
    dt: float | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Integrate the amplitude ODE with classical RK4 from ``a0``.

    Returns ``(times, amplitudes)`` including both endpoints. Defaults:
    ``dt`` resolves the drive scale at one part in a thousand and
    ``t_final`` spans ten relaxation times; both need ``omega_p > 0``.
    """
    if t_final is None or dt is None:
        if p.omega_p <= 0:
            raise InvalidParameterError(
                "default t_final/dt need omega_p > 0; pass both explicitly"
            )
        if dt is None:
            dt = 1e-3 * p.gamma_p / (p.g_nl * p.omega_p)
        if t_final is None:
            t_final = 10.0 / relaxation_rate(p)
    if dt <= 0 or t_final <= 0:
        raise InvalidParameterError(f"dt {dt} and t_final {t_final} must be > 0")

    n_steps = max(1, math.ceil(t_final / dt))
    h = t_final / n_steps
    times = np.linspace(0.0, t_final, n_steps + 1)
    amps = np.empty(n_steps + 1, dtype=complex)
    amps[0] = a = complex(a0)
    for k in range(n_steps):
        k1 = amplitude_rhs(a, p)
        k2 = amplitude_rhs(a + 0.5 * h * k1, p)
        k3 = amplitude_rhs(a + 0.5 * h * k2, p)
        k4 = amplitude_rhs(a + h * k3, p)
        a = a + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        amps[k + 1] = a
    return times, amps
