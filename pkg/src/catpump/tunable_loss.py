"""Switchable pump-mode dissipation and the standing-mode reset protocol.

A lossy readout resonator coupled off-resonantly to the pump mode acts as
a dissipation channel whose strength follows the detuning. The closed
forms in ``effective_loss_shift`` give the induced loss rate and frequency
pull. ``run_switched_cycle`` simulates one period of the resulting
protocol: couple the modes with the channel dimmed, evacuate the pump with
the channel at full strength, then displace the leftover pump state back
up to the working amplitude. The entry pump state of the measured window
is itself the product of a reset, so the map reflects steady operation
rather than a pristine first cycle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from . import dynamics, fock
from .errors import (
    IncompleteResetError,
    IntegratorError,
    InvalidParameterError,
    ShapeMismatchError,
)


@dataclass(frozen=True)
class LossChannelParams:
    """Coupler rate, resonator linewidth, and detuning, all in Hz."""

    g_loss: float
    gamma_re: float
    delta: float

    def __post_init__(self) -> None:
        if self.g_loss < 0:
            raise InvalidParameterError(f"g_loss {self.g_loss} must be >= 0")
        if self.gamma_re <= 0:
            raise InvalidParameterError(f"gamma_re {self.gamma_re} must be > 0")


def effective_loss_shift(p: LossChannelParams) -> tuple[float, float]:
    """Induced pump-mode loss rate and frequency shift (Hz, Hz)."""
    denom = p.delta * p.delta + p.gamma_re * p.gamma_re
    kappa_eff = p.g_loss * p.g_loss * p.gamma_re / denom
    delta_shift = -p.g_loss * p.g_loss * p.delta / denom
    return kappa_eff, delta_shift


@dataclass(frozen=True)
class SwitchedCycleConfig:
    """One protocol period: coupling window, reset window, repump.

    Rates are in units of the nonlinear coupling, durations in its inverse.
    ``min_reset_product`` guards against configurations whose reset cannot
    empty the pump; set it to 0 to study that regime deliberately, and set
    ``residual_threshold`` to ``inf`` to disable the per-call audit.
    """

    base: dynamics.CycleConfig
    t_reset: float
    repump_alpha: complex
    kappa_on: float = 10.0
    kappa_off: float = 0.01
    residual_threshold: float = 1e-3
    min_reset_product: float = 5.0

    def __post_init__(self) -> None:
        if self.kappa_on <= 0:
            raise InvalidParameterError(f"kappa_on {self.kappa_on} must be > 0")
        if self.t_reset <= 0:
            raise InvalidParameterError(f"t_reset {self.t_reset} must be > 0")
        if self.kappa_off < 0:
            raise InvalidParameterError(f"kappa_off {self.kappa_off} must be >= 0")
        if self.min_reset_product < 0:
            raise InvalidParameterError(
                f"min_reset_product {self.min_reset_product} must be >= 0"
            )
        product = self.kappa_on * self.t_reset
        if product < self.min_reset_product:
            raise InvalidParameterError(
                f"kappa_on*t_reset = {product:.3g} is below the reset guard "
                f"{self.min_reset_product:.3g}; the pump would not empty"
            )


def _single_mode_decay(rho: np.ndarray, rate: float, t: float) -> np.ndarray:
    """Pure single-photon loss for time t, fixed-step RK4 on the raw matrix."""
    dim = rho.shape[0]
    if rate * t == 0.0:
        return rho.copy()
    ns = np.arange(dim, dtype=float)
    nsum = ns[:, None] + ns[None, :]
    feed = np.sqrt(np.outer(ns[1:], ns[1:]))

    def rhs(r: np.ndarray) -> np.ndarray:
        out = (-0.5 * rate) * nsum * r
        out[:-1, :-1] += rate * feed * r[1:, 1:]
        return out

    n_steps = max(
        50, math.ceil(2.0 * rate * (dim - 1) * t / dynamics.RK4_STABILITY_BUDGET)
    )
    h = t / n_steps
    r = rho.copy()
    for _ in range(n_steps):
        k1 = rhs(r)
        k2 = rhs(r + 0.5 * h * k1)
        k3 = rhs(r + 0.5 * h * k2)
        k4 = rhs(r + h * k3)
        r += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return r


def _displacement(alpha: complex, dim: int) -> np.ndarray:
    b = fock.annihilation(dim).data
    return expm(alpha * b.conj().T - np.conj(alpha) * b)


def _coupling_window(
    rho: np.ndarray, pump: np.ndarray, cfg: SwitchedCycleConfig, da: int, db: int
) -> np.ndarray:
    joint = np.einsum("ij,mn->imjn", rho, pump)
    return dynamics.evolve_joint_lossy(
        joint, cfg.base.phase, da, db, cfg.base.signal_loss, cfg.kappa_off
    )


def run_switched_cycle(
    rho: fock.DensityMatrix,
    cfg: SwitchedCycleConfig,
    pump_dim: int | None = None,
) -> fock.DensityMatrix:
    """Advance the signal state through one switched-loss protocol period.

    Raises ``IncompleteResetError`` when the audited leftover pump
    population after the reset window is at or above the configured
    threshold.
    """
    if len(rho.dims) != 1:
        raise ShapeMismatchError(f"signal state is single-mode, got dims {rho.dims}")
    da = rho.dims[0]
    db = (
        dynamics.default_pump_dim(cfg.repump_alpha)
        if pump_dim is None
        else int(pump_dim)
    )

    fresh = fock.coherent_state(cfg.repump_alpha, db).density().data

    # Reconstruct the pump state a reset actually hands to the next window:
    # couple a fresh pump to the incoming signal, discard the signal, let the
    # strong channel drain the remainder, then audit and displace it back.
    prologue = _coupling_window(rho.data, fresh, cfg, da, db)
    residue = np.ascontiguousarray(np.einsum("imin->mn", prologue))
    residue = _single_mode_decay(residue, cfg.kappa_on, cfg.t_reset)
    leftover = float(np.real(np.trace(fock.number(db).data @ residue)))
    if leftover >= cfg.residual_threshold:
        raise IncompleteResetError(
            f"pump holds {leftover:.3e} photons after reset, "
            f"threshold {cfg.residual_threshold:.3e}",
            residual=leftover,
        )
    d = _displacement(cfg.repump_alpha, db)
    entry = d @ residue @ d.conj().T

    joint = _coupling_window(rho.data, entry, cfg, da, db)
    out = np.einsum("imjm->ij", joint)
    if cfg.base.signal_loss > 0:
        out = _single_mode_decay(
            np.ascontiguousarray(out), cfg.base.signal_loss, cfg.t_reset
        )
    out = 0.5 * (out + out.conj().T)
    # every stage of the protocol preserves trace exactly; divide out the
    # integrator's small defect so repeated cycles stay inside the state gate
    tr = np.trace(out).real
    if abs(tr - 1.0) > 1e-2:
        raise IntegratorError(f"switched-cycle trace drift {tr - 1.0:.2e} exceeds 1e-2")
    return fock.DensityMatrix(out / tr, (da,))
