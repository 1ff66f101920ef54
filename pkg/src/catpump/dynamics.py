"""Signal-mode propagation.

Three routes live here side by side:

* ``evolve_adiabatic``: the continuous effective model, a two-photon drive
  commutator plus a two-photon loss dissipator, integrated with fixed-step
  RK4.
* ``unitary_cycle``: the discrete pump cycle. The pump mode is prepared in
  a coherent state, coupled to the signal through the pair-exchange
  Hamiltonian b'a^2 + b(a')^2 for the coupling window, then traced out.
  The joint propagator is built per conserved-excitation sector and applied
  in Kraus form.
* ``lossy_cycle``: the same cycle with single-photon loss on either mode,
  integrated as a joint master equation (a JIT kernel with a pure-numpy
  fallback; both are exercised by the tests).

``second_order_params`` reduces the cycle to the effective model's rates,
and ``run_synchronous`` drives full trajectories with per-cycle
diagnostics.

Time is everywhere in units of the inverse nonlinear rate (the coupling
constant is 1 internally); a cycle's coupling window is the dimensionless
``phase``.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .errors import (
    IntegratorError,
    InvalidParameterError,
    ShapeMismatchError,
    TruncationError,
)
from .fock import DensityMatrix, Operator, coherent_amplitudes

# RK4 on a linear generator is stable for |h*lambda| < 2*sqrt(2) on the
# imaginary axis; keep a margin below that.
RK4_STABILITY_BUDGET = 2.5
# cycle windows always use step <= phase/200, refined further if the
# spectral bound demands it
MIN_CYCLE_STEPS = 200

_HAVE_JIT = False
if not os.environ.get("CATPUMP_DISABLE_JIT"):
    try:
        from numba import njit as _njit

        _HAVE_JIT = True
    except ImportError:
        pass


# ---------------------------------------------------------------------------
# parameter containers


@dataclass(frozen=True)
class AdiabaticParams:
    """Effective rates of the continuous model (inverse-nonlinear-rate units).

    ``two_photon_pump`` may be complex; the drive term it multiplies keeps
    the generator Hermiticity-preserving for any phase.
    """

    two_photon_pump: complex
    two_photon_loss: float

    def __post_init__(self):
        object.__setattr__(self, "two_photon_pump", complex(self.two_photon_pump))
        object.__setattr__(self, "two_photon_loss", float(self.two_photon_loss))
        if self.two_photon_loss < 0:
            raise InvalidParameterError(f"two_photon_loss {self.two_photon_loss} < 0")

    def steady_amplitude(self) -> complex:
        """Cat amplitude whose even superposition the model stabilizes."""
        if self.two_photon_loss == 0:
            raise InvalidParameterError("no steady amplitude without two-photon loss")
        return 1j * np.sqrt(2.0 * self.two_photon_pump / self.two_photon_loss)


@dataclass(frozen=True)
class CycleConfig:
    """One synchronous-pump cycle: coupling phase, pump amplitude, losses.

    ``phase`` is the dimensionless product of nonlinear rate and coupling
    time; ``cycle_ratio`` is total cycle period over coupling time (>= 1,
    the remainder of the period is idle). Loss rates are single-photon
    rates in inverse-nonlinear-rate units. ``n_cycles`` defaults to
    ceil(30/phase), enough to settle the discrete map.
    """

    phase: float
    pump_amplitude: complex
    cycle_ratio: float = 1.0
    signal_loss: float = 0.0
    pump_loss: float = 0.0
    n_cycles: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "phase", float(self.phase))
        object.__setattr__(self, "pump_amplitude", complex(self.pump_amplitude))
        if self.phase <= 0:
            raise InvalidParameterError(f"phase {self.phase} must be > 0")
        if self.cycle_ratio < 1.0:
            raise InvalidParameterError(f"cycle_ratio {self.cycle_ratio} must be >= 1")
        if self.signal_loss < 0 or self.pump_loss < 0:
            raise InvalidParameterError("loss rates must be >= 0")
        n = self.n_cycles
        if n is None:
            n = math.ceil(30.0 / self.phase)
        if n < 1:
            raise InvalidParameterError(f"n_cycles {n} must be >= 1")
        object.__setattr__(self, "n_cycles", int(n))

    @property
    def cycle_time(self) -> float:
        return self.phase * self.cycle_ratio


@dataclass(frozen=True)
class LindbladChannel:
    rate: float
    operator: Operator

    def __post_init__(self):
        if self.rate < 0:
            raise InvalidParameterError(f"channel rate {self.rate} < 0")


def default_pump_dim(pump_amplitude: complex) -> int:
    """Pump truncation adequate for the coherent state plus pair influx."""
    return math.ceil(4.0 * abs(pump_amplitude) ** 2) + 15


# ---------------------------------------------------------------------------
# generators


def pair_exchange_hamiltonian(signal_dim: int, pump_dim: int) -> Operator:
    """Joint coupling that trades two signal photons for one pump photon."""
    h = np.zeros((signal_dim * pump_dim, signal_dim * pump_dim), dtype=complex)
    for i in range(signal_dim - 2):
        for m in range(1, pump_dim):
            # <i, m| H |i+2, m-1> = sqrt((i+1)(i+2) m)
            w = math.sqrt((i + 1) * (i + 2) * m)
            row = i * pump_dim + m
            col = (i + 2) * pump_dim + (m - 1)
            h[row, col] = w
            h[col, row] = w
    return Operator(h, (signal_dim, pump_dim))


def lindblad_rhs(rho: DensityMatrix, H: Operator, channels: list[LindbladChannel]) -> np.ndarray:
    """Generator value: -i[H, rho] + sum_k (rate_k/2) (2 A rho A' - {A'A, rho})."""
    r = rho.data
    if H.data.shape != r.shape:
        raise ShapeMismatchError(f"H shape {H.data.shape} vs rho shape {r.shape}")
    hr = H.data @ r
    out = -1j * (hr - hr.conj().T)
    for ch in channels:
        a = ch.operator.data
        if a.shape != r.shape:
            raise ShapeMismatchError(f"channel shape {a.shape} vs rho shape {r.shape}")
        ad = a.conj().T
        ada = ad @ a
        out += ch.rate * (a @ r @ ad) - 0.5 * ch.rate * (ada @ r + r @ ada)
    return out


def _adiabatic_rhs_factory(params: AdiabaticParams, dim: int):
    sq = np.sqrt(np.arange(1, dim, dtype=float))
    a = np.zeros((dim, dim), dtype=complex)
    a[np.arange(dim - 1), np.arange(1, dim)] = sq
    a2 = a @ a
    ad2 = a2.conj().T
    n2 = ad2 @ a2  # diagonal n(n-1)
    s = params.two_photon_pump
    g = params.two_photon_loss

    def rhs(r):
        # drive: -S[ad2, r] + conj(S)[a2, r]; for real S this is the
        # commutator of ad2 - a2
        out = -s * (ad2 @ r - r @ ad2) + np.conj(s) * (a2 @ r - r @ a2)
        if g:
            out += g * (a2 @ r @ ad2) - 0.5 * g * (n2 @ r + r @ n2)
        return out

    return rhs


def _adiabatic_spectral_bound(params: AdiabaticParams, dim: int) -> float:
    w2max = math.sqrt((dim - 1) * (dim - 2)) if dim > 2 else 0.0
    drive = 4.0 * abs(params.two_photon_pump) * w2max
    loss = 2.0 * params.two_photon_loss * (dim - 1) * (dim - 2)
    return drive + loss + 1e-12


def evolve_adiabatic(
    rho0: DensityMatrix,
    params: AdiabaticParams,
    t_final: float,
    dt: float | None = None,
    sample_times: list[float] | None = None,
    check_every: int = 500,
):
    """Integrate the effective model from ``rho0`` for ``t_final``.

    Returns the final DensityMatrix, or ``(final, samples)`` when
    ``sample_times`` is given; samples are ``(t, DensityMatrix)`` pairs
    snapped to the step grid. Trace and Hermiticity are guarded during the
    run; drift beyond 1e-7 (scaled by elapsed time) aborts with
    IntegratorError carrying diagnostics.
    """
    if len(rho0.dims) != 1:
        raise ShapeMismatchError(f"adiabatic evolution is single-mode, got dims {rho0.dims}")
    if t_final < 0:
        raise InvalidParameterError(f"t_final {t_final} < 0")
    dim = rho0.dims[0]
    lam = _adiabatic_spectral_bound(params, dim)
    stable_dt = RK4_STABILITY_BUDGET / lam
    if dt is None:
        dt = 0.8 * stable_dt
    elif dt > stable_dt:
        raise IntegratorError(
            f"dt {dt:.3e} exceeds the stability bound {stable_dt:.3e}",
            diagnostics={"dt": dt, "stable_dt": stable_dt, "spectral_bound": lam},
        )
    n_steps = max(1, math.ceil(t_final / dt)) if t_final > 0 else 0
    h = t_final / n_steps if n_steps else 0.0

    rhs = _adiabatic_rhs_factory(params, dim)
    r = rho0.data.copy()

    want = sorted(sample_times) if sample_times is not None else None
    if want is not None:
        for t in want:
            if t < 0 or t > t_final + 1e-12:
                raise InvalidParameterError(f"sample time {t} outside [0, {t_final}]")
    samples: list[tuple[float, DensityMatrix]] = []
    wi = 0

    def take_samples(t_now):
        nonlocal wi
        while want is not None and wi < len(want) and want[wi] <= t_now + 1e-12:
            samples.append((t_now, DensityMatrix(0.5 * (r + r.conj().T), rho0.dims)))
            wi += 1

    take_samples(0.0)
    for step in range(n_steps):
        k1 = rhs(r)
        k2 = rhs(r + 0.5 * h * k1)
        k3 = rhs(r + 0.5 * h * k2)
        k4 = rhs(r + h * k3)
        r = r + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t_now = (step + 1) * h
        if (step + 1) % check_every == 0 or step == n_steps - 1:
            tr_drift = abs(np.trace(r).real - 1.0)
            herm_drift = np.abs(r - r.conj().T).max()
            budget = 1e-7 * max(1.0, t_now)
            if tr_drift > budget or herm_drift > budget:
                raise IntegratorError(
                    "conservation drift exceeded during adiabatic evolution",
                    diagnostics={
                        "step": step + 1,
                        "t": t_now,
                        "trace_drift": tr_drift,
                        "hermiticity_drift": herm_drift,
                        "dt": h,
                    },
                )
        take_samples(t_now)

    final = DensityMatrix(0.5 * (r + r.conj().T), rho0.dims)
    if want is None:
        return final
    return final, samples


def adiabatic_params_from_pump(omega_p: float, g_nl: float, gamma_p: float) -> AdiabaticParams:
    """Effective rates from the physical pump drive, coupling, and pump loss."""
    if gamma_p <= 0:
        raise InvalidParameterError(f"gamma_p {gamma_p} must be > 0")
    return AdiabaticParams(
        two_photon_pump=2.0 * omega_p * g_nl / gamma_p,
        two_photon_loss=4.0 * g_nl * g_nl / gamma_p,
    )


def second_order_params(cfg: CycleConfig) -> AdiabaticParams:
    """Per-cycle effective rates of the discrete map, averaged over a cycle."""
    t_cycle = cfg.phase * cfg.cycle_ratio
    return AdiabaticParams(
        two_photon_pump=1j * cfg.phase * cfg.pump_amplitude / t_cycle,
        two_photon_loss=cfg.phase ** 2 / t_cycle,
    )


def second_order_correction_channel(cfg: CycleConfig, dim: int) -> LindbladChannel:
    """Third term of the cycle expansion, relevant at non-small pump amplitude.

    Operator conj(amp) a^2 + amp (a')^2 at the two-photon-loss rate; the
    small-amplitude reduction drops it.
    """
    sq = np.sqrt(np.arange(1, dim, dtype=float))
    a = np.zeros((dim, dim), dtype=complex)
    a[np.arange(dim - 1), np.arange(1, dim)] = sq
    a2 = a @ a
    op = np.conj(cfg.pump_amplitude) * a2 + cfg.pump_amplitude * a2.conj().T
    rate = second_order_params(cfg).two_photon_loss
    return LindbladChannel(rate=rate, operator=Operator(op, (dim,)))


# ---------------------------------------------------------------------------
# joint propagator, sector by sector

_PROP_CACHE: dict[tuple, np.ndarray] = {}


def _sector_indices(q: int, da: int, db: int):
    """Basis indices of the sector with fixed signal + 2*pump excitation."""
    nb_lo = max(0, math.ceil((q - (da - 1)) / 2))
    nb_hi = min(q // 2, db - 1)
    return [( (q - 2 * nb) * db + nb ) for nb in range(nb_lo, nb_hi + 1)], nb_lo


def _coupling_bound(da: int, db: int) -> float:
    # Gershgorin over the tridiagonal sectors: spectral radius <= 2*wmax
    return 2.0 * math.sqrt((da - 1) * (da - 2) * db) if da > 2 else 0.0


def cycle_steps(phase: float, signal_dim: int, pump_dim: int) -> int:
    """Step count for a unitary cycle window: the 1/200 rule plus stability."""
    lam = _coupling_bound(signal_dim, pump_dim)
    return max(MIN_CYCLE_STEPS, math.ceil(phase * lam / RK4_STABILITY_BUDGET))


def cycle_propagator(
    phase: float,
    signal_dim: int,
    pump_dim: int,
    method: str = "rk4",
    n_steps: int | None = None,
) -> Operator:
    """Joint coupling-window propagator, assembled from excitation sectors.

    The pair exchange conserves signal + 2*pump excitation, so the
    propagator is block-diagonal over sectors whose Hamiltonians are real
    symmetric tridiagonal. ``method`` picks fixed-step RK4 (default) or the
    scaling-and-squaring exponential; the two serve as cross-checks of one
    another.
    """
    if method not in ("rk4", "expm"):
        raise InvalidParameterError(f"unknown propagator method {method!r}")
    da, db = int(signal_dim), int(pump_dim)
    if n_steps is None and method == "rk4":
        n_steps = cycle_steps(phase, da, db)
    key = (float(phase), da, db, method, n_steps)
    cached = _PROP_CACHE.get(key)
    if cached is not None:
        return Operator(cached, (da, db))

    dim = da * db
    u = np.zeros((dim, dim), dtype=complex)
    for q in range((da - 1) + 2 * (db - 1) + 1):
        idx, nb_lo = _sector_indices(q, da, db)
        m = len(idx)
        if m == 0:
            continue
        h = np.zeros((m, m))
        for k in range(m - 1):
            nb = nb_lo + k
            na = q - 2 * nb
            h[k + 1, k] = h[k, k + 1] = math.sqrt(na * (na - 1) * (nb + 1))
        if method == "expm":
            us = expm(-1j * phase * h)
        else:
            us = _rk4_unitary(h, phase, n_steps)
        u[np.ix_(idx, idx)] = us
    _PROP_CACHE[key] = u
    return Operator(u, (da, db))


def _rk4_unitary(h: np.ndarray, phase: float, n_steps: int) -> np.ndarray:
    m = h.shape[0]
    u = np.eye(m, dtype=complex)
    step = phase / n_steps
    for _ in range(n_steps):
        k1 = -1j * (h @ u)
        k2 = -1j * (h @ (u + 0.5 * step * k1))
        k3 = -1j * (h @ (u + 0.5 * step * k2))
        k4 = -1j * (h @ (u + step * k3))
        u = u + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return u


def _pump_guard(amp: complex, pump_dim: int) -> None:
    n_mean = abs(amp) ** 2
    if n_mean > pump_dim / 4.0:
        need = math.ceil(4.0 * n_mean)
        raise TruncationError(
            f"pump amplitude |{amp}|^2 = {n_mean:.3f} needs pump_dim >= {need}, got {pump_dim}",
            required_dim=need,
        )


def cycle_kraus(
    phase: float,
    pump_amplitude: complex,
    signal_dim: int,
    pump_dim: int,
    method: str = "rk4",
) -> np.ndarray:
    """Kraus operators of one lossless cycle, stacked (pump_dim, da, da).

    K_m = <m| U |pump coherent>, so the cycle map is sum_m K rho K'.
    """
    _pump_guard(pump_amplitude, pump_dim)
    u = cycle_propagator(phase, signal_dim, pump_dim, method=method).data
    u4 = u.reshape(signal_dim, pump_dim, signal_dim, pump_dim)
    c = coherent_amplitudes(pump_amplitude, pump_dim)
    return np.einsum("imjn,n->mij", u4, c)


def _settle_cycle_output(out: np.ndarray, da: int) -> DensityMatrix:
    # The exact cycle map preserves trace; integrator drift shows up as a
    # small trace defect that would accumulate over long runs and trip the
    # DensityMatrix gate. Divide it out, but refuse drift large enough to
    # signal a broken integration.
    sym = 0.5 * (out + out.conj().T)
    tr = np.trace(sym).real
    if abs(tr - 1.0) > 1e-2:
        raise IntegratorError(f"cycle trace drift {tr - 1.0:.2e} exceeds 1e-2")
    return DensityMatrix(sym / tr, (da,))


def unitary_cycle(
    rho_n: DensityMatrix,
    cfg: CycleConfig,
    pump_dim: int | None = None,
    method: str = "rk4",
) -> DensityMatrix:
    """One lossless cycle: fresh pump, joint coupling, pump traced away."""
    if cfg.signal_loss != 0 or cfg.pump_loss != 0:
        raise InvalidParameterError(
            "unitary_cycle requires zero loss rates; use lossy_cycle instead"
        )
    if len(rho_n.dims) != 1:
        raise ShapeMismatchError(f"cycle input is single-mode, got dims {rho_n.dims}")
    da = rho_n.dims[0]
    db = default_pump_dim(cfg.pump_amplitude) if pump_dim is None else int(pump_dim)
    ks = cycle_kraus(cfg.phase, cfg.pump_amplitude, da, db, method=method)
    out = np.einsum("mij,mkj->ik", ks @ rho_n.data, ks.conj())
    return _settle_cycle_output(out, da)


# ---------------------------------------------------------------------------
# lossy cycle: joint master equation on the 4-index density tensor

if _HAVE_JIT:

    @_njit(cache=True)
    def _rhs_jit(r, out, da, db, sq, gs, gp):  # pragma: no cover - jitted
        for i in range(da):
            for m in range(db):
                for j in range(da):
                    for n in range(db):
                        acc = 0.0j
                        if i + 2 < da and m >= 1:
                            acc += -1j * (sq[i + 1] * sq[i + 2] * sq[m]) * r[i + 2, m - 1, j, n]
                        if i >= 2 and m + 1 < db:
                            acc += -1j * (sq[i] * sq[i - 1] * sq[m + 1]) * r[i - 2, m + 1, j, n]
                        if j + 2 < da and n >= 1:
                            acc += 1j * (sq[j + 1] * sq[j + 2] * sq[n]) * r[i, m, j + 2, n - 1]
                        if j >= 2 and n + 1 < db:
                            acc += 1j * (sq[j] * sq[j - 1] * sq[n + 1]) * r[i, m, j - 2, n + 1]
                        if gs > 0.0:
                            if i + 1 < da and j + 1 < da:
                                acc += gs * sq[i + 1] * sq[j + 1] * r[i + 1, m, j + 1, n]
                            acc += -0.5 * gs * (i + j) * r[i, m, j, n]
                        if gp > 0.0:
                            if m + 1 < db and n + 1 < db:
                                acc += gp * sq[m + 1] * sq[n + 1] * r[i, m + 1, j, n + 1]
                            acc += -0.5 * gp * (m + n) * r[i, m, j, n]
                        out[i, m, j, n] = acc

    @_njit(cache=True)
    def _rk4_joint_jit(r, da, db, sq, gs, gp, h, n_steps):  # pragma: no cover
        k1 = np.empty_like(r)
        k2 = np.empty_like(r)
        k3 = np.empty_like(r)
        k4 = np.empty_like(r)
        tmp = np.empty_like(r)
        rf = r.reshape(-1)
        t1 = k1.reshape(-1)
        t2 = k2.reshape(-1)
        t3 = k3.reshape(-1)
        t4 = k4.reshape(-1)
        tf = tmp.reshape(-1)
        for _ in range(n_steps):
            _rhs_jit(r, k1, da, db, sq, gs, gp)
            for x in range(rf.size):
                tf[x] = rf[x] + 0.5 * h * t1[x]
            _rhs_jit(tmp, k2, da, db, sq, gs, gp)
            for x in range(rf.size):
                tf[x] = rf[x] + 0.5 * h * t2[x]
            _rhs_jit(tmp, k3, da, db, sq, gs, gp)
            for x in range(rf.size):
                tf[x] = rf[x] + h * t3[x]
            _rhs_jit(tmp, k4, da, db, sq, gs, gp)
            for x in range(rf.size):
                rf[x] = rf[x] + h / 6.0 * (t1[x] + 2.0 * t2[x] + 2.0 * t3[x] + t4[x])
        return r


def _joint_rhs_numpy(r: np.ndarray, da: int, db: int, sq: np.ndarray, gs: float, gp: float) -> np.ndarray:
    """Vectorized reference RHS, same math as the JIT kernel."""
    out = np.zeros_like(r)
    wa = (sq[1 : da - 1] * sq[2:da])[:, None, None, None]  # sqrt((i+1)(i+2))
    wb = sq[1:db][None, :, None, None]  # sqrt(m)
    out[: da - 2, 1:, :, :] += -1j * wa * wb * r[2:, : db - 1, :, :]
    out[2:, : db - 1, :, :] += -1j * wa * wb * r[: da - 2, 1:, :, :]
    waj = (sq[1 : da - 1] * sq[2:da])[None, None, :, None]
    wbn = sq[1:db][None, None, None, :]
    out[:, :, : da - 2, 1:] += 1j * waj * wbn * r[:, :, 2:, : db - 1]
    out[:, :, 2:, : db - 1] += 1j * waj * wbn * r[:, :, : da - 2, 1:]
    if gs > 0.0:
        jump = sq[1:da][:, None, None, None] * sq[1:da][None, None, :, None]
        out[: da - 1, :, : da - 1, :] += gs * jump * r[1:, :, 1:, :]
        ns = np.arange(da, dtype=float)
        out -= (0.5 * gs) * (ns[:, None, None, None] + ns[None, None, :, None]) * r
    if gp > 0.0:
        jump = sq[1:db][None, :, None, None] * sq[1:db][None, None, None, :]
        out[:, : db - 1, :, : db - 1] += gp * jump * r[:, 1:, :, 1:]
        npmp = np.arange(db, dtype=float)
        out -= (0.5 * gp) * (npmp[None, :, None, None] + npmp[None, None, None, :]) * r
    return out


def _rk4_joint_numpy(r, da, db, sq, gs, gp, h, n_steps):
    for _ in range(n_steps):
        k1 = _joint_rhs_numpy(r, da, db, sq, gs, gp)
        k2 = _joint_rhs_numpy(r + 0.5 * h * k1, da, db, sq, gs, gp)
        k3 = _joint_rhs_numpy(r + 0.5 * h * k2, da, db, sq, gs, gp)
        k4 = _joint_rhs_numpy(r + h * k3, da, db, sq, gs, gp)
        r = r + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return r


def lossy_steps(phase: float, signal_dim: int, pump_dim: int, gs: float, gp: float) -> int:
    """Step count for a lossy window.

    The commutator superoperator doubles the spectral radius relative to
    state-vector propagation (eigenvalue differences), and the dissipator
    adds its own Gershgorin contribution.
    """
    lam = 2.0 * _coupling_bound(signal_dim, pump_dim)
    lam += 2.0 * (gs * (signal_dim - 1) + gp * (pump_dim - 1))
    return max(MIN_CYCLE_STEPS, math.ceil(phase * lam / RK4_STABILITY_BUDGET))


def evolve_joint_lossy(
    r4: np.ndarray,
    phase: float,
    signal_dim: int,
    pump_dim: int,
    signal_loss: float,
    pump_loss: float,
    n_steps: int | None = None,
    use_jit: bool | None = None,
) -> np.ndarray:
    """Joint coupling-window evolution with single-photon loss on both modes.

    Works on the raw 4-index density tensor (signal, pump, signal, pump);
    returns a new tensor. Exposed for the reset-protocol module and tests.
    """
    da, db = int(signal_dim), int(pump_dim)
    if n_steps is None:
        n_steps = lossy_steps(phase, da, db, signal_loss, pump_loss)
    sq = np.sqrt(np.arange(max(da, db) + 2, dtype=np.float64))
    h = phase / n_steps
    r = np.ascontiguousarray(r4, dtype=complex).copy()
    jit = _HAVE_JIT if use_jit is None else (use_jit and _HAVE_JIT)
    if use_jit and not _HAVE_JIT:
        raise InvalidParameterError("JIT path requested but numba is unavailable")
    if jit:
        return _rk4_joint_jit(r, da, db, sq, float(signal_loss), float(pump_loss), h, n_steps)
    return _rk4_joint_numpy(r, da, db, sq, float(signal_loss), float(pump_loss), h, n_steps)


def lossy_cycle(
    rho_n: DensityMatrix,
    cfg: CycleConfig,
    pump_dim: int | None = None,
    n_steps: int | None = None,
    use_jit: bool | None = None,
) -> DensityMatrix:
    """One cycle with single-photon loss active during the coupling window."""
    if len(rho_n.dims) != 1:
        raise ShapeMismatchError(f"cycle input is single-mode, got dims {rho_n.dims}")
    da = rho_n.dims[0]
    db = default_pump_dim(cfg.pump_amplitude) if pump_dim is None else int(pump_dim)
    _pump_guard(cfg.pump_amplitude, db)
    c = coherent_amplitudes(cfg.pump_amplitude, db)
    pump = np.outer(c, c.conj())
    r4 = np.einsum("ij,mn->imjn", rho_n.data, pump)
    r4 = evolve_joint_lossy(
        r4, cfg.phase, da, db, cfg.signal_loss, cfg.pump_loss, n_steps=n_steps, use_jit=use_jit
    )
    out = np.einsum("imjm->ij", r4)
    return _settle_cycle_output(out, da)


# ---------------------------------------------------------------------------
# trajectories


def synchronous_states(
    cfg: CycleConfig,
    signal_dim: int = 40,
    pump_dim: int | None = None,
    n_steps: int | None = None,
):
    """Yield (cycle_index, DensityMatrix) from vacuum, cycle by cycle.

    Cycle index n means n cycles applied; index 0 is the vacuum start.
    """
    vac = np.zeros((signal_dim, signal_dim), dtype=complex)
    vac[0, 0] = 1.0
    rho = DensityMatrix(vac, (signal_dim,))
    yield 0, rho
    lossless = cfg.signal_loss == 0 and cfg.pump_loss == 0
    for n in range(1, cfg.n_cycles + 1):
        if lossless:
            rho = unitary_cycle(rho, cfg, pump_dim=pump_dim)
        else:
            rho = lossy_cycle(rho, cfg, pump_dim=pump_dim, n_steps=n_steps)
        yield n, rho


def run_synchronous(
    cfg: CycleConfig,
    signal_dim: int = 40,
    pump_dim: int | None = None,
    n_steps: int | None = None,
    search=None,
):
    """Drive the discrete map from vacuum and record per-cycle diagnostics.

    Returns a list of analysis.TrajectoryRecord, one per completed cycle,
    with time n * cycle period. ``search`` overrides the optimal-cat search
    grid as a dict of optimal_cat keyword arguments.
    """
    from . import analysis

    kw = dict(search or {})
    records = []
    for n, rho in synchronous_states(cfg, signal_dim, pump_dim, n_steps):
        if n == 0:
            continue
        records.append(analysis.trajectory_record(rho, n * cfg.cycle_time, **kw))
    return records
