"""State diagnostics: cat fidelity, optimal-size search, Wigner maps.

Fidelity against a fixed cat is a quadratic form and is linear in the
density matrix. The optimal-size search scans magnitude and phase of the
cat amplitude on a grid, then polishes the magnitude with a golden-section
pass; the reported maximum is the best of every candidate evaluated, so a
refined grid can only improve it.

The Wigner map uses the displaced-parity form W(b) = (2/pi) Tr[rho D(b) P
D(-b)] with the phase-space coordinate b = x + i p, normalized so the
Riemann sum of W dx dp is 1. On the truncated space D is built by
exponentiating b a' - conj(b) a, which is exactly unitary, so |W| never
exceeds 2/pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError, ShapeMismatchError, TruncationError
from .fock import DensityMatrix, cat_state

_INV_GOLD = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class FidelityResult:
    """Best cat fit: the fidelity, the complex amplitude, and whether the
    magnitude search pinned at its lower bound."""

    f_max: float
    alpha_opt: complex
    hit_lower_bound: bool


@dataclass(frozen=True)
class WignerGrid:
    x_axis: np.ndarray
    p_axis: np.ndarray
    values: np.ndarray  # shape (len(x_axis), len(p_axis))


@dataclass(frozen=True)
class TrajectoryRecord:
    """Per-cycle diagnostics of a pump-cycle trajectory."""

    time: float
    f_max: float
    alpha_opt: complex
    parity: float
    purity: float
    mean_photons: float
    hit_lower_bound: bool = False


def _require_single_mode(rho: DensityMatrix) -> int:
    if len(rho.dims) != 1:
        raise ShapeMismatchError(f"expected a single-mode state, got dims {rho.dims}")
    return rho.dims[0]


def fidelity(rho: DensityMatrix, alpha: complex) -> float:
    """Overlap of rho with the even cat of amplitude alpha."""
    dim = _require_single_mode(rho)
    c = cat_state(alpha, dim).data
    val = float(np.real(c.conj() @ rho.data @ c))
    if val < -1e-10 or val > 1.0 + 1e-10:
        raise InvalidParameterError(f"fidelity {val} outside [0, 1]")
    return min(max(val, 0.0), 1.0 + 1e-10)


def purity(rho: DensityMatrix) -> float:
    r = rho.data
    return float(np.real(np.einsum("ij,ji->", r, r)))


def parity_expectation(rho: DensityMatrix) -> float:
    dim = _require_single_mode(rho)
    signs = np.where(np.arange(dim) % 2 == 0, 1.0, -1.0)
    return float(np.real(np.diag(rho.data) @ signs))


def mean_photons(rho: DensityMatrix) -> float:
    dim = _require_single_mode(rho)
    return float(np.real(np.diag(rho.data) @ np.arange(dim)))


# cat candidate stacks, reused across the many calls of a trajectory run
_CANDIDATE_CACHE: dict[tuple, tuple[np.ndarray, np.ndarray, np.ndarray]] = {}


def _candidates(dim: int, alpha_min: float, alpha_max: float, n_mag: int, n_phase: int):
    key = (dim, float(alpha_min), float(alpha_max), int(n_mag), int(n_phase))
    hit = _CANDIDATE_CACHE.get(key)
    if hit is not None:
        return hit
    rs = np.linspace(alpha_min, alpha_max, n_mag)
    # cat(alpha) = cat(-alpha), so half the circle covers every distinct cat
    thetas = np.linspace(0.0, math.pi, n_phase, endpoint=False)
    stack = np.empty((n_mag * n_phase, dim), dtype=complex)
    k = 0
    for r in rs:
        for th in thetas:
            stack[k] = cat_state(r * np.exp(1j * th), dim).data
            k += 1
    out = (stack, rs, thetas)
    if len(_CANDIDATE_CACHE) > 32:
        _CANDIDATE_CACHE.clear()
    _CANDIDATE_CACHE[key] = out
    return out


def optimal_cat(
    rho: DensityMatrix,
    alpha_min: float = 1.2,
    alpha_max: float = 4.0,
    n_mag: int = 141,
    n_phase: int = 12,
) -> FidelityResult:
    """Maximize cat fidelity over amplitude magnitude and phase.

    Magnitudes span [alpha_min, alpha_max] (clipped to what the truncation
    can represent), phases span half the circle. A golden-section pass in
    the magnitude at the best phase polishes the grid optimum. The result
    flags when the maximizer sits at alpha_min.
    """
    dim = _require_single_mode(rho)
    if alpha_min <= 0:
        raise InvalidParameterError(f"alpha_min {alpha_min} must be > 0")
    if alpha_max < alpha_min:
        raise InvalidParameterError(f"alpha_max {alpha_max} < alpha_min {alpha_min}")
    if n_mag < 2 or n_phase < 2:
        raise InvalidParameterError("magnitude and phase grids need at least 2 points")

    # back off one part in 1e9 so |r e^{i theta}|^2 stays under the coherent
    # guard after phase-rotation roundoff
    representable = math.sqrt(dim / 4.0) * (1.0 - 1e-9)
    if alpha_min > representable:
        raise TruncationError(
            f"alpha_min {alpha_min} is not representable at dim {dim}",
            required_dim=math.ceil(4.0 * alpha_min ** 2),
        )
    alpha_hi = min(alpha_max, representable)

    stack, rs, thetas = _candidates(dim, alpha_min, alpha_hi, n_mag, n_phase)
    vals = np.real(np.einsum("kd,de,ke->k", stack.conj(), rho.data, stack))
    best = int(np.argmax(vals))
    f_best = float(vals[best])
    r_best = float(rs[best // n_phase])
    th_best = float(thetas[best % n_phase])

    # golden-section polish of the magnitude, one grid cell around the peak
    dr = rs[1] - rs[0] if n_mag > 1 else 0.0
    lo = max(alpha_min, r_best - dr)
    hi = min(alpha_hi, r_best + dr)

    def f_of(r: float) -> float:
        c = cat_state(r * np.exp(1j * th_best), dim).data
        return float(np.real(c.conj() @ rho.data @ c))

    a, b = lo, hi
    x1 = b - _INV_GOLD * (b - a)
    x2 = a + _INV_GOLD * (b - a)
    f1, f2 = f_of(x1), f_of(x2)
    for _ in range(60):
        if b - a < 1e-8:
            break
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INV_GOLD * (b - a)
            f2 = f_of(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INV_GOLD * (b - a)
            f1 = f_of(x1)
    for r_cand, f_cand in ((x1, f1), (x2, f2)):
        if f_cand > f_best:
            f_best, r_best = f_cand, float(r_cand)

    if f_best > 1.0 + 1e-10:
        raise InvalidParameterError(f"fidelity {f_best} outside [0, 1]")
    return FidelityResult(
        f_max=min(max(f_best, 0.0), 1.0 + 1e-10),
        alpha_opt=r_best * np.exp(1j * th_best),
        hit_lower_bound=bool(r_best <= alpha_min + 1e-9),
    )


def trajectory_record(rho: DensityMatrix, time: float, **search) -> TrajectoryRecord:
    fit = optimal_cat(rho, **search)
    return TrajectoryRecord(
        time=float(time),
        f_max=fit.f_max,
        alpha_opt=fit.alpha_opt,
        parity=parity_expectation(rho),
        purity=purity(rho),
        mean_photons=mean_photons(rho),
        hit_lower_bound=fit.hit_lower_bound,
    )


def _displacement_eigensystem(dim: int):
    """Eigendecomposition of i(a' - a); D(b) follows by phase rotation.

    For b = r e^{i phi}: b a' - conj(b) a = P_phi (r (a' - a)) P_phi' with
    P_phi = diag(e^{i phi n}), and r (a' - a) = V diag(-i r mu) V'.
    """
    sq = np.sqrt(np.arange(1, dim, dtype=float))
    a = np.zeros((dim, dim), dtype=complex)
    a[np.arange(dim - 1), np.arange(1, dim)] = sq
    k = 1j * (a.conj().T - a)
    mu, v = np.linalg.eigh(k)
    return mu, v


def wigner(
    rho: DensityMatrix,
    x_axis: np.ndarray | None = None,
    p_axis: np.ndarray | None = None,
    extent: float | None = None,
    n_points: int = 81,
) -> WignerGrid:
    """Displaced-parity Wigner map on a rectangular grid.

    Pass explicit axes, or an ``extent`` to build symmetric uniform axes
    [-extent, extent] with ``n_points`` each. Axes reaching beyond the
    amplitudes the truncation can represent (|coordinate| > sqrt(dim))
    raise a truncation error.
    """
    dim = _require_single_mode(rho)
    if x_axis is None or p_axis is None:
        if extent is None:
            raise InvalidParameterError("provide x_axis and p_axis, or extent")
        if extent <= 0 or n_points < 2:
            raise InvalidParameterError("extent must be > 0 with at least 2 points")
        x_axis = np.linspace(-extent, extent, n_points)
        p_axis = np.linspace(-extent, extent, n_points)
    x_axis = np.asarray(x_axis, dtype=float)
    p_axis = np.asarray(p_axis, dtype=float)
    reach = max(np.abs(x_axis).max(), np.abs(p_axis).max())
    if reach > math.sqrt(dim):
        raise TruncationError(
            f"grid reaches |coordinate| = {reach:.2f}, beyond sqrt(dim) = {math.sqrt(dim):.2f}",
            required_dim=math.ceil(reach ** 2),
        )

    # P D(-b) P = D(b) and e^X e^X = e^{2X}, so D(b) P D(-b) = D(2b) P and
    # one displacement per grid point suffices
    mu, v = _displacement_eigensystem(dim)
    vh = v.conj().T
    signs = np.where(np.arange(dim) % 2 == 0, 1.0, -1.0)
    ns = np.arange(dim)
    rho_t = rho.data.T.copy()

    values = np.empty((x_axis.size, p_axis.size))
    for ix, x in enumerate(x_axis):
        for ip, p in enumerate(p_axis):
            beta = complex(x, p)
            r2 = 2.0 * abs(beta)
            phi = np.angle(beta) if beta != 0 else 0.0
            core = (v * np.exp(-1j * r2 * mu)) @ vh
            phase = np.exp(1j * phi * ns)
            disp = (phase[:, None] * core) * phase.conj()[None, :]
            # trace of rho D(2b) P, with P flipping column signs of D
            values[ix, ip] = (2.0 / math.pi) * float(
                np.real(np.sum(rho_t * (disp * signs[None, :])))
            )
    return WignerGrid(x_axis=x_axis, p_axis=p_axis, values=values)
