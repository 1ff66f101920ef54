"""Truncated-Fock-space operators and states for one and two bosonic modes.

All matrices are dense complex ndarrays wrapped in thin typed containers
that carry the per-mode dimensions. Mode order in every tensor product is
(signal, pump); flattened index J = i_signal * pump_dim + i_pump.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InvalidDimensionError,
    InvalidParameterError,
    ShapeMismatchError,
    TruncationError,
)

_NORM_TOL = 1e-10
_HERM_TOL = 1e-10
_TRACE_TOL = 1e-8
_EIG_TOL = 1e-8


def _check_dims(dims: tuple[int, ...]) -> None:
    if len(dims) == 0:
        raise InvalidDimensionError("dims must contain at least one mode")
    for d in dims:
        if d < 2:
            raise InvalidDimensionError(f"mode dimension {d} < 2")


@dataclass(frozen=True)
class Operator:
    """Dense operator on one or two truncated modes."""

    data: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        _check_dims(self.dims)
        n = math.prod(self.dims)
        if self.data.shape != (n, n):
            raise ShapeMismatchError(
                f"operator data {self.data.shape} does not match dims {self.dims}"
            )
        object.__setattr__(self, "data", np.ascontiguousarray(self.data, dtype=complex))

    def dag(self) -> "Operator":
        return Operator(self.data.conj().T, self.dims)

    def __matmul__(self, other: "Operator") -> "Operator":
        if self.dims != other.dims:
            raise ShapeMismatchError(f"dims {self.dims} vs {other.dims}")
        return Operator(self.data @ other.data, self.dims)

    def __add__(self, other: "Operator") -> "Operator":
        if self.dims != other.dims:
            raise ShapeMismatchError(f"dims {self.dims} vs {other.dims}")
        return Operator(self.data + other.data, self.dims)

    def __sub__(self, other: "Operator") -> "Operator":
        if self.dims != other.dims:
            raise ShapeMismatchError(f"dims {self.dims} vs {other.dims}")
        return Operator(self.data - other.data, self.dims)

    def __mul__(self, scalar: complex) -> "Operator":
        return Operator(self.data * scalar, self.dims)

    __rmul__ = __mul__


@dataclass(frozen=True)
class StateVector:
    """Unit-norm pure state on one or two truncated modes."""

    data: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        _check_dims(self.dims)
        n = math.prod(self.dims)
        if self.data.shape != (n,):
            raise ShapeMismatchError(
                f"state data {self.data.shape} does not match dims {self.dims}"
            )
        data = np.ascontiguousarray(self.data, dtype=complex)
        nrm = np.linalg.norm(data)
        if abs(nrm - 1.0) > _NORM_TOL:
            raise InvalidParameterError(f"state norm {nrm} deviates from 1 beyond {_NORM_TOL}")
        object.__setattr__(self, "data", data)

    def density(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.data, self.data.conj()), self.dims)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite (to tolerance) state."""

    data: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        _check_dims(self.dims)
        n = math.prod(self.dims)
        if self.data.shape != (n, n):
            raise ShapeMismatchError(
                f"density data {self.data.shape} does not match dims {self.dims}"
            )
        data = np.ascontiguousarray(self.data, dtype=complex)
        herm = np.abs(data - data.conj().T).max()
        if herm > _HERM_TOL:
            raise InvalidParameterError(f"Hermiticity violation {herm:.2e}")
        tr = np.trace(data).real
        if abs(tr - 1.0) > _TRACE_TOL:
            raise InvalidParameterError(f"trace {tr} deviates from 1 beyond {_TRACE_TOL}")
        lo = np.linalg.eigvalsh(data)[0]
        if lo < -_EIG_TOL:
            raise InvalidParameterError(f"negative eigenvalue {lo:.2e}")
        object.__setattr__(self, "data", data)


@dataclass(frozen=True)
class CatParams:
    """Cat amplitude with its exact normalization correction.

    epsilon is derived, never free: epsilon = 2 exp(-2|alpha|^2), which makes
    1/sqrt(2 + epsilon) the exact norm of |alpha> + |-alpha>.
    """

    alpha: complex
    epsilon: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "epsilon", 2.0 * math.exp(-2.0 * abs(self.alpha) ** 2))


def annihilation(dim: int) -> Operator:
    """Ladder operator with <n-1|a|n> = sqrt(n) on a dim-level mode."""
    if dim < 2:
        raise InvalidDimensionError(f"annihilation needs dim >= 2, got {dim}")
    m = np.zeros((dim, dim), dtype=complex)
    ns = np.sqrt(np.arange(1, dim, dtype=float))
    m[np.arange(dim - 1), np.arange(1, dim)] = ns
    return Operator(m, (dim,))


def creation(dim: int) -> Operator:
    return annihilation(dim).dag()


def number(dim: int) -> Operator:
    if dim < 2:
        raise InvalidDimensionError(f"number needs dim >= 2, got {dim}")
    return Operator(np.diag(np.arange(dim, dtype=complex)), (dim,))


def parity(dim: int) -> Operator:
    """Photon-number parity (-1)^n."""
    if dim < 2:
        raise InvalidDimensionError(f"parity needs dim >= 2, got {dim}")
    return Operator(np.diag((-1.0 + 0j) ** np.arange(dim)), (dim,))


def _coherent_guard(alpha: complex, dim: int) -> None:
    # adequacy: |alpha|^2 <= dim/4 keeps the truncated Poisson tail < ~1e-8
    n_mean = abs(alpha) ** 2
    if n_mean > dim / 4.0:
        need = math.ceil(4.0 * n_mean)
        raise TruncationError(
            f"|alpha|^2 = {n_mean:.3f} needs dim >= {need}, got {dim}",
            required_dim=need,
        )


def coherent_amplitudes(alpha: complex, dim: int) -> np.ndarray:
    """Truncated, renormalized coherent-state amplitudes (no guard)."""
    c = np.zeros(dim, dtype=complex)
    c[0] = 1.0
    for k in range(1, dim):
        c[k] = c[k - 1] * alpha / math.sqrt(k)
    return c / np.linalg.norm(c)


def coherent_state(alpha: complex, dim: int) -> StateVector:
    if dim < 2:
        raise InvalidDimensionError(f"coherent_state needs dim >= 2, got {dim}")
    _coherent_guard(alpha, dim)
    return StateVector(coherent_amplitudes(alpha, dim), (dim,))


def cat_state(alpha: complex, dim: int) -> StateVector:
    """Even superposition of |alpha> and |-alpha>, renormalized after truncation."""
    if dim < 2:
        raise InvalidDimensionError(f"cat_state needs dim >= 2, got {dim}")
    _coherent_guard(alpha, dim)
    plus = coherent_amplitudes(alpha, dim)
    v = plus.copy()
    v[1::2] = 0.0  # odd components of |a> + |-a> cancel exactly
    v[0::2] *= 2.0
    return StateVector(v / np.linalg.norm(v), (dim,))


def tensor(a, b):
    """Kronecker product, (signal, pump) order, dims concatenated."""
    if isinstance(a, Operator) and isinstance(b, Operator):
        return Operator(np.kron(a.data, b.data), a.dims + b.dims)
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        return StateVector(np.kron(a.data, b.data), a.dims + b.dims)
    if isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix):
        return DensityMatrix(np.kron(a.data, b.data), a.dims + b.dims)
    raise ShapeMismatchError(
        f"tensor requires two operands of the same kind, got {type(a).__name__} and {type(b).__name__}"
    )


def partial_trace(rho: DensityMatrix, keep: int) -> DensityMatrix:
    """Trace out one mode of a two-mode density matrix."""
    if len(rho.dims) != 2:
        raise ShapeMismatchError(f"partial_trace needs a two-mode state, got dims {rho.dims}")
    if keep not in (0, 1):
        raise IndexError(f"keep must be 0 or 1, got {keep}")
    da, db = rho.dims
    r4 = rho.data.reshape(da, db, da, db)
    if keep == 0:
        red = np.einsum("imjm->ij", r4)
        return DensityMatrix(red, (da,))
    red = np.einsum("imin->mn", r4)
    return DensityMatrix(red, (db,))
