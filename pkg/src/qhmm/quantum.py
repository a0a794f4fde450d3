"""States, Kraus-form operations, channels and measurements.

States may be sub-normalised: the trace of a :class:`DensityOperator`
is the probability mass carried by the branch holding it, so traces live
in [0, 1] rather than being pinned at 1.
"""

from __future__ import annotations

from typing import Mapping

import numpy as np

from . import densemath as dm
from .errors import DomainError, ShapeError

ATOL = 1e-9


def ket(index: int, dim: int) -> np.ndarray:
    """Standard basis column vector |index> in C^dim."""
    if not 0 <= index < dim:
        raise ShapeError(f"basis index {index} out of range for dimension {dim}")
    v = np.zeros((dim, 1), dtype=np.complex128)
    v[index, 0] = 1.0
    return v


def ketbra(i: int, j: int, dim: int) -> np.ndarray:
    """Matrix unit |i><j| in C^(dim x dim)."""
    return ket(i, dim) @ dm.adjoint(ket(j, dim))


class DensityOperator:
    """A positive semi-definite operator with trace in [0, 1+tol].

    Construction symmetrizes, checks the eigenvalue floor (>= -1e-9) and
    the trace window, and stores a read-only matrix.
    """

    __slots__ = ("matrix",)

    def __init__(self, matrix, *, atol: float = ATOL):
        mat = dm.as_matrix(matrix)
        if mat.shape[0] != mat.shape[1]:
            raise ShapeError(f"density operator must be square, got {mat.shape}")
        if not dm.is_hermitian(mat):
            raise DomainError("density operator must be Hermitian within tolerance")
        mat = dm.hermitize(mat)
        eigs = np.linalg.eigvalsh(mat)
        if eigs[0] < -atol:
            raise DomainError(f"density operator has negative eigenvalue {eigs[0]}")
        tr = float(np.trace(mat).real)
        if tr < -atol or tr > 1.0 + atol:
            raise DomainError(f"density operator trace {tr} outside [0, 1]")
        mat.flags.writeable = False
        self.matrix = mat

    @classmethod
    def _wrap(cls, matrix: np.ndarray) -> "DensityOperator":
        """Trusted path for internally computed states: hermitize only.

        Used by hot loops whose outputs are PSD by construction.
        """
        obj = object.__new__(cls)
        mat = dm.hermitize(matrix)
        mat.flags.writeable = False
        obj.matrix = mat
        return obj

    @classmethod
    def zero(cls, dim: int) -> "DensityOperator":
        return cls(np.zeros((dim, dim), dtype=np.complex128))

    @classmethod
    def pure(cls, vector) -> "DensityOperator":
        """Rank-one state v v† / <v|v> from a nonzero column vector."""
        v = np.asarray(vector, dtype=np.complex128).reshape(-1, 1)
        norm = float(np.vdot(v, v).real)
        if norm <= 0.0:
            raise DomainError("cannot form a pure state from the zero vector")
        return cls((v @ v.conj().T) / norm)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def scaled(self, factor: float) -> "DensityOperator":
        if factor < 0:
            raise DomainError("scaling factor must be non-negative")
        return DensityOperator(self.matrix * factor)

    def __repr__(self) -> str:
        return f"DensityOperator(dim={self.dim}, trace={self.trace:.6g})"


class KrausOperation:
    """A completely positive, trace non-increasing map in Kraus form.

    Acts as rho -> sum_j K_j rho K_j†. Complete positivity is structural;
    trace non-increase (sum_j K_j† K_j having spectrum <= 1 + 1e-9) is
    checked once at construction.
    """

    __slots__ = ("kraus", "dim_in", "dim_out", "_active", "_effect")

    def __init__(self, kraus, *, atol: float = ATOL):
        mats = tuple(dm.as_matrix(k) for k in kraus)
        if not mats:
            raise ShapeError("a Kraus operation needs at least one matrix")
        dim_out, dim_in = mats[0].shape
        if any(k.shape != (dim_out, dim_in) for k in mats):
            raise ShapeError("all Kraus matrices must share one shape")
        effect = np.zeros((dim_in, dim_in), dtype=np.complex128)
        for k in mats:
            effect += k.conj().T @ k
        effect = dm.hermitize(effect)
        top = float(np.linalg.eigvalsh(effect)[-1]) if dim_in else 0.0
        if top > 1.0 + atol:
            raise DomainError(
                f"operation increases trace: largest effect eigenvalue {top}"
            )
        effect.flags.writeable = False
        self.kraus = mats
        self.dim_in = dim_in
        self.dim_out = dim_out
        # skip exactly-zero matrices when applying; keeps sparse grids cheap
        self._active = tuple(k for k in mats if k.any())
        self._effect = effect

    @classmethod
    def identity(cls, dim: int) -> "KrausOperation":
        return cls([np.eye(dim, dtype=np.complex128)])

    @classmethod
    def zero(cls, dim_in: int, dim_out: int | None = None) -> "KrausOperation":
        if dim_out is None:
            dim_out = dim_in
        return cls([np.zeros((dim_out, dim_in), dtype=np.complex128)])

    @classmethod
    def from_unitary(cls, matrix) -> "KrausOperation":
        u = dm.as_matrix(matrix)
        if u.shape[0] != u.shape[1]:
            raise ShapeError("unitary must be square")
        if dm.frobenius(u.conj().T @ u - np.eye(u.shape[0])) > ATOL * u.shape[0]:
            raise DomainError("matrix is not unitary within tolerance")
        return cls([u])

    def total_effect(self) -> np.ndarray:
        """sum_j K_j† K_j, Hermitian, read-only."""
        return self._effect

    def _apply_raw(self, mat: np.ndarray) -> np.ndarray:
        out = None
        for k in self._active:
            term = k @ mat @ k.conj().T
            out = term if out is None else out + term
        if out is None:
            return np.zeros((self.dim_out, self.dim_out), dtype=np.complex128)
        return out

    def apply(self, rho: DensityOperator) -> DensityOperator:
        if rho.dim != self.dim_in:
            raise ShapeError(
                f"operation expects dimension {self.dim_in}, state has {rho.dim}"
            )
        return DensityOperator(self._apply_raw(rho.matrix))

    def __repr__(self) -> str:
        return (
            f"KrausOperation({len(self.kraus)} matrices, "
            f"{self.dim_in}->{self.dim_out})"
        )


def apply(op: KrausOperation, rho: DensityOperator) -> DensityOperator:
    return op.apply(rho)


def op_add(a: KrausOperation, b: KrausOperation) -> KrausOperation:
    """Sum of CP maps: concatenated Kraus lists.

    The result must itself be trace non-increasing, otherwise construction
    rejects it.
    """
    if (a.dim_in, a.dim_out) != (b.dim_in, b.dim_out):
        raise ShapeError("cannot add operations with different shapes")
    return KrausOperation(a.kraus + b.kraus)


def op_compose(outer: KrausOperation, inner: KrausOperation) -> KrausOperation:
    """Composition outer ∘ inner with pairwise Kraus products.

    The Kraus count multiplies; no algebraic simplification is attempted.
    """
    if inner.dim_out != outer.dim_in:
        raise ShapeError(
            f"cannot compose {inner.dim_in}->{inner.dim_out} into "
            f"{outer.dim_in}->{outer.dim_out}"
        )
    return KrausOperation([ko @ ki for ko in outer.kraus for ki in inner.kraus])


def op_scale(factor: float, a: KrausOperation) -> KrausOperation:
    """The CP map factor * a, realised by scaling each Kraus matrix by sqrt(factor)."""
    if factor < 0:
        raise DomainError("scale factor must be non-negative")
    root = float(np.sqrt(factor))
    return KrausOperation([root * k for k in a.kraus])


def is_trace_preserving(a: KrausOperation, atol: float = ATOL) -> bool:
    eye = np.eye(a.dim_in, dtype=np.complex128)
    return dm.frobenius(a.total_effect() - eye) <= atol * max(a.dim_in, 1)


def proportional_channel_factor(a: KrausOperation, atol: float = ATOL) -> float | None:
    """The c with sum K†K = c*I, or None if no such c in [0, 1] exists.

    The zero operation yields c = 0.
    """
    effect = a.total_effect()
    c = float(np.trace(effect).real) / a.dim_in
    if np.max(np.abs(effect - c * np.eye(a.dim_in))) > atol:
        return None
    if c < -atol or c > 1.0 + atol:
        return None
    return min(max(c, 0.0), 1.0)


class Measurement:
    """A POVM: labelled PSD effects that sum to the identity."""

    __slots__ = ("effects",)

    def __init__(self, effects: Mapping[str, np.ndarray], *, atol: float = ATOL):
        if not effects:
            raise ShapeError("a measurement needs at least one outcome")
        fixed: dict[str, np.ndarray] = {}
        dim = None
        for label, raw in effects.items():
            mat = dm.as_matrix(raw)
            if mat.shape[0] != mat.shape[1]:
                raise ShapeError(f"effect {label!r} is not square: {mat.shape}")
            if dim is None:
                dim = mat.shape[0]
            elif mat.shape[0] != dim:
                raise ShapeError(f"effect {label!r} has dimension {mat.shape[0]}, expected {dim}")
            if not dm.is_hermitian(mat):
                raise DomainError(f"effect {label!r} is not Hermitian within tolerance")
            mat = dm.hermitize(mat)
            if np.linalg.eigvalsh(mat)[0] < -atol:
                raise DomainError(f"effect {label!r} is not positive semi-definite")
            mat.flags.writeable = False
            fixed[str(label)] = mat
        total = sum(fixed.values())
        if np.max(np.abs(total - np.eye(dim))) > atol:
            raise DomainError("measurement effects do not sum to the identity")
        self.effects = fixed

    @classmethod
    def trivial(cls, dim: int, label: str = "exists") -> "Measurement":
        return cls({label: np.eye(dim, dtype=np.complex128)})

    @property
    def dim(self) -> int:
        return next(iter(self.effects.values())).shape[0]

    @property
    def outcomes(self) -> tuple[str, ...]:
        return tuple(self.effects)


def measure_probabilities(
    mu: Measurement, rho: DensityOperator, *, atol: float = ATOL
) -> dict[str, float]:
    """Outcome probabilities tr(E rho), clamped into [0, tr(rho)].

    Values within ``atol`` outside that window are snapped to the boundary;
    larger excursions raise, since they signal an invalid effect or state.
    """
    if mu.dim != rho.dim:
        raise ShapeError(
            f"measurement dimension {mu.dim} does not match state dimension {rho.dim}"
        )
    bound = rho.trace
    out: dict[str, float] = {}
    for label, eff in mu.effects.items():
        p = float(np.trace(eff @ rho.matrix).real)
        if p < -atol or p > bound + atol:
            raise DomainError(f"outcome {label!r} probability {p} outside [0, {bound}]")
        out[label] = min(max(p, 0.0), bound)
    return out
