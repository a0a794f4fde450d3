"""Transition operation matrices and vector states.

A sub-TOM is a grid of Kraus operations whose per-column effect sums are
trace non-increasing; in a TOM every column sums to a channel. They are
the operator-valued analogues of substochastic and stochastic matrices.

Grids use the column convention throughout: entry (i, j) acts on mass
moving from state j to state i, so one step is a left action on a column
of states.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from . import densemath as dm
from .errors import DomainError, ShapeError, ValidationError, ValidationReport
from .quantum import ATOL, DensityOperator, KrausOperation


class SubVectorState:
    """Column of sub-normalised states with total trace at most one."""

    __slots__ = ("parts",)

    _max_trace = 1.0 + ATOL

    def __init__(self, parts: Sequence[DensityOperator]):
        parts = tuple(parts)
        if not parts:
            raise ShapeError("a vector state needs at least one component")
        for k, p in enumerate(parts):
            if not isinstance(p, DensityOperator):
                raise ShapeError(f"component {k} is not a DensityOperator")
        dim = parts[0].dim
        for k, p in enumerate(parts):
            if p.dim != dim:
                raise ShapeError(f"component {k} has dimension {p.dim}, expected {dim}")
        total = sum(p.trace for p in parts)
        self._check_total(total)
        self.parts = parts

    def _check_total(self, total: float) -> None:
        if total > self._max_trace:
            raise DomainError(f"total trace {total} exceeds 1")

    @property
    def size(self) -> int:
        return len(self.parts)

    @property
    def dim(self) -> int:
        return self.parts[0].dim

    @property
    def trace(self) -> float:
        return sum(p.trace for p in self.parts)

    def total(self) -> DensityOperator:
        """Sum of the components: the state irrespective of the hidden label."""
        acc = np.zeros((self.dim, self.dim), dtype=np.complex128)
        for p in self.parts:
            acc += p.matrix
        return DensityOperator(acc)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(size={self.size}, dim={self.dim}, trace={self.trace:.6g})"


class VectorState(SubVectorState):
    """Column of sub-normalised states with total trace exactly one."""

    def _check_total(self, total: float) -> None:
        if abs(total - 1.0) > ATOL:
            raise DomainError(f"total trace {total} is not 1")


def _check_grid(grid) -> tuple[tuple[tuple[KrausOperation, ...], ...], int, int, int, int]:
    rows = tuple(tuple(row) for row in grid)
    if not rows or not rows[0]:
        raise ShapeError("a transition grid needs at least one entry")
    in_size = len(rows[0])
    if any(len(row) != in_size for row in rows):
        raise ShapeError("transition grid rows have unequal lengths")
    first = rows[0][0]
    if not isinstance(first, KrausOperation):
        raise ShapeError("grid entries must be KrausOperation values")
    dim_in, dim_out = first.dim_in, first.dim_out
    if dim_in != dim_out:
        raise ShapeError("grid entries must map a space to itself")
    for i, row in enumerate(rows):
        for j, op in enumerate(row):
            if not isinstance(op, KrausOperation):
                raise ShapeError(f"grid entry ({i}, {j}) is not a KrausOperation")
            if (op.dim_in, op.dim_out) != (dim_in, dim_out):
                raise ShapeError(
                    f"grid entry ({i}, {j}) has shape {op.dim_in}->{op.dim_out}, "
                    f"expected {dim_in}->{dim_out}"
                )
    return rows, len(rows), in_size, dim_in, dim_out


def column_effect_sum(grid: Sequence[Sequence[KrausOperation]], j: int) -> np.ndarray:
    """sum over rows i of the effect sum_k K†K of entry (i, j)."""
    rows = list(grid)
    dim = rows[0][j].dim_in
    acc = np.zeros((dim, dim), dtype=np.complex128)
    for row in rows:
        acc += row[j].total_effect()
    return dm.hermitize(acc)


class SubTOM:
    """Grid of Kraus operations whose columns sum to trace non-increasing maps."""

    __slots__ = ("grid", "out_size", "in_size", "dim", "_col_fx")

    def __init__(self, grid, *, atol: float = ATOL):
        rows, out_size, in_size, dim, _ = _check_grid(grid)
        report = ValidationReport(type(self).__name__)
        for j in range(in_size):
            eigs = np.linalg.eigvalsh(column_effect_sum(rows, j))
            self._check_column(j, eigs, atol, report)
        if not report.ok:
            raise ValidationError(report)
        self.grid = rows
        self.out_size = out_size
        self.in_size = in_size
        self.dim = dim
        self._col_fx = None

    def _check_column(self, j, eigs, atol, report) -> None:
        if eigs[-1] > 1.0 + atol:
            report.add(
                f"column {j} effect sum exceeds the identity; spectrum {list(eigs)}"
            )

    def entry(self, i: int, j: int) -> KrausOperation:
        return self.grid[i][j]

    def column_effects(self) -> tuple[np.ndarray, ...]:
        """Per-column effect sums, cached; traces against these give the
        probability weight a step assigns to each column."""
        if self._col_fx is None:
            self._col_fx = tuple(
                column_effect_sum(self.grid, j) for j in range(self.in_size)
            )
        return self._col_fx

    def __repr__(self) -> str:
        return (
            f"{type(self).__name__}({self.out_size}x{self.in_size}, dim={self.dim})"
        )


class TOM(SubTOM):
    """Grid of Kraus operations in which every column sums to a channel."""

    def _check_column(self, j, eigs, atol, report) -> None:
        if abs(eigs[0] - 1.0) > atol or abs(eigs[-1] - 1.0) > atol:
            report.add(
                f"column {j} effect sum is not the identity; spectrum {list(eigs)}"
            )


def validate_sub_tom(grid) -> SubTOM:
    """Typed value iff every column's effect sum is trace non-increasing."""
    return SubTOM(grid)


def validate_tom(grid) -> TOM:
    """Typed value iff every column's effect sum equals the identity."""
    return TOM(grid)


def _apply_grid_raw(t: SubTOM, parts: Sequence[np.ndarray]) -> list[np.ndarray]:
    """One transition step on raw component matrices; no validation."""
    dim = t.dim
    out: list[np.ndarray] = []
    for i in range(t.out_size):
        acc = np.zeros((dim, dim), dtype=np.complex128)
        row = t.grid[i]
        for j, part in enumerate(parts):
            op = row[j]
            if op._active:
                acc += op._apply_raw(part)
        out.append(acc)
    return out


def apply_tom(t: SubTOM, alpha: SubVectorState) -> SubVectorState:
    """Left action of a grid on a vector state.

    A TOM acting on a VectorState yields a VectorState; otherwise the
    result is a SubVectorState.
    """
    if t.in_size != alpha.size:
        raise ShapeError(f"grid has {t.in_size} columns, state has {alpha.size} components")
    if t.dim != alpha.dim:
        raise ShapeError(f"grid dimension {t.dim} does not match state dimension {alpha.dim}")
    raw = _apply_grid_raw(t, [p.matrix for p in alpha.parts])
    parts = [DensityOperator(m) for m in raw]
    if isinstance(t, TOM) and type(alpha) is VectorState:
        return VectorState(parts)
    return SubVectorState(parts)


def tom_product(b: SubTOM, a: SubTOM) -> SubTOM:
    """Grid product (b ∘ a)(i, j) = sum_k b(i, k) ∘ a(k, j).

    Kraus lists concatenate across k with pairwise matrix products, so the
    count multiplies; the product of TOMs is a TOM, of sub-TOMs a sub-TOM.
    """
    if a.out_size != b.in_size:
        raise ShapeError(f"inner sizes differ: {b.in_size} vs {a.out_size}")
    if a.dim != b.dim:
        raise ShapeError(f"dimensions differ: {b.dim} vs {a.dim}")
    grid = []
    for i in range(b.out_size):
        row = []
        for j in range(a.in_size):
            mats = [
                kb @ ka
                for k in range(b.in_size)
                for kb in b.grid[i][k].kraus
                for ka in a.grid[k][j].kraus
            ]
            row.append(KrausOperation(mats))
        grid.append(row)
    kind = TOM if isinstance(b, TOM) and isinstance(a, TOM) else SubTOM
    return kind(grid)
