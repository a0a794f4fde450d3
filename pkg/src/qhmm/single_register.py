"""Conversion to a single-register hidden quantum Markov model.

A vector-state model over N hidden labels with d-dimensional components
embeds into one register of dimension d*N: the hidden label becomes a
classical tensor factor, entry (k, l) of a symbol grid lifts to Kraus
matrices E ⊗ |k><l|, and reading off the total state traces out the
label factor. Forward values agree with the grid model exactly, at the
price of (d*N)^2-sized matrices instead of N blocks of size d^2.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import InputError, ResourceLimitError
from .inference import check_sequence
from .models import MealyQHMM
from .quantum import DensityOperator, KrausOperation, ketbra
from .tom import _apply_grid_raw


@dataclass(frozen=True)
class SingleRegisterHQMM:
    quantum_dim: int
    classical_dim: int
    initial: DensityOperator
    ops: dict[str, KrausOperation]
    terminal: KrausOperation

    @property
    def dim(self) -> int:
        return self.quantum_dim * self.classical_dim


def to_hqmm(model: MealyQHMM) -> SingleRegisterHQMM:
    """Lift a vector-state model onto one register.

    The register order is quantum factor first, hidden-label factor
    second. The terminal operation is the partial trace over the label
    factor, realised by the Kraus family {I ⊗ <k|}.
    """
    d = model.dim
    n = len(model.states)
    init = np.zeros((d * n, d * n), dtype=np.complex128)
    for i, part in enumerate(model.pi.parts):
        init += np.kron(part.matrix, ketbra(i, i, n))
    ops: dict[str, KrausOperation] = {}
    for sym in model.alphabet:
        t = model.trans[sym]
        mats = []
        for k in range(t.out_size):
            for l in range(t.in_size):
                unit = ketbra(k, l, n)
                for e in t.entry(k, l).kraus:
                    if e.any():
                        mats.append(np.kron(e, unit))
        if not mats:
            mats = [np.zeros((d * n, d * n), dtype=np.complex128)]
        ops[sym] = KrausOperation(mats)
    eye_d = np.eye(d, dtype=np.complex128)
    eye_n = np.eye(n, dtype=np.complex128)
    terminal = KrausOperation([np.kron(eye_d, eye_n[k : k + 1, :]) for k in range(n)])
    return SingleRegisterHQMM(
        quantum_dim=d,
        classical_dim=n,
        initial=DensityOperator(init),
        ops=ops,
        terminal=terminal,
    )


def hqmm_forward(
    h: SingleRegisterHQMM, seq: Iterable[str] | str, terminate: bool = True
) -> DensityOperator:
    """Fold the lifted operations over a sequence on the single register.

    With ``terminate`` the label factor is traced out, giving the same
    operator as summing the grid model's forward components.
    """
    state = h.initial.matrix
    for k, sym in enumerate(tuple(seq)):
        if sym not in h.ops:
            raise InputError(f"symbol {sym!r} at position {k} is not in the lifted alphabet")
        state = h.ops[sym]._apply_raw(state)
    if terminate:
        state = h.terminal._apply_raw(state)
    return DensityOperator._wrap(state)


def label_block(h: SingleRegisterHQMM, state: np.ndarray, index: int) -> np.ndarray:
    """Diagonal block of the register state for one hidden label."""
    if not 0 <= index < h.classical_dim:
        raise InputError(f"label index {index} out of range")
    idx = np.arange(h.quantum_dim) * h.classical_dim + index
    return np.asarray(state)[np.ix_(idx, idx)]


def equivalence_check(model: MealyQHMM, max_len: int, cap: int = 10 ** 6) -> float:
    """Largest forward discrepancy between the two representations.

    Walks every sequence up to ``max_len`` once, sharing prefixes, and
    compares the terminated register state against the summed grid
    forward state in Frobenius norm.
    """
    check_sequence(model, ())
    m = len(model.alphabet)
    total = sum(m ** t for t in range(1, max_len + 1))
    if total > cap:
        raise ResourceLimitError(f"{total} sequences exceed the enumeration cap {cap}")
    h = to_hqmm(model)
    worst = 0.0

    def compare(state: np.ndarray, parts: list[np.ndarray]) -> float:
        terminated = h.terminal._apply_raw(state)
        acc = np.zeros((model.dim, model.dim), dtype=np.complex128)
        for p in parts:
            acc += p
        return float(np.linalg.norm(terminated - acc))

    def rec(depth: int, state: np.ndarray, parts: list[np.ndarray]) -> None:
        nonlocal worst
        worst = max(worst, compare(state, parts))
        if depth == max_len:
            return
        for sym in model.alphabet:
            rec(
                depth + 1,
                h.ops[sym]._apply_raw(state),
                _apply_grid_raw(model.trans[sym], parts),
            )

    rec(0, h.initial.matrix, [p.matrix for p in model.pi.parts])
    return worst
