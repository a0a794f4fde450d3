"""Hankel matrices of string probabilities and their numeric rank.

The Hankel matrix of a model over (row, column) string bases holds
H[u, v] = p(u · v), the forward probability of the concatenation. Its
rank bounds the hidden dimension any generator of the distribution
needs, which makes it the standard lens for comparing state sizes of
classical and quantum generators of the same process.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import InputError
from .inference import MAX_SEQUENCE_LENGTH, check_sequence
from .densemath import numeric_rank, RANK_RTOL
from .models import ClassicalMealyHMM, MealyQHMM
from .tom import _apply_grid_raw

EPSILON_LABEL = "ε"


@dataclass(frozen=True)
class StringBasis:
    """All strings over an alphabet up to a length, shortlex ordered."""

    alphabet: tuple[str, ...]
    max_len: int
    strings: tuple[tuple[str, ...], ...]

    @classmethod
    def up_to(cls, alphabet, max_len: int) -> "StringBasis":
        alphabet = tuple(alphabet)
        if not alphabet or len(set(alphabet)) != len(alphabet):
            raise InputError("alphabet must be non-empty without duplicates")
        if max_len < 0:
            raise InputError("max_len must be non-negative")
        strings = [
            combo
            for length in range(max_len + 1)
            for combo in product(alphabet, repeat=length)
        ]
        return cls(alphabet=alphabet, max_len=max_len, strings=tuple(strings))

    def __len__(self) -> int:
        return len(self.strings)

    def labels(self, sep: str = "") -> tuple[str, ...]:
        return tuple(sep.join(s) if s else EPSILON_LABEL for s in self.strings)


def _string_probability_fold(model, prefix_state, suffix):
    """Continue a forward fold from a cached prefix state."""
    if isinstance(model, ClassicalMealyHMM):
        vec = prefix_state
        for sym in suffix:
            vec = model.trans[sym] @ vec
        return float(vec.sum())
    parts = prefix_state
    for sym in suffix:
        parts = _apply_grid_raw(model.trans[sym], parts)
    return float(sum(np.trace(p).real for p in parts))


def hankel(
    model: MealyQHMM | ClassicalMealyHMM,
    row_basis: StringBasis,
    col_basis: StringBasis,
) -> np.ndarray:
    """Real matrix of concatenation probabilities over the two bases."""
    if row_basis.alphabet != model.alphabet or col_basis.alphabet != model.alphabet:
        raise InputError("basis alphabet does not match the model alphabet")
    if row_basis.max_len + col_basis.max_len > MAX_SEQUENCE_LENGTH:
        raise InputError("combined basis lengths exceed the sequence cap")
    for s in row_basis.strings + col_basis.strings:
        check_sequence(model, s)
    classical = isinstance(model, ClassicalMealyHMM)
    out = np.zeros((len(row_basis), len(col_basis)))
    for r, u in enumerate(row_basis.strings):
        if classical:
            prefix = model.pi
            for sym in u:
                prefix = model.trans[sym] @ prefix
        else:
            prefix = [p.matrix for p in model.pi.parts]
            for sym in u:
                prefix = _apply_grid_raw(model.trans[sym], prefix)
        for c, v in enumerate(col_basis.strings):
            out[r, c] = _string_probability_fold(model, prefix, v)
    return out


def hankel_rank(
    model: MealyQHMM | ClassicalMealyHMM,
    max_len: int,
    rel_tol: float = RANK_RTOL,
) -> int:
    """Numeric rank of the square Hankel matrix with bases up to max_len."""
    basis = StringBasis.up_to(model.alphabet, max_len)
    return numeric_rank(hankel(model, basis, basis), rel_tol=rel_tol)


def hankel_tsv(
    model: MealyQHMM | ClassicalMealyHMM,
    row_basis: StringBasis,
    col_basis: StringBasis,
    sep: str = "",
) -> str:
    """Tab-separated rendering with string labels; ε marks the empty string."""
    h = hankel(model, row_basis, col_basis)
    lines = ["\t".join(("",) + col_basis.labels(sep))]
    for label, row in zip(row_basis.labels(sep), h):
        lines.append("\t".join((label,) + tuple(format(x, ".17g") for x in row)))
    return "\n".join(lines) + "\n"
