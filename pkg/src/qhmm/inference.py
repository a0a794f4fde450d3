"""Forward evaluation, Viterbi decoding, enumeration and sampling.

All functions assume a validated model (see ``models.validate_qhmm``);
they check sequences and resource bounds, not model invariants.

The forward pass folds the per-symbol grids over the observation string
from the left; the probability of a string is the trace of the summed
components of the resulting vector state.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DomainError,
    EligibilityError,
    InputError,
    ResourceLimitError,
)
from .models import ClassicalMealyHMM, MealyQHMM, _as_rng
from .quantum import DensityOperator, proportional_channel_factor
from .tom import SubTOM, SubVectorState, _apply_grid_raw

MAX_SEQUENCE_LENGTH = 500
DEFAULT_ENUM_CAP = 10 ** 6
VANISHED_TRACE = 1e-12


@dataclass(frozen=True)
class ForwardResult:
    alpha: SubVectorState
    rho: DensityOperator
    prob: float


@dataclass(frozen=True)
class TrellisCell:
    state: DensityOperator
    backpointer: int | None


@dataclass(frozen=True)
class ViterbiResult:
    path: tuple[str, ...]
    prob: float
    survivors: tuple[tuple[TrellisCell, ...], ...] | None


@dataclass(frozen=True)
class EligibilityReport:
    eligible: bool
    factors: dict[tuple[str, int, int], float | None]


def check_sequence(model, seq: Iterable[str] | str) -> tuple[str, ...]:
    """Normalise a sequence to a tuple of alphabet symbols.

    Accepts a plain string (one symbol per character) or any iterable of
    symbol labels.
    """
    symbols = tuple(seq)
    alphabet = set(model.alphabet)
    for k, sym in enumerate(symbols):
        if sym not in alphabet:
            raise InputError(f"symbol {sym!r} at position {k} is not in the alphabet")
    if len(symbols) > MAX_SEQUENCE_LENGTH:
        raise ResourceLimitError(
            f"sequence length {len(symbols)} exceeds the cap {MAX_SEQUENCE_LENGTH}"
        )
    return symbols


def _pi_raw(model: MealyQHMM) -> list[np.ndarray]:
    return [p.matrix for p in model.pi.parts]


def _fold_raw(model: MealyQHMM, symbols: Sequence[str]) -> list[np.ndarray]:
    parts = _pi_raw(model)
    for sym in symbols:
        parts = _apply_grid_raw(model.trans[sym], parts)
    return parts


def forward(model: MealyQHMM, seq: Iterable[str] | str) -> ForwardResult:
    """Left fold of the observation string over the transition grids.

    The empty string returns the initial vector state itself.
    """
    symbols = check_sequence(model, seq)
    parts = _fold_raw(model, symbols)
    alpha = SubVectorState([DensityOperator(m) for m in parts])
    rho = alpha.total()
    return ForwardResult(alpha=alpha, rho=rho, prob=rho.trace)


def classical_forward(model: ClassicalMealyHMM, seq: Iterable[str] | str) -> float:
    """Matrix-product forward value for a classical model."""
    symbols = check_sequence(model, seq)
    vec = model.pi
    for sym in symbols:
        vec = model.trans[sym] @ vec
    return float(vec.sum())


def measured_probabilities(model: MealyQHMM, seq, mu) -> dict[str, float]:
    """Outcome distribution of measuring the forward state of ``seq``."""
    from .quantum import measure_probabilities

    return measure_probabilities(mu, forward(model, seq).rho)


def enumerate_distribution(
    model: MealyQHMM, length: int, cap: int = DEFAULT_ENUM_CAP
) -> dict[tuple[str, ...], DensityOperator]:
    """Forward states of every sequence of the given length.

    Keys are emitted in lexicographic order of the alphabet; summing the
    traces over all keys gives 1 for a mass-preserving model.
    """
    if length < 0:
        raise InputError("length must be non-negative")
    if length > MAX_SEQUENCE_LENGTH:
        raise ResourceLimitError(f"length {length} exceeds {MAX_SEQUENCE_LENGTH}")
    m = len(model.alphabet)
    if m ** length > cap:
        raise ResourceLimitError(
            f"{m}^{length} sequences exceed the enumeration cap {cap}"
        )
    out: dict[tuple[str, ...], DensityOperator] = {}

    def rec(prefix: tuple[str, ...], parts: list[np.ndarray]) -> None:
        if len(prefix) == length:
            acc = parts[0].copy()
            for p in parts[1:]:
                acc += p
            out[prefix] = DensityOperator(acc)
            return
        for sym in model.alphabet:
            rec(prefix + (sym,), _apply_grid_raw(model.trans[sym], parts))

    rec((), _pi_raw(model))
    return out


def marginalization_check(model: MealyQHMM, seq: Iterable[str] | str) -> float:
    """Residual of one-step probability marginalization after a prefix.

    Summing the probabilities of all one-symbol extensions of a prefix
    must reproduce the prefix's own probability whenever the model is
    mass-preserving: each per-source column of the symbol-summed grid is
    trace preserving, so the total trace survives one more step.  Only
    the traces match in general; the summed operators themselves may
    differ because the column channels are not the identity.
    """
    symbols = check_sequence(model, seq)
    parts = _fold_raw(model, symbols)
    base = sum(float(p.trace().real) for p in parts)
    total = 0.0
    for sym in model.alphabet:
        total += sum(
            float(p.trace().real)
            for p in _apply_grid_raw(model.trans[sym], parts)
        )
    return abs(total - base)


def _symbol_weights(model: MealyQHMM, parts: Sequence[np.ndarray]) -> dict[str, float]:
    """Trace mass each next symbol would receive from the given components.

    Uses tr(K rho K†) = tr((K†K) rho): only the cached per-column effect
    sums touch the state, no full application per symbol.
    """
    out: dict[str, float] = {}
    for sym in model.alphabet:
        fx = model.trans[sym].column_effects()
        w = 0.0
        for j, part in enumerate(parts):
            w += float(np.trace(fx[j] @ part).real)
        out[sym] = max(w, 0.0)
    return out


def next_symbol_distribution(
    model: MealyQHMM, alpha: SubVectorState
) -> dict[str, float]:
    """Conditional distribution of the next emitted symbol.

    Raises for a vanished state (total trace at most 1e-12), where no
    conditional distribution exists.
    """
    if model.dim != alpha.dim or len(model.states) != alpha.size:
        raise InputError("vector state does not match the model's shape")
    total = alpha.trace
    if total <= VANISHED_TRACE:
        raise DomainError(f"state has vanished (trace {total}); cannot condition on it")
    weights = _symbol_weights(model, [p.matrix for p in alpha.parts])
    return {sym: w / total for sym, w in weights.items()}


def sample_many(
    model: MealyQHMM, length: int, seed, count: int
) -> list[tuple[str, ...]]:
    """Draw ``count`` observation sequences from one seeded stream."""
    if length < 0 or count < 0:
        raise InputError("length and count must be non-negative")
    if length > MAX_SEQUENCE_LENGTH:
        raise ResourceLimitError(f"length {length} exceeds {MAX_SEQUENCE_LENGTH}")
    rng = _as_rng(seed)
    pi_parts = _pi_raw(model)
    out = []
    for _ in range(count):
        parts = pi_parts
        symbols: list[str] = []
        for _ in range(length):
            weights = _symbol_weights(model, parts)
            total = sum(weights.values())
            if total <= VANISHED_TRACE:
                raise DomainError(
                    "state has vanished mid-sample; model loses probability mass"
                )
            u = rng.random() * total
            acc = 0.0
            chosen = model.alphabet[-1]
            for sym in model.alphabet:
                acc += weights[sym]
                if u < acc:
                    chosen = sym
                    break
            symbols.append(chosen)
            parts = _apply_grid_raw(model.trans[chosen], parts)
        out.append(tuple(symbols))
    return out


def sample(model: MealyQHMM, length: int, seed) -> tuple[str, ...]:
    """Draw one observation sequence of the given length."""
    return sample_many(model, length, seed, 1)[0]


def viterbi_eligibility(model: MealyQHMM) -> EligibilityReport:
    """Check that every grid entry is a scalar multiple of a channel.

    The trellis recursion maximises the trace locally, which is sound
    only when each entry scales traces uniformly: entry (i, j) must have
    effect sum c * identity. Zero entries count as c = 0.
    """
    factors: dict[tuple[str, int, int], float | None] = {}
    eligible = True
    for sym in model.alphabet:
        t = model.trans[sym]
        for i in range(t.out_size):
            for j in range(t.in_size):
                c = proportional_channel_factor(t.entry(i, j))
                factors[(sym, i, j)] = c
                if c is None:
                    eligible = False
    return EligibilityReport(eligible=eligible, factors=factors)


def viterbi(model: MealyQHMM, seq: Iterable[str] | str) -> ViterbiResult:
    """Most likely hidden state path by the trellis recursion.

    Ties break toward the smallest previous-state index, and the final
    state toward the smallest index; traces within ``VITERBI_TIE_RTOL``
    of each other (relative) count as tied, see ``_trace_tie``. Requires
    an eligible model; for the general case use ``brute_force_viterbi``.
    """
    symbols = check_sequence(model, seq)
    if not viterbi_eligibility(model).eligible:
        raise EligibilityError(
            "model has grid entries that are not scalar multiples of channels; "
            "the trellis recursion is unsound here, use brute_force_viterbi"
        )
    n = len(model.states)
    levels: list[list[np.ndarray]] = [_pi_raw(model)]
    backs: list[list[int | None]] = [[None] * n]
    for sym in symbols:
        t = model.trans[sym]
        prev = levels[-1]
        cur: list[np.ndarray] = []
        back: list[int | None] = []
        for i in range(n):
            best_j, best_tr, best_mat = 0, -1.0, None
            for j in range(n):
                cand = t.entry(i, j)._apply_raw(prev[j])
                tr = float(np.trace(cand).real)
                if tr > best_tr and not _trace_tie(tr, best_tr):
                    best_j, best_tr, best_mat = j, tr, cand
            cur.append(best_mat)
            back.append(best_j)
        levels.append(cur)
        backs.append(back)
    last = levels[-1]
    end, end_tr = 0, -1.0
    for i in range(n):
        tr = float(np.trace(last[i]).real)
        if tr > end_tr and not _trace_tie(tr, end_tr):
            end, end_tr = i, tr
    indices = [end]
    for k in range(len(symbols), 0, -1):
        indices.append(backs[k][indices[-1]])
    indices.reverse()
    survivors = tuple(
        tuple(
            TrellisCell(state=DensityOperator(levels[k][i]), backpointer=backs[k][i])
            for i in range(n)
        )
        for k in range(len(symbols) + 1)
    )
    return ViterbiResult(
        path=tuple(model.states[i] for i in indices),
        prob=max(end_tr, 0.0),
        survivors=survivors,
    )


VITERBI_TIE_RTOL = 1e-12


def _trace_tie(a: float, b: float) -> bool:
    """Whether two accumulated traces count as the same likelihood.

    Two paths built from the same factors in a different order produce
    traces that differ by a few ulps, so tie detection uses a relative
    band rather than exact equality. Exact zeros still tie exactly.
    """
    return abs(a - b) <= VITERBI_TIE_RTOL * max(abs(a), abs(b))


def _path_beats(
    ind_a: Sequence[int],
    tr_a: Sequence[float],
    ind_b: Sequence[int],
    tr_b: Sequence[float],
) -> bool:
    """Whether path a precedes path b in the trellis tie-break order.

    The trellis breaks ties from the final level backwards: largest final
    trace, then smallest final state, then at every earlier level the
    smallest predecessor index, with the cell reached there compared by
    its own accumulated trace first. A plain reversed-index comparison is
    not equivalent: a cell can hold a positive-trace prefix through a
    larger index that a later zero operation annihilates, and the trellis
    still backtracks through it.
    """
    t_len = len(ind_a) - 1
    if not _trace_tie(tr_a[t_len], tr_b[t_len]):
        return tr_a[t_len] > tr_b[t_len]
    if ind_a[t_len] != ind_b[t_len]:
        return ind_a[t_len] < ind_b[t_len]
    for t in range(t_len - 1, 0, -1):
        if ind_a[t] != ind_b[t]:
            return ind_a[t] < ind_b[t]
        if not _trace_tie(tr_a[t], tr_b[t]):
            return tr_a[t] > tr_b[t]
    if t_len > 0 and ind_a[0] != ind_b[0]:
        return ind_a[0] < ind_b[0]
    return False


def brute_force_viterbi(
    model: MealyQHMM, seq: Iterable[str] | str, cap: int = DEFAULT_ENUM_CAP
) -> ViterbiResult:
    """Most likely hidden state path by exhaustive path enumeration.

    Works for any valid model. Ties resolve exactly like the trellis
    recursion (see ``_path_order_key``). ``survivors`` is None, the
    trellis is never built.
    """
    symbols = check_sequence(model, seq)
    n = len(model.states)
    t_len = len(symbols)
    if n ** (t_len + 1) > cap:
        raise ResourceLimitError(
            f"{n}^{t_len + 1} paths exceed the enumeration cap {cap}"
        )
    step_toms: list[SubTOM] = [model.trans[s] for s in symbols]
    pi_parts = _pi_raw(model)
    best_path: tuple[int, ...] | None = None
    best_traces: tuple[float, ...] = ()
    path: list[int] = []
    traces: list[float] = []

    def offer(indices: Sequence[int], trs: Sequence[float]) -> None:
        nonlocal best_path, best_traces
        if best_path is None or _path_beats(indices, trs, best_path, best_traces):
            best_path, best_traces = tuple(indices), tuple(trs)

    def visit(mat: np.ndarray) -> None:
        depth = len(path) - 1
        if depth == t_len:
            offer(path, traces)
            return
        if not mat.any():
            # every completion stays at exact trace zero, and the
            # all-first-state completion dominates the rest under the
            # path order, so offering it alone is lossless
            offer(path + [0] * (t_len - depth), traces + [0.0] * (t_len - depth))
            return
        t = step_toms[depth]
        cur = path[-1]
        for i in range(n):
            nxt = t.entry(i, cur)._apply_raw(mat)
            path.append(i)
            traces.append(float(np.trace(nxt).real))
            visit(nxt)
            path.pop()
            traces.pop()

    for start in range(n):
        path = [start]
        traces = [float(np.trace(pi_parts[start]).real)]
        visit(pi_parts[start])
    assert best_path is not None
    return ViterbiResult(
        path=tuple(model.states[i] for i in best_path),
        prob=max(best_traces[-1], 0.0),
        survivors=None,
    )
