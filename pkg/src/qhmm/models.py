"""Classical and quantum Mealy-machine models over hidden state graphs.

Both kinds share the column convention: ``trans[v][i, j]`` carries the
mass that moves from state ``j`` to state ``i`` while emitting ``v``, so
the per-symbol transition grids of a valid model sum to a stochastic
matrix (classical) or a transition operation matrix (quantum) over the
alphabet.

Model values are plain containers; they do not validate themselves.
``validate_hmm`` / ``validate_qhmm`` return a report, and the loaders in
``model_io`` refuse to hand out models whose report is not clean.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import densemath as dm
from .errors import ValidationError, ValidationReport
from .quantum import ATOL, DensityOperator, KrausOperation
from .tom import SubTOM, TOM, VectorState, column_effect_sum

GRAPH_EDGE_ATOL = 1e-12


@dataclass(frozen=True, eq=False)
class ClassicalMealyHMM:
    states: tuple[str, ...]
    alphabet: tuple[str, ...]
    pi: np.ndarray
    trans: dict[str, np.ndarray]
    substochastic: bool = False

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(str(s) for s in self.states))
        object.__setattr__(self, "alphabet", tuple(str(v) for v in self.alphabet))
        pi = np.array(self.pi, dtype=np.float64)
        pi.flags.writeable = False
        object.__setattr__(self, "pi", pi)
        fixed = {}
        for sym, mat in self.trans.items():
            arr = np.array(mat, dtype=np.float64)
            arr.flags.writeable = False
            fixed[str(sym)] = arr
        object.__setattr__(self, "trans", fixed)


@dataclass(frozen=True, eq=False)
class MealyQHMM:
    states: tuple[str, ...]
    alphabet: tuple[str, ...]
    dim: int
    pi: VectorState
    trans: dict[str, SubTOM]
    substochastic: bool = False

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(str(s) for s in self.states))
        object.__setattr__(self, "alphabet", tuple(str(v) for v in self.alphabet))
        object.__setattr__(self, "trans", dict(self.trans))


def _check_labels(model, report: ValidationReport) -> bool:
    ok = True
    if not model.states:
        report.add("states: empty")
        ok = False
    if len(set(model.states)) != len(model.states):
        report.add("states: duplicate labels")
        ok = False
    if not model.alphabet:
        report.add("alphabet: empty")
        ok = False
    if len(set(model.alphabet)) != len(model.alphabet):
        report.add("alphabet: duplicate symbols")
        ok = False
    missing = [v for v in model.alphabet if v not in model.trans]
    extra = [v for v in model.trans if v not in model.alphabet]
    if missing:
        report.add(f"transitions: missing symbols {missing}")
        ok = False
    if extra:
        report.add(f"transitions: symbols {extra} not in the alphabet")
        ok = False
    return ok


def validate_hmm(model: ClassicalMealyHMM, *, atol: float = ATOL) -> ValidationReport:
    """Stochasticity report for a classical model.

    A ``substochastic`` model may lose mass: summed transition columns
    only need to stay at or below one.
    """
    report = ValidationReport("hmm")
    if not _check_labels(model, report):
        return report
    n = len(model.states)
    if model.pi.shape != (n,):
        report.add(f"pi: expected shape ({n},), got {model.pi.shape}")
        return report
    for k, p in enumerate(model.pi):
        if not np.isfinite(p) or p < -atol:
            report.add(f"pi: entry {k} is {p}, not a probability")
    total = float(model.pi.sum())
    if abs(total - 1.0) > atol:
        report.add(f"pi: entries sum to {total}, not 1")
    for sym in model.alphabet:
        mat = model.trans[sym]
        if mat.shape != (n, n):
            report.add(f"transitions[{sym}]: expected shape ({n}, {n}), got {mat.shape}")
            return report
        if not np.isfinite(mat).all():
            report.add(f"transitions[{sym}]: non-finite entries")
            return report
        bad = np.argwhere(mat < -atol)
        for i, j in bad:
            report.add(f"transitions[{sym}]: entry ({i}, {j}) is negative ({mat[i, j]})")
    for j, label in enumerate(model.states):
        col = {sym: float(model.trans[sym][:, j].sum()) for sym in model.alphabet}
        s = sum(col.values())
        per_symbol = ", ".join(f"{sym}={v:.6g}" for sym, v in col.items())
        if model.substochastic:
            if s > 1.0 + atol:
                report.add(
                    f"summed transitions: column {j} (state {label!r}) sums to {s}, "
                    f"above 1 (per symbol: {per_symbol})"
                )
        elif abs(s - 1.0) > atol:
            report.add(
                f"summed transitions: column {j} (state {label!r}) sums to {s}, "
                f"not 1 (per symbol: {per_symbol})"
            )
    return report


def validate_qhmm(model: MealyQHMM, *, atol: float = ATOL) -> ValidationReport:
    """Column-law report for a quantum model.

    Per-symbol grids must already be sub-TOMs (their constructor enforces
    that); this checks the cross-symbol law: every column of the
    symbol-summed grid must be a channel, or trace non-increasing for a
    ``substochastic`` model.
    """
    report = ValidationReport("qhmm")
    if not _check_labels(model, report):
        return report
    n = len(model.states)
    if model.dim < 1:
        report.add(f"dim: {model.dim} is not positive")
        return report
    if model.pi.size != n:
        report.add(f"pi: {model.pi.size} components for {n} states")
        return report
    if model.pi.dim != model.dim:
        report.add(f"pi: component dimension {model.pi.dim}, expected {model.dim}")
        return report
    if abs(model.pi.trace - 1.0) > atol:
        report.add(f"pi: total trace {model.pi.trace} is not 1")
    shapes_ok = True
    for sym in model.alphabet:
        t = model.trans[sym]
        if not isinstance(t, SubTOM):
            report.add(f"transitions[{sym}]: not a SubTOM")
            shapes_ok = False
            continue
        if (t.out_size, t.in_size) != (n, n):
            report.add(
                f"transitions[{sym}]: grid is {t.out_size}x{t.in_size}, expected {n}x{n}"
            )
            shapes_ok = False
        if t.dim != model.dim:
            report.add(f"transitions[{sym}]: dimension {t.dim}, expected {model.dim}")
            shapes_ok = False
    if not shapes_ok:
        return report
    for j, label in enumerate(model.states):
        acc = np.zeros((model.dim, model.dim), dtype=np.complex128)
        for sym in model.alphabet:
            acc += column_effect_sum(model.trans[sym].grid, j)
        eigs = np.linalg.eigvalsh(dm.hermitize(acc))
        if model.substochastic:
            if eigs[-1] > 1.0 + atol:
                report.add(
                    f"summed transitions: column {j} (state {label!r}) effect sum "
                    f"exceeds the identity; spectrum {list(eigs)}"
                )
        elif abs(eigs[0] - 1.0) > atol or abs(eigs[-1] - 1.0) > atol:
            report.add(
                f"summed transitions: column {j} (state {label!r}) is not a channel; "
                f"spectrum {list(eigs)}"
            )
    return report


def embed_classical(model: ClassicalMealyHMM) -> MealyQHMM:
    """View a classical model as a quantum one on a 1-dimensional space.

    Probabilities become 1x1 density operators and each transition
    probability p the single Kraus matrix [[sqrt(p)]], so forward values
    coincide with the classical matrix-product forward.
    """
    report = validate_hmm(model)
    if not report.ok:
        raise ValidationError(report)
    parts = [DensityOperator([[max(float(p), 0.0)]]) for p in model.pi]
    trans: dict[str, SubTOM] = {}
    for sym in model.alphabet:
        mat = model.trans[sym]
        grid = [
            [
                KrausOperation([[[np.sqrt(max(float(mat[i, j]), 0.0))]]])
                for j in range(len(model.states))
            ]
            for i in range(len(model.states))
        ]
        trans[sym] = SubTOM(grid)
    return MealyQHMM(
        states=model.states,
        alphabet=model.alphabet,
        dim=1,
        pi=VectorState(parts),
        trans=trans,
        substochastic=model.substochastic,
    )


def summed_transition(model: MealyQHMM) -> SubTOM:
    """The symbol-summed grid: a TOM for a mass-preserving model."""
    n = len(model.states)
    grid = []
    for i in range(n):
        row = []
        for j in range(n):
            mats = []
            for sym in model.alphabet:
                mats.extend(model.trans[sym].entry(i, j).kraus)
            row.append(KrausOperation(mats))
        grid.append(row)
    return SubTOM(grid) if model.substochastic else TOM(grid)


# ---------------------------------------------------------------------------
# seeded random constructions (test fuel and acceptance sweeps)

def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    re = rng.standard_normal((rows, cols))
    im = rng.standard_normal((rows, cols))
    return (re + 1j * im) / np.sqrt(2.0)


def _inv_sqrt_psd(mat: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(dm.hermitize(mat))
    w = np.clip(w, 1e-12, None)
    return v @ np.diag(w ** -0.5) @ v.conj().T


def _haar_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    q, r = np.linalg.qr(_ginibre(rng, dim, dim))
    d = np.diag(r).copy()
    d[d == 0] = 1.0
    return q * (d / np.abs(d))


def random_density(dim: int, seed, trace: float = 1.0) -> DensityOperator:
    rng = _as_rng(seed)
    g = _ginibre(rng, dim, dim)
    m = g @ g.conj().T
    return DensityOperator(m * (trace / float(np.trace(m).real)))


def random_vector_state(size: int, dim: int, seed) -> VectorState:
    rng = _as_rng(seed)
    raw = []
    for _ in range(size):
        g = _ginibre(rng, dim, dim)
        raw.append(g @ g.conj().T)
    total = sum(float(np.trace(m).real) for m in raw)
    return VectorState([DensityOperator(m / total) for m in raw])


def random_tom(out_size: int, in_size: int, dim: int, seed, kraus_per_entry: int = 1) -> TOM:
    """Haar-flavoured TOM: Ginibre Kraus draws, columns normalised to channels."""
    rng = _as_rng(seed)
    cols: list[list[list[np.ndarray]]] = []
    for _ in range(in_size):
        draws = [
            [_ginibre(rng, dim, dim) for _ in range(kraus_per_entry)]
            for _ in range(out_size)
        ]
        s = np.zeros((dim, dim), dtype=np.complex128)
        for entry in draws:
            for k in entry:
                s += k.conj().T @ k
        r = _inv_sqrt_psd(s)
        cols.append([[k @ r for k in entry] for entry in draws])
    grid = [
        [KrausOperation(cols[j][i]) for j in range(in_size)]
        for i in range(out_size)
    ]
    return TOM(grid)


def random_sub_tom(
    out_size: int, in_size: int, dim: int, seed, kraus_per_entry: int = 1
) -> SubTOM:
    """Strictly trace-decreasing random grid with occasional zero entries."""
    rng = _as_rng(seed)
    cols: list[list[list[np.ndarray]]] = []
    for _ in range(in_size):
        draws = []
        for _ in range(out_size):
            if rng.random() < 0.2:
                draws.append([np.zeros((dim, dim), dtype=np.complex128)])
            else:
                draws.append([_ginibre(rng, dim, dim) for _ in range(kraus_per_entry)])
        s = np.zeros((dim, dim), dtype=np.complex128)
        for entry in draws:
            for k in entry:
                s += k.conj().T @ k
        top = float(np.linalg.eigvalsh(dm.hermitize(s))[-1])
        scale = rng.uniform(0.3, 0.95) / np.sqrt(max(top, 1e-12))
        cols.append([[k * scale for k in entry] for entry in draws])
    grid = [
        [KrausOperation(cols[j][i]) for j in range(in_size)]
        for i in range(out_size)
    ]
    return SubTOM(grid)


def random_qhmm(n_states: int, n_symbols: int, dim: int, seed) -> MealyQHMM:
    """Seeded random valid model.

    For each source state one Ginibre Kraus matrix is drawn per (target,
    symbol) pair and the whole column is normalised so it sums to a
    channel, making every per-symbol grid a sub-TOM and the symbol sum a
    TOM by construction.
    """
    rng = _as_rng(seed)
    states = tuple(f"s{i + 1}" for i in range(n_states))
    alphabet = tuple("abcdefghijklmnopqrstuvwxyz"[:n_symbols])
    raw: dict[tuple[str, int, int], np.ndarray] = {}
    for j in range(n_states):
        draws = {}
        s = np.zeros((dim, dim), dtype=np.complex128)
        for i in range(n_states):
            for sym in alphabet:
                k = _ginibre(rng, dim, dim)
                draws[(sym, i)] = k
                s += k.conj().T @ k
        r = _inv_sqrt_psd(s)
        for (sym, i), k in draws.items():
            raw[(sym, i, j)] = k @ r
    trans = {
        sym: SubTOM(
            [
                [KrausOperation([raw[(sym, i, j)]]) for j in range(n_states)]
                for i in range(n_states)
            ]
        )
        for sym in alphabet
    }
    return MealyQHMM(
        states=states,
        alphabet=alphabet,
        dim=dim,
        pi=random_vector_state(n_states, dim, rng),
        trans=trans,
    )


def random_eligible_qhmm(n_states: int, n_symbols: int, dim: int, seed) -> MealyQHMM:
    """Seeded random model whose entries are scaled unitary channels.

    Every grid entry is sqrt(c) * U with U Haar-random, so each entry's
    effect sum is exactly c times the identity; per source state the
    factors c sum to one, some of them zeroed for sparsity.
    """
    rng = _as_rng(seed)
    states = tuple(f"s{i + 1}" for i in range(n_states))
    alphabet = tuple("abcdefghijklmnopqrstuvwxyz"[:n_symbols])
    weights = np.zeros((n_symbols, n_states, n_states))
    for j in range(n_states):
        w = rng.gamma(1.0, 1.0, size=n_symbols * n_states)
        w[rng.random(n_symbols * n_states) < 0.3] = 0.0
        if w.sum() == 0.0:
            w[0] = 1.0
        w /= w.sum()
        weights[:, :, j] = w.reshape(n_symbols, n_states)
    trans = {}
    for m, sym in enumerate(alphabet):
        grid = []
        for i in range(n_states):
            row = []
            for j in range(n_states):
                c = weights[m, i, j]
                if c == 0.0:
                    row.append(KrausOperation.zero(dim))
                else:
                    row.append(KrausOperation([np.sqrt(c) * _haar_unitary(rng, dim)]))
            grid.append(row)
        trans[sym] = SubTOM(grid)
    return MealyQHMM(
        states=states,
        alphabet=alphabet,
        dim=dim,
        pi=random_vector_state(n_states, dim, rng),
        trans=trans,
    )


# ---------------------------------------------------------------------------
# graph view

@dataclass(frozen=True)
class GraphEdge:
    source: str
    target: str
    symbol: str
    label: str


@dataclass(frozen=True)
class LabelledGraph:
    nodes: tuple[str, ...]
    edges: tuple[GraphEdge, ...] = field(default_factory=tuple)

    def to_dot(self) -> str:
        lines = ["digraph model {", "  rankdir=LR;"]
        lines += [f'  "{node}";' for node in self.nodes]
        for e in self.edges:
            lines.append(f'  "{e.source}" -> "{e.target}" [label="{e.label}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def graph_view(model: MealyQHMM) -> LabelledGraph:
    """Labelled multigraph of the non-trivial transitions.

    An edge j -> i labelled with the operation name and its emitted symbol
    is present whenever entry (i, j) of that symbol's grid has a Kraus
    entry of magnitude above 1e-12.
    """
    edges = []
    for j, src in enumerate(model.states):
        for sym in model.alphabet:
            t = model.trans[sym]
            for i, dst in enumerate(model.states):
                op = t.entry(i, j)
                if any(np.max(np.abs(k)) > GRAPH_EDGE_ATOL for k in op.kraus):
                    label = f"P_{{{dst} {src}}}^{{{sym}}}|{sym}"
                    edges.append(GraphEdge(source=src, target=dst, symbol=sym, label=label))
    return LabelledGraph(nodes=model.states, edges=tuple(edges))
