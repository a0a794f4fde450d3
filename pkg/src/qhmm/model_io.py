"""JSON persistence for models and measurements, plus bundled examples.

File layout (all matrices row-major):

* classical model: ``kind`` "hmm", ``pi`` a list of probabilities,
  ``transitions`` mapping each symbol to an NxN matrix of numbers.
* quantum model: ``kind`` "qhmm", ``pi`` a list of dim x dim complex
  matrices, ``transitions`` mapping each symbol to an NxN grid whose
  cells are lists of complex Kraus matrices.
* measurement: ``kind`` "measurement", ``effects`` mapping outcome
  labels to complex matrices.

A complex number is stored as a two-element array [re, im]. Loading
validates; a model that fails its stochasticity or column law is
rejected with the validation report.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import InputError, ModelFormatError, ValidationError
from .models import ClassicalMealyHMM, MealyQHMM, validate_hmm, validate_qhmm
from .quantum import DensityOperator, KrausOperation, Measurement
from .tom import SubTOM, VectorState

BUILTIN_NAMES = (
    "lambda1c",
    "lambda2c",
    "lambda3c",
    "lambda1q",
    "lambda_ex2_c",
    "lambda_ex2_q",
)


# ---------------------------------------------------------------------------
# JSON <-> matrix helpers

def matrix_to_json(mat: np.ndarray) -> list[list[list[float]]]:
    """Complex matrix as nested lists of [re, im] pairs."""
    mat = np.asarray(mat, dtype=np.complex128)
    return [[[float(z.real), float(z.imag)] for z in row] for row in mat]


def _require(cond: bool, ctx: str, msg: str):
    if not cond:
        raise ModelFormatError(f"{ctx}: {msg}")


def _number(value, ctx: str) -> float:
    _require(isinstance(value, (int, float)) and not isinstance(value, bool), ctx, "expected a number")
    return float(value)


def matrix_from_json(value, ctx: str) -> np.ndarray:
    """Parse nested lists of [re, im] pairs into a complex matrix."""
    _require(isinstance(value, list) and value, ctx, "expected a non-empty matrix")
    rows = []
    width = None
    for r, row in enumerate(value):
        _require(isinstance(row, list) and row, f"{ctx}[{r}]", "expected a non-empty row")
        if width is None:
            width = len(row)
        _require(len(row) == width, f"{ctx}[{r}]", f"expected {width} entries, got {len(row)}")
        entries = []
        for c, cell in enumerate(row):
            cell_ctx = f"{ctx}[{r}][{c}]"
            _require(isinstance(cell, list) and len(cell) == 2, cell_ctx, "expected an [re, im] pair")
            entries.append(complex(_number(cell[0], cell_ctx), _number(cell[1], cell_ctx)))
        rows.append(entries)
    return np.array(rows, dtype=np.complex128)


def _real_matrix_from_json(value, ctx: str) -> np.ndarray:
    _require(isinstance(value, list) and value, ctx, "expected a non-empty matrix")
    rows = []
    width = None
    for r, row in enumerate(value):
        _require(isinstance(row, list) and row, f"{ctx}[{r}]", "expected a non-empty row")
        if width is None:
            width = len(row)
        _require(len(row) == width, f"{ctx}[{r}]", f"expected {width} entries, got {len(row)}")
        rows.append([_number(cell, f"{ctx}[{r}][{c}]") for c, cell in enumerate(row)])
    return np.array(rows, dtype=np.float64)


def _labels(value, ctx: str) -> tuple[str, ...]:
    _require(isinstance(value, list) and value, ctx, "expected a non-empty list of labels")
    for k, item in enumerate(value):
        _require(isinstance(item, str) and item != "", f"{ctx}[{k}]", "expected a non-empty string")
    return tuple(value)


# ---------------------------------------------------------------------------
# serialization

def model_to_dict(model: ClassicalMealyHMM | MealyQHMM) -> dict:
    if isinstance(model, ClassicalMealyHMM):
        return {
            "kind": "hmm",
            "states": list(model.states),
            "alphabet": list(model.alphabet),
            "dim": 1,
            "substochastic": bool(model.substochastic),
            "pi": [float(p) for p in model.pi],
            "transitions": {
                sym: [[float(x) for x in row] for row in model.trans[sym]]
                for sym in model.alphabet
            },
        }
    return {
        "kind": "qhmm",
        "states": list(model.states),
        "alphabet": list(model.alphabet),
        "dim": int(model.dim),
        "substochastic": bool(model.substochastic),
        "pi": [matrix_to_json(p.matrix) for p in model.pi.parts],
        "transitions": {
            sym: [
                [
                    [matrix_to_json(k) for k in model.trans[sym].entry(i, j).kraus]
                    for j in range(len(model.states))
                ]
                for i in range(len(model.states))
            ]
            for sym in model.alphabet
        },
    }


def dumps_model(model: ClassicalMealyHMM | MealyQHMM) -> str:
    return json.dumps(model_to_dict(model), indent=2) + "\n"


def save(model: ClassicalMealyHMM | MealyQHMM, path) -> None:
    Path(path).write_text(dumps_model(model), encoding="utf-8")


# ---------------------------------------------------------------------------
# parsing

def _parse_hmm(doc: dict, *, validate: bool) -> ClassicalMealyHMM:
    states = _labels(doc.get("states"), "states")
    alphabet = _labels(doc.get("alphabet"), "alphabet")
    if "dim" in doc:
        _require(doc["dim"] == 1, "dim", "classical models have dim 1")
    pi_raw = doc.get("pi")
    _require(isinstance(pi_raw, list), "pi", "expected a list of probabilities")
    pi = [_number(p, f"pi[{k}]") for k, p in enumerate(pi_raw)]
    trans_raw = doc.get("transitions")
    _require(isinstance(trans_raw, dict), "transitions", "expected an object")
    trans = {
        sym: _real_matrix_from_json(mat, f"transitions.{sym}")
        for sym, mat in trans_raw.items()
    }
    model = ClassicalMealyHMM(
        states=states,
        alphabet=alphabet,
        pi=np.array(pi),
        trans=trans,
        substochastic=bool(doc.get("substochastic", False)),
    )
    if validate:
        report = validate_hmm(model)
        if not report.ok:
            raise ValidationError(report)
    return model


def _parse_qhmm(doc: dict, *, validate: bool) -> MealyQHMM:
    states = _labels(doc.get("states"), "states")
    alphabet = _labels(doc.get("alphabet"), "alphabet")
    dim = doc.get("dim")
    _require(isinstance(dim, int) and not isinstance(dim, bool) and dim >= 1, "dim", "expected a positive integer")
    n = len(states)
    pi_raw = doc.get("pi")
    _require(isinstance(pi_raw, list) and len(pi_raw) == n, "pi", f"expected {n} matrices")
    parts = [DensityOperator(matrix_from_json(m, f"pi[{k}]")) for k, m in enumerate(pi_raw)]
    trans_raw = doc.get("transitions")
    _require(isinstance(trans_raw, dict), "transitions", "expected an object")
    trans: dict[str, SubTOM] = {}
    for sym, grid_raw in trans_raw.items():
        ctx = f"transitions.{sym}"
        _require(isinstance(grid_raw, list) and len(grid_raw) == n, ctx, f"expected {n} rows")
        grid = []
        for i, row_raw in enumerate(grid_raw):
            _require(isinstance(row_raw, list) and len(row_raw) == n, f"{ctx}[{i}]", f"expected {n} cells")
            row = []
            for j, cell in enumerate(row_raw):
                cell_ctx = f"{ctx}[{i}][{j}]"
                _require(isinstance(cell, list) and cell, cell_ctx, "expected a non-empty list of Kraus matrices")
                row.append(
                    KrausOperation(
                        [matrix_from_json(k, f"{cell_ctx}[{m}]") for m, k in enumerate(cell)]
                    )
                )
            grid.append(row)
        trans[sym] = SubTOM(grid)
    model = MealyQHMM(
        states=states,
        alphabet=alphabet,
        dim=dim,
        pi=VectorState(parts),
        trans=trans,
        substochastic=bool(doc.get("substochastic", False)),
    )
    if validate:
        report = validate_qhmm(model)
        if not report.ok:
            raise ValidationError(report)
    return model


def loads_model(text: str, *, validate: bool = True) -> ClassicalMealyHMM | MealyQHMM:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"invalid JSON: {exc}") from exc
    _require(isinstance(doc, dict), "document", "expected a JSON object")
    kind = doc.get("kind")
    if kind == "hmm":
        return _parse_hmm(doc, validate=validate)
    if kind == "qhmm":
        return _parse_qhmm(doc, validate=validate)
    raise ModelFormatError(f"kind: expected 'hmm' or 'qhmm', got {kind!r}")


def load(path, *, validate: bool = True) -> ClassicalMealyHMM | MealyQHMM:
    return loads_model(Path(path).read_text(encoding="utf-8"), validate=validate)


def measurement_to_dict(mu: Measurement) -> dict:
    return {
        "kind": "measurement",
        "effects": {label: matrix_to_json(eff) for label, eff in mu.effects.items()},
    }


def save_measurement(mu: Measurement, path) -> None:
    Path(path).write_text(json.dumps(measurement_to_dict(mu), indent=2) + "\n", encoding="utf-8")


def load_measurement(path) -> Measurement:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"invalid JSON: {exc}") from exc
    _require(isinstance(doc, dict), "document", "expected a JSON object")
    _require(doc.get("kind") == "measurement", "kind", "expected 'measurement'")
    effects_raw = doc.get("effects")
    _require(isinstance(effects_raw, dict) and effects_raw, "effects", "expected a non-empty object")
    effects = {
        label: matrix_from_json(mat, f"effects.{label}")
        for label, mat in effects_raw.items()
    }
    return Measurement(effects)


# ---------------------------------------------------------------------------
# bundled models

def _op(*mats) -> KrausOperation:
    return KrausOperation([np.array(m, dtype=np.complex128) for m in mats])


def _zero_op(dim: int) -> KrausOperation:
    return KrausOperation.zero(dim)


def _lambda1c() -> ClassicalMealyHMM:
    return ClassicalMealyHMM(
        states=("s1", "s2"),
        alphabet=("a", "b", "c"),
        pi=[0.0, 1.0],
        trans={
            "a": [[0.0, 1.0], [0.0, 0.0]],
            "b": [[0.0, 0.0], [0.5, 0.0]],
            "c": [[0.0, 0.0], [0.5, 0.0]],
        },
    )


def _lambda2c() -> ClassicalMealyHMM:
    # drops the c-transition of its three-symbol sibling, losing half the
    # outgoing mass of s1: a substochastic machine
    return ClassicalMealyHMM(
        states=("s1", "s2"),
        alphabet=("a", "b"),
        pi=[0.0, 1.0],
        trans={
            "a": [[0.0, 1.0], [0.0, 0.0]],
            "b": [[0.0, 0.0], [0.5, 0.0]],
        },
        substochastic=True,
    )


def _lambda3c() -> ClassicalMealyHMM:
    return ClassicalMealyHMM(
        states=("s1", "s2", "s3"),
        alphabet=("a", "b", "c"),
        pi=[0.0, 1.0, 0.0],
        trans={
            "a": [[0.0, 1.0, 1.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]],
            "b": [[0.0, 0.0, 0.0], [0.5, 0.0, 0.0], [0.0, 0.0, 0.0]],
            "c": [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.5, 0.0, 0.0]],
        },
    )


def _lambda1q() -> MealyQHMM:
    root_half = np.sqrt(0.5)
    rotate = np.array([[0.0, -1.0], [1.0, 0.0]], dtype=np.complex128)
    eye = np.eye(2, dtype=np.complex128)
    zero = _zero_op(2)
    pi = VectorState([DensityOperator.zero(2), DensityOperator([[1, 0], [0, 0]])])
    return MealyQHMM(
        states=("s1", "s2"),
        alphabet=("a", "b", "c"),
        dim=2,
        pi=pi,
        trans={
            "a": SubTOM([[zero, _op(eye)], [zero, zero]]),
            "b": SubTOM([[zero, zero], [_op(root_half * rotate), zero]]),
            "c": SubTOM([[zero, zero], [_op(root_half * eye), zero]]),
        },
    )


def _lambda_ex2_c() -> ClassicalMealyHMM:
    return ClassicalMealyHMM(
        states=("s1", "s2", "s3", "s4"),
        alphabet=("a", "b"),
        pi=[1.0, 0.0, 0.0, 0.0],
        trans={
            "a": [
                [0.0, 1.0, 0.0, 0.0],
                [0.5, 0.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, 0.0],
                [0.5, 0.0, 0.0, 0.0],
            ],
            "b": [
                [0.0, 0.0, 0.0, 0.5],
                [0.0, 0.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, 0.5],
                [0.0, 0.0, 1.0, 0.0],
            ],
        },
    )


def _lambda_ex2_q() -> MealyQHMM:
    hada = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=np.complex128) / np.sqrt(2.0)
    ket0 = np.diag([1.0, 0.0]).astype(np.complex128)
    ket1 = np.diag([0.0, 1.0]).astype(np.complex128)
    plus = np.full((2, 2), 0.5, dtype=np.complex128)
    minus = np.array([[0.5, -0.5], [-0.5, 0.5]], dtype=np.complex128)
    zero = _zero_op(2)
    pi = VectorState(
        [DensityOperator.zero(2), DensityOperator.zero(2), DensityOperator([[1, 0], [0, 0]])]
    )
    return MealyQHMM(
        states=("s1", "s2", "s3"),
        alphabet=("a", "b"),
        dim=2,
        pi=pi,
        trans={
            "a": SubTOM(
                [
                    [zero, _op(plus), _op(hada @ ket0)],
                    [_op(hada @ ket0), zero, zero],
                    [zero, zero, zero],
                ]
            ),
            "b": SubTOM(
                [
                    [zero, zero, zero],
                    [zero, zero, _op(hada @ ket1)],
                    [_op(hada @ ket1), _op(minus), zero],
                ]
            ),
        },
    )


_BUILTIN_FACTORIES = {
    "lambda1c": _lambda1c,
    "lambda2c": _lambda2c,
    "lambda3c": _lambda3c,
    "lambda1q": _lambda1q,
    "lambda_ex2_c": _lambda_ex2_c,
    "lambda_ex2_q": _lambda_ex2_q,
}


def builtin(name: str) -> ClassicalMealyHMM | MealyQHMM:
    """One of the bundled example models by name."""
    try:
        factory = _BUILTIN_FACTORIES[name]
    except KeyError:
        raise InputError(
            f"unknown bundled model {name!r}; choose from {', '.join(BUILTIN_NAMES)}"
        ) from None
    return factory()


def example_measurement() -> Measurement:
    """Two-outcome computational-basis readout used by the bundled models."""
    return Measurement({"b": np.diag([0.0, 1.0]), "c": np.diag([1.0, 0.0])})


def data_path(filename: str):
    """Path-like handle to a bundled data file."""
    return resources.files("qhmm") / "data" / filename
