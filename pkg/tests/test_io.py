import json

import numpy as np
import pytest

import qhmm
from qhmm import model_io
from qhmm.errors import InputError, ModelFormatError, ValidationError


def models_equal(a, b):
    if type(a) is not type(b):
        return False
    if (a.states, a.alphabet, a.substochastic) != (b.states, b.alphabet, b.substochastic):
        return False
    if isinstance(a, qhmm.ClassicalMealyHMM):
        if not np.array_equal(a.pi, b.pi):
            return False
        return all(np.array_equal(a.trans[s], b.trans[s]) for s in a.alphabet)
    if a.dim != b.dim:
        return False
    for pa, pb in zip(a.pi.parts, b.pi.parts):
        if not np.array_equal(pa.matrix, pb.matrix):
            return False
    for sym in a.alphabet:
        ta, tb = a.trans[sym], b.trans[sym]
        for i in range(ta.out_size):
            for j in range(ta.in_size):
                ka, kb = ta.entry(i, j).kraus, tb.entry(i, j).kraus
                if len(ka) != len(kb):
                    return False
                if not all(np.array_equal(x, y) for x, y in zip(ka, kb)):
                    return False
    return True


def test_every_builtin_round_trips(tmp_path):
    for name in qhmm.BUILTIN_NAMES:
        model = qhmm.builtin(name)
        path = tmp_path / f"{name}.json"
        qhmm.save(model, path)
        again = qhmm.load(path)
        assert models_equal(model, again), name


def test_shipped_fixtures_match_builtins():
    suffix = {True: "hmm", False: "qhmm"}
    for name in qhmm.BUILTIN_NAMES:
        model = qhmm.builtin(name)
        classical = isinstance(model, qhmm.ClassicalMealyHMM)
        path = model_io.data_path(f"{name}.{suffix[classical]}.json")
        shipped = model_io.loads_model(path.read_text(encoding="utf-8"))
        assert models_equal(model, shipped), name


def test_shipped_measurement_matches_example():
    mu = qhmm.load_measurement(model_io.data_path("readout_example1.measurement.json"))
    want = qhmm.example_measurement()
    assert mu.outcomes == want.outcomes
    for label in mu.outcomes:
        assert np.array_equal(mu.effects[label], want.effects[label])


def test_unknown_builtin_name():
    with pytest.raises(InputError):
        qhmm.builtin("lambdaXq")


def test_measurement_round_trip(tmp_path):
    mu = qhmm.example_measurement()
    path = tmp_path / "mu.json"
    qhmm.save_measurement(mu, path)
    again = qhmm.load_measurement(path)
    assert again.outcomes == mu.outcomes
    for label in mu.outcomes:
        assert np.array_equal(again.effects[label], mu.effects[label])


def test_random_quantum_model_round_trips_exactly(tmp_path):
    model = qhmm.random_qhmm(3, 2, 2, 7)
    path = tmp_path / "random.json"
    qhmm.save(model, path)
    again = qhmm.load(path)
    assert models_equal(model, again)


def test_load_rejects_invalid_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(ModelFormatError) as exc:
        qhmm.load(path)
    assert "invalid JSON" in str(exc.value)


def test_load_rejects_unknown_kind(tmp_path):
    path = tmp_path / "kind.json"
    path.write_text(json.dumps({"kind": "markov"}), encoding="utf-8")
    with pytest.raises(ModelFormatError) as exc:
        qhmm.load(path)
    assert "kind" in str(exc.value)


def test_load_reports_field_context(tmp_path):
    doc = {
        "kind": "hmm",
        "states": ["s1"],
        "alphabet": ["a"],
        "pi": [1.0],
        "transitions": {"a": [[True]]},
    }
    path = tmp_path / "ctx.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    with pytest.raises(ModelFormatError) as exc:
        qhmm.load(path)
    assert "transitions.a[0][0]" in str(exc.value)


def test_load_rejects_ragged_matrix(tmp_path):
    doc = {
        "kind": "hmm",
        "states": ["s1", "s2"],
        "alphabet": ["a"],
        "pi": [1.0, 0.0],
        "transitions": {"a": [[1.0, 0.0], [0.0]]},
    }
    path = tmp_path / "ragged.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    with pytest.raises(ModelFormatError) as exc:
        qhmm.load(path)
    assert "transitions.a[1]" in str(exc.value)


def test_load_rejects_lossy_column_naming_it(tmp_path):
    doc = {
        "kind": "hmm",
        "states": ["s1", "s2"],
        "alphabet": ["a", "b"],
        "pi": [1.0, 0.0],
        "transitions": {
            "a": [[0.0, 1.0], [0.4, 0.0]],
            "b": [[0.0, 0.0], [0.5, 0.0]],
        },
    }
    path = tmp_path / "lossy.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    with pytest.raises(ValidationError) as exc:
        qhmm.load(path)
    message = str(exc.value)
    assert "column 0" in message and "s1" in message
    assert "0.9" in message
    assert "a=0.4" in message and "b=0.5" in message


def test_load_without_validation_keeps_lossy_model(tmp_path):
    doc = {
        "kind": "hmm",
        "states": ["s1"],
        "alphabet": ["a"],
        "pi": [1.0],
        "transitions": {"a": [[0.9]]},
    }
    path = tmp_path / "lossy2.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    model = qhmm.load(path, validate=False)
    assert model.trans["a"][0, 0] == 0.9
    assert not qhmm.validate_hmm(model).ok


def test_load_rejects_bad_quantum_column_law(tmp_path):
    half = [[[0.70710678118654757, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.70710678118654757, 0.0]]]
    doc = {
        "kind": "qhmm",
        "states": ["s1"],
        "alphabet": ["a"],
        "dim": 2,
        "pi": [[[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]],
        "transitions": {"a": [[[half]]]},
    }
    path = tmp_path / "lossyq.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    with pytest.raises(ValidationError) as exc:
        qhmm.load(path)
    assert "column 0" in str(exc.value)


def test_load_rejects_malformed_complex_entry(tmp_path):
    doc = {
        "kind": "qhmm",
        "states": ["s1"],
        "alphabet": ["a"],
        "dim": 1,
        "pi": [[[[1.0]]]],
        "transitions": {"a": [[[[[[1.0, 0.0]]]]]]},
    }
    path = tmp_path / "badpair.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    with pytest.raises(ModelFormatError) as exc:
        qhmm.load(path)
    assert "pi[0]" in str(exc.value)


def test_dim_must_match_kind(tmp_path):
    doc = {
        "kind": "hmm",
        "states": ["s1"],
        "alphabet": ["a"],
        "dim": 2,
        "pi": [1.0],
        "transitions": {"a": [[1.0]]},
    }
    path = tmp_path / "dim.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    with pytest.raises(ModelFormatError) as exc:
        qhmm.load(path)
    assert "dim" in str(exc.value)


def test_substochastic_flag_round_trips(tmp_path, lambda2c):
    path = tmp_path / "sub.json"
    qhmm.save(lambda2c, path)
    doc = json.loads(path.read_text(encoding="utf-8"))
    assert doc["substochastic"] is True
    assert qhmm.load(path).substochastic
