import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import qhmm
from qhmm import (
    KrausOperation,
    SubTOM,
    SubVectorState,
    TOM,
    VectorState,
    apply_tom,
    tom_product,
    validate_sub_tom,
    validate_tom,
)
from qhmm.errors import DomainError, ShapeError, ValidationError
from qhmm.models import random_sub_tom, random_tom, random_vector_state
from qhmm.quantum import DensityOperator


def column_effect(grid, j):
    acc = None
    for row in grid:
        e = sum(k.conj().T @ k for k in row[j].kraus)
        acc = e if acc is None else acc + e
    return acc


# ---------------------------------------------------------------------------
# vector states

def test_vector_state_requires_unit_total():
    half = DensityOperator([[0.5]])
    v = VectorState([half, half])
    assert v.trace == pytest.approx(1.0)
    with pytest.raises(DomainError):
        VectorState([half])


def test_sub_vector_state_allows_leaked_mass():
    half = DensityOperator([[0.5]])
    sub = SubVectorState([half])
    assert sub.trace == pytest.approx(0.5)
    with pytest.raises(DomainError):
        SubVectorState([half, half, half])


def test_vector_state_shape_checks():
    with pytest.raises(ShapeError):
        SubVectorState([])
    with pytest.raises(ShapeError):
        SubVectorState([DensityOperator([[0.5]]), DensityOperator(np.eye(2) * 0.25)])
    with pytest.raises(ShapeError):
        SubVectorState([np.eye(2)])


def test_total_sums_components():
    rng = np.random.default_rng(31)
    v = random_vector_state(3, 2, rng)
    total = v.total()
    assert np.allclose(total.matrix, sum(p.matrix for p in v.parts))
    assert total.trace == pytest.approx(1.0)


# ---------------------------------------------------------------------------
# grid validation

def test_validate_tom_accepts_channel_columns():
    eye = KrausOperation.identity(2)
    zero = KrausOperation.zero(2)
    t = validate_tom([[zero, eye], [eye, zero]])
    assert isinstance(t, TOM)
    assert (t.out_size, t.in_size, t.dim) == (2, 2, 2)


def test_validate_tom_rejects_lossy_column_with_report():
    half = qhmm.op_scale(0.5, KrausOperation.identity(2))
    zero = KrausOperation.zero(2)
    with pytest.raises(ValidationError) as exc:
        validate_tom([[zero, half], [half, zero]])
    report = exc.value.report
    assert not report.ok
    assert "column 0" in report.problems[0] or "column 1" in report.problems[0]
    assert "spectrum" in report.problems[0]


def test_validate_sub_tom_accepts_lossy_but_rejects_gainy():
    half = qhmm.op_scale(0.5, KrausOperation.identity(2))
    sub = validate_sub_tom([[half]])
    assert isinstance(sub, SubTOM) and not isinstance(sub, TOM)
    with pytest.raises(ValidationError) as exc:
        validate_sub_tom([[half, half], [KrausOperation.identity(2), half]])
    assert "column 0" in str(exc.value)


def test_grid_shape_errors():
    eye = KrausOperation.identity(2)
    with pytest.raises(ShapeError):
        SubTOM([[eye], [eye, eye]])
    with pytest.raises(ShapeError):
        SubTOM([[eye, KrausOperation.identity(3)]])
    with pytest.raises(ShapeError):
        SubTOM([[np.eye(2)]])
    with pytest.raises(ShapeError):
        SubTOM([])


def test_random_grids_validate_across_seeds():
    for seed in range(10):
        t = random_tom(2, 2, 2, seed)
        for j in range(2):
            assert np.allclose(column_effect(t.grid, j), np.eye(2), atol=1e-9)
        s = random_sub_tom(3, 2, 2, seed)
        for j in range(2):
            top = np.linalg.eigvalsh(column_effect(s.grid, j))[-1]
            assert top <= 1.0 + 1e-9


# ---------------------------------------------------------------------------
# action on vector states

def test_apply_tom_matches_entrywise_definition():
    rng = np.random.default_rng(32)
    t = random_tom(3, 3, 2, rng)
    alpha = random_vector_state(3, 2, rng)
    out = apply_tom(t, alpha)
    for i in range(3):
        expected = np.zeros((2, 2), dtype=complex)
        for j in range(3):
            for k in t.entry(i, j).kraus:
                expected += k @ alpha.parts[j].matrix @ k.conj().T
        assert np.allclose(out.parts[i].matrix, expected, atol=1e-12)


def test_tom_preserves_vector_state_type_and_trace():
    rng = np.random.default_rng(33)
    t = random_tom(2, 2, 3, rng)
    alpha = random_vector_state(2, 3, rng)
    out = apply_tom(t, alpha)
    assert isinstance(out, VectorState)
    assert out.trace == pytest.approx(1.0, abs=1e-9)


def test_sub_tom_yields_sub_vector_state():
    rng = np.random.default_rng(34)
    t = random_sub_tom(2, 2, 2, rng)
    alpha = random_vector_state(2, 2, rng)
    out = apply_tom(t, alpha)
    assert isinstance(out, SubVectorState) and not isinstance(out, VectorState)
    assert out.trace <= alpha.trace + 1e-9


def test_apply_tom_shape_checks():
    rng = np.random.default_rng(35)
    t = random_tom(2, 2, 2, rng)
    with pytest.raises(ShapeError):
        apply_tom(t, random_vector_state(3, 2, rng))
    with pytest.raises(ShapeError):
        apply_tom(t, random_vector_state(2, 3, rng))


def test_rectangular_grid_changes_size():
    rng = np.random.default_rng(36)
    t = random_tom(4, 2, 2, rng)
    alpha = random_vector_state(2, 2, rng)
    out = apply_tom(t, alpha)
    assert out.size == 4
    assert out.trace == pytest.approx(1.0, abs=1e-9)


# ---------------------------------------------------------------------------
# grid algebra

def test_tom_product_of_toms_is_tom():
    rng = np.random.default_rng(37)
    a = random_tom(2, 2, 2, rng)
    b = random_tom(2, 2, 2, rng)
    prod = tom_product(b, a)
    assert isinstance(prod, TOM)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 3), st.integers(1, 3), st.integers(1, 2))
def test_product_of_sub_toms_is_sub_tom(seed, rows, inner, dim):
    rng = np.random.default_rng(seed)
    a = random_sub_tom(inner, rows, dim, rng)
    b = random_sub_tom(rows, inner, dim, rng)
    prod = tom_product(b, a)
    assert isinstance(prod, SubTOM)
    for j in range(prod.in_size):
        top = np.linalg.eigvalsh(column_effect(prod.grid, j))[-1]
        assert top <= 1.0 + 1e-9


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 3), st.integers(1, 2))
def test_tom_action_preserves_vector_states(seed, size, dim):
    rng = np.random.default_rng(seed)
    t = random_tom(size, size, dim, rng)
    alpha = random_vector_state(size, dim, rng)
    out = apply_tom(t, alpha)
    assert isinstance(out, VectorState)
    for part in out.parts:
        assert np.linalg.eigvalsh(part.matrix)[0] >= -1e-9


def test_product_action_is_associative():
    rng = np.random.default_rng(38)
    for _ in range(10):
        a = random_sub_tom(2, 2, 2, rng)
        b = random_sub_tom(2, 2, 2, rng)
        alpha = random_vector_state(2, 2, rng)
        via_product = apply_tom(tom_product(b, a), alpha)
        via_steps = apply_tom(b, apply_tom(a, alpha))
        for x, y in zip(via_product.parts, via_steps.parts):
            assert np.allclose(x.matrix, y.matrix, atol=1e-10)


def test_tom_product_kraus_counts_multiply():
    eye = KrausOperation.identity(2)
    zero = KrausOperation.zero(2)
    swap = validate_tom([[zero, eye], [eye, zero]])
    prod = tom_product(swap, swap)
    # every entry aggregates over the inner index: 2 cells x (1 x 1) matrices
    assert all(len(prod.entry(i, j).kraus) == 2 for i in range(2) for j in range(2))


def test_tom_product_shape_checks():
    rng = np.random.default_rng(39)
    a = random_tom(2, 2, 2, rng)
    b = random_tom(3, 3, 2, rng)
    with pytest.raises(ShapeError):
        tom_product(b, a)
    c = random_tom(2, 2, 3, rng)
    with pytest.raises(ShapeError):
        tom_product(c, a)
