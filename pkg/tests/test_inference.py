import numpy as np
import pytest

import qhmm
from qhmm import (
    apply_tom,
    classical_forward,
    embed_classical,
    enumerate_distribution,
    forward,
    marginalization_check,
    measure_probabilities,
    measured_probabilities,
    next_symbol_distribution,
    random_qhmm,
    sample,
    sample_many,
    summed_transition,
)
from qhmm.errors import DomainError, InputError, ResourceLimitError


def brute_force_probability(model, seq):
    """Path-sum oracle: trace of the summed path operators.

    Enumerates every hidden path explicitly instead of folding the grids,
    so it shares no code with the forward implementation.
    """
    n = len(model.states)
    if not seq:
        return sum(p.trace for p in model.pi.parts)
    total = 0.0
    paths = [[j] for j in range(n)]
    for _ in seq:
        paths = [p + [i] for p in paths for i in range(n)]
    for p in paths:
        mat = model.pi.parts[p[0]].matrix
        for step, sym in enumerate(seq):
            op = model.trans[sym].entry(p[step + 1], p[step])
            mat = sum(
                (k @ mat @ k.conj().T for k in op.kraus),
                np.zeros((model.dim, model.dim), dtype=complex),
            )
        total += float(np.trace(mat).real)
    return total


# ---------------------------------------------------------------------------
# forward

def test_forward_golden_values(lambda1q, readout):
    aba = forward(lambda1q, "aba")
    assert aba.prob == pytest.approx(0.5, abs=1e-9)
    probs = measure_probabilities(readout, aba.rho)
    assert probs["b"] == pytest.approx(0.5, abs=1e-9)
    assert probs["c"] == pytest.approx(0.0, abs=1e-9)
    aca = forward(lambda1q, "aca")
    probs = measure_probabilities(readout, aca.rho)
    assert probs["b"] == pytest.approx(0.0, abs=1e-9)
    assert probs["c"] == pytest.approx(0.5, abs=1e-9)


def test_forward_empty_sequence_returns_initial(lambda1q):
    result = forward(lambda1q, "")
    assert result.prob == pytest.approx(1.0)
    for got, want in zip(result.alpha.parts, lambda1q.pi.parts):
        assert np.array_equal(got.matrix, want.matrix)


def test_forward_agrees_with_path_sum_oracle(lambda1q, lambda_ex2_q):
    for model in (lambda1q, lambda_ex2_q):
        for seq in ("", "a", "b", "ab", "ba", "aba", "abb"):
            got = forward(model, seq).prob
            want = brute_force_probability(model, seq)
            assert got == pytest.approx(want, abs=1e-10), seq


def test_forward_matches_stepwise_apply(lambda_ex2_q):
    seq = "abab"
    alpha = lambda_ex2_q.pi
    for sym in seq:
        alpha = apply_tom(lambda_ex2_q.trans[sym], alpha)
    result = forward(lambda_ex2_q, seq)
    for got, want in zip(result.alpha.parts, alpha.parts):
        assert np.allclose(got.matrix, want.matrix, atol=1e-12)


def test_forward_rejects_unknown_symbol(lambda1q):
    with pytest.raises(InputError):
        forward(lambda1q, "axa")


def test_forward_rejects_overlong_sequence(lambda1q):
    with pytest.raises(ResourceLimitError):
        forward(lambda1q, "a" * 501)


def test_forward_accepts_max_length_sequence(lambda1q):
    # the cycle a,b,a,b... keeps returning mass; length 500 is allowed
    seq = ("ab" * 250)[:500]
    result = forward(lambda1q, seq)
    assert 0.0 <= result.prob <= 1.0 + 1e-9


def test_classical_forward_golden_values(lambda1c):
    assert classical_forward(lambda1c, "aba") == pytest.approx(0.5, abs=1e-12)
    assert classical_forward(lambda1c, "aca") == pytest.approx(0.5, abs=1e-12)
    assert classical_forward(lambda1c, "abb") == pytest.approx(0.0, abs=1e-12)
    assert classical_forward(lambda1c, "") == pytest.approx(1.0, abs=1e-12)


def test_classical_forward_agrees_with_embedding(lambda3c):
    rng = np.random.default_rng(51)
    q = embed_classical(lambda3c)
    for _ in range(20):
        length = int(rng.integers(0, 7))
        seq = [lambda3c.alphabet[k] for k in rng.integers(0, 3, length)]
        assert classical_forward(lambda3c, seq) == pytest.approx(
            forward(q, seq).prob, abs=1e-12
        )


def test_measured_probabilities_helper(lambda1q, readout):
    probs = measured_probabilities(lambda1q, "aba", readout)
    assert probs == {"b": pytest.approx(0.5, abs=1e-9), "c": pytest.approx(0.0, abs=1e-9)}


# ---------------------------------------------------------------------------
# enumeration and marginalization

def test_enumeration_total_is_one(lambda1q, lambda_ex2_q):
    for model in (lambda1q, lambda_ex2_q):
        for length in (1, 2, 3, 4):
            dist = enumerate_distribution(model, length)
            assert len(dist) == len(model.alphabet) ** length
            total = sum(rho.trace for rho in dist.values())
            assert total == pytest.approx(1.0, abs=1e-9)


def test_enumeration_substochastic_model_leaks_mass(lambda2c):
    q = embed_classical(lambda2c)
    totals = [
        sum(rho.trace for rho in enumerate_distribution(q, length).values())
        for length in (1, 2, 3)
    ]
    assert totals[0] == pytest.approx(1.0, abs=1e-12)
    assert totals[1] == pytest.approx(0.5, abs=1e-12)
    assert totals[2] == pytest.approx(0.5, abs=1e-12)


def test_enumeration_keys_in_lexicographic_order(lambda1q):
    dist = enumerate_distribution(lambda1q, 2)
    keys = ["".join(k) for k in dist]
    assert keys == sorted(keys)
    assert keys[0] == "aa"


def test_enumeration_respects_cap(lambda1q):
    with pytest.raises(ResourceLimitError):
        enumerate_distribution(lambda1q, 5, cap=10)


def test_enumeration_states_match_forward(lambda_ex2_q):
    dist = enumerate_distribution(lambda_ex2_q, 2)
    for seq, rho in dist.items():
        assert np.allclose(rho.matrix, forward(lambda_ex2_q, seq).rho.matrix, atol=1e-12)


def test_marginalization_residual_small(lambda1q, lambda_ex2_q):
    for model in (lambda1q, lambda_ex2_q):
        for seq in ("", "a", "ab", "aba"):
            assert marginalization_check(model, seq) <= 1e-9


def test_marginalization_random_models():
    rng = np.random.default_rng(52)
    for seed in range(10):
        model = random_qhmm(2, 2, 2, seed)
        seq = ["ab"[k] for k in rng.integers(0, 2, int(rng.integers(0, 5)))]
        assert marginalization_check(model, seq) <= 1e-9


def test_marginalization_detects_leaky_model(lambda2c):
    q = embed_classical(lambda2c)
    # after "a" all mass sits in s1, which only keeps half of it
    assert marginalization_check(q, "a") == pytest.approx(0.5, abs=1e-12)


def test_marginalization_is_a_trace_statement(lambda1q):
    # the summed one-step operators need not equal the prefix operator:
    # each source column is sent through a trace-preserving channel, not
    # through the identity.  After "a" the mass ½|0><0| + ½|1><1| = ½ I
    # differs from |0><0| even though the traces agree.
    res = forward(lambda1q, "a")
    summed = np.zeros((2, 2), dtype=np.complex128)
    for sym in lambda1q.alphabet:
        summed += forward(lambda1q, ["a", sym]).rho.matrix
    assert np.allclose(summed, np.eye(2) / 2, atol=1e-12)
    assert np.linalg.norm(summed - res.rho.matrix) > 0.5
    assert np.trace(summed).real == pytest.approx(res.prob, abs=1e-12)
    assert marginalization_check(lambda1q, "a") <= 1e-12


# ---------------------------------------------------------------------------
# next-symbol distribution and sampling

def test_next_symbol_distribution_golden(lambda1q):
    dist = next_symbol_distribution(lambda1q, lambda1q.pi)
    assert dist == {
        "a": pytest.approx(1.0, abs=1e-12),
        "b": pytest.approx(0.0, abs=1e-12),
        "c": pytest.approx(0.0, abs=1e-12),
    }
    after_a = forward(lambda1q, "a").alpha
    dist = next_symbol_distribution(lambda1q, after_a)
    assert dist["a"] == pytest.approx(0.0, abs=1e-12)
    assert dist["b"] == pytest.approx(0.5, abs=1e-12)
    assert dist["c"] == pytest.approx(0.5, abs=1e-12)


def test_next_symbol_distribution_matches_apply_tom():
    for seed in range(5):
        model = random_qhmm(2, 3, 2, seed)
        alpha = qhmm.forward(model, "a").alpha
        dist = next_symbol_distribution(model, alpha)
        total = alpha.trace
        for sym in model.alphabet:
            stepped = apply_tom(model.trans[sym], alpha)
            assert dist[sym] == pytest.approx(stepped.trace / total, abs=1e-12)
        assert sum(dist.values()) == pytest.approx(1.0, abs=1e-9)


def test_next_symbol_distribution_rejects_vanished_state(lambda1q):
    gone = qhmm.SubVectorState(
        [qhmm.DensityOperator.zero(2), qhmm.DensityOperator.zero(2)]
    )
    with pytest.raises(DomainError):
        next_symbol_distribution(lambda1q, gone)


def test_sample_is_seed_deterministic(lambda1q):
    a = sample_many(lambda1q, 4, 123, 5)
    b = sample_many(lambda1q, 4, 123, 5)
    assert a == b
    assert sample(lambda1q, 4, 123) == a[0]
    c = sample_many(lambda1q, 4, 124, 5)
    assert a != c


def test_sample_emits_only_possible_sequences(lambda1q):
    # the machine alternates a with b or c, starting with a
    for seq in sample_many(lambda1q, 5, 7, 50):
        assert seq[0] == "a"
        for k, sym in enumerate(seq):
            assert sym in ("a", "b", "c")
            if k % 2 == 0:
                assert sym == "a"
            else:
                assert sym in ("b", "c")


def test_sample_frequencies_match_distribution(lambda1q):
    draws = sample_many(lambda1q, 3, 99, 4000)
    freq = sum(1 for s in draws if "".join(s) == "aba") / len(draws)
    assert freq == pytest.approx(0.5, abs=0.03)


def test_sample_length_zero(lambda1q):
    assert sample(lambda1q, 0, 1) == ()


def test_sample_survives_leaky_model(lambda2c):
    # a lossy model conditions each draw on survival: the halving column
    # never zeroes out, so sampling keeps working
    q = embed_classical(lambda2c)
    for seq in sample_many(q, 6, 3, 10):
        assert "".join(seq) == "ababab"


def test_sample_rejects_dead_end_model():
    dead_end = embed_classical(
        qhmm.ClassicalMealyHMM(
            states=("s1", "s2"),
            alphabet=("a",),
            pi=[0.0, 1.0],
            trans={"a": [[0.0, 1.0], [0.0, 0.0]]},
            substochastic=True,
        )
    )
    with pytest.raises(DomainError):
        sample(dead_end, 2, 0)


def test_summed_transition_acts_like_one_step(lambda1q):
    # summing the per-symbol grids and stepping once spreads the whole mass
    total = summed_transition(lambda1q)
    out = apply_tom(total, lambda1q.pi)
    dist = enumerate_distribution(lambda1q, 1)
    acc = np.zeros((2, 2), dtype=complex)
    for rho in dist.values():
        acc += rho.matrix
    assert np.allclose(out.total().matrix, acc, atol=1e-12)
