import math

import numpy as np
import pytest

from nmtrnng.core import LstmState, Tensor, grad_check, lstm_step
from nmtrnng.core.tensor import lookup
from nmtrnng.exceptions import DataError, VocabularyError
from nmtrnng.model.encoder_attention import (ATTENTION_W, ENCODER_BACKWARD_B, ENCODER_BACKWARD_W, ENCODER_FORWARD_B,
                                             ENCODER_FORWARD_W, OUTPUT_W, SOURCE_EMBEDDING, SourceEncoding,
                                             translation_parameter_specs)

from conftest import random_model, tiny_config


def test_encoder_gives_one_state_per_source_word(model, config):
    tape = model.tape(record=False)
    encoding = model.encoder_attention.encode(tape, [3, 4, 1])
    assert encoding.length == 3
    assert encoding.matrix.shape == (3, 2 * config.hidden_dim)
    for state, forward, backward in zip(encoding.states, encoding.forward, encoding.backward):
        np.testing.assert_array_equal(state.value[:config.hidden_dim], forward.value)
        np.testing.assert_array_equal(state.value[config.hidden_dim:], backward.value)


def test_backward_encoder_reads_the_reversed_source(model):
    model.store.value(ENCODER_BACKWARD_W)[...] = model.store.value(ENCODER_FORWARD_W)
    model.store.value(ENCODER_BACKWARD_B)[...] = model.store.value(ENCODER_FORWARD_B)
    tape = model.tape(record=False)
    source = [3, 5, 2, 1]
    encoding = model.encoder_attention.encode(tape, source)
    reversed_encoding = model.encoder_attention.encode(tape, source[::-1])
    n = len(source)
    for i in range(n):
        np.testing.assert_array_equal(encoding.backward[i].value, reversed_encoding.forward[n - 1 - i].value)


def test_forward_encoder_is_the_unrolled_lstm(model, config):
    tape = model.tape(record=False)
    encoding = model.encoder_attention.encode(tape, [4, 2, 1])
    embedding = tape.param(SOURCE_EMBEDDING)
    weight, bias = tape.param(ENCODER_FORWARD_W), tape.param(ENCODER_FORWARD_B)
    state = LstmState.zeros(config.hidden_dim)
    for word in (4, 2):
        state = lstm_step(state, lookup(embedding, word), weight, bias)
    np.testing.assert_allclose(encoding.forward[1].value, state.hidden.value, rtol=1e-14)


def test_single_word_source_gets_all_attention(model):
    tape = model.tape(record=False)
    ea = model.encoder_attention
    encoding = ea.encode(tape, [1])
    state, _ = ea.decoder_step(tape, ea.initial_state(tape), 1, encoding)
    np.testing.assert_allclose(state.attention, [1.0])
    np.testing.assert_allclose(state.context.value, encoding.states[0].value)


def test_zero_attention_weights_attend_uniformly(model):
    model.store.value(ATTENTION_W)[...] = 0.0
    tape = model.tape(record=False)
    ea = model.encoder_attention
    encoding = ea.encode(tape, [2, 3, 4, 1])
    state, _ = ea.decoder_step(tape, ea.initial_state(tape), 1, encoding)
    np.testing.assert_allclose(state.attention, np.full(4, 0.25))


def test_attention_weights_sum_to_one(model):
    tape = model.tape(record=False)
    ea = model.encoder_attention
    encoding = ea.encode(tape, [2, 5, 3, 1])
    state = ea.initial_state(tape)
    for word in (1, 4, 2):
        state, log_probs = ea.decoder_step(tape, state, word, encoding)
        assert math.isclose(state.attention.sum(), 1.0, rel_tol=1e-12)
        assert math.isclose(np.exp(log_probs.value).sum(), 1.0, rel_tol=1e-12)
    assert state.steps == 3


def test_attention_over_random_decoder_steps(model, config):
    rng = np.random.default_rng(9)
    ea = model.encoder_attention
    steps = 0
    while steps < 1000:
        tape = model.tape(record=False)
        source = [int(w) for w in rng.integers(0, config.source_vocab_size, size=int(rng.integers(1, 8)))]
        encoding = ea.encode(tape, source)
        rows = encoding.matrix.value
        state = ea.initial_state(tape)
        for word in rng.integers(0, config.target_vocab_size, size=10):
            state, _ = ea.decoder_step(tape, state, int(word), encoding)
            alpha = state.attention
            assert math.isclose(alpha.sum(), 1.0, rel_tol=1e-12)
            assert np.all(alpha >= 0.0)
            context = state.context.value
            np.testing.assert_allclose(context, alpha @ rows, rtol=1e-12, atol=1e-15)
            # a convex combination stays inside the per-coordinate range of the rows
            assert np.all(context >= rows.min(axis=0) - 1e-12)
            assert np.all(context <= rows.max(axis=0) + 1e-12)
            steps += 1


def test_attention_of_three_hand_set_states():
    model = random_model(tiny_config(hidden_dim=1))
    model.store.value(ATTENTION_W)[...] = [[0.5], [-1.0]]
    rows = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    encoding = SourceEncoding(tuple(Tensor(row) for row in rows), Tensor(rows), (), ())
    alpha, context = model.encoder_attention.attend(model.tape(record=False), Tensor(np.array([2.0])), encoding)

    # scores h_i . (W s) = (1, -2, -1)
    e = np.exp(np.array([1.0, -2.0, -1.0], dtype=np.longdouble))
    expected = e / e.sum()
    np.testing.assert_allclose(alpha.value, expected.astype(np.float64), rtol=1e-14)
    np.testing.assert_allclose(context.value, (expected @ rows.astype(np.longdouble)).astype(np.float64),
                               rtol=1e-14)


def test_zero_output_layer_predicts_uniformly(model, config):
    model.store.value(OUTPUT_W)[...] = 0.0
    tape = model.tape(record=False)
    ea = model.encoder_attention
    encoding = ea.encode(tape, [2, 1])
    _, log_probs = ea.decoder_step(tape, ea.initial_state(tape), 1, encoding)
    np.testing.assert_allclose(log_probs.value, np.full(config.target_vocab_size, -math.log(config.target_vocab_size)))


def test_initial_decoder_state_is_zero(model, config):
    state = model.encoder_attention.initial_state(model.tape())
    assert not np.any(state.hidden.value)
    assert not np.any(state.s_tilde.value)
    assert state.s_tilde.shape == (config.hidden_dim,)


def test_empty_source_is_rejected(model):
    with pytest.raises(DataError):
        model.encoder_attention.encode(model.tape(), [])


def test_out_of_range_ids_are_rejected(model, config):
    tape = model.tape()
    with pytest.raises(VocabularyError):
        model.encoder_attention.encode(tape, [config.source_vocab_size])
    encoding = model.encoder_attention.encode(tape, [1])
    with pytest.raises(VocabularyError):
        model.encoder_attention.decoder_step(tape, model.encoder_attention.initial_state(tape),
                                             config.target_vocab_size, encoding)


def test_translation_loss_gradients_match_finite_differences(model, config):
    slots = [name for name, _, _ in translation_parameter_specs(config)]
    report = grad_check(lambda tape: model.translation_nll(tape, [3, 2, 1], [4, 5, 1]),
                        model.store, slots=slots, max_entries=12)
    assert report.passed(1e-4), report
