"""Bidirectional encoder, global attention and the attentional decoder step."""
from dataclasses import dataclass

import numpy as np

from ..core.lstm import LstmState, lstm_step
from ..core.tensor import (concat, log_softmax, lookup, matvec, softmax, stack_rows, tanh,
                           tmatvec)
from ..exceptions import DataError, DimensionError, VocabularyError

SOURCE_EMBEDDING = "source_embedding"
TARGET_EMBEDDING = "target_embedding"
ENCODER_FORWARD_W = "encoder_forward.W"
ENCODER_FORWARD_B = "encoder_forward.b"
ENCODER_BACKWARD_W = "encoder_backward.W"
ENCODER_BACKWARD_B = "encoder_backward.b"
DECODER_W = "decoder.W"
DECODER_B = "decoder.b"
ATTENTION_W = "attention.W_d"
COMBINE_W = "decoder.W_c"
OUTPUT_W = "output.W_y"


def translation_parameter_specs(config):
    """(name, shape, init kind) for every slot the translator reads"""
    d, w = config.hidden_dim, config.word_dim
    return [
        (SOURCE_EMBEDDING, (config.source_vocab_size, w), "weight"),
        (TARGET_EMBEDDING, (config.target_vocab_size, w), "weight"),
        (ENCODER_FORWARD_W, (4 * d, w + d), "weight"),
        (ENCODER_FORWARD_B, (4 * d,), "lstm_bias"),
        (ENCODER_BACKWARD_W, (4 * d, w + d), "weight"),
        (ENCODER_BACKWARD_B, (4 * d,), "lstm_bias"),
        (DECODER_W, (4 * d, w + d + d), "weight"),
        (DECODER_B, (4 * d,), "lstm_bias"),
        (ATTENTION_W, (2 * d, d), "weight"),
        (COMBINE_W, (d, 3 * d), "weight"),
        (OUTPUT_W, (config.target_vocab_size, d), "output"),
    ]


@dataclass(frozen=True)
class SourceEncoding:
    """h_i = [forward_i ; backward_i] for every source position"""
    states: tuple
    matrix: object
    forward: tuple
    backward: tuple

    @property
    def length(self):
        return len(self.states)


@dataclass(frozen=True)
class DecoderState:
    lstm: LstmState
    s_tilde: object
    context: object = None
    attention: object = None
    steps: int = 0

    @property
    def hidden(self):
        return self.lstm.hidden


class EncoderAttention:
    def __init__(self, model):
        """
        Initialize the translation half of the model

        Args:
            model: NmtRnng instance
        """
        self.model = model

    def _check_ids(self, ids, vocab_size, side):
        for position, token in enumerate(ids):
            if not 0 <= token < vocab_size:
                raise VocabularyError(f"{side} id {token} at position {position} outside vocabulary of size {vocab_size}")

    def encode(self, tape, source_ids):
        """
        Run the forward and backward encoders over the source

        Args:
            tape (Tape): Tape to record on
            source_ids (list): Source ids, normally EOS-terminated

        Returns:
            SourceEncoding: One 2d-dimensional state per source position

        Raises:
            DataError: If the source is empty
            VocabularyError: If an id is out of range
        """
        config = self.model.config
        if len(source_ids) == 0:
            raise DataError("Cannot encode an empty source sentence")
        self._check_ids(source_ids, config.source_vocab_size, "source")

        embedding = tape.param(SOURCE_EMBEDDING)
        inputs = [lookup(embedding, token) for token in source_ids]

        fw_w, fw_b = tape.param(ENCODER_FORWARD_W), tape.param(ENCODER_FORWARD_B)
        state = LstmState.zeros(config.hidden_dim, tape.dtype)
        forward = []
        for x in inputs:
            state = lstm_step(state, x, fw_w, fw_b)
            forward.append(state.hidden)

        bw_w, bw_b = tape.param(ENCODER_BACKWARD_W), tape.param(ENCODER_BACKWARD_B)
        state = LstmState.zeros(config.hidden_dim, tape.dtype)
        backward = [None] * len(inputs)
        for i in range(len(inputs) - 1, -1, -1):
            state = lstm_step(state, inputs[i], bw_w, bw_b)
            backward[i] = state.hidden

        states = tuple(concat((f, b)) for f, b in zip(forward, backward))
        return SourceEncoding(states, stack_rows(states), tuple(forward), tuple(backward))

    def attend(self, tape, s, encoding):
        """
        Global attention with the bilinear score h_i^T W_d s

        Returns:
            tuple: (alpha Tensor over source positions, context Tensor)
        """
        w_d = tape.param(ATTENTION_W)
        if w_d.shape != (encoding.matrix.shape[1], s.shape[0]):
            raise DimensionError('attend', w_d.shape, (encoding.matrix.shape[1], s.shape[0]))
        scores = matvec(encoding.matrix, matvec(w_d, s))
        alpha = softmax(scores)
        context = tmatvec(encoding.matrix, alpha)
        return alpha, context

    def initial_state(self, tape):
        """s_0 and s~_0 are zero vectors"""
        d = self.model.config.hidden_dim
        return DecoderState(LstmState.zeros(d, tape.dtype), tape.zeros(d))

    def decoder_step(self, tape, prev, word, encoding):
        """
        Advance the decoder by one target position

        Args:
            tape (Tape): Tape to record on
            prev (DecoderState): State after the previous step
            word (int): Previous target word y_{j-1} (EOS before the first word)
            encoding (SourceEncoding): Encoded source

        Returns:
            tuple: (DecoderState, log-probability Tensor over the target vocabulary)
        """
        config = self.model.config
        if not 0 <= word < config.target_vocab_size:
            raise VocabularyError(f"target id {word} outside vocabulary of size {config.target_vocab_size}")
        y = lookup(tape.param(TARGET_EMBEDDING), word)
        lstm = lstm_step(prev.lstm, concat((y, prev.s_tilde)), tape.param(DECODER_W), tape.param(DECODER_B))
        alpha, context = self.attend(tape, lstm.hidden, encoding)
        s_tilde = tanh(matvec(tape.param(COMBINE_W), concat((lstm.hidden, context))))
        log_probs = log_softmax(matvec(tape.param(OUTPUT_W), s_tilde))
        state = DecoderState(lstm, s_tilde, context, np.array(alpha.value), prev.steps + 1)
        return state, log_probs
