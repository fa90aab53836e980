import math

import numpy as np

from ..core.tensor import Tape, add_n, neg, pick
from ..exceptions import ConfigError, SupervisionError, TransitionError
from ..utils.logger import logger
from .encoder_attention import EncoderAttention, translation_parameter_specs
from .transition import ActionKind, RnngTransition, rnng_parameter_specs


def parameter_specs(config):
    """Every parameter slot of a model variant as (name, shape, init kind)"""
    specs = translation_parameter_specs(config)
    if config.has_rnng:
        specs = specs + rnng_parameter_specs(config)
    return specs


class NmtRnng:
    """
    Joint translate-and-parse model

    Owns the parameter store and delegates to the translation half and, for
    the nmt+rnng variant, to the parser half. The parser half is absent for
    the plain translator.
    """

    def __init__(self, config, store):
        """
        Bind a configuration to its parameters

        Args:
            config (ModelConfig): Model shape and variant
            store (ParameterStore): Parameters, one slot per parameter_specs entry

        Raises:
            ConfigError: If the store slots do not match the configuration
        """
        self.config = config
        self.store = store
        expected = {name: shape for name, shape, _ in parameter_specs(config)}
        if set(store.names()) != set(expected):
            missing = sorted(set(expected) - set(store.names()))
            extra = sorted(set(store.names()) - set(expected))
            raise ConfigError(f"Parameter store does not match model config: missing {missing}, unexpected {extra}")
        for name, shape in expected.items():
            if store.value(name).shape != tuple(shape):
                raise ConfigError(f"Slot '{name}' has shape {store.value(name).shape}, expected {tuple(shape)}")

        self.encoder_attention = EncoderAttention(self)
        self.transition = RnngTransition(self) if config.has_rnng else None

    def tape(self, record=True):
        return Tape(self.store, record=record)

    def rnng_parameter_names(self):
        if not self.config.has_rnng:
            return []
        return [name for name, _, _ in rnng_parameter_specs(self.config)]

    def _rollout(self, tape, source, target, actions, sentence=None):
        """
        Teacher-forced joint rollout

        Returns:
            tuple: (word log-prob scalars, action log-prob scalars, final JointState)
        """
        shifts = sum(1 for action in actions if action.kind == ActionKind.SHIFT)
        if shifts != len(target):
            raise SupervisionError(f"{shifts} SHIFT actions for {len(target)} target words", sentence=sentence)

        encoding = self.encoder_attention.encode(tape, source)
        state = self.transition.initial_state(tape, encoding, target_length=len(target))
        word_terms, action_terms = [], []
        for step, action in enumerate(actions):
            if action.kind not in state.legal:
                raise SupervisionError(f"illegal {action} at action {step}", sentence=sentence)
            if action.index >= self.config.num_actions:
                raise SupervisionError(f"{action} outside the action vocabulary", sentence=sentence)
            action_terms.append(pick(self.transition.action_distribution(tape, state), action.index))
            try:
                if action.kind == ActionKind.SHIFT:
                    word = target[state.parser.shifted]
                    state, log_probs = self.transition.apply_shift(tape, state, word)
                    word_terms.append(pick(log_probs, word))
                else:
                    state = self.transition.apply_reduce(tape, state, action.kind, action.label)
            except TransitionError as e:
                raise SupervisionError(f"action {step}: {e}", sentence=sentence) from e
        if not state.terminal:
            raise SupervisionError(f"action sequence ends in a non-terminal state "
                                   f"(stack depth {state.parser.depth})", sentence=sentence)
        return word_terms, action_terms, state

    def translation_nll(self, tape, source, target):
        """Teacher-forced word negative log-likelihood of the translation path"""
        terms = [pick(log_probs, word) for word, log_probs in self.word_steps(tape, source, target)]
        if not terms:
            raise SupervisionError("empty target sentence")
        return neg(add_n(terms))

    def joint_nll(self, tape, source, target, actions, include_words=True, include_actions=True,
                  sentence=None):
        """
        Negative joint log-likelihood -log p(y, a | x), teacher-forced

        Args:
            tape (Tape): Tape to record on
            source (list): Source ids, EOS-terminated
            target (list): Target ids, EOS-terminated
            actions (list): Gold Action sequence with len(target) SHIFTs
            include_words (bool): Sum the word terms
            include_actions (bool): Sum the action terms
            sentence (int, optional): Index reported in supervision errors

        Returns:
            Tensor: Scalar loss

        Raises:
            SupervisionError: If the actions do not fit the target
        """
        if not self.config.has_rnng:
            if include_actions and actions:
                logger.debug("Plain translator ignores action supervision")
            return self.translation_nll(tape, source, target)
        word_terms, action_terms, _ = self._rollout(tape, source, target, actions, sentence)
        terms = (word_terms if include_words else []) + (action_terms if include_actions else [])
        if not terms:
            raise ConfigError("joint_nll needs at least one of words or actions")
        return neg(add_n(terms))

    def loss_breakdown(self, pair):
        """
        Word and action negative log-likelihoods of one pair, without a graph

        Returns:
            dict: word_nll, action_nll, words, actions
        """
        tape = self.tape(record=False)
        if self.config.has_rnng:
            word_terms, action_terms, _ = self._rollout(tape, pair.source, pair.target, pair.actions, pair.index)
            action_nll = -math.fsum(float(term.value) for term in action_terms)
            actions = len(action_terms)
        else:
            word_terms = [pick(log_probs, word) for word, log_probs in self.word_steps(tape, pair.source, pair.target)]
            action_nll, actions = 0.0, 0
        return {
            'word_nll': -math.fsum(float(term.value) for term in word_terms),
            'action_nll': action_nll,
            'words': len(word_terms),
            'actions': actions,
        }

    def word_steps(self, tape, source, target):
        encoding = self.encoder_attention.encode(tape, source)
        state = self.encoder_attention.initial_state(tape)
        prev = self.config.eos_id
        for word in target:
            state, log_probs = self.encoder_attention.decoder_step(tape, state, prev, encoding)
            yield word, log_probs
            prev = word

    def zero_rnng_parameters(self):
        """Zero every parser-only slot in place"""
        for name in self.rnng_parameter_names():
            self.store.value(name)[...] = np.zeros_like(self.store.value(name))
