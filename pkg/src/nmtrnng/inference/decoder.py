"""Translation-only beam search and greedy joint translate-and-parse."""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..config import DecodeConfig
from ..core.tensor import Tape
from ..data.oracle import actions_to_tree
from ..evaluation.metrics import bleu
from ..exceptions import ConfigError, DataError
from ..model.transition import Action, ActionKind
from ..utils.logger import logger


@dataclass(frozen=True)
class Hypothesis:
    tokens: tuple
    score: float
    state: object = None

    def finished(self, eos_id):
        return bool(self.tokens) and self.tokens[-1] == eos_id

    def normalized_score(self):
        return self.score / max(len(self.tokens), 1)


@dataclass(frozen=True)
class BeamResult:
    tokens: tuple
    score: float
    finished: bool


@dataclass(frozen=True)
class JointResult:
    tokens: tuple
    actions: tuple
    tree: object
    partial: bool
    word_score: float
    action_score: float


class Translator:
    def __init__(self, model, decode_config=None):
        """
        Initialize the decoder

        Args:
            model (NmtRnng): Trained model; only read, never updated
            decode_config (DecodeConfig, optional): Beam width, length bounds and flags
        """
        self.model = model
        self.config = decode_config or DecodeConfig()

    @property
    def eos_id(self):
        return self.model.config.eos_id

    def _tape(self):
        return Tape(self.model.store, record=False)

    def translate_beam(self, source, beam_width=None, max_length=None):
        """
        Length-bounded beam search over the translation path only

        No parser state is built, so parser parameters are never read.

        Args:
            source (list): Source ids, EOS-terminated
            beam_width (int, optional): K, defaults to the decode config
            max_length (int, optional): Bound on target tokens including EOS

        Returns:
            BeamResult: Best finished hypothesis, or the best unfinished one
                with finished=False when none ends within max_length
        """
        k = self.config.beam_width if beam_width is None else beam_width
        if max_length is None:
            max_length = self.config.max_length_for(len(source))
        if k < 1 or max_length < 1:
            raise ConfigError(f"Beam width and max length must be positive, got {k} and {max_length}")
        tape = self._tape()
        ea = self.model.encoder_attention
        encoding = ea.encode(tape, source)
        active = [Hypothesis((), 0.0, ea.initial_state(tape))]
        finished = []

        for _ in range(max_length):
            if not active or len(finished) >= k:
                break
            steps = []
            for hyp in active:
                prev = hyp.tokens[-1] if hyp.tokens else self.eos_id
                steps.append(ea.decoder_step(tape, hyp.state, prev, encoding))
            scores = np.stack([hyp.score + log_probs.value for hyp, (_, log_probs) in zip(active, steps)])
            vocab = scores.shape[1]
            live = k - len(finished)
            # stable: ties go to the earlier hypothesis, then the lower token id
            order = np.argsort(-scores.ravel(), kind='stable')[:live]
            next_active = []
            for flat in order:
                row, word = divmod(int(flat), vocab)
                parent = active[row]
                state, log_probs = steps[row]
                hyp = Hypothesis(parent.tokens + (word,), parent.score + float(log_probs.value[word]), state)
                (finished if hyp.finished(self.eos_id) else next_active).append(hyp)
            active = next_active
            if finished and active and not self.config.length_normalize:
                if max(h.score for h in finished) >= max(h.score for h in active):
                    break

        if finished:
            key = Hypothesis.normalized_score if self.config.length_normalize else (lambda h: h.score)
            best = max(finished, key=key)
            return BeamResult(best.tokens, best.score, True)
        best = max(active, key=lambda h: h.score)
        logger.warning(f"No hypothesis finished within {max_length} tokens; returning the best unfinished one")
        return BeamResult(best.tokens, best.score, False)

    def translate_greedy(self, source, max_length=None):
        """Argmax word at every step, lowest id on ties"""
        max_length = max_length or self.config.max_length_for(len(source))
        tape = self._tape()
        ea = self.model.encoder_attention
        encoding = ea.encode(tape, source)
        state = ea.initial_state(tape)
        tokens, score, prev = [], 0.0, self.eos_id
        while len(tokens) < max_length:
            state, log_probs = ea.decoder_step(tape, state, prev, encoding)
            prev = int(np.argmax(log_probs.value))
            tokens.append(prev)
            score += float(log_probs.value[prev])
            if prev == self.eos_id:
                return BeamResult(tuple(tokens), score, True)
        return BeamResult(tuple(tokens), score, False)

    def translate_and_parse_greedy(self, source, max_actions=None):
        """
        Greedy joint decoding: argmax legal action, and on SHIFT the argmax word

        Args:
            source (list): Source ids, EOS-terminated
            max_actions (int, optional): Action budget; defaults to 2 * max_length - 1

        Returns:
            JointResult: Words, actions and the tree; partial=True with
                tree None when the budget ran out first
        """
        if self.model.transition is None:
            raise ConfigError("Joint decoding needs the nmt+rnng variant")
        budget = max_actions or self.config.max_actions or 2 * self.config.max_length_for(len(source)) - 1
        tape = self._tape()
        transition = self.model.transition
        state = transition.initial_state(tape, self.model.encoder_attention.encode(tape, source))
        word_score = action_score = 0.0

        while not state.terminal and len(state.actions) < budget:
            log_probs = transition.action_distribution(tape, state).value
            index = int(np.argmax(log_probs))
            action_score += float(log_probs[index])
            action = Action.from_index(index)
            if action.kind == ActionKind.SHIFT:
                step = transition.advance_decoder(tape, state)
                word_log_probs = step[1].value
                word = int(np.argmax(word_log_probs))
                word_score += float(word_log_probs[word])
                state, _ = transition.apply_shift(tape, state, word, step)
            else:
                state = transition.apply_reduce(tape, state, action.kind, action.label)

        partial = not state.terminal
        tree = None
        if partial:
            logger.warning(f"Joint decoding stopped after {len(state.actions)} actions without a complete parse")
        else:
            tree = actions_to_tree(state.actions, len(state.words))
        return JointResult(state.words, state.actions, tree, partial, word_score, action_score)

    def parse_translation(self, source, target):
        """
        Greedy parse of a fixed translation

        The decoder is stepped over the given words; only the action choices
        are searched, argmax over the legal actions with the lowest id on ties.

        Args:
            source (list): Source ids, EOS-terminated
            target (list): Target ids ending in EOS, e.g. a beam search output

        Returns:
            JointResult: The target, its actions (exactly len(target) SHIFTs) and tree

        Raises:
            ConfigError: If the model has no parser
            DataError: If the target is empty or does not end in EOS
        """
        if self.model.transition is None:
            raise ConfigError("Parsing a translation needs the nmt+rnng variant")
        target = [int(word) for word in target]
        if not target or target[-1] != self.eos_id:
            raise DataError(f"A parsed translation must end in EOS, got {target}")
        tape = self._tape()
        transition = self.model.transition
        state = transition.initial_state(tape, self.model.encoder_attention.encode(tape, source), len(target))
        word_score = action_score = 0.0

        while not state.terminal:
            log_probs = transition.action_distribution(tape, state).value
            index = int(np.argmax(log_probs))
            action_score += float(log_probs[index])
            action = Action.from_index(index)
            if action.kind == ActionKind.SHIFT:
                word = target[state.parser.shifted]
                state, word_log_probs = transition.apply_shift(tape, state, word)
                word_score += float(word_log_probs.value[word])
            else:
                state = transition.apply_reduce(tape, state, action.kind, action.label)

        tree = actions_to_tree(state.actions, len(target))
        return JointResult(state.words, state.actions, tree, False, word_score, action_score)

    def translate_then_parse(self, source):
        """Beam search translation, then a greedy parse with the words held fixed"""
        beam = self.translate_beam(source)
        if not beam.finished:
            return JointResult(beam.tokens, (), None, True, beam.score, 0.0)
        return self.parse_translation(source, beam.tokens)

    def score_sequence(self, source, target):
        """Teacher-forced sum of word log-probabilities on the translation path"""
        if not target:
            raise DataError("Cannot score an empty target")
        tape = self._tape()
        total = 0.0
        for word, log_probs in self.model.word_steps(tape, source, target):
            total += float(log_probs.value[word])
        return total

    def translate(self, source):
        """Decode one sentence the way the decode config asks"""
        if self.config.joint:
            return self.translate_and_parse_greedy(source)
        if self.config.parse_beam:
            return self.translate_then_parse(source)
        return self.translate_beam(source)

    def translate_all(self, sources, workers=None):
        """Decode sentences on a thread pool; results keep input order"""
        workers = workers or self.config.workers
        if workers <= 1:
            return [self.translate(source) for source in sources]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(self.translate, sources))


def sweep_beam_widths(translator, sources, references, target_vocab, widths=(1, 2, 4, 5, 8, 10)):
    """
    Dev BLEU for each beam width

    Args:
        translator (Translator): Decoder
        sources (list): Source id lists
        references (list): Tokenized references
        target_vocab (Vocabulary): Maps output ids back to tokens
        widths (tuple): Beam widths to try

    Returns:
        dict: width -> corpus BLEU
    """
    results = {}
    for width in widths:
        hypotheses = [target_vocab.decode(list(translator.translate_beam(s, width).tokens)) for s in sources]
        results[width] = bleu(hypotheses, references)
        logger.record("beam_sweep", width=width, bleu=results[width])
    return results
