"""RNNG half of the hybrid decoder: actions, parser state and transitions.

The RNNG buffer is the translation decoder. Its state only advances on
SHIFT, so after any prefix of a rollout the number of decoder steps equals
the number of SHIFT actions.
"""
import enum
from dataclasses import dataclass, replace

import numpy as np

from ..core.lstm import StackLstm
from ..core.tensor import affine, concat, log_softmax, lookup, matvec, tanh
from ..exceptions import InternalInvariantError, TransitionError
from .encoder_attention import TARGET_EMBEDDING

STACK_EMBEDDING = "stack_embedding"
STACK_LSTM_W = "stack_lstm.W"
STACK_LSTM_B = "stack_lstm.b"
ACTION_LSTM_W = "action_lstm.W"
ACTION_LSTM_B = "action_lstm.b"
ACTION_EMBEDDING = "action_embedding"
COMPOSITION_W = "composition.W_r"
ACTION_HIDDEN_W = "action_hidden.W"
ACTION_HIDDEN_B = "action_hidden.b"
ACTION_OUTPUT_W = "action_output.W_a"

# Components read by f_action, in concatenation order, with the flag removing each.
ACTION_INPUTS = (("buffer", "without_buffer"), ("stack", "without_stack"), ("action", "without_action"))


class ActionKind(enum.IntEnum):
    SHIFT = 0
    REDUCE_L = 1
    REDUCE_R = 2


_KIND_NAMES = {ActionKind.SHIFT: "SHIFT", ActionKind.REDUCE_L: "REDUCE-L", ActionKind.REDUCE_R: "REDUCE-R"}


@dataclass(frozen=True)
class Action:
    """SHIFT, or a labeled REDUCE-L / REDUCE-R; labels are ids"""
    kind: ActionKind
    label: int = None

    def __post_init__(self):
        object.__setattr__(self, 'kind', ActionKind(self.kind))
        if self.kind == ActionKind.SHIFT and self.label is not None:
            raise TransitionError("SHIFT carries no label")
        if self.kind != ActionKind.SHIFT and (self.label is None or self.label < 0):
            raise TransitionError(f"{_KIND_NAMES[self.kind]} needs a label id, got {self.label}")

    @property
    def index(self):
        """Row of this action in V_a and W_a: SHIFT is 0, then L/R pairs per label"""
        if self.kind == ActionKind.SHIFT:
            return 0
        return 1 + 2 * self.label + (self.kind - ActionKind.REDUCE_L)

    @classmethod
    def from_index(cls, index):
        if index == 0:
            return SHIFT
        label, offset = divmod(index - 1, 2)
        return cls(ActionKind.REDUCE_L + offset, label)

    def __str__(self):
        if self.kind == ActionKind.SHIFT:
            return "SHIFT"
        return f"{_KIND_NAMES[self.kind]}({self.label})"


SHIFT = Action(ActionKind.SHIFT)


def legal_actions(state, target_length=None):
    """
    Action kinds allowed in a parser state

    Works on anything exposing depth, shifted, root_shifted and root_on_top,
    so the symbolic replay in the oracle and the neural ParserState share it.

    Args:
        state: Parser state
        target_length (int, optional): Known sentence length (training). None
            means generation, where SHIFT stays legal until EOS is shifted.

    Returns:
        frozenset: Legal ActionKind values; empty for a terminal state
    """
    kinds = set()
    if target_length is None:
        if not state.root_shifted:
            kinds.add(ActionKind.SHIFT)
    elif state.shifted < target_length:
        kinds.add(ActionKind.SHIFT)
    if state.depth >= 2:
        kinds.add(ActionKind.REDUCE_L)
        # EOS is the ROOT and never becomes a dependent
        if not state.root_on_top:
            kinds.add(ActionKind.REDUCE_R)
    return frozenset(kinds)


def is_terminal(state, target_length=None):
    if target_length is None:
        done = state.root_shifted
    else:
        done = state.shifted == target_length
    return done and state.depth == 1


def legal_mask(kinds, num_actions):
    mask = np.zeros(num_actions, dtype=bool)
    if ActionKind.SHIFT in kinds:
        mask[0] = True
    if ActionKind.REDUCE_L in kinds:
        mask[1::2] = True
    if ActionKind.REDUCE_R in kinds:
        mask[2::2] = True
    return mask


@dataclass(frozen=True)
class StackItem:
    vector: object
    head: int


@dataclass(frozen=True)
class Arc:
    dependent: int
    head: int
    label: int


@dataclass(frozen=True)
class ParserState:
    stack: StackLstm
    history: StackLstm
    items: tuple = ()
    shifted: int = 0
    arcs: tuple = ()
    root_index: int = None

    @property
    def depth(self):
        return len(self.items)

    @property
    def root_shifted(self):
        return self.root_index is not None

    @property
    def root_on_top(self):
        return self.root_index is not None and bool(self.items) and self.items[-1].head == self.root_index


@dataclass(frozen=True)
class JointState:
    decoder: object
    parser: ParserState
    encoding: object
    words: tuple = ()
    actions: tuple = ()
    target_length: int = None

    @property
    def legal(self):
        return legal_actions(self.parser, self.target_length)

    @property
    def terminal(self):
        return is_terminal(self.parser, self.target_length)


def rnng_parameter_specs(config):
    """(name, shape, init kind) for every slot the RNNG half reads"""
    d, w, a = config.hidden_dim, config.word_dim, config.action_dim
    blocks = sum(1 for _, flag in ACTION_INPUTS if flag not in config.ablation)
    specs = []
    if not config.tie_target_embeddings:
        specs.append((STACK_EMBEDDING, (config.target_vocab_size, w), "weight"))
    specs += [
        (STACK_LSTM_W, (4 * d, w + d), "weight"),
        (STACK_LSTM_B, (4 * d,), "lstm_bias"),
        (ACTION_LSTM_W, (4 * d, a + d), "weight"),
        (ACTION_LSTM_B, (4 * d,), "lstm_bias"),
        (ACTION_EMBEDDING, (config.num_actions, a), "weight"),
        (COMPOSITION_W, (w, 2 * w + a), "weight"),
        (ACTION_OUTPUT_W, (config.num_actions, d), "output"),
    ]
    if blocks:
        specs += [
            (ACTION_HIDDEN_W, (d, blocks * d), "weight"),
            (ACTION_HIDDEN_B, (d,), "bias"),
        ]
    return specs


class RnngTransition:
    def __init__(self, model):
        """
        Initialize the parser half of the model

        Args:
            model: NmtRnng instance
        """
        self.model = model

    def _stack_embedding(self, tape):
        name = TARGET_EMBEDDING if self.model.config.tie_target_embeddings else STACK_EMBEDDING
        return tape.param(name)

    def initial_parser_state(self, tape):
        stack = StackLstm.empty(tape.param(STACK_LSTM_W), tape.param(STACK_LSTM_B), tape.dtype)
        history = StackLstm.empty(tape.param(ACTION_LSTM_W), tape.param(ACTION_LSTM_B), tape.dtype)
        return ParserState(stack, history)

    def initial_state(self, tape, encoding, target_length=None):
        decoder = self.model.encoder_attention.initial_state(tape)
        return JointState(decoder, self.initial_parser_state(tape), encoding, target_length=target_length)

    def action_features(self, state):
        """The vectors f_action combines, keyed by component name"""
        return {
            "buffer": state.decoder.hidden,
            "stack": state.parser.stack.top().hidden,
            "action": state.parser.history.top().hidden,
        }

    def action_logits(self, tape, state, features=None):
        """
        Unnormalized scores W_a^T f_action(h^decoder, h^stack, h^action)

        Components switched off by the ablation flags are never read.
        """
        config = self.model.config
        if features is None:
            features = self.action_features(state)
        parts = [features[name] for name, flag in ACTION_INPUTS if flag not in config.ablation]
        if parts:
            hidden = tanh(affine(tape.param(ACTION_HIDDEN_W), concat(parts), tape.param(ACTION_HIDDEN_B)))
        else:
            hidden = tape.zeros(config.hidden_dim)
        return matvec(tape.param(ACTION_OUTPUT_W), hidden)

    def action_distribution(self, tape, state):
        """
        Log-probabilities over actions, masked to the legal ones

        Raises:
            TransitionError: If the state is terminal
            InternalInvariantError: If a non-terminal state has no legal action
        """
        kinds = state.legal
        if not kinds:
            if state.terminal:
                raise TransitionError("No action follows a terminal state", step=len(state.actions))
            raise InternalInvariantError(f"No legal action in non-terminal state after {len(state.actions)} actions")
        mask = legal_mask(kinds, self.model.config.num_actions)
        return log_softmax(self.action_logits(tape, state), mask)

    def advance_decoder(self, tape, state):
        """Decoder step that a SHIFT at this state would take"""
        prev_word = state.words[-1] if state.words else self.model.config.eos_id
        return self.model.encoder_attention.decoder_step(tape, state.decoder, prev_word, state.encoding)

    def _push_history(self, tape, parser, action):
        embedding = lookup(tape.param(ACTION_EMBEDDING), action.index)
        return parser.history.push(embedding), embedding

    def apply_shift(self, tape, state, word, step=None):
        """
        Generate `word` with the decoder and move it onto the stack

        Args:
            tape (Tape): Tape to record on
            state (JointState): Current state
            word (int): Target word id being shifted
            step (tuple, optional): Result of advance_decoder for this state, reused if given

        Returns:
            tuple: (JointState, word log-probability Tensor of the decoder step)

        Raises:
            TransitionError: If SHIFT is illegal here
        """
        if ActionKind.SHIFT not in state.legal:
            raise TransitionError("SHIFT is not legal", step=len(state.actions))
        decoder, log_probs = step if step is not None else self.advance_decoder(tape, state)
        parser = state.parser
        vector = lookup(self._stack_embedding(tape), word)
        history, _ = self._push_history(tape, parser, SHIFT)
        root_index = parser.root_index
        if root_index is None and word == self.model.config.eos_id:
            root_index = parser.shifted
        parser = replace(
            parser,
            stack=parser.stack.push(vector),
            history=history,
            items=parser.items + (StackItem(vector, parser.shifted),),
            shifted=parser.shifted + 1,
            root_index=root_index,
        )
        new_state = replace(state, decoder=decoder, parser=parser,
                            words=state.words + (word,), actions=state.actions + (SHIFT,))
        return new_state, log_probs

    def apply_reduce(self, tape, state, kind, label):
        """
        Reduce the top two stack items into a composed phrase vector

        REDUCE-L makes the top item the head of the item below it; REDUCE-R
        makes the item below the head of the top item.

        Raises:
            TransitionError: If the reduce is illegal here
        """
        kind = ActionKind(kind)
        if kind == ActionKind.SHIFT:
            raise TransitionError("apply_reduce needs REDUCE-L or REDUCE-R", step=len(state.actions))
        if label is None or not 0 <= label < self.model.config.num_labels:
            raise TransitionError(f"Label id {label} out of range", step=len(state.actions))
        parser = state.parser
        if kind not in state.legal:
            raise TransitionError(f"{_KIND_NAMES[kind]} is not legal at stack depth {parser.depth}",
                                  step=len(state.actions))
        action = Action(kind, label)
        below, top = parser.items[-2], parser.items[-1]
        if kind == ActionKind.REDUCE_L:
            parent, dependent = top, below
        else:
            parent, dependent = below, top
        history, action_vector = self._push_history(tape, parser, action)
        composed = tanh(matvec(tape.param(COMPOSITION_W),
                               concat((dependent.vector, parent.vector, action_vector))))
        parser = replace(
            parser,
            stack=parser.stack.pop().pop().push(composed),
            history=history,
            items=parser.items[:-2] + (StackItem(composed, parent.head),),
            arcs=parser.arcs + (Arc(dependent.head, parent.head, label),),
        )
        return replace(state, parser=parser, actions=state.actions + (action,))

    def apply(self, tape, state, action, word=None, step=None):
        """Apply any action; SHIFT needs the word being generated"""
        if action.kind == ActionKind.SHIFT:
            if word is None:
                raise TransitionError("SHIFT needs a word", step=len(state.actions))
            return self.apply_shift(tape, state, word, step)[0]
        return self.apply_reduce(tape, state, action.kind, action.label)
