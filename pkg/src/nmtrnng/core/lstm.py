"""LSTM cell and the stack LSTM built on it."""
from dataclasses import dataclass

import numpy as np

from ..exceptions import DimensionError, StackUnderflowError
from .tensor import Tensor, affine, concat, lstm_cell, slice_


@dataclass(frozen=True)
class LstmState:
    hidden: Tensor
    cell: Tensor

    def __post_init__(self):
        if self.hidden.shape != self.cell.shape:
            raise DimensionError('LstmState', self.hidden.shape, self.cell.shape)

    @property
    def dim(self):
        return self.hidden.shape[0]

    @classmethod
    def zeros(cls, dim, dtype=np.float64):
        return cls(Tensor(np.zeros(dim, dtype=dtype)), Tensor(np.zeros(dim, dtype=dtype)))


def lstm_step(state, x, weight, bias):
    """
    One standard (non-peephole) LSTM step

    Args:
        state (LstmState): Previous hidden and cell
        x (Tensor): Input vector
        weight (Tensor): Gate weights, shape (4d, dim(x) + d), gate order i, f, o, g
        bias (Tensor): Gate biases, shape (4d,)

    Returns:
        LstmState: The next state
    """
    d = state.dim
    if weight.shape != (4 * d, x.shape[0] + d):
        raise DimensionError('lstm_step', weight.shape, (4 * d, x.shape[0] + d))
    z = affine(weight, concat((x, state.hidden)), bias)
    hc = lstm_cell(z, state.cell)
    return LstmState(slice_(hc, 0, d), slice_(hc, d, 2 * d))


class _Frame:
    __slots__ = ('state', 'below', 'depth')

    def __init__(self, state, below, depth):
        self.state = state
        self.below = below
        self.depth = depth


class StackLstm:
    """
    Persistent stack of LSTM states

    push and pop return new stacks and never touch the receiver, so popping
    hands back the exact frame objects that were there before the push.
    """

    __slots__ = ('weight', 'bias', 'initial', '_top')

    def __init__(self, weight, bias, initial, _top=None):
        self.weight = weight
        self.bias = bias
        self.initial = initial
        self._top = _top

    @classmethod
    def empty(cls, weight, bias, dtype=np.float64):
        return cls(weight, bias, LstmState.zeros(weight.shape[0] // 4, dtype))

    @property
    def depth(self):
        return 0 if self._top is None else self._top.depth

    def __len__(self):
        return self.depth

    def top(self):
        return self.initial if self._top is None else self._top.state

    def push(self, x):
        state = lstm_step(self.top(), x, self.weight, self.bias)
        return StackLstm(self.weight, self.bias, self.initial, _Frame(state, self._top, self.depth + 1))

    def pop(self):
        if self._top is None:
            raise StackUnderflowError("pop on an empty stack LSTM")
        return StackLstm(self.weight, self.bias, self.initial, self._top.below)

    def frames(self):
        """States from bottom to top"""
        out = []
        frame = self._top
        while frame is not None:
            out.append(frame.state)
            frame = frame.below
        return tuple(reversed(out))

