"""Conversion between dependency trees and arc-standard action sequences."""
from dataclasses import dataclass, field

from ..exceptions import NonProjectiveError, TransitionError
from ..model.transition import SHIFT, Action, ActionKind, is_terminal, legal_actions
from .conll import ROOT, DepTree


@dataclass
class SymbolicState:
    """Parser state without vectors: stack of head token indices"""
    length: int
    stack: list = field(default_factory=list)
    shifted: int = 0

    @property
    def depth(self):
        return len(self.stack)

    @property
    def root_shifted(self):
        return self.shifted == self.length

    @property
    def root_on_top(self):
        return bool(self.stack) and self.stack[-1] == self.length - 1


def tree_to_actions(tree):
    """
    Static arc-standard oracle

    Args:
        tree (DepTree): Tree with integer labels

    Returns:
        list: 2M - 1 Actions with M SHIFTs

    Raises:
        NonProjectiveError: If the tree cannot be built by arc-standard
    """
    heads, labels, m = tree.heads, tree.labels, tree.length
    pending = [0] * m
    for head in heads:
        if head != ROOT:
            pending[head] += 1

    stack, actions, i = [], [], 0
    while True:
        if len(stack) >= 2:
            s0, s1 = stack[-1], stack[-2]
            if heads[s1] == s0 and pending[s1] == 0:
                actions.append(Action(ActionKind.REDUCE_L, labels[s1]))
                del stack[-2]
                pending[s0] -= 1
                continue
            if heads[s0] == s1 and pending[s0] == 0:
                actions.append(Action(ActionKind.REDUCE_R, labels[s0]))
                stack.pop()
                pending[s1] -= 1
                continue
        if i < m:
            actions.append(SHIFT)
            stack.append(i)
            i += 1
            continue
        break
    if len(stack) != 1:
        raise NonProjectiveError(f"arc-standard oracle left {len(stack)} items on the stack; tree is non-projective")
    return actions


def actions_to_tree(actions, length, forms=None):
    """
    Replay actions symbolically and collect their arcs

    Args:
        actions (list): Legal, terminal action sequence
        length (int): Token count M, EOS included
        forms (list, optional): Token forms attached to the tree

    Returns:
        DepTree: Tree with integer labels

    Raises:
        TransitionError: On an illegal step (with its index) or a non-terminal end
    """
    state = SymbolicState(length)
    heads = [ROOT] * length
    labels = [None] * length
    for step, action in enumerate(actions):
        if action.kind not in legal_actions(state, length):
            raise TransitionError(f"{action} is not legal at stack depth {state.depth}", step=step)
        if action.kind == ActionKind.SHIFT:
            state.stack.append(state.shifted)
            state.shifted += 1
            continue
        s0, s1 = state.stack[-1], state.stack[-2]
        head, dependent = (s0, s1) if action.kind == ActionKind.REDUCE_L else (s1, s0)
        heads[dependent] = head
        labels[dependent] = action.label
        state.stack[-2:] = [head]
    if not is_terminal(state, length):
        raise TransitionError(f"sequence ends in a non-terminal state (stack depth {state.depth}, "
                              f"{state.shifted}/{length} shifted)", step=len(actions))
    return DepTree(heads, labels, forms)
