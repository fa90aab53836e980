from .encoder_attention import DecoderState, EncoderAttention, SourceEncoding, translation_parameter_specs
from .hybrid import NmtRnng, parameter_specs
from .transition import (SHIFT, Action, ActionKind, Arc, JointState, ParserState, RnngTransition,
                         StackItem, is_terminal, legal_actions, legal_mask, rnng_parameter_specs)

__all__ = [
    'Action', 'ActionKind', 'Arc', 'DecoderState', 'EncoderAttention', 'JointState', 'NmtRnng',
    'ParserState', 'RnngTransition', 'SHIFT', 'SourceEncoding', 'StackItem', 'is_terminal',
    'legal_actions', 'legal_mask', 'parameter_specs', 'rnng_parameter_specs',
    'translation_parameter_specs',
]
