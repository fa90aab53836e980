from .tensor import Tape, Tensor
from .parameters import ParameterStore
from .lstm import LstmState, StackLstm, lstm_step
from .gradcheck import GradCheckReport, grad_check

__all__ = [
    'Tape', 'Tensor', 'ParameterStore', 'LstmState', 'StackLstm', 'lstm_step',
    'GradCheckReport', 'grad_check',
]
