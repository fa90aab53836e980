"""Central-difference gradient checking against the tape."""
from dataclasses import dataclass, field

import numpy as np

from ..exceptions import ConfigError, NonFiniteError
from ..utils.logger import logger
from .tensor import Tape


@dataclass
class GradCheckReport:
    max_error: float
    worst_slot: str
    worst_index: tuple
    slot_errors: dict = field(default_factory=dict)
    checked_entries: int = 0

    def passed(self, tolerance=1e-4):
        return self.max_error < tolerance


def _evaluate(loss_fn, store):
    value = float(np.sum(loss_fn(Tape(store, record=False)).value))
    if not np.isfinite(value):
        raise NonFiniteError("loss is not finite during finite differencing")
    return value


def grad_check(loss_fn, store, epsilon=1e-5, slots=None, max_entries=None, seed=0):
    """
    Compare tape gradients with central finite differences

    Args:
        loss_fn (callable): Maps a Tape to a scalar Tensor, reading parameters via tape.param
        store (ParameterStore): Parameters to perturb, double precision expected
        epsilon (float): Step in [1e-6, 1e-3]
        slots (list, optional): Restrict the check to these slot names
        max_entries (int, optional): Sample at most this many entries per slot
        seed (int): Seed for the entry sample

    Returns:
        GradCheckReport: max over entries of |analytic - numeric| / max(1, |analytic|)

    Raises:
        ConfigError: If epsilon is out of range
        NonFiniteError: If the loss is not finite
    """
    if not 1e-6 <= epsilon <= 1e-3:
        raise ConfigError(f"epsilon must lie in [1e-6, 1e-3], got {epsilon}")
    if store.dtype != np.float64:
        logger.warning(f"Gradient check on {store.dtype} parameters; expect larger errors")

    tape = Tape(store)
    loss = loss_fn(tape)
    tape.backward(loss)
    analytic = tape.parameter_grads()
    rng = np.random.default_rng(seed)

    report = GradCheckReport(max_error=0.0, worst_slot=None, worst_index=None)
    for name in (slots if slots is not None else store.names()):
        value = store.value(name)
        grad = analytic.get(name)
        if grad is None:
            grad = np.zeros_like(value)
        flat_indices = np.arange(value.size)
        if max_entries is not None and value.size > max_entries:
            flat_indices = np.sort(rng.choice(value.size, size=max_entries, replace=False))
        slot_error = 0.0
        for flat in flat_indices:
            index = np.unravel_index(flat, value.shape)
            original = value[index]
            value[index] = original + epsilon
            plus = _evaluate(loss_fn, store)
            value[index] = original - epsilon
            minus = _evaluate(loss_fn, store)
            value[index] = original
            numeric = (plus - minus) / (2.0 * epsilon)
            a = float(grad[index])
            error = abs(a - numeric) / max(1.0, abs(a))
            report.checked_entries += 1
            if error > slot_error:
                slot_error = error
            if report.worst_slot is None or error > report.max_error:
                report.max_error = error
                report.worst_slot = name
                report.worst_index = tuple(int(i) for i in index)
        report.slot_errors[name] = slot_error
    logger.debug(f"Gradient check: max error {report.max_error:.3e} in '{report.worst_slot}'")
    return report
