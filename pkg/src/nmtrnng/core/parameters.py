import numpy as np

from ..exceptions import ConfigError, DimensionError


class Slot:
    __slots__ = ('value', 'grad')

    def __init__(self, value):
        self.value = value
        self.grad = np.zeros_like(value)


class ParameterStore:
    """
    Named parameter slots, each a value array plus a gradient accumulator

    A slot used from several places (the shared target word vectors) is
    registered once; every use site reads the same array and every tape adds
    its contribution to the same accumulator.
    """

    def __init__(self, dtype=np.float64):
        self.dtype = np.dtype(dtype)
        self._slots = {}

    def add(self, name, value):
        if name in self._slots:
            raise ConfigError(f"Parameter slot '{name}' already exists")
        self._slots[name] = Slot(np.array(value, dtype=self.dtype))

    def __contains__(self, name):
        return name in self._slots

    def __len__(self):
        return len(self._slots)

    def names(self):
        return list(self._slots)

    def items(self):
        return [(name, slot.value) for name, slot in self._slots.items()]

    def value(self, name):
        try:
            return self._slots[name].value
        except KeyError:
            raise ConfigError(f"Unknown parameter slot '{name}'") from None

    def grad(self, name):
        try:
            return self._slots[name].grad
        except KeyError:
            raise ConfigError(f"Unknown parameter slot '{name}'") from None

    def set_grad(self, name, grad):
        self._slots[name].grad = np.array(grad, dtype=self.dtype)

    def accumulate(self, name, grad):
        slot = self._slots[name]
        if grad.shape != slot.value.shape:
            raise DimensionError(f"accumulate[{name}]", slot.value.shape, grad.shape)
        slot.grad += grad

    def zero_grad(self):
        for slot in self._slots.values():
            slot.grad.fill(0.0)

    def num_parameters(self):
        return sum(slot.value.size for slot in self._slots.values())

    def state_dict(self):
        return {name: slot.value.copy() for name, slot in self._slots.items()}

    def load_state_dict(self, state):
        """
        Overwrite slot values in place

        Raises:
            ConfigError: If the slot names differ
            DimensionError: If a shape differs
        """
        if set(state) != set(self._slots):
            missing = sorted(set(self._slots) - set(state))
            extra = sorted(set(state) - set(self._slots))
            raise ConfigError(f"Parameter slots differ: missing {missing}, unexpected {extra}")
        for name, value in state.items():
            slot = self._slots[name]
            if value.shape != slot.value.shape:
                raise DimensionError(f"load[{name}]", slot.value.shape, value.shape)
            slot.value[...] = value

    def copy(self):
        clone = ParameterStore(self.dtype)
        for name, slot in self._slots.items():
            clone.add(name, slot.value)
        return clone
