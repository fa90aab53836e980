"""Error types raised across nmtrnng.

Data-shaped failures derive from ValueError so callers that only know about
ValueError keep working.
"""


class NmtRnngError(Exception):
    """Base class for every error raised by this package"""


class DataError(NmtRnngError, ValueError):
    """Bad input data: maps to exit code 2 on the command line"""


class ValidationFailure(NmtRnngError):
    """A check ran and failed: maps to exit code 3 on the command line"""


class DimensionError(DataError):
    def __init__(self, op, left_shape, right_shape):
        self.op = op
        self.left_shape = tuple(left_shape)
        self.right_shape = tuple(right_shape)
        super().__init__(f"{op}: incompatible shapes {self.left_shape} and {self.right_shape}")


class VocabularyError(DataError):
    pass


class StackUnderflowError(NmtRnngError, IndexError):
    pass


class TransitionError(DataError):
    def __init__(self, message, step=None):
        self.step = step
        if step is not None:
            message = f"step {step}: {message}"
        super().__init__(message)


class SupervisionError(DataError):
    def __init__(self, message, sentence=None):
        self.sentence = sentence
        if sentence is not None:
            message = f"sentence {sentence}: {message}"
        super().__init__(message)


class ConllParseError(DataError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NonProjectiveError(DataError):
    pass


class AlignmentError(DataError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NonFiniteError(DataError):
    def __init__(self, message, slot=None):
        self.slot = slot
        if slot is not None:
            message = f"{message} (slot '{slot}')"
        super().__init__(message)


class ConfigError(DataError):
    pass


class CheckpointError(ValidationFailure):
    pass


class InternalInvariantError(NmtRnngError, RuntimeError):
    pass
