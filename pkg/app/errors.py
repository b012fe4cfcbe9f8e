# app/errors.py
#
# Exception hierarchy shared by every sub-package.
#
# Each error derives from OCLError plus the closest built-in category, so
# callers can catch either the project-wide base or the usual ValueError /
# RuntimeError families.
#


class OCLError(Exception):
    # Root of all errors raised by the engine.
    pass


class DimensionError(OCLError, ValueError):
    # Raised when tensor shapes do not line up.
    pass


class ConfigurationError(OCLError, ValueError):
    # Raised for invalid model, data or sweep settings.
    pass


class StateError(OCLError, RuntimeError):
    # Raised when runtime state is inconsistent (caches, incomplete logs).
    pass


class DataExhaustedError(OCLError, RuntimeError):
    # Raised when a reader runs out of examples before the requested length.
    pass


class FormatError(OCLError, ValueError):
    #
    # Raised for malformed binary files.
    #
    # Attributes:
    #     offset: Byte offset where parsing failed
    #
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class NonFiniteError(OCLError, FloatingPointError):
    #
    # Raised when a loss or gradient stops being finite.
    #
    # Attributes:
    #     step: Global gradient-step index
    #     stream_id: Stream that produced the value (None outside training)
    #     position: Reader position of the chunk start
    #
    def __init__(self, what: str, step: int, stream_id: int | None = None, position: int | None = None):
        where = f"step {step}"
        if stream_id is not None:
            where += f", stream {stream_id}"
        if position is not None:
            where += f", position {position}"
        super().__init__(f"Non-finite {what} at {where}")
        self.step = step
        self.stream_id = stream_id
        self.position = position
