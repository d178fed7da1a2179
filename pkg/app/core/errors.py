"""
Exception hierarchy for the engine.

InputError subclasses describe bad user input (CLI exit 2, HTTP 400);
InvariantError subclasses describe a computation that must not continue
(CLI exit 1, HTTP 500).
"""
from typing import Optional, Sequence


class EngineError(Exception):
    """Base class for every error raised by the engine"""


# ===================== INPUT ERRORS =====================

class InputError(EngineError):
    pass


class ModelSyntaxError(InputError):
    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.message, self.line, self.column = message, line, column
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)


class ModelValidationError(InputError):
    def __init__(self, name: str, report):
        self.report = report
        failures = "; ".join(str(f) for f in report.failures[:5])
        super().__init__(f"model '{name}' failed validation: {failures}")


class UnknownPresetError(InputError):
    pass


class MorphismError(InputError):
    def __init__(self, axiom: str, witness: Sequence[str] = ()):
        self.axiom, self.witness = axiom, tuple(witness)
        detail = f" (witness: {', '.join(self.witness)})" if self.witness else ""
        super().__init__(f"morphism violates {axiom}{detail}")


class NotSimplyConnectedError(InputError):
    def __init__(self, classes: Sequence[str]):
        self.classes = tuple(classes)
        super().__init__(
            "model is not connected and simply connected; obstructing classes: "
            + ", ".join(self.classes)
        )


class DegeneratePairingError(InputError):
    pass


class CarrierMismatchError(InputError):
    pass


class UnknownGeneratorError(InputError):
    pass


class WindowError(InputError):
    pass


# ===================== INVARIANT ERRORS =====================

class InvariantError(EngineError):
    pass


class ClosednessError(InvariantError):
    def __init__(self, stage: int, witness: str):
        self.stage, self.witness = stage, witness
        super().__init__(f"obstruction at word length {stage} is not d-closed: {witness}")


class TruncationOverflow(InvariantError):
    def __init__(self, required: int, available: int):
        self.required, self.available = required, available
        super().__init__(
            f"word length {required} required but connection is stored to length {available}"
        )


class ProductOutsideWindow(InvariantError):
    def __init__(self, degree: int):
        self.degree = degree
        super().__init__(f"product lands in degree {degree}, outside the computed window")


class NotClosedError(InvariantError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"representative '{name}' is not a cocycle")
