"""Error hierarchy shared by every stage of the toolchain."""

from __future__ import annotations


class GipsyError(Exception):
    """Base class. Carries an optional ``(line, col)`` source position."""

    def __init__(self, message: str = "", pos: tuple[int, int] | None = None):
        super().__init__(message)
        self.message = message
        self.pos = pos

    @property
    def kind(self) -> str:
        return type(self).__name__

    def diagnostic(self, filename: str = "<input>") -> str:
        if self.pos is not None:
            line, col = self.pos
            return f"{filename}:{line}:{col}: {self.kind}: {self.message}"
        return f"{filename}: {self.kind}: {self.message}"

    def __str__(self) -> str:
        if self.pos is not None:
            return f"{self.message} (line {self.pos[0]}, col {self.pos[1]})"
        return self.message


# core
class UnboundDimension(GipsyError):
    pass


class TagOverflow(GipsyError):
    pass


class UnknownHostType(GipsyError):
    pass


class LucidTypeError(GipsyError):
    pass


class DivisionByZero(GipsyError):
    pass


class LucidIndexError(GipsyError):
    pass


# frontend
class LucidSyntaxError(GipsyError):
    pass


class InvalidSegment(GipsyError):
    pass


class UnsupportedLanguage(GipsyError):
    pass


class DuplicatePrototype(GipsyError):
    pass


# translator
class AmbiguousDimension(GipsyError):
    pass


class Unsupported(GipsyError):
    pass


# semantics
class UndefinedIdentifier(GipsyError):
    pass


class NotADimension(GipsyError):
    pass


class ArityMismatch(GipsyError):
    pass


class DuplicateDefinition(GipsyError):
    pass


class NotCallable(GipsyError):
    pass


class UnresolvedFunction(GipsyError):
    pass


class SignatureMismatch(GipsyError):
    def __init__(self, name: str, declared: str, found: str, pos=None):
        super().__init__(f"{name}: declared {declared}, host provides {found}", pos)
        self.name = name
        self.declared = declared
        self.found = found


class UnresolvedType(GipsyError):
    pass


class FormatError(GipsyError):
    pass


# eduction
class HostError(GipsyError):
    pass


class DepthExceeded(GipsyError):
    pass


class CommunicationError(GipsyError):
    def __init__(self, phase: str, cause: str, pos=None):
        super().__init__(f"{phase}: {cause}", pos)
        self.phase = phase
        self.cause = cause


class WorkerDead(GipsyError):
    def __init__(self, worker_id: str, pos=None):
        super().__init__(f"worker {worker_id} is dead", pos)
        self.worker_id = worker_id


class EvaluationFailed(GipsyError):
    """Raised by ``run`` when one or more ASTs failed; keeps partial results."""

    def __init__(self, errors, results):
        lines = [f"{i}: {e.kind}: {e}" for i, e in errors]
        super().__init__("; ".join(lines))
        self.errors = errors
        self.results = results


# host registry
class DuplicateRegistration(GipsyError):
    pass


class BoundaryTypeError(GipsyError):
    pass


class CompileError(GipsyError):
    def __init__(self, reason: str, message: str = "", pos=None):
        super().__init__(f"{reason}: {message}" if message else reason, pos)
        self.reason = reason


class UnknownField(GipsyError):
    pass


class UnknownMethod(GipsyError):
    pass


class UsageError(GipsyError):
    pass
