"""Exception types shared across the package.

Each error class maps to a distinct CLI exit code so scripted callers can
tell configuration problems from numerical ones without parsing messages.
"""

from __future__ import annotations


class SchemaError(ValueError):
    """A state description (JSON or dict) failed validation.

    Attributes
    ----------
    pointer : str
        JSON-pointer-style path to the offending element, e.g.
        ``/terms/0/state/kind``.
    """

    def __init__(self, pointer: str, message: str):
        self.pointer = pointer
        super().__init__(f"{pointer}: {message}")


class TruncationTooSmall(ValueError):
    """Requested cutoffs cannot represent the state to the tail tolerance.

    Carries the minimal sufficient per-mode cutoffs so callers can retry.
    """

    def __init__(self, message: str, suggested_cutoffs=None):
        self.suggested_cutoffs = (
            None if suggested_cutoffs is None else tuple(int(n) for n in suggested_cutoffs)
        )
        if self.suggested_cutoffs is not None:
            message = f"{message} (sufficient cutoffs: {list(self.suggested_cutoffs)})"
        super().__init__(message)


class DimensionTooLarge(ValueError):
    """The flattened basis (or a dense realization) would exceed the hard cap."""


class NumericalInconsistency(RuntimeError):
    """A computed quantity violated an internal consistency requirement.

    Raised e.g. when a matrix expected to be Hermitian is not, when an
    eigensolver residual is out of spec, or when a set of bounds ends up
    ordered the wrong way around by more than numerical slack.
    """
