"""Exception hierarchy shared by every layer of the engine."""

from __future__ import annotations


class DiagmodError(Exception):
    """Base class for all engine errors."""


class CategoryError(DiagmodError):
    pass


class MissingComposite(CategoryError):
    pass


class ParallelMorphisms(CategoryError):
    pass


class NonIdentityEndomorphism(CategoryError):
    pass


class CycleDetected(CategoryError):
    pass


class UnknownObject(CategoryError, KeyError):
    def __str__(self) -> str:  # KeyError quotes its message otherwise
        return Exception.__str__(self)


class RingError(DiagmodError):
    pass


class InvalidRing(RingError, ValueError):
    pass


class NoCanonicalMap(RingError):
    pass


class NotModuleFinite(RingError):
    pass


class RingMismatch(DiagmodError):
    pass


class ComplexError(DiagmodError):
    pass


class UnsupportedShape(DiagmodError):
    pass


class TransitivityViolation(DiagmodError):
    def __init__(self, first, second, message: str = ""):
        self.first = first
        self.second = second
        super().__init__(message or f"transitivity fails for {first} then {second}")


class InvalidSquare(DiagmodError):
    pass


class OracleDisagreement(DiagmodError):
    pass


class ManifestError(DiagmodError):
    pass


class ParseError(ManifestError):
    pass


class ManifestReferenceError(ManifestError):
    """A manifest entry names something that was never declared."""


class UnknownTask(ManifestError, KeyError):
    def __str__(self) -> str:
        return Exception.__str__(self)
