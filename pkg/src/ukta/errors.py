"""Exception types shared across the toolkit."""

from __future__ import annotations


class UktaError(Exception):
    """Base class for all toolkit errors."""


class UnknownTag(UktaError):
    """A POS tag outside the closed inventory was encountered."""

    def __init__(self, code: str, location: object = None):
        self.code = code
        self.location = location
        where = f" at {location}" if location is not None else ""
        super().__init__(f"unknown POS tag {code!r}{where}")


class EmptySentence(UktaError):
    """A document yielded no sentence, or a sentence had no wordpieces."""

    def __init__(self, index: int):
        self.index = index
        super().__init__(f"empty sentence at index {index}")


class MalformedRecord(UktaError):
    """An input record could not be parsed."""

    def __init__(self, location: object, reason: str):
        self.location = location
        self.reason = reason
        super().__init__(f"malformed record at {location}: {reason}")


class UndefinedFeature(UktaError):
    """A feature's preconditions do not hold for this text (value masked)."""

    def __init__(self, name: str, reason: str = ""):
        self.name = name
        self.reason = reason
        msg = f"feature {name} undefined"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)


class RegistryMismatch(UktaError):
    """Feature registry does not match the artifact it is used with."""


class InsufficientData(UktaError):
    """Not enough samples for the requested statistic."""


class ShapeMismatch(UktaError):
    """Tensor shapes are inconsistent with the model configuration."""


class EmptyEssay(UktaError):
    """An operation that needs at least one sentence received none."""


class NoLabels(UktaError):
    """Training requires labeled essays."""


class DivergedLoss(UktaError):
    """Training loss became non-finite."""


class LengthMismatch(UktaError):
    """Paired sequences have different lengths."""


class ProviderUnavailable(UktaError):
    """The embedding provider could not produce vectors."""


class NoCandidates(UktaError):
    """Keyword extraction found no candidate phrases."""


class TaggerError(UktaError):
    """Base class for morpheme-tagger client failures."""


class Unreachable(TaggerError):
    def __init__(self, endpoint: str, reason: str = ""):
        self.endpoint = endpoint
        msg = f"tagger endpoint unreachable: {endpoint}"
        if reason:
            msg += f" ({reason})"
        super().__init__(msg)


class Timeout(TaggerError):
    def __init__(self, endpoint: str, timeout_ms: int):
        self.endpoint = endpoint
        self.timeout_ms = timeout_ms
        super().__init__(f"tagger request to {endpoint} timed out after {timeout_ms} ms")


class InvalidResponse(TaggerError):
    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(f"invalid tagger response: {reason}")
