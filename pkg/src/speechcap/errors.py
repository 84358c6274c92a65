"""Exception hierarchy shared across the toolkit."""


class SpeechCapError(Exception):
    """Base class for all toolkit errors."""


class ManifestError(SpeechCapError):
    """Manifest cannot be read or written."""


class ManifestValidationError(ManifestError):
    """Manifest parsed but violates an invariant (e.g. duplicate ids)."""

    def __init__(self, message, duplicates=None):
        super().__init__(message)
        self.duplicates = list(duplicates or [])


class DecodeError(SpeechCapError):
    """Audio file exists but cannot be decoded."""


class EmptyAudioError(DecodeError):
    """Audio decoded to zero samples."""


class UndefinedAttributeError(SpeechCapError):
    """An acoustic attribute could not be estimated for this clip.

    Distinct from a zero value: callers must treat the attribute as
    absent, never substitute 0.
    """

    def __init__(self, attribute, reason=""):
        self.attribute = attribute
        self.reason = reason
        msg = f"attribute {attribute!r} undefined"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)


class GrammarError(SpeechCapError):
    """Caption grammar is invalid or lacks a phrase for a label."""


class BackendError(SpeechCapError):
    """An external text backend (LLM, translation) failed."""


class ConfigVersionError(SpeechCapError):
    """Two artifacts were produced under different binning config versions."""

    def __init__(self, expected, actual):
        self.expected = expected
        self.actual = actual
        super().__init__(
            f"binning config version mismatch: expected {expected!r}, got {actual!r}"
        )


class CheckpointMismatchError(SpeechCapError):
    """Resume attempted with a checkpoint written under a different config."""


class PipelineConfigError(SpeechCapError):
    """Pipeline configuration is invalid (missing files, bad values)."""
