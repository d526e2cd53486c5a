"""Exception hierarchy. The CLI maps these onto stable exit codes."""


class SocsimError(Exception):
    """Base class for all package errors."""


class ConfigError(SocsimError):
    """Invalid model parameters, mapping config, or session config."""


class DomainError(SocsimError):
    """Runtime argument outside the operation's domain (bad site, non-finite drive)."""


class DivergenceError(SocsimError):
    """Relaxation exceeded the sweep cap; signals a non-relaxing configuration."""


class EstimationError(SocsimError):
    """Too little or degenerate data for a statistical estimate."""


class IngestError(SocsimError):
    """Audio signal unsuitable for corpus segmentation."""


class WavFormatError(SocsimError):
    """Malformed or unsupported WAV file. Carries the byte offset of the failure."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class ProtocolError(SocsimError):
    """Malformed or unknown protocol message."""
