"""Exception hierarchy shared across the package.

Every error raised by isacsim derives from :class:`IsacSimError`, so callers
(and the CLI exit-code mapping) can distinguish our failures from genuine
bugs or OS-level errors.
"""


class IsacSimError(Exception):
    """Base class for all isacsim errors."""


class ConfigError(IsacSimError):
    """Invalid or inconsistent configuration input."""


class ConfigMismatch(ConfigError):
    """Two objects that must agree (band, link, dims, threshold) do not."""


class DomainError(IsacSimError):
    """Numeric argument outside the mathematical domain of an operation."""


class GeometryError(IsacSimError):
    """Degenerate scene geometry (e.g. a site lying on a reflector plane)."""


class EmptyProfile(IsacSimError):
    """A power profile is all zero after thresholding; spreads are undefined."""


class DegenerateConfiguration(IsacSimError):
    """Marker points are collinear; a rigid fit is underdetermined."""


class ScenarioParseError(IsacSimError):
    """Malformed scenario code. Carries the byte offset of the defect."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.message = message
        self.offset = offset


class FileFormatError(IsacSimError):
    """A binary tensor file is truncated or carries the wrong magic."""
