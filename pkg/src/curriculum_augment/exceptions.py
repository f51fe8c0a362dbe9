"""Exception hierarchy shared by every module of the package."""


class CurriculumAugmentError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameterError(CurriculumAugmentError, ValueError):
    """A parameter is outside its valid domain (box too large, bad epoch...)."""


class ShapeError(CurriculumAugmentError, ValueError):
    """Two images or label vectors that must agree in shape do not."""


class DecodeError(CurriculumAugmentError, ValueError):
    """An image stream is malformed.

    ``offset`` is the byte position at which decoding failed, when known.
    """

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class ManifestError(CurriculumAugmentError, ValueError):
    """A dataset manifest could not be parsed or failed validation."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ConfigError(CurriculumAugmentError, ValueError):
    """A run configuration is invalid; ``pointer`` is a JSON pointer to the key."""

    def __init__(self, message, pointer=""):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer


class EpochAborted(CurriculumAugmentError, RuntimeError):
    """Too many samples failed during an epoch; ``report`` holds what was done."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
