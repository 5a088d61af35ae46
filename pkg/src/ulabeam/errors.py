"""Exception hierarchy.

Every error carries a short ``kind`` slug ("invalid-geometry", "parse-error", ...)
so reports and the CLI can name failures without matching on class names.
Subclasses of :class:`ValidationError` map to CLI exit code 1, everything
else to exit code 2.
"""


class UlaBeamError(Exception):
    kind = "error"


class ValidationError(UlaBeamError, ValueError):
    kind = "validation-error"


class InvalidGeometryError(ValidationError):
    kind = "invalid-geometry"


class InvalidFrequencyError(ValidationError):
    kind = "invalid-frequency"


class OutOfRangeError(ValidationError):
    kind = "out-of-range"


class WindowTooLongError(ValidationError):
    kind = "window-too-long"


class ShapeError(ValidationError):
    kind = "shape-error"


class AliasedSynthesisError(ValidationError):
    kind = "aliased-synthesis"


class IncompleteGridError(ValidationError):
    kind = "incomplete-grid"


class ConfigValidationError(ValidationError):
    kind = "config-validation"


class DegenerateSignalError(UlaBeamError, ValueError):
    kind = "degenerate-signal"


class UndefinedSNRError(UlaBeamError, ValueError):
    kind = "undefined-snr"


class WavError(UlaBeamError):
    kind = "wav-error"


class WavParseError(WavError):
    kind = "parse-error"

    def __init__(self, message, offset=None, filename=None):
        self.offset = offset
        self.filename = filename
        parts = [message]
        if offset is not None:
            parts.append(f"at byte offset {offset}")
        if filename is not None:
            parts.append(f"in {filename}")
        super().__init__(" ".join(parts))


class UnsupportedFormatError(WavError):
    kind = "unsupported-format"


class TruncationError(WavError):
    kind = "truncation-error"


class IncompleteDatasetError(UlaBeamError):
    kind = "incomplete-dataset"

    def __init__(self, missing_angles, directory=None):
        self.missing_angles = list(missing_angles)
        where = f" in {directory}" if directory is not None else ""
        angles = ", ".join(f"{a:g}" for a in self.missing_angles)
        super().__init__(f"missing recordings{where} for array angles: {angles}")


class ExperimentFailedError(UlaBeamError):
    kind = "experiment-failed"
