"""
Errors for polyparse
====================

Every failure the library reports deliberately derives from PolyparseError,
so the command line can catch one type, log the message and exit nonzero.
"""

from typing import Iterable, Optional


class PolyparseError(Exception):
    """Base class of all polyparse errors"""


class ConlluFormatError(PolyparseError, ValueError):
    """Malformed CoNLL-U input"""

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class TreeStructureError(PolyparseError, ValueError):
    """Heads that do not form a single-rooted tree"""


class NonProjectiveError(PolyparseError, ValueError):
    pass


class IllegalActionError(PolyparseError, ValueError):
    """A transition whose arc-standard precondition does not hold"""


class IncompleteParseError(PolyparseError, ValueError):
    pass


class ShapeError(PolyparseError, ValueError):
    """Operand shapes that an operation cannot combine"""


class ResourceFormatError(PolyparseError, ValueError):
    """Malformed embedding, cluster, dictionary or typology file"""

    def __init__(self, message: str, line_number: Optional[int] = None, path: Optional[str] = None):
        self.line_number = line_number
        self.path = path
        prefix = ""
        if path is not None:
            prefix += f"{path}:"
        if line_number is not None:
            prefix += f"{line_number}:"
        super().__init__(f"{prefix} {message}" if prefix else message)


class ConfigError(PolyparseError, ValueError):
    pass


class ModelFormatError(PolyparseError, ValueError):
    pass


class UnknownLanguageError(PolyparseError, KeyError):
    """Language identifier the model or vocabulary was not built with"""

    def __init__(self, language: str, supported: Iterable[str]):
        self.language = language
        self.supported = sorted(supported)
        super().__init__(
            f"unknown language '{language}'; supported: {', '.join(self.supported) or '(none)'}"
        )

    def __str__(self) -> str:
        return self.args[0]


class TrainingDivergedError(PolyparseError, ArithmeticError):
    """Non-finite training loss"""


class AlignmentError(PolyparseError, ValueError):
    """Gold and predicted treebanks that do not line up sentence by sentence"""
