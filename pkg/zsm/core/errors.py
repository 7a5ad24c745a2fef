# zsm/core/errors.py
"""
Exception hierarchy for the zsm package.

Every error derives from ValueError so callers that only care about bad input
can catch the builtin, while the CLI maps ZsmError to exit code 2.
"""

from typing import Optional


class ZsmError(ValueError):
    """Base class for all input and model errors raised by zsm."""


class DimensionError(ZsmError):
    """Array shapes do not agree."""


class GeneratorCapError(ZsmError):
    """A set has more generators than the vertex enumeration cap allows."""


class VertexEnumerationError(ZsmError):
    """Vertex enumeration could not produce a result."""


class FlatnessError(ZsmError):
    """A ground intersection left the ground plane; signals a geometry bug."""


class ScenarioError(ZsmError):
    """A scenario, satellite or emulation request is unusable."""


class ConfigurationError(ZsmError):
    """A configured parameter is out of its documented range."""


class MeshParseError(ZsmError):
    """Raised when a mesh file cannot be parsed."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
