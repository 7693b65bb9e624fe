"""Errors raised by the graph algebra services"""

from typing import Optional


class GraphAlgebraError(ValueError):
    """Base class for every domain error raised by the services"""


class StructuralError(GraphAlgebraError):
    """Malformed graph: boundary source, dangling target, wrong vertex count"""


class ContractError(GraphAlgebraError):
    """Edge contraction requested on an edge that cannot be contracted"""


class SubsetError(GraphAlgebraError):
    """Vertex subset violating the collapse preconditions"""


class StateError(GraphAlgebraError):
    """Vertex state incompatible with a graph's signature or dimension"""


class ResourceError(GraphAlgebraError):
    """Computation refused because its measured size exceeds a configured limit"""

    def __init__(self, message: str, size: Optional[int] = None):
        super().__init__(message)
        self.size = size


class UsageError(GraphAlgebraError):
    """Input that cannot be parsed; carries a position for syntax errors"""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        if line is not None:
            message = f"line {line}, column {column or 1}: {message}"
        super().__init__(message)
        self.line = line
        self.column = column
