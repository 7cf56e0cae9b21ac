"""Exception hierarchy. Each class carries the CLI exit code it maps to."""

from __future__ import annotations


class KwayError(Exception):
    exit_code = 1


class GraphParseError(KwayError, ValueError):
    """Malformed graph input. ``line`` is the 1-based offending line, if known."""

    exit_code = 2

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class GraphStructureError(GraphParseError):
    """Input parsed but violates a structural requirement (e.g. asymmetry)."""


class DegenerateDegreeError(KwayError, ValueError):
    exit_code = 3

    def __init__(self, nodes):
        nodes = list(nodes)
        shown = ", ".join(str(i) for i in nodes[:10])
        more = "" if len(nodes) <= 10 else f" (+{len(nodes) - 10} more)"
        super().__init__(f"zero degree at node(s) {shown}{more}; use regularization or drop isolated nodes")
        self.nodes = nodes


class ConvergenceError(KwayError, RuntimeError):
    exit_code = 4

    def __init__(self, message: str, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class PartitionError(KwayError, ValueError):
    exit_code = 5


class EmptyPartError(PartitionError):
    def __init__(self, message: str, columns=(), iteration: int | None = None):
        if iteration is not None:
            message = f"{message} (iteration {iteration})"
        super().__init__(message)
        self.columns = tuple(columns)
        self.iteration = iteration


class DegenerateRowError(PartitionError):
    pass


class IllPosedInitError(PartitionError):
    pass


class ReportSchemaError(KwayError, ValueError):
    exit_code = 2
