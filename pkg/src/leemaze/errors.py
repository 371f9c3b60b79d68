"""Exception hierarchy shared by every engine."""


class MazeError(Exception):
    """Base class for all errors raised by leemaze."""


class MalformedInput(MazeError, ValueError):
    pass


class InvalidDimensions(MazeError, ValueError):
    pass


class InvalidEndpoints(MazeError, ValueError):
    pass


class WallQuery(MazeError, ValueError):
    """A cell that must be a channel is a wall (or lies outside the grid)."""


class Unreachable(MazeError):
    pass


class TooLarge(MazeError):
    pass


class NotConverged(MazeError):
    """Iteration budget exhausted before the tolerance was met.

    ``field`` and ``diagnostics`` carry the partial result.
    """

    def __init__(self, message, field=None, diagnostics=None):
        super().__init__(message)
        self.field = field
        self.diagnostics = diagnostics


class LocalExtremum(MazeError):
    """A greedy tracer found no strictly improving neighbor."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class StepBudgetExceeded(MazeError):
    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class DisconnectedHotSet(MazeError):
    pass


class AmbiguousPath(MazeError):
    pass


class CycleDetected(MazeError):
    pass


class NotQuiescent(MazeError):
    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class PathOutsideMaze(MazeError, ValueError):
    pass


class DegenerateRange(MazeError, ValueError):
    pass
