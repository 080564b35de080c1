"""Exception types raised across the package."""


class SliceSimError(Exception):
    """Base class for all package errors."""


class CyclicGraph(SliceSimError):
    def __init__(self, unvisited):
        self.unvisited = sorted(unvisited)
        super().__init__(f"task graph has a cycle through tasks {self.unvisited}")


class ConfigError(SliceSimError):
    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path:
            where += f"{path}: "
        if line is not None:
            where = f"line {line}: " + where
        super().__init__(where + message)


class UnstableScenario(SliceSimError):
    """Total offered load reaches the pool capacity (sum of rates >= r * mu)."""


class Unstable(SliceSimError):
    """A single queue is at or beyond its stability boundary."""


class EmptySlice(SliceSimError):
    pass


class ZeroRate(SliceSimError):
    pass


class TooLarge(SliceSimError):
    pass


class Infeasible(SliceSimError):
    pass
