from typing import Optional, Tuple


class DomainError(ValueError):
    """An argument lies outside the domain of the formula."""


class QuadratureError(RuntimeError):
    def __init__(self, message: str, achieved: float, requested: float):
        self.achieved = achieved
        self.requested = requested
        super().__init__(f"{message} (achieved error {achieved:.3g}, requested {requested:.3g})")


class OptimizationError(RuntimeError):
    def __init__(self, message: str, point: Optional[Tuple[float, ...]] = None):
        self.point = point
        where = f" at {point}" if point is not None else ""
        super().__init__(f"{message}{where}")
