class SimulationError(ValueError):
    """Base class for every error raised by the search simulators."""


class CapacityError(SimulationError):
    """The requested register does not fit the dense representation."""


class WidthMismatchError(SimulationError):
    """A bitstring or register does not have the expected number of bits."""


class ParameterError(SimulationError):
    """An argument is outside the range an algorithm is defined for."""


class NumericDomainError(ParameterError):
    """An inverse trigonometric argument left [-1, 1] beyond rounding noise."""


class UnsupportedSizeError(ParameterError):
    """The multi-controlled gate cost formulas only hold for n >= 7."""


class IntegrityError(SimulationError):
    """More than one node verified a candidate for a single-target oracle."""


class WorkerError(SimulationError):
    """A node worker process failed or answered without a report."""


class InfeasiblePlanError(ParameterError):
    """The final-phase system has no real solution for these widths."""

    def __init__(self, width: int, p: int | None, E: float, F: float, a_t: float):
        self.width = width
        self.p = p
        self.E = E
        self.F = F
        self.a_t = a_t
        lhs = (E - 2 ** (width - 1) * F) ** 2
        super().__init__(
            f'Infeasible plan for width={width}, p={p}: '
            f'(E - 2^{width - 1}*F)^2 = {lhs:.6g} > a_t^2 = {a_t**2:.6g} '
            f'(E={E:.6g}, F={F:.6g}, a_t={a_t:.6g})'
        )
