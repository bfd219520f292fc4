"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input lies outside the range an operation is defined on."""

    def __init__(self, parameter, value, expected):
        self.parameter = parameter
        self.value = value
        super().__init__(f"{parameter}={value!r} is out of range; expected {expected}")


class NoSolutionError(ArithmeticError):
    """The k scan found no sign change of the target harmonic on (0, 1)."""

    def __init__(self, m, target, scan_minimum, k_at_minimum):
        self.m = m
        self.target = target
        self.scan_minimum = scan_minimum
        self.k_at_minimum = k_at_minimum
        super().__init__(
            f"no elimination solution at this m (m={m}, harmonic {target}); "
            f"scan minimum |c{target}|/|c1| = {scan_minimum:.3e} at k = {k_at_minimum:.4f}"
        )


class SimulationError(ArithmeticError):
    """Time integration diverged or could not be set up."""

    def __init__(self, message, dt):
        self.dt = dt
        super().__init__(f"{message} (dt={dt:.3e} s)")
