"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid setup data (grid, partition, scenario file, ...).

    ``errors`` collects every problem found, not just the first.
    """

    def __init__(self, errors):
        if isinstance(errors, str):
            errors = [errors]
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class NumericalError(RuntimeError):
    """The time loop produced a non-finite state and was aborted.

    Carries the last valid simulation time and a short diagnostic of the
    offending cells so the failure can be reported without the full state.
    """

    def __init__(self, message, time=None, state=None):
        super().__init__(message)
        self.time = time
        self.state = state
