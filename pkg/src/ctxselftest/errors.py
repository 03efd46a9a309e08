"""Exception types shared across the toolkit."""


class SelfTestError(Exception):
    """Base class for all toolkit errors."""


class InvalidArgumentError(SelfTestError, ValueError):
    pass


class GraphSizeError(SelfTestError, ValueError):
    pass


class NotPSDError(SelfTestError, ValueError):
    pass


class ConvergenceError(SelfTestError, RuntimeError):
    pass


class DegenerateOverlapError(SelfTestError, ValueError):
    """A projector vector is orthogonal to the handle, so it carries no behaviour."""


class InfeasibleRealizationError(SelfTestError, ValueError):
    pass


class PreconditionError(SelfTestError, ValueError):
    pass


class UnsupportedGraphError(SelfTestError):
    """No dual certificate is known for the graph and none was supplied."""
