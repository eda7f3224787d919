"""Exception hierarchy.

Every error carries the process exit code the CLI maps it to:
2 for bad input, 3 for a mathematically inadmissible model, 4 for
non-convergence.
"""


class KernelQueueError(Exception):
    exit_code = 1


class InputError(KernelQueueError):
    """Malformed or out-of-range input."""

    exit_code = 2


class InvalidProbability(InputError):
    pass


class UnsupportedKind(InputError):
    pass


class NotADistribution(InputError):
    pass


class ZeroOrder(InputError):
    pass


class InadmissibleError(KernelQueueError):
    """The requested quantity does not exist for this model."""

    exit_code = 3


class Unstable(InadmissibleError):
    pass


class NeverEmpty(InadmissibleError):
    pass


class DegenerateLinear(InadmissibleError):
    pass


class DegenerateBoundary(InadmissibleError):
    pass


class NoPoleSingularity(InadmissibleError):
    pass


class BeyondRadius(InadmissibleError):
    pass


class OutOfDomain(InadmissibleError):
    pass


class NearPole(InadmissibleError):
    pass


class NonUnitDenominator(InadmissibleError):
    pass


class NonFiniteResult(InadmissibleError):
    pass


class NoConvergence(KernelQueueError):
    exit_code = 4
