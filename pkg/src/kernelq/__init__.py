"""Exact stationary queue-length laws and tail asymptotics by the kernel method."""
from .errors import (
    DegenerateLinear,
    InputError,
    KernelQueueError,
    NoConvergence,
    NoPoleSingularity,
    Unstable,
)
from .kernel import (
    TreeFunction,
    build_tree_function,
    composite_tree_root,
    geometric_kernel_root,
    second_fixed_point,
    tree_eval,
)
from .models import (
    PriorityLowFlow,
    RandomService,
    SingleDeterministic,
    StationaryAnalysis,
    TandemSecondQueue,
    analyze,
)
from .pgf import FiniteSupport, GeometricShifted, bernoulli_service, bimodal
from .series import TruncatedSeries

__version__ = "0.1.0"
