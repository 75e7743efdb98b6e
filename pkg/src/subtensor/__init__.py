"""Large average subtensor problem: random tensors, solvers, theory, experiments."""

from .errors import (
    BudgetExceeded,
    CapExceeded,
    HypothesisViolated,
    IndexOutOfRange,
    InvalidParam,
    ShapeMismatch,
    Singular,
    SubtensorError,
)
from .rtensor import (
    MultiIndex,
    OverlapVector,
    TensorInstance,
    entry,
    generate_tensor,
    interpolate,
    overlap,
    read_dump,
    subtensor_average,
    subtensor_sum,
    write_dump,
)
from .algorithms import (
    SolveResult,
    block_partition,
    brute_force_max,
    igpt,
    local_search,
)

__version__ = "0.1.0"
