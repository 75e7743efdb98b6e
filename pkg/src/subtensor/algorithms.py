"""Solvers for the large average subtensor problem.

* ``igpt`` -- the incremental greedy procedure over a block partition of [N].
* ``brute_force_max`` -- exact maximum by enumerating p-tuples of k-subsets.
* ``local_search`` -- alternating exact per-axis top-k improvement.

Tie-breaking is always towards the smallest index so runs are reproducible.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetExceeded, InvalidParam
from .rtensor import DEFAULT_EVAL_BUDGET, MultiIndex, TensorInstance, subtensor_sum
from .theory.scalar import gauss_max_centering, gauss_max_window, igpt_step_weights

__all__ = [
    "BlockPartition",
    "SolveStats",
    "SolveResult",
    "block_partition",
    "igpt",
    "brute_force_max",
    "local_search",
    "k_subsets",
    "all_subtensor_sums",
    "count_above",
    "igpt_step_diagnostics",
    "DEFAULT_ENUM_BUDGET",
]

DEFAULT_ENUM_BUDGET = 10**8
# cap on the float64 working set of one vectorized enumeration chunk
_CHUNK_FLOATS = 2**23


@dataclass(frozen=True)
class BlockPartition:
    """Consecutive blocks P_1..P_k of size N // k (1-based) plus the unused tail."""

    blocks: tuple[tuple[int, ...], ...]
    leftover: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.blocks[0])


def block_partition(n: int, k: int) -> BlockPartition:
    if not 1 <= k <= n:
        raise InvalidParam(f"need 1 <= k <= n, got n={n}, k={k}")
    b = n // k
    blocks = tuple(tuple(range((i - 1) * b + 1, i * b + 1)) for i in range(1, k + 1))
    return BlockPartition(blocks, tuple(range(k * b + 1, n + 1)))


@dataclass
class SolveStats:
    entries_evaluated: int = 0
    iterations: int = 0
    wall_nanos: int = 0


@dataclass
class SolveResult:
    solution: MultiIndex
    value_sum: float
    value_average: float
    algorithm: str
    stats: SolveStats
    # igpt: the initial maximum and the per-step maxima M[j, t] (shape (p, k-1))
    initial_max: float | None = None
    step_maxima: np.ndarray | None = field(default=None, repr=False)
    running_sum: float | None = None
    # local_search: objective after the initial point and after each accepted move
    history: list[float] = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "solution": self.solution.to_list(),
            "value_sum": self.value_sum,
            "value_average": self.value_average,
            "stats": {
                "entries_evaluated": self.stats.entries_evaluated,
                "iterations": self.stats.iterations,
                "wall_nanos": self.stats.wall_nanos,
            },
        }


def _finish(t, sets, algorithm, stats, start, budget, **extra) -> SolveResult:
    mi = MultiIndex.from_zero_based(sets)
    total = subtensor_sum(t, mi, budget)
    stats.wall_nanos = time.perf_counter_ns() - start
    return SolveResult(mi, total, total / float(mi.k) ** mi.p, algorithm, stats, **extra)


def _axis_sums(block: np.ndarray, u: int) -> np.ndarray:
    """Sum a block over every axis except ``u``."""
    return np.moveaxis(block, u, 0).reshape(block.shape[u], -1).sum(axis=1)


def igpt(t: TensorInstance, k: int, budget: int = DEFAULT_EVAL_BUDGET) -> SolveResult:
    """Incremental greedy procedure for tensors.

    Axes 1..p-1 start at the smallest index of P_1 and axis p at the best
    index of P_1 against them.  Then for t = 2..k and u = 1..p in order,
    axis u gains the index of P_t maximizing the sum over the current
    cross-product of the other axes; axes before u already hold t indices,
    axes after u still hold t - 1.
    """
    start = time.perf_counter_ns()
    n, p = t.dim_n, t.order_p
    if not 1 <= k <= n:
        raise InvalidParam(f"need 1 <= k <= n, got n={n}, k={k}")
    b = n // k
    if b * k ** (p - 1) > budget:
        raise BudgetExceeded("a single IGPT step exceeds the evaluation budget")
    stats = SolveStats()
    block = [np.arange((i - 1) * b, i * b) for i in range(1, k + 1)]

    sets: list[list[int]] = [[0] for _ in range(p - 1)]
    vals = t.block([[s[0]] for s in sets] + [block[0]]).reshape(-1)
    j = int(np.argmax(vals))
    sets.append([int(block[0][j])])
    initial = float(vals[j])
    stats.entries_evaluated += vals.size
    stats.iterations = 1

    steps = np.zeros((p, max(k - 1, 0)))
    running = initial
    for step in range(2, k + 1):
        cand = block[step - 1]
        for u in range(p):
            axes = [np.asarray(s) for s in sets]
            axes[u] = cand
            blk = t.block(axes)
            sums = _axis_sums(blk, u)
            j = int(np.argmax(sums))
            sets[u].append(int(cand[j]))
            steps[u, step - 2] = sums[j]
            running += float(sums[j])
            stats.entries_evaluated += blk.size
        stats.iterations += 1
    return _finish(
        t, sets, "igpt", stats, start, budget,
        initial_max=initial, step_maxima=steps, running_sum=running,
    )


def igpt_step_diagnostics(result: SolveResult, n: int, k: int) -> dict:
    """Normalized step maxima M_{j,t} / sqrt(Pi_{j,t}) against b_{N/k}.

    Returns the normalized values, the centering ``b`` and the window
    half-width, and the fraction of steps landing inside the window.
    """
    if result.step_maxima is None:
        raise InvalidParam("result carries no IGPT step maxima")
    p = result.solution.p
    b = n // k
    normalized = [result.initial_max]
    if k > 1:
        normalized += list((result.step_maxima / np.sqrt(igpt_step_weights(k, p))).ravel())
    normalized = np.asarray(normalized)
    centre, width = gauss_max_centering(b), gauss_max_window(b)
    inside = np.abs(normalized - centre) <= width
    return {
        "normalized": normalized,
        "b": centre,
        "window": width,
        "fraction_inside": float(inside.mean()),
    }


def k_subsets(n: int, k: int) -> np.ndarray:
    """All k-subsets of range(n) in lexicographic order, shape (C(n,k), k)."""
    return np.array(list(itertools.combinations(range(n), k)), dtype=np.int64).reshape(-1, k)


def _contract(x: np.ndarray, combos: np.ndarray, axis: int) -> np.ndarray:
    # replace index axis `axis` of length N by the C subset sums along it
    return x.take(combos, axis=axis).sum(axis=axis + 1)


def _check_enum(t: TensorInstance, k: int, budget: int) -> int:
    if t.dense is None:
        raise InvalidParam("enumeration needs the dense backend")
    if not 1 <= k <= t.dim_n:
        raise InvalidParam(f"need 1 <= k <= n, got k={k}")
    c = math.comb(t.dim_n, k)
    if c**t.order_p > budget:
        raise BudgetExceeded(
            f"C({t.dim_n},{k})^{t.order_p} = {c**t.order_p} tuples exceeds budget {budget}"
        )
    return c


def _first_axis_chunks(t: TensorInstance, c: int, k: int) -> int:
    """Rows of first-axis subsets per chunk so intermediates stay under the cap."""
    n, p = t.dim_n, t.order_p
    sizes = [k * n ** (p - 1)]
    sizes += [c**q * k * n ** (p - q - 1) for q in range(1, p - 1)]
    sizes.append(c ** (p - 2) * n if p > 1 else n)
    return max(1, _CHUNK_FLOATS // max(sizes))


def brute_force_max(
    t: TensorInstance, k: int, budget: int = DEFAULT_ENUM_BUDGET
) -> SolveResult:
    """Exact ground state by enumeration.

    Subset sums are built axis by axis (axes 1..p-1 are contracted against
    every k-subset in lexicographic order); the last axis is then solved
    exactly by a top-k selection of its marginal sums.  Ties resolve to the
    lexicographically smallest tuple.
    """
    start = time.perf_counter_ns()
    c = _check_enum(t, k, budget)
    p, n = t.order_p, t.dim_n
    combos = k_subsets(n, k)
    stats = SolveStats()
    a = t.dense

    best_val, best_prefix, best_row = -math.inf, None, None
    rows = _first_axis_chunks(t, c, k)
    first_axis = combos if p > 1 else np.zeros((1, 0), dtype=np.int64)
    for lo in range(0, len(first_axis), rows):
        if p == 1:
            marg = a[None, :]
            prefix_shape = (1,)
        else:
            x = _contract(a, combos[lo : lo + rows], axis=0)
            for q in range(1, p - 1):
                x = _contract(x, combos, axis=q)
            prefix_shape = x.shape[:-1]
            marg = x.reshape(-1, n)
        top = -np.sort(-marg, axis=1)[:, :k].sum(axis=1)
        stats.iterations += len(top)
        j = int(np.argmax(top))
        if top[j] > best_val:
            best_val = float(top[j])
            best_prefix = np.unravel_index(j, prefix_shape)
            best_prefix = (lo + best_prefix[0],) + tuple(best_prefix[1:]) if p > 1 else ()
            best_row = marg[j]
    stats.entries_evaluated = n**p
    last = np.sort(np.argsort(-best_row, kind="stable")[:k])
    sets = [combos[i] for i in best_prefix] + [last]
    return _finish(t, sets, "brute", stats, start, DEFAULT_EVAL_BUDGET)


def all_subtensor_sums(
    t: TensorInstance, k: int, budget: int = DEFAULT_ENUM_BUDGET
) -> tuple[np.ndarray, np.ndarray]:
    """Every subtensor sum, shape (C,)*p, indexed by lexicographic subset rank."""
    _check_enum(t, k, budget)
    combos = k_subsets(t.dim_n, k)
    x = t.dense
    for q in range(t.order_p):
        x = _contract(x, combos, axis=q)
    return x, combos


def count_above(t: TensorInstance, k: int, level: float, budget: int = DEFAULT_ENUM_BUDGET) -> int:
    """Empirical N_E: the number of subtensors whose average exceeds ``level``."""
    sums, _ = all_subtensor_sums(t, k, budget)
    return int((sums / float(k) ** t.order_p > level).sum())


def local_search(
    t: TensorInstance,
    k: int,
    init: MultiIndex | None = None,
    seed: int | None = None,
    budget: int = DEFAULT_EVAL_BUDGET,
    max_cycles: int = 10_000,
) -> SolveResult:
    """Alternating maximization until no axis can be improved.

    Each move replaces one axis by the top-k indices of its marginal sums
    against the other (fixed) axes, and is accepted only if it strictly
    increases the objective.  Without ``init`` a random start is drawn
    from ``seed``.
    """
    start = time.perf_counter_ns()
    n, p = t.dim_n, t.order_p
    if not 1 <= k <= n:
        raise InvalidParam(f"need 1 <= k <= n, got n={n}, k={k}")
    if n * k ** (p - 1) > budget:
        raise BudgetExceeded(f"one axis update needs {n * k ** (p - 1)} entries > budget {budget}")
    if init is None:
        rng = np.random.default_rng(seed)
        sets = [np.sort(rng.choice(n, size=k, replace=False)) for _ in range(p)]
    else:
        init.validate_for(t)
        if init.k != k:
            raise InvalidParam("init has the wrong subset size")
        sets = init.zero_based()

    stats = SolveStats()
    full = np.arange(n)
    history: list[float] = []
    for cycle in range(max_cycles):
        changed = False
        for u in range(p):
            axes = list(sets)
            axes[u] = full
            blk = t.block(axes)
            stats.entries_evaluated += blk.size
            marg = _axis_sums(blk, u)
            if not history:
                history.append(float(marg[sets[u]].sum()))
            new = np.sort(np.argsort(-marg, kind="stable")[:k])
            gain = float(marg[new].sum())
            if gain > float(marg[sets[u]].sum()):
                sets[u] = new
                history.append(gain)
                changed = True
        stats.iterations = cycle + 1
        if not changed:
            break
    return _finish(t, sets, "local_search", stats, start, budget, history=history)
