"""Gaussian random tensors with random-access entries.

Every entry of an order-p tensor is a standard normal deviate computed from a
counter-based hash of ``(seed, i_1, ..., i_p)``.  A tensor can therefore be
held densely in memory or queried entry-by-entry (the *implicit* backend)
and both give bit-identical values.

Entry generation
----------------
All arithmetic is on unsigned 64-bit words, wrapping mod 2**64::

    mix64(z):                       # SplitMix64 finalizer
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
        z = (z ^ (z >> 27)) * 0x94D049BB133111EB
        return z ^ (z >> 31)

    s = mix64(seed + GOLDEN * (stream_tag + 1))
    for i in (i_1, ..., i_p):       # 1-based indices
        s = mix64(s + GOLDEN * i)
    w1 = mix64(s ^ WORD1)
    w2 = mix64(s ^ WORD2)
    u1 = ((w1 >> 11) + 1) * 2**-53  # in (0, 1]
    u2 = (w2 >> 11) * 2**-53        # in [0, 1)
    A = sqrt(-2 log u1) * cos(2 pi u2)

with ``GOLDEN = 0x9E3779B97F4A7C15``, ``WORD1 = 0x5851F42D4C957F2D`` and
``WORD2 = 0x14057B7EF767814F``.  Tensor entries use ``stream_tag = 0``.

Dense storage is row-major with axis 1 slowest.  Indices are 1-based at the
public surface (``entry``, ``MultiIndex``, dump files) and 0-based inside
``TensorInstance.block``.
"""

from __future__ import annotations

import itertools
import math
import struct
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    BudgetExceeded,
    CapExceeded,
    IndexOutOfRange,
    InvalidParam,
    ShapeMismatch,
)

__all__ = [
    "TensorInstance",
    "MultiIndex",
    "OverlapVector",
    "generate_tensor",
    "interpolate",
    "entry",
    "subtensor_sum",
    "subtensor_average",
    "overlap",
    "mix64",
    "hash_words",
    "derive_seed",
    "write_dump",
    "read_dump",
    "DEFAULT_DENSE_CAP",
    "DEFAULT_EVAL_BUDGET",
]

DEFAULT_DENSE_CAP = 2**28
DEFAULT_EVAL_BUDGET = 2**30

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_WORD1 = np.uint64(0x5851F42D4C957F2D)
_WORD2 = np.uint64(0x14057B7EF767814F)
_S30, _S27, _S31, _S11 = (np.uint64(s) for s in (30, 27, 31, 11))
_TWO_M53 = 2.0**-53
_MASK64 = (1 << 64) - 1

DUMP_MAGIC = b"LAST1"
_DUMP_HEADER = struct.Struct("<5sQQQB")


def mix64(z):
    """SplitMix64 finalizer applied elementwise to a uint64 array."""
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> _S30)) * _M1
        z = (z ^ (z >> _S27)) * _M2
        return z ^ (z >> _S31)


def _u64(x) -> np.ndarray:
    if isinstance(x, (int, np.integer)):
        return np.asarray(int(x) & _MASK64, dtype=np.uint64)
    return np.asarray(x).astype(np.uint64)


def _absorb(state, index):
    with np.errstate(over="ignore"):
        return mix64(state + GOLDEN * _u64(index))


def _root_state(seed: int, stream_tag: int = 0) -> np.ndarray:
    with np.errstate(over="ignore"):
        return mix64(_u64(seed) + GOLDEN * _u64(stream_tag + 1))


def hash_words(seed: int, indices: Sequence, stream_tag: int = 0) -> np.ndarray:
    """Fold ``indices`` (broadcastable integer arrays) into 64-bit states."""
    s = _root_state(seed, stream_tag)
    for i in indices:
        s = _absorb(s, i)
    return s


def _normal_from_state(s: np.ndarray) -> np.ndarray:
    w1 = mix64(s ^ _WORD1)
    w2 = mix64(s ^ _WORD2)
    u1 = ((w1 >> _S11) + np.uint64(1)).astype(np.float64) * _TWO_M53
    u2 = (w2 >> _S11).astype(np.float64) * _TWO_M53
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


def derive_seed(master_seed: int, *tags: int) -> int:
    """Derive a 64-bit child seed from ``master_seed`` and integer tags."""
    s = hash_words(master_seed, tags, stream_tag=1)
    return int(mix64(s ^ _WORD1))


def _gaussian_mesh(seed: int, axes: Sequence[np.ndarray]) -> np.ndarray:
    """Entries on the open mesh spanned by 1-based index vectors ``axes``."""
    p = len(axes)
    s = _root_state(seed)
    for q, ax in enumerate(axes):
        shape = [1] * p
        shape[q] = len(ax)
        s = _absorb(s, np.asarray(ax, dtype=np.int64).reshape(shape))
    return _normal_from_state(s)


def _trig(tau: float) -> tuple[float, float]:
    # exact endpoints: cos(pi/2) is 6e-17 in floating point
    if tau == 0.0:
        return 1.0, 0.0
    if tau == math.pi / 2:
        return 0.0, 1.0
    return math.cos(tau), math.sin(tau)


@dataclass(frozen=True)
class TensorInstance:
    """A seeded order-p Gaussian tensor over ``[N]^p``.

    With ``interpolation=(tau, fresh_seed)`` the entries are
    ``cos(tau) * A0 + sin(tau) * A1`` where ``A0`` is generated from
    ``master_seed`` and ``A1`` from ``fresh_seed``.
    """

    order_p: int
    dim_n: int
    backend: str
    master_seed: int
    dense: np.ndarray | None = field(default=None, repr=False, compare=False)
    interpolation: tuple[float, int] | None = None

    @property
    def dense_entries(self) -> np.ndarray | None:
        return None if self.dense is None else self.dense.reshape(-1)

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.dim_n,) * self.order_p

    def block(self, axes: Sequence[np.ndarray]) -> np.ndarray:
        """Entries on the open mesh of 0-based index vectors, one per axis."""
        if len(axes) != self.order_p:
            raise ShapeMismatch(f"expected {self.order_p} index vectors, got {len(axes)}")
        axes = [np.asarray(a, dtype=np.int64).reshape(-1) for a in axes]
        for a in axes:
            if a.size and (a.min() < 0 or a.max() >= self.dim_n):
                raise IndexOutOfRange(f"index outside [1, {self.dim_n}]")
        if self.dense is not None:
            return self.dense[np.ix_(*axes)]
        ones = [a + 1 for a in axes]
        base = _gaussian_mesh(self.master_seed, ones)
        if self.interpolation is None:
            return base
        tau, fresh_seed = self.interpolation
        c, s = _trig(tau)
        return c * base + s * _gaussian_mesh(fresh_seed, ones)


def _check_dims(n: int, p: int) -> None:
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise InvalidParam(f"n must be a positive integer, got {n!r}")
    if not isinstance(p, (int, np.integer)) or p < 1:
        raise InvalidParam(f"p must be a positive integer, got {p!r}")


def _materialize(n: int, p: int, seed: int, interpolation) -> np.ndarray:
    full = [np.arange(1, n + 1)] * p
    dense = _gaussian_mesh(seed, full)
    if interpolation is not None:
        tau, fresh_seed = interpolation
        c, s = _trig(tau)
        dense = c * dense + s * _gaussian_mesh(fresh_seed, full)
    dense.setflags(write=False)
    return dense


def generate_tensor(
    n: int,
    p: int,
    k_hint: int | None = None,
    seed: int = 0,
    backend: str = "dense",
    cap: int = DEFAULT_DENSE_CAP,
) -> TensorInstance:
    """Create a seeded Gaussian tensor.

    ``backend`` is ``"dense"``, ``"implicit"`` or ``"auto"`` (dense when
    ``n**p <= cap``).  ``k_hint`` is validated against ``n`` but otherwise
    only documents the intended subset size.
    """
    _check_dims(n, p)
    if k_hint is not None and not 1 <= k_hint <= n:
        raise InvalidParam(f"k_hint must lie in [1, n], got {k_hint}")
    if backend == "auto":
        backend = "dense" if n**p <= cap else "implicit"
    if backend == "implicit":
        return TensorInstance(p, n, "implicit", int(seed) & _MASK64)
    if backend != "dense":
        raise InvalidParam(f"unknown backend {backend!r}")
    if n**p > cap:
        raise CapExceeded(f"dense tensor needs {n}^{p} = {n**p} entries > cap {cap}")
    seed = int(seed) & _MASK64
    return TensorInstance(p, n, "dense", seed, _materialize(n, p, seed, None))


def interpolate(t: TensorInstance, tau: float, fresh_seed: int) -> TensorInstance:
    """Return the correlated copy ``cos(tau) * t + sin(tau) * fresh``."""
    if not 0.0 <= tau <= math.pi / 2:
        raise InvalidParam(f"tau must lie in [0, pi/2], got {tau}")
    if t.interpolation is not None:
        raise InvalidParam("tensor is already interpolated")
    interp = (float(tau), int(fresh_seed) & _MASK64)
    dense = None
    if t.backend == "dense":
        dense = _materialize(t.dim_n, t.order_p, t.master_seed, interp)
    return TensorInstance(t.order_p, t.dim_n, t.backend, t.master_seed, dense, interp)


def entry(t: TensorInstance, idx: Sequence[int]) -> float:
    """Value of ``A[i_1, ..., i_p]`` for 1-based indices."""
    if len(idx) != t.order_p:
        raise ShapeMismatch(f"expected {t.order_p} indices, got {len(idx)}")
    for i in idx:
        if not 1 <= i <= t.dim_n:
            raise IndexOutOfRange(f"index {i} outside [1, {t.dim_n}]")
    return float(t.block([[i - 1] for i in idx]).reshape(()))


@dataclass(frozen=True)
class MultiIndex:
    """A p-tuple of k-subsets of ``[N]``, stored 1-based and sorted."""

    subsets: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        subsets = tuple(tuple(sorted(int(i) for i in s)) for s in self.subsets)
        if not subsets:
            raise InvalidParam("a MultiIndex needs at least one axis")
        k = len(subsets[0])
        if k == 0:
            raise InvalidParam("subsets must be non-empty")
        for s in subsets:
            if len(s) != k:
                raise InvalidParam("all subsets must have the same size k")
            if len(set(s)) != k:
                raise InvalidParam(f"subset {s} has repeated indices")
            if s[0] < 1:
                raise IndexOutOfRange(f"subset {s} has an index below 1")
        object.__setattr__(self, "subsets", subsets)

    @classmethod
    def from_zero_based(cls, axes: Iterable[Iterable[int]]) -> "MultiIndex":
        return cls(tuple(tuple(int(i) + 1 for i in a) for a in axes))

    @property
    def p(self) -> int:
        return len(self.subsets)

    @property
    def k(self) -> int:
        return len(self.subsets[0])

    def zero_based(self) -> list[np.ndarray]:
        return [np.asarray(s, dtype=np.int64) - 1 for s in self.subsets]

    def validate_for(self, t: TensorInstance) -> None:
        if self.p != t.order_p:
            raise ShapeMismatch(f"MultiIndex has {self.p} axes, tensor has order {t.order_p}")
        for s in self.subsets:
            if s[-1] > t.dim_n:
                raise IndexOutOfRange(f"subset {s} exceeds N = {t.dim_n}")

    def to_list(self) -> list[list[int]]:
        return [list(s) for s in self.subsets]


@dataclass(frozen=True)
class OverlapVector:
    intersections: tuple[int, ...]
    k: int

    def __post_init__(self):
        if any(not 0 <= a <= self.k for a in self.intersections):
            raise InvalidParam(f"overlaps must lie in [0, {self.k}]")

    def fractions(self) -> np.ndarray:
        return np.asarray(self.intersections, dtype=float) / self.k


def _fsum_block(block: np.ndarray) -> float:
    return math.fsum(block.ravel().tolist())


def subtensor_sum(
    t: TensorInstance, mi: MultiIndex, budget: int = DEFAULT_EVAL_BUDGET
) -> float:
    """Correctly rounded sum of the ``k**p`` entries addressed by ``mi``."""
    mi.validate_for(t)
    if mi.k**mi.p > budget:
        raise BudgetExceeded(f"k^p = {mi.k**mi.p} terms exceeds budget {budget}")
    axes = mi.zero_based()
    chunk = max(1, 2**22 // max(1, mi.k ** (mi.p - 1)))
    if len(axes[0]) <= chunk:
        return _fsum_block(t.block(axes))
    parts = (
        t.block([axes[0][s : s + chunk], *axes[1:]]).ravel().tolist()
        for s in range(0, len(axes[0]), chunk)
    )
    return math.fsum(itertools.chain.from_iterable(parts))


def subtensor_average(t: TensorInstance, mi: MultiIndex, budget: int = DEFAULT_EVAL_BUDGET) -> float:
    return subtensor_sum(t, mi, budget) / float(mi.k) ** mi.p


def overlap(mi1: MultiIndex, mi2: MultiIndex) -> OverlapVector:
    if mi1.p != mi2.p or mi1.k != mi2.k:
        raise ShapeMismatch("multi-indices differ in p or k")
    return OverlapVector(
        tuple(len(set(a) & set(b)) for a, b in zip(mi1.subsets, mi2.subsets)), mi1.k
    )


def write_dump(t: TensorInstance, path, cap: int = DEFAULT_DENSE_CAP) -> None:
    """Write ``LAST1`` header then little-endian float64 entries, row-major."""
    if t.dim_n**t.order_p > cap:
        raise CapExceeded(f"dump needs {t.dim_n**t.order_p} entries > cap {cap}")
    data = t.dense
    if data is None:
        data = t.block([np.arange(t.dim_n)] * t.order_p)
    flag = 0 if t.backend == "dense" else 1
    with open(path, "wb") as fh:
        fh.write(_DUMP_HEADER.pack(DUMP_MAGIC, t.dim_n, t.order_p, t.master_seed, flag))
        fh.write(np.ascontiguousarray(data, dtype="<f8").tobytes())


def read_dump(path) -> TensorInstance:
    """Load a dump as a dense tensor; the header's backend flag is informational."""
    with open(path, "rb") as fh:
        raw = fh.read()
    magic, n, p, seed, _flag = _DUMP_HEADER.unpack_from(raw)
    if magic != DUMP_MAGIC:
        raise InvalidParam(f"bad magic {magic!r}")
    body = np.frombuffer(raw, dtype="<f8", offset=_DUMP_HEADER.size)
    if body.size != n**p:
        raise ShapeMismatch(f"dump holds {body.size} entries, header implies {n**p}")
    dense = body.astype(np.float64).reshape((n,) * p)
    dense.setflags(write=False)
    return TensorInstance(p, n, "dense", seed, dense)
