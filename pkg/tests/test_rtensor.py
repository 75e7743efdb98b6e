import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subtensor import (
    CapExceeded,
    IndexOutOfRange,
    InvalidParam,
    MultiIndex,
    ShapeMismatch,
    entry,
    generate_tensor,
    interpolate,
    overlap,
    read_dump,
    subtensor_sum,
    write_dump,
)
from subtensor.rtensor import derive_seed, hash_words, mix64

from conftest import naive_subtensor_sum


def test_mix64_reference_value():
    # SplitMix64 finalizer applied to 0x9E3779B97F4A7C15, the first output of a seed-0 SplitMix64
    assert int(mix64(np.uint64(0x9E3779B97F4A7C15))) == 0xE220A8397B1DCDAF


def test_repeated_query_is_bit_identical():
    t = generate_tensor(2, 2, seed=7, backend="dense")
    assert t.dense_entries.size == 4
    a, b = entry(t, (1, 1)), entry(t, (1, 1))
    assert a == b and np.float64(a).tobytes() == np.float64(b).tobytes()


@pytest.mark.parametrize("n,p", [(2, 2), (8, 3), (5, 4)])
def test_dense_and_implicit_agree(n, p):
    d = generate_tensor(n, p, seed=7, backend="dense")
    i = generate_tensor(n, p, seed=7, backend="implicit")
    full = [np.arange(n)] * p
    assert np.array_equal(d.block(full), i.block(full))
    for idx in itertools.islice(itertools.product(range(1, n + 1), repeat=p), 20):
        assert entry(d, idx) == entry(i, idx)


def test_dense_layout_is_row_major_axis_one_slowest():
    t = generate_tensor(3, 2, seed=1, backend="dense")
    assert t.dense_entries[1] == entry(t, (1, 2))
    assert t.dense_entries[3] == entry(t, (2, 1))


def test_cap_exceeded():
    with pytest.raises(CapExceeded):
        generate_tensor(1000, 3, seed=0, backend="dense")


def test_auto_backend_switches_on_cap():
    assert generate_tensor(1000, 3, seed=0, backend="auto").backend == "implicit"
    assert generate_tensor(10, 2, seed=0, backend="auto").backend == "dense"


def test_invalid_params():
    with pytest.raises(InvalidParam):
        generate_tensor(0, 2)
    with pytest.raises(InvalidParam):
        generate_tensor(3, 2, backend="gpu")


def test_entry_range_checks():
    t = generate_tensor(3, 2, seed=0, backend="implicit")
    with pytest.raises(IndexOutOfRange):
        entry(t, (0, 1))
    with pytest.raises(IndexOutOfRange):
        entry(t, (1, 4))
    with pytest.raises(ShapeMismatch):
        entry(t, (1, 1, 1))


def test_unit_variance():
    t = generate_tensor(100, 3, seed=3, backend="implicit")
    x = t.block([np.arange(100)] * 3).ravel()
    # chi-square with 10^6 dof: sd of the mean of squares is sqrt(2/10^6) ~ 0.0014
    assert abs(np.mean(x**2) - 1.0) < 0.01
    assert abs(np.mean(x)) < 0.005


def test_seeds_and_tags_give_distinct_streams():
    a = hash_words(1, [1, 2])
    assert not np.array_equal(a, hash_words(2, [1, 2]))
    assert not np.array_equal(a, hash_words(1, [2, 1]))
    assert not np.array_equal(a, hash_words(1, [1, 2], stream_tag=1))
    assert derive_seed(5, 1, 2) != derive_seed(5, 2, 1)


def test_interpolation_endpoints_exact():
    base = generate_tensor(4, 2, seed=1, backend="dense")
    fresh = generate_tensor(4, 2, seed=99, backend="dense")
    at0 = interpolate(base, 0.0, 99)
    at1 = interpolate(base, math.pi / 2, 99)
    full = [np.arange(4)] * 2
    assert np.array_equal(at0.block(full), base.block(full))
    assert np.array_equal(at1.block(full), fresh.block(full))


def test_interpolation_dense_matches_implicit():
    d = interpolate(generate_tensor(4, 3, seed=1, backend="dense"), 0.4, 5)
    i = interpolate(generate_tensor(4, 3, seed=1, backend="implicit"), 0.4, 5)
    full = [np.arange(4)] * 3
    assert np.array_equal(d.block(full), i.block(full))


def test_interpolation_rejects_bad_tau():
    t = generate_tensor(3, 2, seed=1)
    with pytest.raises(InvalidParam):
        interpolate(t, 2.0, 1)


def test_multiindex_canonical_and_validation():
    mi = MultiIndex(((3, 1), (2, 4)))
    assert mi.subsets == ((1, 3), (2, 4))
    assert mi.p == 2 and mi.k == 2
    with pytest.raises(InvalidParam):
        MultiIndex(((1, 1), (2, 3)))
    with pytest.raises(InvalidParam):
        MultiIndex(((1, 2), (3,)))
    with pytest.raises(IndexOutOfRange):
        MultiIndex(((0, 1), (1, 2)))
    t = generate_tensor(3, 2, seed=0)
    with pytest.raises(IndexOutOfRange):
        MultiIndex(((1, 4), (1, 2))).validate_for(t)


def test_subtensor_sum_k1_is_entry():
    t = generate_tensor(4, 3, seed=2)
    assert subtensor_sum(t, MultiIndex(((2,), (3,), (1,)))) == entry(t, (2, 3, 1))


def test_subtensor_sum_full_tensor():
    t = generate_tensor(4, 3, seed=2, backend="dense")
    mi = MultiIndex(((1, 2, 3, 4),) * 3)
    assert subtensor_sum(t, mi) == pytest.approx(math.fsum(t.dense_entries), rel=0, abs=0)


def test_subtensor_sum_matches_naive_loop(small_tensor):
    rng = np.random.default_rng(0)
    for _ in range(20):
        subsets = [tuple(sorted(rng.choice(5, 2, replace=False) + 1)) for _ in range(3)]
        got = subtensor_sum(small_tensor, MultiIndex(tuple(subsets)))
        assert got == pytest.approx(naive_subtensor_sum(small_tensor, subsets), rel=1e-12)


def test_subtensor_sum_implicit_matches_dense():
    d = generate_tensor(9, 3, seed=4, backend="dense")
    i = generate_tensor(9, 3, seed=4, backend="implicit")
    mi = MultiIndex(((1, 5, 9), (2, 3, 4), (6, 7, 8)))
    assert subtensor_sum(d, mi) == subtensor_sum(i, mi)


def test_overlap_examples():
    a = MultiIndex(((1, 2), (3, 4)))
    assert overlap(a, a).intersections == (2, 2)
    assert overlap(a, MultiIndex(((3, 4), (1, 2)))).intersections == (0, 0)
    assert overlap(a, MultiIndex(((2, 3), (3, 4)))).intersections[0] == 1
    with pytest.raises(ShapeMismatch):
        overlap(a, MultiIndex(((1,), (2,))))


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 6), st.integers(1, 3), st.integers(0, 2**63))
def test_overlap_symmetric_and_bounded(n, p, seed):
    rng = np.random.default_rng(seed % 2**32)
    k = int(rng.integers(1, n + 1))
    a = MultiIndex(tuple(tuple(rng.choice(n, k, replace=False) + 1) for _ in range(p)))
    b = MultiIndex(tuple(tuple(rng.choice(n, k, replace=False) + 1) for _ in range(p)))
    assert overlap(a, b) == overlap(b, a)
    assert all(0 <= x <= k for x in overlap(a, b).intersections)


def test_dump_round_trip(tmp_path):
    t = generate_tensor(4, 3, seed=8, backend="implicit")
    path = tmp_path / "t.bin"
    write_dump(t, path)
    back = read_dump(path)
    assert back.dim_n == 4 and back.order_p == 3 and back.master_seed == 8
    assert np.array_equal(back.block([np.arange(4)] * 3), t.block([np.arange(4)] * 3))
