import numpy as np
import pytest

from negdep.rng import RngStream

# Pinned outputs: the stream is a contract, changing it silently would break
# every recorded seed.
SEED0_U64 = [
    16294208416658607535,
    7960286522194355700,
    487617019471545679,
    17909611376780542444,
]
SEED12345_U64 = [
    2454886589211414944,
    3778200017661327597,
    2205171434679333405,
    3248800117070709450,
]
SEED0_BITS53 = [7956156453446585, 3886858653415212, 238094247788840]
SEED7_PERM10 = [2, 8, 5, 9, 1, 3, 4, 7, 0, 6]


def test_frozen_u64_outputs():
    assert [RngStream(0).u64() for _ in range(1)] == SEED0_U64[:1]
    r = RngStream(0)
    assert [r.u64() for _ in range(4)] == SEED0_U64
    r = RngStream(12345)
    assert [r.u64() for _ in range(4)] == SEED12345_U64


def test_frozen_bits53():
    r = RngStream(0)
    assert [r.bits53() for _ in range(3)] == SEED0_BITS53


def test_frozen_permutation():
    r = RngStream(7)
    assert r.permutation(10) == SEED7_PERM10
    assert r.integer(5) == 3


def test_scalar_vector_agree():
    r1, r2 = RngStream(99), RngStream(99)
    assert [r1.u64() for _ in range(500)] == r2.u64_array(500).tolist()
    r1, r2 = RngStream(99), RngStream(99)
    assert [r1.bits53() for _ in range(100)] == r2.bits53_array(100).tolist()


def test_equal_seeds_equal_streams_100k():
    a = RngStream(321).u64_array(10**5)
    b = RngStream(321).u64_array(10**5)
    assert np.array_equal(a, b)


def test_counter_tracks_consumption():
    r = RngStream(5)
    r.u64()
    r.bits53_array(10)
    assert r.counter == 11


def test_split_deterministic_and_disjoint():
    a = RngStream(42).split(3)
    b = RngStream(42).split(3)
    assert a.seed == b.seed
    assert [a.u64() for _ in range(10)] == [b.u64() for _ in range(10)]
    c = RngStream(42).split(4)
    assert c.seed != a.seed
    parent = RngStream(42)
    assert parent.u64_array(100).tolist() != RngStream(42).split(0).u64_array(100).tolist()


def test_integer_bounds_and_bias_free_small():
    r = RngStream(17)
    draws = [r.integer(5) for _ in range(5000)]
    assert set(draws) <= set(range(5))
    counts = np.bincount(draws, minlength=5)
    # binomial 4-sigma around 1000
    assert np.all(np.abs(counts - 1000) < 4 * np.sqrt(5000 * 0.2 * 0.8))


def test_integer_requires_positive_bound():
    with pytest.raises(ValueError):
        RngStream(0).integer(0)
    assert RngStream(0).integer(1) == 0


def test_permutation_is_permutation():
    r = RngStream(23)
    for n in (1, 2, 5, 31):
        assert sorted(r.permutation(n)) == list(range(n))


def test_uniform01_range():
    u = RngStream(9).uniform01(10**4)
    assert u.min() >= 0.0 and u.max() < 1.0
    assert abs(u.mean() - 0.5) < 4 * (12 ** -0.5) / 100
