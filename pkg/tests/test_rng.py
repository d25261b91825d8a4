"""Tests for the pinned generator.

The reference stream below re-implements the documented recipes as plain
functions over explicit state tuples, so any drift in the class breaks
these tests rather than both drifting together.
"""

import math

import pytest

from rnkmeans.rng import Xoshiro256

MASK = (1 << 64) - 1
TWO53_INV = 2.0 ** -53


def ref_rotl(x, k):
    return ((x << k) | (x >> (64 - k))) & MASK


def ref_seed_state(seed):
    # SplitMix64 expansion, four outputs
    state = []
    s = seed & MASK
    for _ in range(4):
        s = (s + 0x9E3779B97F4A7C15) & MASK
        z = s
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        state.append(z ^ (z >> 31))
    return tuple(state)


def ref_next_u64(state):
    s0, s1, s2, s3 = state
    result = (ref_rotl((s1 * 5) & MASK, 7) * 9) & MASK
    t = (s1 << 17) & MASK
    s2 ^= s0
    s3 ^= s1
    s1 ^= s2
    s0 ^= s3
    s2 ^= t
    s3 = ref_rotl(s3, 45)
    return result, (s0, s1, s2, s3)


def ref_uniform(state):
    r, state = ref_next_u64(state)
    return (r >> 11) * TWO53_INV, state


def ref_normal(state, cache):
    """Box-Muller pair; returns (z, state, cache)."""
    if cache is not None:
        return cache, state, None
    u1, state = ref_uniform(state)
    while u1 == 0.0:
        u1, state = ref_uniform(state)
    u2, state = ref_uniform(state)
    r = math.sqrt(-2.0 * math.log(u1))
    theta = 2.0 * math.pi * u2
    return r * math.cos(theta), state, r * math.sin(theta)


def ref_gamma(state, cache, shape, scale):
    if shape < 1.0:
        y, state, cache = ref_gamma(state, cache, shape + 1.0, scale)
        u, state = ref_uniform(state)
        return y * u ** (1.0 / shape), state, cache
    d = shape - 1.0 / 3.0
    c = 1.0 / (3.0 * math.sqrt(d))
    while True:
        x, state, cache = ref_normal(state, cache)
        g = 1.0 + c * x
        if g <= 0.0:
            continue
        v = g * g * g
        u, state = ref_uniform(state)
        if u < 1.0 - 0.0331 * (x * x) * (x * x):
            return d * v * scale, state, cache
        if u == 0.0 or math.log(u) < 0.5 * x * x + d * (1.0 - v + math.log(v)):
            return d * v * scale, state, cache


def ref_poisson(state, rate):
    limit = math.exp(-rate)
    k = 0
    p = 1.0
    while True:
        k += 1
        u, state = ref_uniform(state)
        p *= u
        if p <= limit:
            return k - 1, state


class TestRawStream:
    @pytest.mark.parametrize("seed", [0, 1, 12345, MASK])
    def test_u64_stream_matches_reference(self, seed):
        rng = Xoshiro256(seed)
        state = ref_seed_state(seed)
        for _ in range(200):
            expected, state = ref_next_u64(state)
            assert rng.next_u64() == expected

    def test_same_seed_same_stream(self):
        a = Xoshiro256(77)
        b = Xoshiro256(77)
        assert [a.next_u64() for _ in range(50)] == [b.next_u64() for _ in range(50)]

    def test_different_seeds_differ(self):
        a = [Xoshiro256(1).next_u64() for _ in range(10)]
        b = [Xoshiro256(2).next_u64() for _ in range(10)]
        assert a != b

    def test_seed_type_checked(self):
        with pytest.raises(TypeError, match="seed must be an int"):
            Xoshiro256(1.5)


class TestUniform:
    def test_uniform_matches_reference(self):
        rng = Xoshiro256(9)
        state = ref_seed_state(9)
        for _ in range(100):
            u, state = ref_uniform(state)
            assert rng.uniform() == u

    def test_uniform_range(self):
        rng = Xoshiro256(3)
        for _ in range(2000):
            u = rng.uniform()
            assert 0.0 <= u < 1.0

    def test_uniforms_is_plain_batch(self):
        rng = Xoshiro256(4)
        batch = rng.uniforms(5)
        single = Xoshiro256(4)
        assert batch == [single.uniform() for _ in range(5)]

    def test_uniform_real_affine(self):
        rng = Xoshiro256(11)
        ref = Xoshiro256(11)
        for _ in range(50):
            u = ref.uniform()
            assert rng.uniform_real(-3.0, 7.0) == -3.0 + 10.0 * u

    def test_uniform_real_rejects_empty_interval(self):
        rng = Xoshiro256(0)
        with pytest.raises(ValueError, match="hi > lo"):
            rng.uniform_real(1.0, 1.0)

    def test_uniform_int_bounds_and_coverage(self):
        rng = Xoshiro256(5)
        seen = set()
        for _ in range(500):
            v = rng.uniform_int(2, 6)
            assert 2 <= v <= 6
            seen.add(v)
        assert seen == {2, 3, 4, 5, 6}

    def test_uniform_int_single_value(self):
        rng = Xoshiro256(0)
        assert all(rng.uniform_int(4, 4) == 4 for _ in range(20))

    def test_uniform_int_rejects_reversed(self):
        with pytest.raises(ValueError, match="hi >= lo"):
            Xoshiro256(0).uniform_int(3, 2)

    def test_index_bounds_and_errors(self):
        rng = Xoshiro256(8)
        for _ in range(300):
            assert 0 <= rng.index(7) < 7
        with pytest.raises(ValueError, match="positive"):
            rng.index(0)


class TestNormal:
    def test_box_muller_pair_and_cache(self):
        rng = Xoshiro256(21)
        ref = Xoshiro256(21)
        u1 = ref.uniform()
        u2 = ref.uniform()
        r = math.sqrt(-2.0 * math.log(u1))
        theta = 2.0 * math.pi * u2
        assert rng.normal() == r * math.cos(theta)
        # second draw comes from the cache, consumes no uniforms
        assert rng.normal() == r * math.sin(theta)
        assert rng.uniform() == ref.uniform()

    def test_stream_matches_reference(self):
        rng = Xoshiro256(33)
        state = ref_seed_state(33)
        cache = None
        for _ in range(101):
            z, state, cache = ref_normal(state, cache)
            assert rng.normal() == z

    def test_affine_transform(self):
        z = Xoshiro256(6).normal()
        assert Xoshiro256(6).normal(10.0, 0.5) == 10.0 + 0.5 * z

    def test_rejects_negative_std(self):
        with pytest.raises(ValueError, match="nonnegative"):
            Xoshiro256(0).normal(0.0, -1.0)


class TestDerivedDistributions:
    def test_exponential_inverse_cdf(self):
        rng = Xoshiro256(14)
        ref = Xoshiro256(14)
        for _ in range(50):
            u = ref.uniform()
            assert rng.exponential(0.5) == -math.log(1.0 - u) / 0.5

    def test_exponential_rejects_bad_rate(self):
        with pytest.raises(ValueError, match="positive"):
            Xoshiro256(0).exponential(0.0)

    @pytest.mark.parametrize("shape,scale", [(1.0, 2.0), (2.5, 1.0), (0.5, 3.0)])
    def test_gamma_matches_reference(self, shape, scale):
        rng = Xoshiro256(42)
        state = ref_seed_state(42)
        cache = None
        for _ in range(60):
            g, state, cache = ref_gamma(state, cache, shape, scale)
            assert rng.gamma(shape, scale) == g

    def test_gamma_rejects_bad_params(self):
        with pytest.raises(ValueError):
            Xoshiro256(0).gamma(0.0, 1.0)
        with pytest.raises(ValueError):
            Xoshiro256(0).gamma(1.0, 0.0)

    def test_lognormal_is_exp_normal(self):
        rng = Xoshiro256(17)
        ref = Xoshiro256(17)
        for _ in range(40):
            assert rng.lognormal(0.3, 1.2) == math.exp(ref.normal(0.3, 1.2))

    def test_poisson_matches_reference(self):
        rng = Xoshiro256(51)
        state = ref_seed_state(51)
        for _ in range(80):
            k, state = ref_poisson(state, 2.0)
            assert rng.poisson(2.0) == k

    def test_poisson_rejects_bad_rate(self):
        with pytest.raises(ValueError, match="positive"):
            Xoshiro256(0).poisson(-1.0)

    def test_bernoulli_thresholds_uniform(self):
        rng = Xoshiro256(23)
        ref = Xoshiro256(23)
        for _ in range(100):
            assert rng.bernoulli(0.3) == (1 if ref.uniform() < 0.3 else 0)

    def test_bernoulli_edge_probabilities(self):
        rng = Xoshiro256(2)
        assert all(rng.bernoulli(0.0) == 0 for _ in range(20))
        assert all(rng.bernoulli(1.0) == 1 for _ in range(20))
        with pytest.raises(ValueError, match=r"\[0, 1\]"):
            rng.bernoulli(1.5)

    def test_binomial_is_bernoulli_sum(self):
        rng = Xoshiro256(31)
        ref = Xoshiro256(31)
        for _ in range(30):
            want = sum(1 for _ in range(10) if ref.uniform() < 0.4)
            assert rng.binomial(10, 0.4) == want

    def test_binomial_rejects_bad_params(self):
        with pytest.raises(ValueError, match="nonnegative"):
            Xoshiro256(0).binomial(-1, 0.5)
        with pytest.raises(ValueError, match=r"\[0, 1\]"):
            Xoshiro256(0).binomial(3, -0.1)


class TestInterleaving:
    def test_mixed_draws_are_reproducible(self):
        def draw(seed):
            rng = Xoshiro256(seed)
            return (rng.normal(), rng.poisson(3.0), rng.gamma(0.7, 2.0),
                    rng.uniform(), rng.normal(), rng.binomial(5, 0.5))

        assert draw(99) == draw(99)

    def test_gamma_shares_normal_cache(self):
        # the cached Box-Muller sine must be consumed by a following gamma
        rng = Xoshiro256(63)
        state = ref_seed_state(63)
        z, state, cache = ref_normal(state, None)
        assert rng.normal() == z
        assert cache is not None
        g, state, cache = ref_gamma(state, cache, 2.0, 1.0)
        assert rng.gamma(2.0, 1.0) == g
