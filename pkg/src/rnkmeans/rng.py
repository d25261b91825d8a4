"""Pinned pseudo-random number generation.

Every seeded component in this package draws from the generator defined
here, so a seed reproduces the same stream bit for bit on any platform
and in any port of this code.  Nothing below depends on numpy's (or any
other library's) generator internals.

Stream definition
-----------------
* Seeding: the 64-bit seed is expanded with SplitMix64; four successive
  SplitMix64 outputs become the xoshiro256** state ``(s0, s1, s2, s3)``.

  SplitMix64 step (all arithmetic mod 2^64)::

      state += 0x9E3779B97F4A7C15
      z = state
      z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
      z = (z ^ (z >> 27)) * 0x94D049BB133111EB
      output = z ^ (z >> 31)

* Raw stream: xoshiro256** (Blackman/Vigna), output
  ``rotl(s1 * 5, 7) * 9`` with the usual state transition.

* Uniform doubles: ``(next_u64() >> 11) * 2**-53`` in [0, 1).

Sampling recipes (pinned; each consumes the shared uniform stream)
------------------------------------------------------------------
* uniform real on [lo, hi): ``lo + (hi - lo) * u``
* uniform integer on [lo, hi] inclusive: ``lo + floor(u * (hi - lo + 1))``,
  clamped to hi against rounding at the top of the range
* normal: Box-Muller; ``u1`` is redrawn while it is exactly 0; the second
  variate of each pair is cached and returned by the next call
* exponential(rate): inverse CDF, ``-log(1 - u) / rate``
* gamma(shape, scale), shape >= 1: Marsaglia-Tsang squeeze; consumes
  normals (through the shared Box-Muller cache) and uniforms; a uniform
  that is exactly 0 accepts (log 0 = -inf passes the squeeze)
* gamma with shape < 1: boost, ``gamma(shape + 1) * u**(1 / shape)``
* lognormal(mu, sigma): ``exp(mu + sigma * normal())``
* poisson(rate): Knuth product-of-uniforms
* bernoulli(p): ``1 if u < p else 0``
* binomial(trials, p): sum of ``trials`` Bernoulli draws

One ``Xoshiro256`` instance owns one uniform stream and one Box-Muller
cache slot; interleaving different sampling methods on one instance is
well defined because every method consumes whole uniforms in documented
order.
"""

import math

_MASK = 0xFFFFFFFFFFFFFFFF
_TWO53_INV = 2.0 ** -53


def _splitmix64_stream(seed):
    state = seed & _MASK
    while True:
        state = (state + 0x9E3779B97F4A7C15) & _MASK
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        yield z ^ (z >> 31)


def _rotl(x, k):
    return ((x << k) | (x >> (64 - k))) & _MASK


class Xoshiro256:
    """xoshiro256** stream seeded via SplitMix64 expansion."""

    def __init__(self, seed):
        if not isinstance(seed, int):
            raise TypeError(f"seed must be an int, got {type(seed).__name__}")
        sm = _splitmix64_stream(seed)
        self._s = [next(sm) for _ in range(4)]
        self._normal_cache = None

    def next_u64(self):
        s = self._s
        result = (_rotl((s[1] * 5) & _MASK, 7) * 9) & _MASK
        t = (s[1] << 17) & _MASK
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def uniform(self):
        """One double in [0, 1)."""
        return (self.next_u64() >> 11) * _TWO53_INV

    def uniforms(self, n):
        return [self.uniform() for _ in range(n)]

    def uniform_real(self, lo, hi):
        if not hi > lo:
            raise ValueError(f"need hi > lo, got [{lo}, {hi})")
        return lo + (hi - lo) * self.uniform()

    def uniform_int(self, lo, hi):
        """Integer uniform on [lo, hi], both ends inclusive."""
        if hi < lo:
            raise ValueError(f"need hi >= lo, got [{lo}, {hi}]")
        span = hi - lo + 1
        value = lo + int(self.uniform() * span)
        return min(value, hi)

    def index(self, n):
        """Uniform index into range(n)."""
        if n <= 0:
            raise ValueError("n must be positive")
        return min(int(self.uniform() * n), n - 1)

    def normal(self, mean=0.0, std=1.0):
        if std < 0:
            raise ValueError("std must be nonnegative")
        if self._normal_cache is not None:
            z = self._normal_cache
            self._normal_cache = None
        else:
            u1 = self.uniform()
            while u1 == 0.0:
                u1 = self.uniform()
            u2 = self.uniform()
            r = math.sqrt(-2.0 * math.log(u1))
            theta = 2.0 * math.pi * u2
            z = r * math.cos(theta)
            self._normal_cache = r * math.sin(theta)
        return mean + std * z

    def exponential(self, rate):
        if rate <= 0:
            raise ValueError("rate must be positive")
        return -math.log(1.0 - self.uniform()) / rate

    def gamma(self, shape, scale):
        if shape <= 0 or scale <= 0:
            raise ValueError("shape and scale must be positive")
        if shape < 1.0:
            # boost: X = gamma(shape + 1) * U^(1/shape)
            return self.gamma(shape + 1.0, scale) * self.uniform() ** (1.0 / shape)
        d = shape - 1.0 / 3.0
        c = 1.0 / (3.0 * math.sqrt(d))
        while True:
            x = self.normal()
            g = 1.0 + c * x
            if g <= 0.0:
                continue
            v = g * g * g
            u = self.uniform()
            if u < 1.0 - 0.0331 * (x * x) * (x * x):
                return d * v * scale
            if u == 0.0 or math.log(u) < 0.5 * x * x + d * (1.0 - v + math.log(v)):
                return d * v * scale

    def lognormal(self, mu, sigma):
        if sigma < 0:
            raise ValueError("sigma must be nonnegative")
        return math.exp(self.normal(mu, sigma))

    def poisson(self, rate):
        if rate <= 0:
            raise ValueError("rate must be positive")
        limit = math.exp(-rate)
        k = 0
        p = 1.0
        while True:
            k += 1
            p *= self.uniform()
            if p <= limit:
                return k - 1

    def bernoulli(self, p):
        if not 0.0 <= p <= 1.0:
            raise ValueError("p must be in [0, 1]")
        return 1 if self.uniform() < p else 0

    def binomial(self, trials, p):
        if trials < 0:
            raise ValueError("trials must be nonnegative")
        if not 0.0 <= p <= 1.0:
            raise ValueError("p must be in [0, 1]")
        return sum(1 for _ in range(trials) if self.uniform() < p)
