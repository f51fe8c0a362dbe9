"""Seedable random streams with a platform-independent output sequence.

Every random decision in the package goes through :class:`RngStream`, a
SplitMix64 generator.  Its 64-bit state advances by a fixed odd increment and
each output is a bijective mix of the state, so the ``i``-th output is a pure
function of ``(seed, i)``.  That lets bulk requests be computed vectorized in
numpy while producing exactly the values repeated scalar draws would.
"""

import math
import secrets

import numpy as np

from .exceptions import InvalidParameterError

MASK64 = (1 << 64) - 1
_TWO_POW_64 = 1 << 64
_INV_2_53 = 2.0 ** -53
_GOLDEN = 0x9E3779B97F4A7C15
_SEED_SALT = 0x6A09E667F3BCC909
# below this many words, per-word Python beats numpy's fixed call overhead
_SCALAR_WORDS = 24


def _mix64(z):
    # splitmix64 output function
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def _mix64_array(z):
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


class RngStream:
    """A deterministic stream of random values.

    Parameters
    ----------
    seed : int
        Unsigned 64-bit seed.  Equal seeds give equal streams on every
        platform.
    """

    __slots__ = ("seed", "_state")

    def __init__(self, seed):
        self.seed = check_seed(seed)
        # whitened so nearby seeds do not start on overlapping trajectories
        self._state = _mix64(self.seed ^ _SEED_SALT)

    def __repr__(self):
        return f"RngStream(seed={self.seed})"

    def next_u64(self):
        self._state = (self._state + _GOLDEN) & MASK64
        return _mix64(self._state)

    def next_u64_array(self, n):
        """The next ``n`` raw outputs as a uint64 array."""
        steps = np.arange(1, n + 1, dtype=np.uint64) * np.uint64(_GOLDEN)
        out = _mix64_array(steps + np.uint64(self._state))
        self._state = (self._state + n * _GOLDEN) & MASK64
        return out

    def integers(self, n):
        """Uniform integer in ``[0, n)`` (Lemire's multiply-shift with rejection)."""
        if n < 1:
            raise InvalidParameterError(f"integer range must be >= 1, got {n}")
        m = self.next_u64() * n
        low = m & MASK64
        if low < n:
            threshold = (_TWO_POW_64 - n) % n
            while low < threshold:
                m = self.next_u64() * n
                low = m & MASK64
        return m >> 64

    def uniform(self):
        """Uniform float in ``[0, 1)`` with 53 random bits."""
        return (self.next_u64() >> 11) * _INV_2_53

    def uniform_open(self):
        """Uniform float in ``(0, 1)``; safe to take the log of."""
        return ((self.next_u64() >> 11) + 0.5) * _INV_2_53

    def normal(self):
        """Standard normal draw (Box-Muller, cosine branch only)."""
        radius = math.sqrt(-2.0 * math.log(self.uniform_open()))
        return radius * math.cos(2.0 * math.pi * self.uniform())

    def bytes(self, n):
        """``n`` independent uniform bytes as a uint8 array.

        Bytes are taken little-endian from consecutive 64-bit outputs, so a
        request for ``n`` bytes consumes ``ceil(n / 8)`` raw draws.
        """
        k = (n + 7) // 8
        if k <= _SCALAR_WORDS:
            raw = b"".join(self.next_u64().to_bytes(8, "little") for _ in range(k))
            return np.frombuffer(raw, dtype=np.uint8, count=n)
        words = self.next_u64_array(k).astype("<u8", copy=False)
        return words.view(np.uint8)[:n]


def check_seed(seed):
    """Validate ``seed`` as an unsigned 64-bit integer.

    ``None`` draws a fresh seed from the operating system.
    """
    if seed is None:
        return secrets.randbits(64)
    if isinstance(seed, (bool, np.bool_)) or not isinstance(seed, (int, np.integer)):
        raise InvalidParameterError(f"seed must be an integer, got {type(seed).__name__}")
    seed = int(seed)
    if not 0 <= seed <= MASK64:
        raise InvalidParameterError(f"seed must be in [0, 2**64), got {seed}")
    return seed


def as_stream(rng):
    """Accept an :class:`RngStream`, an integer seed or ``None``."""
    if isinstance(rng, RngStream):
        return rng
    return RngStream(rng)


def derive_seed(master_seed, epoch, sample_index):
    """Per-sample seed from ``(master_seed, epoch, sample_index)``.

    Each input is folded in through a splitmix64 round, so the result is a
    bijection of the last input given the first two and changes with any one
    of them.
    """
    if epoch < 0 or sample_index < 0:
        raise InvalidParameterError("epoch and sample_index must be non-negative")
    h = _mix64((check_seed(master_seed) + _GOLDEN) & MASK64)
    h = _mix64((h ^ (epoch & MASK64)) + 2 * _GOLDEN & MASK64)
    return _mix64((h ^ (sample_index & MASK64)) + 3 * _GOLDEN & MASK64)
