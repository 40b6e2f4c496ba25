"""Counter-based uniform stream.

Draw ``i`` of a stream is ``mix64(key + GOLDEN * (i + 1))``, i.e. SplitMix64
evaluated at position ``i`` without carrying state.  Streams are keyed by
``(seed, shard)`` so any sample can be regenerated from its coordinates alone.
Python-int reference implementation; the vectorized/jitted versions live in
``_kernels``.
"""

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
TO_UNIT = 1.0 / (1 << 53)


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


def stream_key(seed: int, shard: int = 0) -> int:
    """Key for substream ``shard`` of ``seed`` (seed taken mod 2**64)."""
    return mix64(mix64(seed & MASK64) ^ mix64((shard + 1) * GOLDEN))


def derive_seed(seed: int, index: int) -> int:
    """Child seed for the ``index``-th independent task under ``seed``."""
    return mix64((seed & MASK64) ^ mix64(((index + 1) * MIX2) & MASK64))


def bits(key: int, counter: int) -> int:
    return mix64(key + GOLDEN * (counter + 1))


def uniform(key: int, counter: int) -> float:
    """Double in [0, 1) from the top 53 bits."""
    return (bits(key, counter) >> 11) * TO_UNIT
