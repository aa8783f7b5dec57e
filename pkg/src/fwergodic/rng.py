"""Reproducible uniform digit streams.

Digits come from the raw 64-bit output of the Philox-4x64 counter-based
generator (numpy's ``Philox`` bit generator; its raw stream is stable across
numpy versions and platforms, unlike ``Generator`` methods). Each raw word
``w`` is accepted iff ``w < floor(2**64 / p) * p`` and then mapped to
``w % p``, so accepted digits are exactly uniform on ``{0, ..., p-1}``.

Seed splitting: stream ``j`` of seed ``s`` uses the Philox key ``(s, j)``.
Distinct streams of one seed are therefore independent generators rather
than overlapping windows of a single sequence.
"""

import numpy as np

_MASK64 = (1 << 64) - 1


def _check_seed(seed):
    seed = int(seed)
    if not 0 <= seed <= _MASK64:
        raise ValueError(f"seed must be in [0, 2**64), got {seed}")
    return seed


def uniform_digits(seed, p, count, stream=0):
    """Return ``count`` iid uniform digits in ``[0, p)`` as an int64 array."""
    seed = _check_seed(seed)
    stream = _check_seed(stream)
    count = int(count)
    if count < 0:
        raise ValueError("count must be non-negative")
    bitgen = np.random.Philox(key=[seed, stream])
    limit = np.uint64(((1 << 64) // p) * p)
    out = []
    have = 0
    while have < count:
        need = count - have
        raw = bitgen.random_raw(need + need // 8 + 16)
        kept = raw[raw < limit]
        out.append((kept % np.uint64(p)).astype(np.int64))
        have += kept.size
    if not out:
        return np.zeros(0, dtype=np.int64)
    return np.concatenate(out)[:count]
