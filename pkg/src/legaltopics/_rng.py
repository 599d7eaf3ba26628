"""Deterministic random-stream primitives shared by the sampling kernels.

Every stochastic component derives its stream from (seed, label) so that
results are independent of execution order: two documents, two sweep cells,
or two backends always see the same uniforms. The generator is splitmix64;
the pure-Python and compiled kernels implement the identical recurrence so
their outputs are bitwise equal.
"""

import hashlib

MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_INV_2_53 = 1.0 / 9007199254740992.0  # 2**-53


def derive_stream(seed: int, label: str) -> int:
    """Derive a 64-bit stream seed from a base seed and a string label."""
    key = (seed & MASK64).to_bytes(8, "little")
    digest = hashlib.blake2b(label.encode("utf-8"), digest_size=8, key=key)
    return int.from_bytes(digest.digest(), "little")


def splitmix64_next(state: int) -> tuple[int, float]:
    """Advance a splitmix64 state; return (new_state, uniform in [0, 1))."""
    state = (state + _GAMMA) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    z = z ^ (z >> 31)
    return state, (z >> 11) * _INV_2_53
