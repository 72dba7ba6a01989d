"""Deterministic 64-bit random streams.

Every simulation in this package draws from the splitmix64 generator defined
here, bit for bit:

    state    <- (state + 0x9E3779B97F4A7C15) mod 2^64
    z        <- state
    z        <- (z XOR (z >> 30)) * 0xBF58476D1CE4E5B9   mod 2^64
    z        <- (z XOR (z >> 27)) * 0x94D049BB133111EB   mod 2^64
    output   <- z XOR (z >> 31)

Derived quantities (also normative):

  * uniform(): (next_u64() >> 11) * 2^-53, a double in [0, 1).
  * bernoulli(p): uniform() < p.
  * below(n): next_u64() % n.  The modulo method is intentional; its bias is
    ~ n / 2^64 and irrelevant at the degrees this package ever draws over.
  * stream i of master seed s: seed = mix64((s + (i+1) * 0x9E3779B97F4A7C15)
    mod 2^64), i.e. the i-th output of the splitmix64 sequence seeded at s.

The compiled kernels implement the same construction with uint64 arithmetic;
both lanes produce identical streams on every platform (IEEE-754 doubles).
"""

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MULT1 = 0xBF58476D1CE4E5B9
_MULT2 = 0x94D049BB133111EB
_UNIT = 1.0 / 9007199254740992.0  # 2^-53

# Salt for the auxiliary stream a run may need next to its main one (the
# coupled-run continuation coins). Any fixed constant works; this one is the
# first constant of the pcg-family mix function, chosen once and frozen.
AUX_SALT = 0xD1B54A32D192ED03


def mix64(z: int) -> int:
    """The splitmix64 output function on a 64-bit integer."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MULT1) & MASK64
    z = ((z ^ (z >> 27)) * _MULT2) & MASK64
    return z ^ (z >> 31)


def derive_stream(master_seed: int, index: int) -> int:
    """Seed for the index-th trajectory of an experiment."""
    if index < 0:
        raise ValueError("stream index must be nonnegative")
    return mix64((master_seed + (index + 1) * GOLDEN) & MASK64)


def aux_seed(seed: int) -> int:
    """Seed for a run's auxiliary stream, independent of its main stream."""
    return mix64((seed ^ AUX_SALT) & MASK64)


class Rng:
    """One splitmix64 stream."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN) & MASK64
        return mix64(self.state)

    def uniform(self) -> float:
        return (self.next_u64() >> 11) * _UNIT

    def bernoulli(self, p: float) -> bool:
        return self.uniform() < p

    def below(self, n: int) -> int:
        return self.next_u64() % n
