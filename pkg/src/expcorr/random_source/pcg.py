from .base import RngBase

_MASK64 = 0xFFFF_FFFF_FFFF_FFFF
_MASK32 = 0xFFFF_FFFF
_MULTIPLIER = 6364136223846793005


class Pcg32Rng(RngBase):
    """The PCG32 generator (XSH RR output, 64-bit state).

    Seeding follows the reference ``pcg32_srandom_r(initstate, initseq)``, so outputs match
    other implementations bit for bit.

    Example
    -------
    >>> rng = Pcg32Rng(42, 54)
    >>> [hex(rng.next_uint32()) for _ in range(3)]
    ['0xa15c02b7', '0x7b47f409', '0xba1d3330']

    """

    def __init__(self, seed: int, stream: int = 0):
        """Create a generator.

        :param seed: Initial state, an unsigned 64-bit integer.
        :param stream: Selects one of ``2**63`` independent sequences.
        """
        super().__init__()
        assert 0 <= seed <= _MASK64, f"Seed must be an unsigned 64-bit integer, got {seed}."
        assert 0 <= stream <= _MASK64, f"Stream must be an unsigned 64-bit integer, got {stream}."

        self._state = 0
        self._inc = ((stream << 1) & _MASK64) | 1
        self.next_uint32()
        self._state = (self._state + seed) & _MASK64
        self.next_uint32()

    def next_uint32(self) -> int:
        """Advance the state and return the next 32-bit output."""
        old = self._state
        self._state = (old * _MULTIPLIER + self._inc) & _MASK64
        xorshifted = (((old >> 18) ^ old) >> 27) & _MASK32
        rot = old >> 59
        return ((xorshifted >> rot) | (xorshifted << ((-rot) & 31))) & _MASK32
