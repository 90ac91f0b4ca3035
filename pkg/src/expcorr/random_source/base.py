import math
from abc import ABC, abstractmethod
from typing import final


class RngBase(ABC):
    """Base for all random number generators.

    Subclasses only produce raw 32-bit words; all derived distributions are fixed here so
    two generators with equal words produce equal samples.
    """

    def __init__(self) -> None:
        """Create the generator without a cached normal deviate."""
        self._spare_normal: float | None = None

    @abstractmethod
    def next_uint32(self) -> int:
        """Return the next integer ``i`` with ``0 <= i < 2**32``."""

    @final
    def random(self) -> float:
        """Return a float in ``[0, 1)`` built from 53 random bits (two words)."""
        high = self.next_uint32() >> 5
        low = self.next_uint32() >> 6
        return (high * 67108864.0 + low) / 9007199254740992.0

    @final
    def uniform(self, lo: float, hi: float) -> float:
        """Return a float in ``[lo, hi)``."""
        return lo + (hi - lo) * self.random()

    @final
    def normal(self) -> float:
        """Return a standard normal deviate.

        Box-Muller transform: every pair of uniforms yields two deviates, the second one is
        returned by the next call.
        """
        if self._spare_normal is not None:
            value, self._spare_normal = self._spare_normal, None
            return value

        u1 = 1.0 - self.random()  # (0, 1], keeps the logarithm finite
        u2 = self.random()
        radius = math.sqrt(-2.0 * math.log(u1))
        angle = 2.0 * math.pi * u2
        self._spare_normal = radius * math.sin(angle)
        return radius * math.cos(angle)
