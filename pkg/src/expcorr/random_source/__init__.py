from .base import RngBase
from .pcg import Pcg32Rng

__all__ = [
    "Pcg32Rng",
    "RngBase",
]
