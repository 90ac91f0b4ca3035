import math

import pytest
from expcorr.random_source.base import RngBase

from tests.utils.cycle_rng import CycleRng


class TestRandomNumberGeneratorBase:
    @pytest.mark.parametrize(
        "cycle, expected",
        [
            ([0], 0.0),
            ([2**31, 0], 0.5),
            ([2**32 - 1], 1.0 - 2.0**-53),
        ],
    )
    def test_random_uses_53_bits(self, cycle, expected):
        assert CycleRng(cycle).random() == expected

    def test_random_consumes_two_words(self):
        rng = CycleRng([2**31, 0, 0, 0])
        assert [rng.random(), rng.random()] == [0.5, 0.0]

    def test_uniform(self):
        assert CycleRng([2**31, 0]).uniform(10.0, 20.0) == 15.0

    def test_normal_pairs(self):
        rng: RngBase = CycleRng([2**31, 0, 2**30, 0])
        # u1 = 1 - 0.5, u2 = 0.25
        radius = math.sqrt(-2.0 * math.log(0.5))
        first, second = rng.normal(), rng.normal()
        assert first == pytest.approx(radius * math.cos(math.pi / 2), abs=1e-15)
        assert second == pytest.approx(radius)

    def test_normal_is_finite_at_zero(self):
        # u1 = 1 - 0 keeps the logarithm finite
        assert CycleRng([0]).normal() == 0.0
