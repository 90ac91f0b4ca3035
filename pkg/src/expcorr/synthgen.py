"""Deterministic synthetic landscapes made of several ecological processes.

Each process occupies a band of the ``y`` axis and ties the measured variables to shared
latent drivers through affine relations. Mixing processes with different offsets is enough
to make the pooled correlation differ from the per-process ones.
"""

import logging
from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Any

from .errors import FormatError
from .random_source import Pcg32Rng
from .table import Band, SampleRow, SampleTable, Stratification

logger = logging.getLogger(__name__)

MAX_SEED = 2**64 - 1


@dataclass(frozen=True)
class Relation:
    """``value = intercept + sum(slopes[k] * driver[k]) + noise_sd * N(0, 1)``."""

    intercept: float
    slopes: tuple[float, ...] = ()
    noise_sd: float = 0.0


@dataclass(frozen=True)
class ProcessSpec:
    """One process: where it lives and how it generates its variables."""

    name: str
    band: tuple[float, float]
    """``(lo, hi)`` on the ``y`` axis."""

    relations: Mapping[str, Relation]
    sample_count: int

    @property
    def driver_count(self) -> int:
        """Number of latent drivers drawn per sample."""
        return max((len(r.slopes) for r in self.relations.values()), default=0)


@dataclass(frozen=True)
class LandscapeSpec:
    """A list of processes, a seed and the ``x`` range shared by all of them."""

    processes: tuple[ProcessSpec, ...]
    seed: int
    x_range: tuple[float, float] = (0.0, 100.0)
    variables: tuple[str, ...] = field(init=False)

    def __post_init__(self) -> None:
        """Validate the spec and fix the variable order."""
        origin = "synthgen.LandscapeSpec"
        if not self.processes:
            raise FormatError("A landscape needs at least one process.", origin=origin)
        if isinstance(self.seed, bool) or not isinstance(self.seed, int):
            raise FormatError("The seed must be an integer.", origin=origin)
        if not 0 <= self.seed <= MAX_SEED:
            raise FormatError("The seed must be an unsigned 64-bit integer.", origin=origin)
        if not self.x_range[0] < self.x_range[1]:
            raise FormatError("x_range needs lo < hi.", origin=origin)

        names = [p.name for p in self.processes]
        if len(set(names)) != len(names):
            raise FormatError("Process names must be unique.", origin=origin)

        variables = tuple(self.processes[0].relations)
        for process in self.processes:
            if set(process.relations) != set(variables):
                raise FormatError(
                    f"Process '{process.name}' must define exactly {', '.join(variables)}.",
                    origin=origin,
                )
            if process.sample_count < 3:
                raise FormatError(
                    f"Process '{process.name}' needs at least 3 samples.", origin=origin
                )
            if not process.band[0] < process.band[1]:
                raise FormatError(f"Process '{process.name}' needs lo < hi.", origin=origin)
            if any(r.noise_sd < 0 for r in process.relations.values()):
                raise FormatError(
                    f"Process '{process.name}' has a negative noise_sd.", origin=origin
                )
        object.__setattr__(self, "variables", variables)

    def stratification(self) -> Stratification:
        """Strata matching the process bands, sorted along ``y``."""
        bands = sorted((Band(p.name, *p.band) for p in self.processes), key=lambda b: b.lo)
        return Stratification(tuple(bands), axis="y")

    def to_dict(self) -> dict[str, Any]:
        """The JSON config form."""
        return {
            "seed": self.seed,
            "x_range": list(self.x_range),
            "processes": [
                {
                    "name": p.name,
                    "band": list(p.band),
                    "sample_count": p.sample_count,
                    "relations": {
                        v: {
                            "intercept": r.intercept,
                            "slopes": list(r.slopes),
                            "noise_sd": r.noise_sd,
                        }
                        for v, r in p.relations.items()
                    },
                }
                for p in self.processes
            ],
        }

    @staticmethod
    def from_dict(data: Mapping[str, Any]) -> "LandscapeSpec":
        """Parse the JSON config form.

        :raises FormatError: If a key is missing or has the wrong type.
        """
        try:
            processes = tuple(
                ProcessSpec(
                    name=str(p["name"]),
                    band=(float(p["band"][0]), float(p["band"][1])),
                    sample_count=int(p["sample_count"]),
                    relations={
                        str(v): Relation(
                            intercept=float(r["intercept"]),
                            slopes=tuple(float(s) for s in r.get("slopes", ())),
                            noise_sd=float(r.get("noise_sd", 0.0)),
                        )
                        for v, r in p["relations"].items()
                    },
                )
                for p in data["processes"]
            )
            x_range = data.get("x_range", (0.0, 100.0))
            return LandscapeSpec(
                processes=processes,
                seed=data["seed"],
                x_range=(float(x_range[0]), float(x_range[1])),
            )
        except (KeyError, IndexError, TypeError, ValueError, AttributeError) as error:
            raise FormatError(
                f"Invalid landscape config: {error!r}.", origin="synthgen.LandscapeSpec"
            ) from None


def generate_landscape(spec: LandscapeSpec) -> SampleTable:
    """Draw the samples of every process.

    Process ``k`` uses the PCG32 stream ``k`` of ``spec.seed``, so adding processes leaves
    the rows of earlier ones untouched. Per sample the draws are, in order: ``x``, ``y``,
    the latent drivers and then one noise deviate per variable (also when ``noise_sd`` is 0).

    Example
    -------
    >>> spec = LandscapeSpec(
    ...     (ProcessSpec("a", (0.0, 1.0), {"c": Relation(1.0, (2.0,))}, 3),), seed=7
    ... )
    >>> table = generate_landscape(spec)
    >>> table.ids, table == generate_landscape(spec)
    (['a-0000', 'a-0001', 'a-0002'], True)

    """
    rows: list[SampleRow] = []
    for index, process in enumerate(spec.processes):
        rng = Pcg32Rng(spec.seed, stream=index)
        lo, hi = process.band
        for i in range(process.sample_count):
            x = rng.uniform(*spec.x_range)
            y = rng.uniform(lo, hi)
            drivers = [rng.normal() for _ in range(process.driver_count)]

            values: dict[str, float] = {}
            for variable in spec.variables:
                relation = process.relations[variable]
                value = relation.intercept
                for slope, driver in zip(relation.slopes, drivers):
                    value += slope * driver
                values[variable] = value + relation.noise_sd * rng.normal()
            rows.append(SampleRow(f"{process.name}-{i:04d}", x, y, values))

        logger.debug("process '%s': %d samples", process.name, process.sample_count)
    return SampleTable(rows, variables=spec.variables)


def neutralization_landscape() -> LandscapeSpec:
    """The bundled two-process landscape.

    Both processes couple ``c`` and ``n`` through one driver with the same slopes, but the
    ``high`` process sits 20 units higher in ``c``. Inside each band the two variables are
    strongly correlated; pooled, the offset dilutes the correlation.
    """
    low = {
        "c": Relation(10.0, (2.0,), 0.3),
        "n": Relation(1.0, (0.2,), 0.05),
    }
    high = {
        "c": Relation(30.0, (2.0,), 0.3),
        "n": Relation(1.0, (0.2,), 0.05),
    }
    return LandscapeSpec(
        processes=(
            ProcessSpec("low", (0.0, 30.0), low, 60),
            ProcessSpec("high", (30.0, 70.0), high, 60),
        ),
        seed=42,
        x_range=(0.0, 100.0),
    )
