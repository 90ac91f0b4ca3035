import math
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any, Literal, overload

import numpy as np
import numpy.typing as npt

from .errors import FormatError, ShapeError, UnassignableRowError

Axis = Literal["x", "y"]


@dataclass(frozen=True)
class SampleRow:
    """A geo-referenced sample: an id, a location and the measured values."""

    id: str
    x: float
    y: float
    values: Mapping[str, float]
    stratum_override: str | None = None
    """Name of the stratum this row belongs to regardless of its coordinates."""

    def coordinate(self, axis: Axis) -> float:
        """Return the ``x`` or ``y`` coordinate."""
        return self.x if axis == "x" else self.y


class SampleTable(Sequence[SampleRow]):
    """An ordered collection of sample rows sharing one set of variables.

    Example
    -------
    >>> table = SampleTable(
    ...     [
    ...         SampleRow("a", 0.0, 5.0, {"c": 1.0, "n": 0.1}),
    ...         SampleRow("b", 1.0, 45.0, {"c": 2.0, "n": 0.3}),
    ...     ],
    ...     variables=["c", "n"],
    ... )
    >>> len(table), table.variables
    (2, ('c', 'n'))
    >>> table.column("n").tolist()
    [0.1, 0.3]

    """

    def __init__(self, rows: Iterable[SampleRow], *, variables: Iterable[str]):
        """Create a table and validate its invariants.

        :param rows: The rows, kept in the given order.
        :param variables: The variable names every row must carry exactly.
        :raises ShapeError: If a row lacks a variable, has extra ones or a value is not finite.
        :raises FormatError: If row ids are not unique.
        """
        self._rows: tuple[SampleRow, ...] = tuple(rows)
        self._variables: tuple[str, ...] = tuple(variables)
        self._validate()

    @property
    def variables(self) -> tuple[str, ...]:
        """The declared variable names."""
        return self._variables

    @property
    def ids(self) -> list[str]:
        """Row ids in row order."""
        return [r.id for r in self._rows]

    @property
    def xs(self) -> npt.NDArray[np.float64]:
        """The ``x`` coordinates."""
        return np.array([r.x for r in self._rows], dtype=np.float64)

    @property
    def ys(self) -> npt.NDArray[np.float64]:
        """The ``y`` coordinates."""
        return np.array([r.y for r in self._rows], dtype=np.float64)

    def column(self, name: str) -> npt.NDArray[np.float64]:
        """Return the values of one variable in row order."""
        self.require(name)
        return np.array([r.values[name] for r in self._rows], dtype=np.float64)

    def require(self, *names: str, origin: str = "data-model.column") -> None:
        """Raise a ``ShapeError`` unless all ``names`` are declared variables."""
        missing = [n for n in names if n not in self._variables]
        if missing:
            raise ShapeError(
                f"Unknown variable(s) {', '.join(missing)}; "
                f"the table has {', '.join(self._variables) or 'no variables'}.",
                origin=origin,
            )

    def subset(self, ids: Iterable[str]) -> "SampleTable":
        """Return the rows with the given ids, in table order."""
        wanted = set(ids)
        return SampleTable((r for r in self._rows if r.id in wanted), variables=self._variables)

    @overload
    def __getitem__(self, index: int) -> SampleRow: ...
    @overload
    def __getitem__(self, index: slice) -> "SampleTable": ...
    def __getitem__(self, index: Any) -> Any:
        """Get a row at an index or a new table from a slice."""
        if isinstance(index, int):
            return self._rows[index]
        return SampleTable(self._rows[index], variables=self._variables)

    def __len__(self) -> int:
        """Return the number of rows."""
        return len(self._rows)

    def __iter__(self) -> Iterator[SampleRow]:
        """Iterate over the rows in order."""
        return iter(self._rows)

    def __eq__(self, other: object) -> bool:
        """Two tables are equal if they have the same variables and rows in the same order."""
        if not isinstance(other, SampleTable):
            return False
        return self._variables == other._variables and self._rows == other._rows

    def __repr__(self) -> str:
        """Short representation (rows are not listed)."""
        return f"{SampleTable.__name__}(rows={len(self)}, variables={list(self._variables)})"

    def _validate(self) -> None:
        origin = "data-model.SampleTable"
        seen: set[str] = set()
        declared = set(self._variables)

        if len(declared) != len(self._variables):
            raise FormatError("Variable names must be unique.", origin=origin)

        for row in self._rows:
            if row.id in seen:
                raise FormatError(f"Duplicate row id '{row.id}'.", origin=origin)
            seen.add(row.id)

            if not (math.isfinite(row.x) and math.isfinite(row.y)):
                raise ShapeError(f"Row '{row.id}' has non-finite coordinates.", origin=origin)
            if set(row.values) != declared:
                raise ShapeError(
                    f"Row '{row.id}' must carry exactly the variables "
                    f"{', '.join(self._variables)}.",
                    origin=origin,
                )
            if not all(math.isfinite(v) for v in row.values.values()):
                raise ShapeError(f"Row '{row.id}' has non-finite values.", origin=origin)


@dataclass(frozen=True)
class Band:
    """A named interval ``[lo, hi)`` on the stratifying axis."""

    name: str
    lo: float
    hi: float


@dataclass(frozen=True)
class Stratification:
    """Non-overlapping bands on one coordinate axis.

    Bands are half-open ``[lo, hi)`` except the last one, which also contains its ``hi``.

    Example
    -------
    >>> strat = Stratification.parse("low=0:30,high=30:70")
    >>> [strat.band_of(v) for v in (5.0, 30.0, 70.0, 71.0)]
    ['low', 'high', 'high', None]

    """

    bands: tuple[Band, ...]
    axis: Axis = "y"
    _names: frozenset[str] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        """Validate band order and overlap."""
        origin = "data-model.Stratification"
        if not self.bands:
            raise FormatError("A stratification needs at least one band.", origin=origin)
        if self.axis not in ("x", "y"):
            raise FormatError(f"Axis must be 'x' or 'y', got '{self.axis}'.", origin=origin)

        names = [b.name for b in self.bands]
        if len(set(names)) != len(names):
            raise FormatError("Band names must be unique.", origin=origin)

        for band in self.bands:
            if not band.lo < band.hi:
                raise FormatError(f"Band '{band.name}' needs lo < hi.", origin=origin)
        for prev, band in zip(self.bands, self.bands[1:]):
            if band.lo < prev.hi:
                raise FormatError(
                    f"Bands '{prev.name}' and '{band.name}' overlap or are not sorted.",
                    origin=origin,
                )

        object.__setattr__(self, "_names", frozenset(names))

    @property
    def names(self) -> list[str]:
        """Band names in declaration order."""
        return [b.name for b in self.bands]

    def band_of(self, value: float) -> str | None:
        """Return the name of the band containing ``value`` or ``None``."""
        last = self.bands[-1]
        for band in self.bands:
            if band.lo <= value < band.hi or (band is last and value == band.hi):
                return band.name
        return None

    def assign(self, row: SampleRow) -> str:
        """Return the stratum of ``row``; an override beats band membership."""
        if row.stratum_override is not None:
            if row.stratum_override not in self._names:
                raise UnassignableRowError(
                    f"Row '{row.id}' overrides to unknown stratum '{row.stratum_override}'.",
                    origin="data-model.stratify",
                )
            return row.stratum_override

        name = self.band_of(row.coordinate(self.axis))
        if name is None:
            raise UnassignableRowError(
                f"Row '{row.id}' ({self.axis}={row.coordinate(self.axis)}) lies outside all bands.",
                origin="data-model.stratify",
            )
        return name

    @staticmethod
    def parse(text: str, *, axis: Axis = "y") -> "Stratification":
        """Parse comma separated ``name=lo:hi`` entries.

        Example
        -------
        >>> Stratification.parse("a=0:1.5").bands
        (Band(name='a', lo=0.0, hi=1.5),)

        """
        bands: list[Band] = []
        for entry in filter(None, (e.strip() for e in text.split(","))):
            try:
                name, interval = entry.split("=")
                lo, hi = interval.split(":")
                bands.append(Band(name.strip(), float(lo), float(hi)))
            except ValueError:
                raise FormatError(
                    f"Invalid stratum '{entry}', expected name=lo:hi.",
                    origin="cli.strata",
                ) from None
        return Stratification(tuple(bands), axis=axis)

    @staticmethod
    def covering(table: SampleTable, *, axis: Axis = "y", name: str = "all") -> "Stratification":
        """Return a single band containing every row of ``table``."""
        values = table.xs if axis == "x" else table.ys
        lo = float(values.min()) if len(values) else 0.0
        hi = float(values.max()) if len(values) else 1.0
        return Stratification((Band(name, lo, hi if hi > lo else lo + 1.0),), axis=axis)


def stratify(table: SampleTable, strat: Stratification) -> dict[str, SampleTable]:
    """Partition ``table`` into one table per band (possibly empty), in band order.

    Rows keep their relative order inside each stratum.

    :raises UnassignableRowError: If a row lies outside all bands and has no override.
    """
    members: dict[str, list[SampleRow]] = {name: [] for name in strat.names}
    for row in table:
        members[strat.assign(row)].append(row)
    return {
        name: SampleTable(rows, variables=table.variables) for name, rows in members.items()
    }
