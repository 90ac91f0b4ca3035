"""Set-valued correspondence between two measured variables.

Continuous values correspond when they share a bin. A row of variable ``A`` reaches the
``B`` bins touched by its own ``A`` bin, and through those the ``A`` values of every row in
them. Residuals are measured inside one variable (``A``) rather than across variables:

    e_i = sum over reachable B bins j of ( mean{A in bin j} - mean{A reachable from i} )^2

Selection chains are evaluated from right to left, starting at an anchor row.
"""

import bisect
import logging
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from typing import Literal

import numpy as np
import numpy.typing as npt

from .errors import DegenerateFitError, EmptySelectionError, FormatError, OutOfRangeError
from .polynomial import MultiPoly
from .table import SampleTable

logger = logging.getLogger(__name__)

Reducer = Literal["none", "mean"]
Weighting = Literal["collapsed", "members"]


@dataclass(frozen=True)
class BinningSpec:
    """How continuous values are grouped into bins.

    * ``equal-width``: ``bin_count`` bins spanning ``[min, max]`` of the data.
    * ``explicit-edges``: bins ``[e_k, e_k+1)``, the last one closed.
    * ``distinct``: one bin per distinct value.
    """

    mode: Literal["equal-width", "explicit-edges", "distinct"]
    bin_count: int | None = None
    edges: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        """Validate the mode specific fields."""
        origin = "correspondence.BinningSpec"
        if self.mode == "equal-width":
            if self.bin_count is None or self.bin_count < 1:
                raise FormatError("Equal-width binning needs bin_count >= 1.", origin=origin)
        elif self.mode == "explicit-edges":
            edges = self.edges or ()
            if len(edges) < 2 or any(b <= a for a, b in zip(edges, edges[1:])):
                raise FormatError(
                    "Explicit edges must be at least two strictly increasing values.",
                    origin=origin,
                )
        elif self.mode != "distinct":
            raise FormatError(f"Unknown binning mode '{self.mode}'.", origin=origin)

    @staticmethod
    def equal_width(bin_count: int) -> "BinningSpec":
        """``bin_count`` equal-width bins over the data range."""
        return BinningSpec("equal-width", bin_count=bin_count)

    @staticmethod
    def explicit(edges: Iterable[float]) -> "BinningSpec":
        """Bins between the given edges."""
        return BinningSpec("explicit-edges", edges=tuple(float(e) for e in edges))

    @staticmethod
    def distinct() -> "BinningSpec":
        """One bin per distinct value."""
        return BinningSpec("distinct")

    def assign(
        self, values: Sequence[float] | npt.NDArray[np.float64], *, origin: str = ""
    ) -> tuple[list[int], dict[int, float]]:
        """Return the bin index of every value and the center of every used bin.

        Example
        -------
        >>> BinningSpec.explicit([0.5, 1.5, 2.5]).assign([1.0, 1.1, 2.0])
        ([0, 0, 1], {0: 1.0, 1: 2.0})

        """
        values = [float(v) for v in values]
        if self.mode == "distinct":
            levels = sorted(set(values))
            index = {v: k for k, v in enumerate(levels)}
            bins = [index[v] for v in values]
            return bins, {k: levels[k] for k in sorted(set(bins))}

        if self.mode == "equal-width":
            assert self.bin_count is not None
            lo, hi = (min(values), max(values)) if values else (0.0, 0.0)
            width = (hi - lo) / self.bin_count
            if width == 0.0:
                return [0] * len(values), ({0: lo} if values else {})
            bins = [min(int((v - lo) / width), self.bin_count - 1) for v in values]
            return bins, {k: lo + (k + 0.5) * width for k in sorted(set(bins))}

        assert self.edges is not None
        edges = self.edges
        bins = []
        for v in values:
            k = len(edges) - 2 if v == edges[-1] else bisect.bisect_right(edges, v) - 1
            if not 0 <= k < len(edges) - 1:
                raise OutOfRangeError(
                    f"Value {v} lies outside the edges [{edges[0]}, {edges[-1]}].",
                    origin=origin or "correspondence.build_correspondence",
                )
            bins.append(k)
        return bins, {k: 0.5 * (edges[k] + edges[k + 1]) for k in sorted(set(bins))}


@dataclass(frozen=True)
class CorrespondenceSystem:
    """Binned correspondence between the rows of two variables.

    Two rows correspond on a variable iff they share a bin of that variable.
    """

    var_a: str
    var_b: str
    row_ids: tuple[str, ...]
    values: Mapping[str, Mapping[str, float]]
    """Variable name to row id to value."""

    bins: Mapping[str, Mapping[str, int]]
    """Variable name to row id to bin index."""

    members: Mapping[str, Mapping[int, frozenset[str]]]
    """Variable name to bin index to the ids of the rows in that bin."""

    centers: Mapping[str, Mapping[int, float]]
    """Variable name to bin index to the bin center."""

    @property
    def a_bins(self) -> Mapping[str, int]:
        """Per-row ``A`` bin indices."""
        return self.bins[self.var_a]

    @property
    def b_bins(self) -> Mapping[str, int]:
        """Per-row ``B`` bin indices."""
        return self.bins[self.var_b]

    @property
    def a_members(self) -> Mapping[int, frozenset[str]]:
        """``A`` bin index to row ids."""
        return self.members[self.var_a]

    @property
    def b_members(self) -> Mapping[int, frozenset[str]]:
        """``B`` bin index to row ids."""
        return self.members[self.var_b]

    def reachable_bins(self, row: str, variable: str | None = None) -> list[int]:
        """Bins of ``variable`` (default ``B``) touched by the ``A`` bin of ``row``."""
        variable = variable or self.var_b
        anchor = self.a_members[self.a_bins[self._check_row(row)]]
        return sorted({self.bins[variable][r] for r in anchor})

    def _check_row(self, row: str) -> str:
        if row not in self.a_bins:
            raise EmptySelectionError(f"Unknown row '{row}'.", origin="correspondence.select")
        return row


def build_correspondence(
    table: SampleTable,
    var_a: str,
    var_b: str,
    bin_a: BinningSpec,
    bin_b: BinningSpec,
) -> CorrespondenceSystem:
    """Bin both variables and record which rows share bins.

    Example
    -------
    >>> from expcorr.table import SampleRow
    >>> table = SampleTable(
    ...     [
    ...         SampleRow("1", 0, 0, {"A": 1.0, "B": 10.0}),
    ...         SampleRow("2", 0, 0, {"A": 1.1, "B": 20.0}),
    ...         SampleRow("3", 0, 0, {"A": 2.0, "B": 10.0}),
    ...     ],
    ...     variables=["A", "B"],
    ... )
    >>> bin_a, bin_b = BinningSpec.explicit([0.5, 1.5, 2.5]), BinningSpec.explicit([5, 15, 25])
    >>> system = build_correspondence(table, "A", "B", bin_a, bin_b)
    >>> {k: sorted(v) for k, v in system.b_members.items()}
    {0: ['1', '3'], 1: ['2']}

    :raises OutOfRangeError: If a value lies outside explicit edges.
    """
    origin = "correspondence.build_correspondence"
    table.require(var_a, var_b, origin=origin)
    if var_a == var_b:
        raise FormatError("The two variables must differ.", origin=origin)

    ids = tuple(table.ids)
    values: dict[str, dict[str, float]] = {}
    bins: dict[str, dict[str, int]] = {}
    members: dict[str, dict[int, frozenset[str]]] = {}
    centers: dict[str, dict[int, float]] = {}

    for name, spec in ((var_a, bin_a), (var_b, bin_b)):
        column = table.column(name)
        indices, centers[name] = spec.assign(column, origin=origin)
        values[name] = dict(zip(ids, (float(v) for v in column)))
        bins[name] = dict(zip(ids, indices))
        grouped: dict[int, set[str]] = {}
        for row_id, k in zip(ids, indices):
            grouped.setdefault(k, set()).add(row_id)
        members[name] = {k: frozenset(grouped[k]) for k in sorted(grouped)}

    return CorrespondenceSystem(
        var_a=var_a,
        var_b=var_b,
        row_ids=ids,
        values=values,
        bins=bins,
        members=members,
        centers=centers,
    )


@dataclass(frozen=True)
class Pick:
    """One step of a selection chain.

    ``index=None`` selects all points (``[n]``), an integer selects one bin (``[j]``). The
    rightmost step of a chain is the anchor and names a ``row`` instead.
    """

    variable: str
    index: int | None = None
    row: str | None = None


def parse_chain(text: str) -> tuple[Reducer, list[Pick]]:
    """Parse the textual chain notation.

    Steps are separated by ``:``; ``V_[n]`` selects all points, ``V_[3]`` bin 3 and
    ``V_@id`` anchors at a row. An optional ``mean |`` prefix sets the reducer.

    Example
    -------
    >>> reducer, picks = parse_chain("{mean | A_[n] : B_[0] : A_@1}")
    >>> reducer, picks[1]
    ('mean', Pick(variable='B', index=0, row=None))

    """
    body = text.strip().removeprefix("{").removesuffix("}")
    reducer: Reducer = "none"
    if "|" in body:
        head, body = body.split("|", 1)
        if head.strip() != "mean":
            raise FormatError(f"Unknown reducer '{head.strip()}'.", origin="correspondence.parse")
        reducer = "mean"

    picks: list[Pick] = []
    for step in (s.strip() for s in body.split(":")):
        variable, _, selector = step.rpartition("_")
        try:
            if selector.startswith("@"):
                picks.append(Pick(variable, row=selector[1:]))
            elif selector == "[n]":
                picks.append(Pick(variable))
            else:
                picks.append(Pick(variable, index=int(selector.strip("[]"))))
        except ValueError:
            raise FormatError(
                f"Invalid chain step '{step}'.", origin="correspondence.parse"
            ) from None
        if not variable:
            raise FormatError(f"Invalid chain step '{step}'.", origin="correspondence.parse")
    return reducer, picks


def select_chain(
    system: CorrespondenceSystem, chain: Sequence[Pick], reducer: Reducer = "none"
) -> frozenset[str] | float:
    """Evaluate a selection chain from right to left.

    The anchor (rightmost step) selects the rows sharing the anchor row's bin. Every
    intermediate step expands the current rows through the bins they touch: ``[n]`` keeps
    all of them, ``[j]`` only bin ``j``. The leftmost step reads its variable on the current
    rows (``[j]`` restricts them to bin ``j``). With ``reducer="mean"`` the mean of those
    values is returned, otherwise the row ids.

    :raises EmptySelectionError: If an intermediate or the final set is empty.
    """
    origin = "correspondence.select_chain"
    if not chain:
        raise FormatError("A chain needs at least one step.", origin=origin)
    anchor = chain[-1]
    if anchor.row is None or any(p.row is not None for p in chain[:-1]):
        raise FormatError("Exactly the rightmost step must name an anchor row.", origin=origin)
    for pick in chain:
        if pick.variable not in system.bins:
            raise FormatError(f"Unknown variable '{pick.variable}' in chain.", origin=origin)

    row = system._check_row(anchor.row)
    bins, members = system.bins, system.members
    current = members[anchor.variable][bins[anchor.variable][row]]

    for pick in reversed(chain[1:-1]):
        touched = {bins[pick.variable][r] for r in current}
        if pick.index is None:
            current = frozenset().union(*(members[pick.variable][k] for k in touched))
        elif pick.index in touched:
            current = members[pick.variable][pick.index]
        else:
            raise EmptySelectionError(
                f"Bin {pick.index} of '{pick.variable}' is not reachable from row '{row}'.",
                origin=origin,
            )

    last = chain[0]
    if len(chain) > 1 and last.index is not None:
        current = current & members[last.variable].get(last.index, frozenset())
    if not current:
        raise EmptySelectionError(f"Empty selection from row '{row}'.", origin=origin)

    if reducer == "mean":
        return math.fsum(system.values[last.variable][r] for r in current) / len(current)
    return current


def residual_e(
    system: CorrespondenceSystem, row: str, *, weighting: Weighting = "collapsed"
) -> float:
    """Residual of one row measured inside variable ``A``.

    Every reachable ``B`` bin contributes the squared distance between the mean ``A`` value
    inside that bin and the mean ``A`` value over all reachable rows. ``weighting="members"``
    weights each bin by the number of rows it holds (the literal double sum).

    :raises EmptySelectionError: If ``row`` is unknown.
    """
    a, b = system.var_a, system.var_b
    outer = select_chain(system, [Pick(a), Pick(b), Pick(a, row=row)], "mean")
    assert isinstance(outer, float)

    total = 0.0
    for j in system.reachable_bins(row):
        inner = select_chain(system, [Pick(a), Pick(b, j), Pick(a, row=row)], "mean")
        assert isinstance(inner, float)
        weight = len(system.b_members[j]) if weighting == "members" else 1
        total += weight * (inner - outer) ** 2
    return total


@dataclass(frozen=True)
class ResidualReport:
    """Residual of every row and their sum."""

    per_point: dict[str, float]
    total: float


def total_residual(
    system: CorrespondenceSystem, *, weighting: Weighting = "collapsed"
) -> ResidualReport:
    """Residuals of all rows; the total is an exactly rounded sum."""
    per_point = {r: residual_e(system, r, weighting=weighting) for r in system.row_ids}
    return ResidualReport(per_point=per_point, total=math.fsum(per_point.values()))


def correspondence_pairs(
    targets: Sequence[float] | npt.NDArray[np.float64],
    target_bins: Sequence[int],
    predictor_bins: Sequence[int],
) -> list[tuple[int, float]]:
    """Terms of the correspondence objective as ``(predictor bin, target)`` pairs.

    For every row ``i`` and every predictor bin ``j`` reachable from ``i``'s target bin, the
    target is the mean target value over all rows reachable from ``i``.
    """
    by_target: dict[int, list[int]] = {}
    by_predictor: dict[int, list[int]] = {}
    for i, (t, p) in enumerate(zip(target_bins, predictor_bins)):
        by_target.setdefault(t, []).append(i)
        by_predictor.setdefault(p, []).append(i)

    outer_cache: dict[int, tuple[list[int], float]] = {}
    pairs: list[tuple[int, float]] = []
    for t in target_bins:
        if t not in outer_cache:
            reached = sorted({predictor_bins[i] for i in by_target[t]})
            rows = [i for j in reached for i in by_predictor[j]]
            outer_cache[t] = reached, math.fsum(float(targets[i]) for i in rows) / len(rows)
        reached, outer = outer_cache[t]
        pairs.extend((j, outer) for j in reached)
    return pairs


@dataclass(frozen=True)
class CorrespondenceFit:
    """A polynomial ``g: B -> A`` fitted by minimizing the correspondence objective."""

    poly: MultiPoly
    """Polynomial in the single variable ``B``."""

    objective: float
    degree: int
    n: int
    """Number of objective terms."""


def correspondence_objective(
    g: MultiPoly,
    table: SampleTable,
    var_a: str,
    var_b: str,
    bin_b: BinningSpec,
    *,
    bin_a: BinningSpec | None = None,
) -> float:
    """Value of the correspondence objective of ``g`` (evaluated at ``B`` bin centers)."""
    centers, targets = _objective_terms(table, var_a, var_b, bin_b, bin_a)
    values = np.asarray(g({var_b: centers}) + np.zeros_like(centers), dtype=np.float64)
    return math.fsum((values - targets) ** 2)


def fit_by_correspondence(
    table: SampleTable,
    var_a: str,
    var_b: str,
    bin_b: BinningSpec,
    degree: int,
    *,
    bin_a: BinningSpec | None = None,
) -> CorrespondenceFit:
    """Fit ``g: B -> A`` minimizing the sum of squared correspondence residuals.

    The model replaces the inner expectation of the residual and is evaluated at the ``B``
    bin centers; the objective is linear in the coefficients and solved by least squares.
    ``bin_a`` defaults to one bin per distinct ``A`` value.

    :raises DegenerateFitError: If the reachable ``B`` bins cannot determine ``degree + 1``
        coefficients.
    """
    origin = "correspondence.fit_by_correspondence"
    if degree < 0:
        raise FormatError("Degree must be non-negative.", origin=origin)

    centers, targets = _objective_terms(table, var_a, var_b, bin_b, bin_a)
    if len(set(centers.tolist())) <= degree:
        raise DegenerateFitError(
            f"{len(set(centers.tolist()))} distinct B bins cannot determine a degree {degree} "
            "polynomial.",
            origin=origin,
        )

    # solve on [-1, 1] and map back
    lo, hi = float(centers.min()), float(centers.max())
    mid, half = 0.5 * (lo + hi), (0.5 * (hi - lo) or 1.0)
    design = np.vander((centers - mid) / half, degree + 1, increasing=True)
    coefficients, _, rank, _ = np.linalg.lstsq(design, targets, rcond=None)
    if rank < degree + 1:
        raise DegenerateFitError("The correspondence system is rank deficient.", origin=origin)

    local = MultiPoly([var_b], {(k,): float(c) for k, c in enumerate(coefficients)})
    poly = local.substitute({var_b: (MultiPoly.variable(var_b) - mid) / half})
    residuals = np.asarray(poly({var_b: centers}) + np.zeros_like(centers)) - targets
    logger.debug("correspondence fit: %d terms, degree %d", len(targets), degree)
    return CorrespondenceFit(
        poly=poly,
        objective=math.fsum(residuals**2),
        degree=degree,
        n=len(targets),
    )


def _objective_terms(
    table: SampleTable,
    var_a: str,
    var_b: str,
    bin_b: BinningSpec,
    bin_a: BinningSpec | None,
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    origin = "correspondence.fit_by_correspondence"
    table.require(var_a, var_b, origin=origin)
    a_values = table.column(var_a)
    a_bins, _ = (bin_a or BinningSpec.distinct()).assign(a_values, origin=origin)
    b_bins, b_centers = bin_b.assign(table.column(var_b), origin=origin)

    pairs = correspondence_pairs(a_values, a_bins, b_bins)
    centers = np.array([b_centers[j] for j, _ in pairs], dtype=np.float64)
    targets = np.array([t for _, t in pairs], dtype=np.float64)
    return centers, targets
