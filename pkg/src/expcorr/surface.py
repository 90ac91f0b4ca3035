"""Polynomial spatial functions ``w = f(x, y)`` fitted to sample tables.

Fits run in a standardized frame where the bounding rectangle of the samples maps to
``[-1, 1]^2``. Evaluation stays in that frame; the polynomial is mapped back to the original
coordinates for reporting and elimination.
"""

import logging
import math
from collections.abc import Mapping
from dataclasses import dataclass, replace
from typing import Any, Literal

import numpy as np
import numpy.typing as npt

from .correspondence import BinningSpec, correspondence_pairs
from .errors import (
    DegenerateGeometryError,
    FormatError,
    OutOfRangeError,
    ShapeError,
    UnderdeterminedError,
)
from .polynomial import MultiPoly, monomial_exponents
from .table import SampleTable

logger = logging.getLogger(__name__)

Objective = Literal["ols", "correspondence"]

DEFAULT_DEGREE = 2
MAX_DEGREE = 4
DEFAULT_CELLS = 4
FIT_PRUNE_TOLERANCE = 1e-12
"""Fitted coefficients below this fraction of the largest one are dropped."""

COORDINATES = ("x", "y")


@dataclass(frozen=True)
class RectDomain:
    """The rectangle ``[x_lo, x_hi] x [y_lo, y_hi]``."""

    x_lo: float
    x_hi: float
    y_lo: float
    y_hi: float

    def __post_init__(self) -> None:
        """Require finite bounds with ``lo < hi`` on both axes."""
        bounds = (self.x_lo, self.x_hi, self.y_lo, self.y_hi)
        if not all(math.isfinite(b) for b in bounds):
            raise FormatError(f"Domain bounds must be finite, got {bounds}.", origin="surface-fit")
        if not (self.x_lo < self.x_hi and self.y_lo < self.y_hi):
            raise DegenerateGeometryError(
                f"Domain {bounds} has zero or negative extent.", origin="surface-fit"
            )

    @property
    def area(self) -> float:
        """Area of the rectangle."""
        return (self.x_hi - self.x_lo) * (self.y_hi - self.y_lo)

    def contains(self, x: float, y: float) -> bool:
        """Whether ``(x, y)`` lies in the closed rectangle."""
        return self.x_lo <= x <= self.x_hi and self.y_lo <= y <= self.y_hi

    def intersection(self, other: "RectDomain") -> "RectDomain | None":
        """Overlap of two rectangles, ``None`` if it has no area."""
        x_lo, x_hi = max(self.x_lo, other.x_lo), min(self.x_hi, other.x_hi)
        y_lo, y_hi = max(self.y_lo, other.y_lo), min(self.y_hi, other.y_hi)
        if x_lo < x_hi and y_lo < y_hi:
            return RectDomain(x_lo, x_hi, y_lo, y_hi)
        return None

    def to_dict(self) -> dict[str, float]:
        """JSON-friendly representation."""
        return {"x_lo": self.x_lo, "x_hi": self.x_hi, "y_lo": self.y_lo, "y_hi": self.y_hi}

    @staticmethod
    def from_dict(data: Mapping[str, Any]) -> "RectDomain":
        """Inverse of ``to_dict``."""
        return RectDomain(
            float(data["x_lo"]), float(data["x_hi"]), float(data["y_lo"]), float(data["y_hi"])
        )


@dataclass(frozen=True)
class AffineFrame:
    """Affine map of a rectangle onto ``[-1, 1]^2``: ``u = (x - x_center) / x_half``."""

    x_center: float
    x_half: float
    y_center: float
    y_half: float

    @staticmethod
    def of(domain: RectDomain) -> "AffineFrame":
        """The frame mapping ``domain`` onto ``[-1, 1]^2``."""
        return AffineFrame(
            x_center=0.5 * (domain.x_lo + domain.x_hi),
            x_half=0.5 * (domain.x_hi - domain.x_lo),
            y_center=0.5 * (domain.y_lo + domain.y_hi),
            y_half=0.5 * (domain.y_hi - domain.y_lo),
        )

    def to_local(
        self, x: npt.NDArray[np.float64], y: npt.NDArray[np.float64]
    ) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
        """Map original coordinates into the standardized frame."""
        return (x - self.x_center) / self.x_half, (y - self.y_center) / self.y_half

    def local_to_global(self, local: MultiPoly) -> MultiPoly:
        """Re-express a polynomial in standardized ``(x, y)`` over the original coordinates."""
        x, y = (MultiPoly.variable(v, COORDINATES) for v in COORDINATES)
        return local.substitute(
            {"x": (x - self.x_center) / self.x_half, "y": (y - self.y_center) / self.y_half}
        ).with_variables(COORDINATES)

    def global_to_local(self, poly: MultiPoly) -> MultiPoly:
        """Inverse of ``local_to_global``."""
        x, y = (MultiPoly.variable(v, COORDINATES) for v in COORDINATES)
        return poly.substitute(
            {"x": self.x_half * x + self.x_center, "y": self.y_half * y + self.y_center}
        ).with_variables(COORDINATES)


@dataclass(frozen=True)
class FitDiagnostics:
    """Quality of a surface fit."""

    rss: float
    """Residual sum of squares at the fitted samples."""

    r_squared: float
    """``1 - rss / tss``, defined as 1 for a constant target."""

    n: int
    degree: int
    objective: Objective = "ols"


@dataclass(frozen=True)
class FittedField:
    """A spatial function of one measured variable over a rectangular domain."""

    poly: MultiPoly
    """The polynomial over the original coordinates ``(x, y)``."""

    variable: str
    """Name of the modeled variable ``w``."""

    domain: RectDomain
    diagnostics: FitDiagnostics | None
    """``None`` for fields built from an analytic polynomial."""

    local_poly: MultiPoly
    """The same polynomial in the standardized frame."""

    frame: AffineFrame

    def values(
        self, xs: npt.NDArray[np.float64], ys: npt.NDArray[np.float64]
    ) -> npt.NDArray[np.float64]:
        """Evaluate at original coordinates through the standardized frame.

        Evaluating ``local_poly`` keeps full precision on domains far from the origin, where
        the expanded ``poly`` cancels large powers.
        """
        u, v = self.frame.to_local(
            np.asarray(xs, dtype=np.float64), np.asarray(ys, dtype=np.float64)
        )
        return np.asarray(self.local_poly({"x": u, "y": v}) + np.zeros_like(u), dtype=np.float64)

    @staticmethod
    def from_poly(poly: MultiPoly, variable: str, domain: RectDomain) -> "FittedField":
        """Build a field from a known polynomial in ``x`` and ``y``.

        Example
        -------
        >>> x = MultiPoly.variable("x", ["x", "y"])
        >>> field = FittedField.from_poly(x * x, "w", RectDomain(0, 2, 0, 1))
        >>> print(field.local_poly)
        x^2 + 2*x + 1

        """
        extra = set(poly.used_variables) - set(COORDINATES)
        if extra:
            raise ShapeError(
                f"A field polynomial may only use x and y, found {sorted(extra)}.",
                origin="surface-fit.from_poly",
            )
        poly = poly.with_variables(COORDINATES)
        frame = AffineFrame.of(domain)
        return FittedField(
            poly=poly,
            variable=variable,
            domain=domain,
            diagnostics=None,
            local_poly=frame.global_to_local(poly),
            frame=frame,
        )

    def to_dict(self) -> dict[str, Any]:
        """JSON-friendly representation (the standardized polynomial is derived on load)."""
        return {
            "variable": self.variable,
            "domain": self.domain.to_dict(),
            "poly": self.poly.to_dict(),
            "diagnostics": None if self.diagnostics is None else vars(self.diagnostics).copy(),
        }

    @staticmethod
    def from_dict(data: Mapping[str, Any]) -> "FittedField":
        """Inverse of ``to_dict``."""
        try:
            field = FittedField.from_poly(
                MultiPoly.from_dict(data["poly"]),
                str(data["variable"]),
                RectDomain.from_dict(data["domain"]),
            )
            diagnostics = data.get("diagnostics")
        except (KeyError, TypeError, ValueError) as error:
            raise FormatError(f"Invalid field document: {error}.", origin="surface-fit") from None
        if diagnostics is None:
            return field
        return replace(field, diagnostics=FitDiagnostics(**diagnostics))


def fit_surface(
    table: SampleTable,
    variable: str,
    degree: int = DEFAULT_DEGREE,
    objective: Objective = "ols",
    *,
    cells: int = DEFAULT_CELLS,
    bin_w: BinningSpec | None = None,
    domain: RectDomain | None = None,
) -> FittedField:
    """Fit a polynomial of total degree ``<= degree`` to ``variable`` over ``(x, y)``.

    With ``objective="ols"`` the squared residuals at the samples are minimized. With
    ``objective="correspondence"`` the correspondence objective is minimized instead: the
    sample coordinates are grouped into ``cells x cells`` grid cells that play the role of
    the predictor bins, the values of ``variable`` are binned by ``bin_w`` (default: one bin
    per distinct value) and the polynomial is evaluated at cell centers.

    Example
    -------
    >>> from expcorr.table import SampleRow
    >>> points = [(0, 0), (1, 0), (0, 1), (1, 1), (2, 1)]
    >>> rows = [SampleRow(str(i), x, y, {"w": 2 + 3 * x - y}) for i, (x, y) in enumerate(points)]
    >>> field = fit_surface(SampleTable(rows, variables=["w"]), "w", degree=1)
    >>> [round(field.poly.coefficient(e), 9) for e in [(0, 0), (1, 0), (0, 1)]]
    [2.0, 3.0, -1.0]

    :param domain: Rectangle of the field, by default the bounding rectangle of the samples.
    :raises UnderdeterminedError: If there are fewer rows than monomials.
    :raises DegenerateGeometryError: If the sample locations cannot determine the surface.
    """
    origin = f"surface-fit.fit_surface[{variable}]"
    table.require(variable, origin=origin)
    if not 0 <= degree <= MAX_DEGREE:
        raise FormatError(f"Degree must be in 0..{MAX_DEGREE}, got {degree}.", origin=origin)
    if cells < 1:
        raise FormatError("The cell count must be at least 1.", origin=origin)

    exponents = monomial_exponents(2, degree)
    if len(table) < len(exponents):
        raise UnderdeterminedError(
            f"{len(table)} rows cannot determine {len(exponents)} coefficients of degree {degree}.",
            origin=origin,
        )

    xs, ys, w = table.xs, table.ys, table.column(variable)
    domain = domain or _bounding_domain(xs, ys, degree, origin=origin)
    outside = [r.id for r in table if not domain.contains(r.x, r.y)]
    if outside:
        raise OutOfRangeError(f"Rows {outside} lie outside the domain.", origin=origin)

    frame = AffineFrame.of(domain)
    u, v = frame.to_local(xs, ys)
    if objective == "ols":
        design, target = _basis(u, v, exponents), w
    elif objective == "correspondence":
        design, target = _correspondence_system(u, v, w, exponents, cells, bin_w)
    else:
        raise FormatError(f"Unknown objective '{objective}'.", origin=origin)

    coefficients, _, rank, _ = np.linalg.lstsq(design, target, rcond=None)
    logger.debug("%s: %d equations, rank %d of %d", origin, len(target), rank, len(exponents))
    if rank < len(exponents):
        raise DegenerateGeometryError(
            f"Sample locations determine only {rank} of {len(exponents)} coefficients "
            "(collinear or repeated points?).",
            origin=origin,
        )

    local = MultiPoly(COORDINATES, zip(exponents, (float(c) for c in coefficients)))
    local = local.pruned(FIT_PRUNE_TOLERANCE)
    poly = frame.local_to_global(local).pruned(FIT_PRUNE_TOLERANCE)

    residuals = w - (local({"x": u, "y": v}) + np.zeros_like(w))
    rss = math.fsum(residuals**2)
    tss = math.fsum((w - w.mean()) ** 2)
    diagnostics = FitDiagnostics(
        rss=rss,
        r_squared=1.0 if tss == 0.0 else 1.0 - rss / tss,
        n=len(table),
        degree=degree,
        objective=objective,
    )
    return FittedField(
        poly=poly,
        variable=variable,
        domain=domain,
        diagnostics=diagnostics,
        local_poly=local,
        frame=frame,
    )


def evaluate(field: FittedField, x: float, y: float) -> float:
    """Value of the field at ``(x, y)``; points outside the domain are logged.

    Example
    -------
    >>> from expcorr.polynomial import MultiPoly
    >>> px, py = MultiPoly.variable("x", ["x", "y"]), MultiPoly.variable("y", ["x", "y"])
    >>> evaluate(FittedField.from_poly(2 + 3 * px - py, "w", RectDomain(0, 1, 0, 1)), 1, 1)
    4.0

    """
    if not field.domain.contains(x, y):
        logger.warning(
            "Evaluating field '%s' at (%g, %g) outside its domain.", field.variable, x, y
        )
    point = field.values(np.array([x], dtype=np.float64), np.array([y], dtype=np.float64))
    return float(point[0])


def to_implicit(field: FittedField) -> MultiPoly:
    """The implicit form ``poly(x, y) - w`` over ``(x, y, w)``.

    Example
    -------
    >>> from expcorr.polynomial import MultiPoly
    >>> px, py = MultiPoly.variable("x", ["x", "y"]), MultiPoly.variable("y", ["x", "y"])
    >>> print(to_implicit(FittedField.from_poly(px + py, "w", RectDomain(0, 1, 0, 1))))
    x + y - w

    """
    variables = (*COORDINATES, field.variable)
    if field.variable in COORDINATES:
        raise ShapeError(
            f"Variable name '{field.variable}' collides with a coordinate.",
            origin="surface-fit.to_implicit",
        )
    return field.poly.with_variables(variables) - MultiPoly.variable(field.variable, variables)


def _bounding_domain(
    xs: npt.NDArray[np.float64], ys: npt.NDArray[np.float64], degree: int, *, origin: str
) -> RectDomain:
    x_lo, x_hi = float(xs.min()), float(xs.max())
    y_lo, y_hi = float(ys.min()), float(ys.max())
    if degree == 0:
        # a constant needs no spread; give flat samples a unit box
        if x_lo == x_hi:
            x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
        if y_lo == y_hi:
            y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
    elif x_lo == x_hi or y_lo == y_hi:
        raise DegenerateGeometryError(
            "All samples share one x or one y coordinate.", origin=origin
        )
    return RectDomain(x_lo, x_hi, y_lo, y_hi)


def _basis(
    u: npt.NDArray[np.float64], v: npt.NDArray[np.float64], exponents: list[tuple[int, ...]]
) -> npt.NDArray[np.float64]:
    return np.column_stack([u**i * v**j for i, j in exponents]).astype(np.float64)


def _correspondence_system(
    u: npt.NDArray[np.float64],
    v: npt.NDArray[np.float64],
    w: npt.NDArray[np.float64],
    exponents: list[tuple[int, ...]],
    cells: int,
    bin_w: BinningSpec | None,
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    ix = np.clip(np.floor((u + 1.0) / 2.0 * cells).astype(int), 0, cells - 1)
    iy = np.clip(np.floor((v + 1.0) / 2.0 * cells).astype(int), 0, cells - 1)
    cell_bins = (ix * cells + iy).tolist()
    w_bins, _ = (bin_w or BinningSpec.distinct()).assign(w)

    pairs = correspondence_pairs(w, w_bins, cell_bins)
    centers = np.array([divmod(j, cells) for j, _ in pairs], dtype=np.float64)
    cu = -1.0 + (centers[:, 0] + 0.5) * 2.0 / cells
    cv = -1.0 + (centers[:, 1] + 0.5) * 2.0 / cells
    return _basis(cu, cv, exponents), np.array([t for _, t in pairs], dtype=np.float64)
