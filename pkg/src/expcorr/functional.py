"""Correlation of two spatial functions as the cosine of the angle between them.

``r12 = <f1|f2> / (||f1|| ||f2||)`` with the plain (Lebesgue) inner product over a rectangle.
The coefficient is uncentered: adding a constant to a field changes it. ``centered=True``
subtracts each field's mean over the domain first.
"""

import logging
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
import numpy.typing as npt
from numpy.polynomial.legendre import leggauss

from .errors import DegenerateFieldError, DegenerateGeometryError, NumericalIntegrityError
from .polynomial import MultiPoly
from .surface import COORDINATES, AffineFrame, FittedField, RectDomain

logger = logging.getLogger(__name__)

Integration = Literal["exact-monomial", "quadrature"]

NORM_FLOOR = 1e-12
OVERSHOOT_LIMIT = 1e-9
SIGN_GRID = 32
"""Points per axis of the grid on which fields are checked for negative values."""


@dataclass(frozen=True)
class FunctionalCorrelation:
    """Result of ``functional_correlation``."""

    r12: float
    inner: float
    norm1: float
    norm2: float
    domain: RectDomain
    method: Integration
    centered: bool = False
    negative_fields: tuple[str, ...] = ()
    """Variables whose field takes negative values on the sign-check grid."""


def shared_domain(f1: FittedField, f2: FittedField) -> RectDomain:
    """Intersection of the domains of two fields.

    :raises DegenerateGeometryError: If the domains do not overlap in a rectangle of
        positive area.
    """
    domain = f1.domain.intersection(f2.domain)
    if domain is None:
        raise DegenerateGeometryError(
            f"The domains of '{f1.variable}' and '{f2.variable}' do not overlap.",
            origin="functional-corr.shared_domain",
        )
    return domain


def inner_product(f1: FittedField, f2: FittedField, domain: RectDomain | None = None) -> float:
    """Integral of ``f1 * f2`` over ``domain`` (default: the shared domain).

    Both fields are re-expressed in the standardized frame of ``domain``, where every pair of
    terms integrates exactly (``int_-1^1 u^k du`` is ``2 / (k + 1)`` for even ``k`` and 0 for odd
    ``k``). The pairwise contributions are summed with exact rounding, so the result does not
    depend on the argument order.

    Example
    -------
    >>> x, y = MultiPoly.variable("x", ["x", "y"]), MultiPoly.variable("y", ["x", "y"])
    >>> square = RectDomain(0, 1, 0, 1)
    >>> fx, fy = FittedField.from_poly(x, "a", square), FittedField.from_poly(y, "b", square)
    >>> inner_product(fx, fy)
    0.25

    """
    domain = domain or shared_domain(f1, f2)
    return _jacobian(domain) * _inner(_on_domain(f1, domain), _on_domain(f2, domain))


def norm(f: FittedField, domain: RectDomain | None = None) -> float:
    """``sqrt(<f|f>)`` over ``domain`` (default: the field's own domain)."""
    domain = domain or f.domain
    q = _on_domain(f, domain)
    return math.sqrt(max(_jacobian(domain) * _inner(q, q), 0.0))


def quadrature_inner_product(
    f1: FittedField, f2: FittedField, domain: RectDomain | None = None, order: int | None = None
) -> float:
    """Tensor-product Gauss-Legendre approximation of ``<f1|f2>``.

    Exact when the per-axis degree of ``f1 * f2`` is at most ``2 * order - 1``; ``order``
    defaults to the smallest such value.
    """
    domain = domain or shared_domain(f1, f2)
    return _quadrature(_on_domain(f1, domain), _on_domain(f2, domain), domain, order)


def functional_correlation(
    f1: FittedField,
    f2: FittedField,
    domain: RectDomain | None = None,
    *,
    centered: bool = False,
    integration: Integration = "exact-monomial",
    order: int | None = None,
) -> FunctionalCorrelation:
    """Normalized inner product of two fields.

    ``r12 = 1`` means both fields point in the same direction, ``-1`` the opposite one.

    Example
    -------
    >>> x = MultiPoly.variable("x", ["x", "y"])
    >>> square = RectDomain(0, 1, 0, 1)
    >>> result = functional_correlation(
    ...     FittedField.from_poly(x, "a", square), FittedField.from_poly(x * x, "b", square)
    ... )
    >>> round(result.r12, 9) == round(math.sqrt(15) / 4, 9)
    True

    :param domain: Integration domain, by default the intersection of the field domains.
    :param centered: Subtract each field's domain mean before correlating.
    :raises DegenerateFieldError: If a field has (numerically) zero norm on the domain.
    :raises NumericalIntegrityError: If ``|r12|`` exceeds 1 by more than rounding allows.
    """
    origin = "functional-corr.functional_correlation"
    domain = domain or shared_domain(f1, f2)
    raw1, raw2 = _on_domain(f1, domain), _on_domain(f2, domain)
    q1, q2 = raw1, raw2
    if centered:
        q1, q2 = _centered(q1), _centered(q2)

    if integration == "exact-monomial":
        jacobian = _jacobian(domain)
        inner = jacobian * _inner(q1, q2)
        sq1, sq2 = jacobian * _inner(q1, q1), jacobian * _inner(q2, q2)
    else:
        inner = _quadrature(q1, q2, domain, order)
        sq1, sq2 = _quadrature(q1, q1, domain, order), _quadrature(q2, q2, domain, order)

    norm1, norm2 = math.sqrt(max(sq1, 0.0)), math.sqrt(max(sq2, 0.0))
    for field, value in ((f1, norm1), (f2, norm2)):
        if value <= NORM_FLOOR:
            raise DegenerateFieldError(
                f"Field '{field.variable}' has zero norm on the domain.", origin=origin
            )

    r12 = inner / (norm1 * norm2)
    if abs(r12) > 1.0 + OVERSHOOT_LIMIT:
        raise NumericalIntegrityError(
            f"|r12| = {abs(r12):.17g} violates the Cauchy-Schwarz bound.", origin=origin
        )
    r12 = max(-1.0, min(1.0, r12))

    negative = tuple(
        f.variable for f, q in ((f1, raw1), (f2, raw2)) if _takes_negative_values(q)
    )
    if negative:
        logger.warning("Fields %s take negative values on the domain.", ", ".join(negative))

    return FunctionalCorrelation(
        r12=r12,
        inner=inner,
        norm1=norm1,
        norm2=norm2,
        domain=domain,
        method=integration,
        centered=centered,
        negative_fields=negative,
    )


def _on_domain(field: FittedField, domain: RectDomain) -> MultiPoly:
    """``field`` over the standardized frame of ``domain`` rather than its own."""
    own, target = field.frame, AffineFrame.of(domain)
    u, v = (MultiPoly.variable(c, COORDINATES) for c in COORDINATES)
    return field.local_poly.substitute(
        {
            "x": (target.x_half / own.x_half) * u + (target.x_center - own.x_center) / own.x_half,
            "y": (target.y_half / own.y_half) * v + (target.y_center - own.y_center) / own.y_half,
        }
    ).with_variables(COORDINATES)


def _jacobian(domain: RectDomain) -> float:
    frame = AffineFrame.of(domain)
    return frame.x_half * frame.y_half


def _inner(q1: MultiPoly, q2: MultiPoly) -> float:
    # integral over [-1, 1]^2, without the jacobian
    a, b = q1.with_variables(COORDINATES), q2.with_variables(COORDINATES)
    return math.fsum(
        (c1 * c2) * (_moment(i1 + i2) * _moment(j1 + j2))
        for (i1, j1), c1 in a
        for (i2, j2), c2 in b
    )


def _moment(k: int) -> float:
    return 0.0 if k % 2 else 2.0 / (k + 1)


def _centered(q: MultiPoly) -> MultiPoly:
    one = MultiPoly.constant(1.0, COORDINATES)
    return q.with_variables(COORDINATES) - _inner(q, one) / 4.0


def _quadrature(q1: MultiPoly, q2: MultiPoly, domain: RectDomain, order: int | None) -> float:
    order = order or _sufficient_order(q1, q2)
    if order < 1:
        raise ValueError("Quadrature order must be positive.")

    nodes, weights = leggauss(order)
    uu, vv = np.meshgrid(nodes, nodes, indexing="ij")
    product = _on_grid(q1, uu, vv) * _on_grid(q2, uu, vv)
    total = (weights[:, None] * weights[None, :] * product).sum()
    return float(_jacobian(domain) * total)


def _sufficient_order(p1: MultiPoly, p2: MultiPoly) -> int:
    degree = max(p1.degree(v) + p2.degree(v) for v in COORDINATES)
    return max(degree, 0) // 2 + 1


def _on_grid(
    poly: MultiPoly, uu: npt.NDArray[np.float64], vv: npt.NDArray[np.float64]
) -> npt.NDArray[np.float64]:
    return np.asarray(poly({"x": uu, "y": vv}) + np.zeros_like(uu), dtype=np.float64)


def _takes_negative_values(q: MultiPoly) -> bool:
    grid = np.linspace(-1.0, 1.0, SIGN_GRID)
    uu, vv = np.meshgrid(grid, grid, indexing="ij")
    return bool((_on_grid(q, uu, vv) < 0.0).any())
