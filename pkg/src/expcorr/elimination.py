"""Eliminating the spatial coordinates from fitted fields.

Every field ``w = f(x, y)`` gives an implicit polynomial ``f(x, y) - w``. Pairs of implicit
polynomials are combined with Sylvester resultants, first to remove ``x``, then ``y``,
leaving a relation among the measured variables alone.
"""

import logging
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from functools import cache
from typing import Literal, NamedTuple

import numpy as np

from .errors import (
    DegenerateEliminationError,
    IncompleteEliminationError,
    NothingToEliminateError,
    ShapeError,
)
from .polynomial import MultiPoly
from .surface import COORDINATES, FittedField, to_implicit
from .table import SampleTable

logger = logging.getLogger(__name__)

MAX_ELIMINATION_DEGREE = 4
PRUNE_TOLERANCE = 1e-10
"""Relative magnitude below which resultant coefficients are dropped."""

VANISHING_TOLERANCE = 1e-10
"""A resultant this small relative to its a priori coefficient scale counts as zero."""


@dataclass(frozen=True)
class EliminationStep:
    """One recorded step of a coupling derivation."""

    name: str
    left: str
    right: str
    variable: str
    rule: Literal["sylvester", "power"]
    """``power`` when one input does not contain ``variable``."""

    terms: int
    """Number of terms of the normalized result."""

    def __str__(self) -> str:
        """Human readable form, e.g. ``g1 = Res_x(F_c, F_n)``."""
        return f"{self.name} = Res_{self.variable}({self.left}, {self.right})"


@dataclass(frozen=True)
class CouplingRelation:
    """An implicit relation ``poly = 0`` among measured variables."""

    poly: MultiPoly
    provenance: tuple[EliminationStep, ...]
    scale: float
    """Factor applied to reach a max-abs coefficient of 1."""

    components: tuple[MultiPoly, MultiPoly]
    """The two coordinate-free relations; ``poly`` is the sum of their squares."""

    prune_tolerance: float = PRUNE_TOLERANCE


class CouplingCheck(NamedTuple):
    """Magnitude of a coupling relation on observed data."""

    max_abs: float
    rms: float


def raw_resultant(p_a: MultiPoly, p_b: MultiPoly, var: str) -> MultiPoly:
    """Determinant of the Sylvester matrix of ``p_a`` and ``p_b`` with respect to ``var``.

    The entries are polynomials in the remaining variables and the determinant is expanded
    without division. ``raw_resultant(b, a) = (-1)^(m n) raw_resultant(a, b)`` where ``m``
    and ``n`` are the degrees in ``var``.

    Example
    -------
    >>> x, w, t = (MultiPoly.variable(v, ["x", "w", "t"]) for v in "xwt")
    >>> print(raw_resultant(x * x - w, x - t, "x"))
    t^2 - w

    :raises NothingToEliminateError: If an input does not contain ``var``.
    """
    origin = "elimination.sylvester_resultant"
    m, n = p_a.degree(var), p_b.degree(var)
    if m <= 0 or n <= 0:
        raise NothingToEliminateError(
            f"Both polynomials must contain '{var}' (degrees {m} and {n}).", origin=origin
        )
    if max(m, n) > MAX_ELIMINATION_DEGREE:
        raise ShapeError(
            f"Degrees {m} and {n} in '{var}' exceed the limit {MAX_ELIMINATION_DEGREE}.",
            origin=origin,
        )

    a, b = _union(p_a, p_b)
    rest = tuple(v for v in a.variables if v != var)
    coeffs_a = a.coefficients_in(var)[::-1]
    coeffs_b = b.coefficients_in(var)[::-1]

    size = m + n
    zero = MultiPoly(rest)
    matrix = [[zero] * size for _ in range(size)]
    for row in range(n):
        for k, c in enumerate(coeffs_a):
            matrix[row][row + k] = c
    for row in range(m):
        for k, c in enumerate(coeffs_b):
            matrix[n + row][row + k] = c

    result = _determinant(matrix, rest)
    logger.debug("Res_%s: %dx%d Sylvester matrix, %d terms", var, size, size, len(result))
    return result


def sylvester_resultant(p_a: MultiPoly, p_b: MultiPoly, var: str) -> MultiPoly:
    """Resultant of two polynomials with respect to ``var``, normalized to max-abs 1.

    Coefficients below ``PRUNE_TOLERANCE`` relative to the largest one are dropped.

    Example
    -------
    >>> x, c, n = (MultiPoly.variable(v, ["x", "c", "n"]) for v in "xcn")
    >>> print(sylvester_resultant(x + c - 1, x - n, "x"))
    c + n - 1

    :raises NothingToEliminateError: If an input does not contain ``var``.
    :raises DegenerateEliminationError: If the resultant vanishes (a common factor).
    """
    raw = raw_resultant(p_a, p_b, var)
    m, n = p_a.degree(var), p_b.degree(var)
    bound = p_a.max_abs_coefficient**n * p_b.max_abs_coefficient**m
    return _checked(raw, bound, origin="elimination.sylvester_resultant")


def derive_coupling(fields: Mapping[str, FittedField]) -> CouplingRelation:
    """Eliminate ``x`` and ``y`` from four fields.

    With the fields taken in mapping order as ``c, n, p, m`` and ``F_v`` their implicit
    forms::

        g1 = Res_x(F_c, F_n)   g2 = Res_x(F_c, F_p)   h1 = Res_y(g1, g2)
        g3 = Res_x(F_n, F_p)   g4 = Res_x(F_n, F_m)   h2 = Res_y(g3, g4)

    The relation is ``h1^2 + h2^2``, zero exactly where both ``h1`` and ``h2`` vanish. When
    one input of a step does not contain the eliminated coordinate, the step raises it to
    the degree of the other input instead (the resultant of a constant).

    :raises NothingToEliminateError: If a field does not depend on the coordinates.
    :raises DegenerateEliminationError: If a step vanishes identically; the error names it.
    :raises IncompleteEliminationError: If a coordinate survives.
    """
    origin = "elimination.derive_coupling"
    if len(fields) != 4:
        raise ShapeError(f"Exactly four fields are required, got {len(fields)}.", origin=origin)

    names = list(fields)
    implicit: dict[str, MultiPoly] = {}
    for key, field in fields.items():
        if not set(field.poly.used_variables) & set(COORDINATES):
            raise NothingToEliminateError(
                f"Field '{key}' is constant; there is nothing to eliminate.", origin=origin
            )
        implicit[f"F_{field.variable}"] = to_implicit(field)

    f_c, f_n, f_p, f_m = (f"F_{fields[k].variable}" for k in names)
    plan = [
        ("g1", f_c, f_n, "x"),
        ("g2", f_c, f_p, "x"),
        ("h1", "g1", "g2", "y"),
        ("g3", f_n, f_p, "x"),
        ("g4", f_n, f_m, "x"),
        ("h2", "g3", "g4", "y"),
    ]

    steps: list[EliminationStep] = []
    for name, left, right, var in plan:
        result, rule = _eliminate(implicit[left], implicit[right], var, step=f"{name} = Res_{var}")
        implicit[name] = result
        steps.append(EliminationStep(name, left, right, var, rule, len(result)))
        logger.info("%s: %d terms (%s)", steps[-1], len(result), rule)

    h1, h2 = implicit["h1"], implicit["h2"]
    combined = (h1 * h1 + h2 * h2).pruned(PRUNE_TOLERANCE)
    leftover = [v for v in COORDINATES if v in combined.used_variables]
    if leftover:
        raise IncompleteEliminationError(
            f"Coordinate(s) {', '.join(leftover)} survived the elimination.", origin=origin
        )

    final = combined.normalized(PRUNE_TOLERANCE).drop_unused()
    lead = next(c for c in combined.terms.values() if abs(c) == combined.max_abs_coefficient)
    return CouplingRelation(
        poly=final,
        provenance=tuple(steps),
        scale=1.0 / lead,
        components=(h1.drop_unused(), h2.drop_unused()),
    )


def verify_coupling(relation: CouplingRelation, table: SampleTable) -> CouplingCheck:
    """Evaluate a coupling relation at every row's observed values.

    Example
    -------
    >>> c, n = MultiPoly.variable("c", ["c", "n"]), MultiPoly.variable("n", ["c", "n"])
    >>> relation = CouplingRelation(c - n, (), 1.0, (c - n, c - n))
    >>> verify_coupling(relation, SampleTable([], variables=["c", "n"]))
    CouplingCheck(max_abs=0.0, rms=0.0)

    :raises ShapeError: If the table lacks a variable of the relation.
    """
    used = relation.poly.used_variables
    table.require(*used, origin="elimination.verify_coupling")
    if not len(table):
        logger.warning("Verifying a coupling relation on an empty table.")
        return CouplingCheck(0.0, 0.0)

    values = np.asarray(
        relation.poly({v: table.column(v) for v in used}) + np.zeros(len(table)),
        dtype=np.float64,
    )
    return CouplingCheck(
        max_abs=float(np.abs(values).max()),
        rms=math.sqrt(math.fsum(values**2) / len(values)),
    )


def _eliminate(
    p_a: MultiPoly, p_b: MultiPoly, var: str, *, step: str
) -> tuple[MultiPoly, Literal["sylvester", "power"]]:
    origin = f"elimination.derive_coupling[{step}]"
    m, n = p_a.degree(var), p_b.degree(var)
    if m <= 0 and n <= 0:
        raise NothingToEliminateError(f"Neither input contains '{var}'.", origin=origin)
    if m > 0 and n > 0:
        try:
            return sylvester_resultant(p_a, p_b, var), "sylvester"
        except DegenerateEliminationError as error:
            raise DegenerateEliminationError(str(error), origin=origin) from None

    constant, other = (p_a, p_b) if m <= 0 else (p_b, p_a)
    power = other.degree(var)
    raw = _union(constant, other)[0] ** power
    bound = constant.max_abs_coefficient**power
    return _checked(raw, bound, origin=origin).drop_unused(), "power"


def _checked(raw: MultiPoly, bound: float, *, origin: str) -> MultiPoly:
    if raw.is_zero or raw.max_abs_coefficient <= VANISHING_TOLERANCE * bound:
        raise DegenerateEliminationError(
            "The resultant vanishes identically; the inputs share a common factor.",
            origin=origin,
        )
    return raw.normalized(PRUNE_TOLERANCE)


def _union(p_a: MultiPoly, p_b: MultiPoly) -> tuple[MultiPoly, MultiPoly]:
    variables = p_a.variables + tuple(v for v in p_b.variables if v not in p_a.variables)
    return p_a.with_variables(variables), p_b.with_variables(variables)


def _determinant(matrix: Sequence[Sequence[MultiPoly]], variables: Sequence[str]) -> MultiPoly:
    # Laplace expansion along rows, memoized on the set of used columns
    size = len(matrix)

    @cache
    def minor(row: int, used: int) -> MultiPoly:
        if row == size:
            return MultiPoly.constant(1.0, variables)
        total = MultiPoly(variables)
        sign = 1
        for col in range(size):
            if used >> col & 1:
                continue
            entry = matrix[row][col]
            if not entry.is_zero:
                sub = minor(row + 1, used | 1 << col)
                if not sub.is_zero:
                    total = total + entry * sub if sign > 0 else total - entry * sub
            sign = -sign
        return total

    return minor(0, 0)
