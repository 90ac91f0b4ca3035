"""Classical correlation: Pearson, Spearman, stratified analysis and ancestral regression."""

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import Literal

import numpy as np
import numpy.typing as npt
from scipy import stats

from .errors import (
    DegenerateInputError,
    DegeneratePredictorsError,
    ShapeError,
    StratumTooSmallError,
)
from .table import SampleTable, Stratification, stratify

logger = logging.getLogger(__name__)

Method = Literal["pearson", "spearman"]

RCOND_BOUND = 1e-10
"""Predictor correlation matrices with a smaller reciprocal condition number are rejected."""

MIN_PAIRS = 3


@dataclass(frozen=True)
class CorrelationResult:
    """A correlation coefficient with its two-sided significance."""

    r: float
    """The coefficient, within ``[-1, 1]``."""

    n: int
    """Number of pairs."""

    p_value: float
    """Two-sided p-value of the Student-t test with ``n - 2`` degrees of freedom."""

    method: Method


def pearson(xs: Sequence[float], ys: Sequence[float]) -> CorrelationResult:
    """Product-moment correlation of two series.

    Example
    -------
    >>> pearson([1, 2, 3], [2, 1, 3]).r
    0.5

    :raises ShapeError: If the lengths differ or are below three.
    :raises DegenerateInputError: If a series has zero variance.
    """
    x, y = _as_pair(xs, ys, origin="classical-corr.pearson")
    return _pearson(x, y, method="pearson", origin="classical-corr.pearson")


def spearman(xs: Sequence[float], ys: Sequence[float]) -> CorrelationResult:
    """Rank correlation: Pearson's coefficient of the average ranks.

    Ties get the mean of the rank positions they occupy.

    Example
    -------
    >>> spearman([1, 2, 3, 4], [1, 3, 2, 4]).r
    0.8

    :raises ShapeError: If the lengths differ or are below three.
    :raises DegenerateInputError: If all values of a series are tied.
    """
    origin = "classical-corr.spearman"
    x, y = _as_pair(xs, ys, origin=origin)
    return _pearson(average_ranks(x), average_ranks(y), method="spearman", origin=origin)


def average_ranks(values: Sequence[float] | npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    """Return 1-based ranks where tied values share the mean of their positions.

    Example
    -------
    >>> average_ranks([3.0, 3.0, 7.0]).tolist()
    [1.5, 1.5, 3.0]

    """
    return np.asarray(stats.rankdata(values, method="average"), dtype=np.float64)


_method_registry: dict[str, Callable[[Sequence[float], Sequence[float]], CorrelationResult]] = dict(
    # NOTE: the first entry is the default of the command line.
    spearman=spearman,
    pearson=pearson,
)


def available_methods() -> list[str]:
    """Names accepted as correlation ``method``."""
    return list(_method_registry.keys())


def correlate(xs: Sequence[float], ys: Sequence[float], method: str) -> CorrelationResult:
    """Dispatch to ``pearson`` or ``spearman`` by name."""
    if method not in _method_registry:
        raise ShapeError(
            f"Unknown method '{method}'. Use one of {', '.join(available_methods())}.",
            origin="classical-corr.correlate",
        )
    return _method_registry[method](xs, ys)


@dataclass(frozen=True)
class StratifiedReport:
    """Per-stratum and pooled correlation of two variables."""

    per_stratum: dict[str, CorrelationResult]
    pooled: CorrelationResult

    @property
    def neutralization_gap(self) -> float:
        """Smallest distance between a stratum coefficient and the pooled one."""
        return min(abs(res.r - self.pooled.r) for res in self.per_stratum.values())

    @property
    def pooled_between(self) -> bool:
        """Whether the pooled coefficient lies between the extreme stratum coefficients."""
        rs = [res.r for res in self.per_stratum.values()]
        return min(rs) <= self.pooled.r <= max(rs)


def stratified_correlation(
    table: SampleTable,
    var_a: str,
    var_b: str,
    strat: Stratification,
    method: str = "spearman",
) -> StratifiedReport:
    """Correlate two variables inside every stratum and over all rows.

    A gap between the stratum coefficients and the pooled coefficient shows how mixing
    samples from distinct processes shifts the correlation.

    :raises StratumTooSmallError: If a stratum holds fewer than three rows.
    """
    origin = "classical-corr.stratified_correlation"
    table.require(var_a, var_b, origin=origin)

    per_stratum: dict[str, CorrelationResult] = {}
    for name, part in stratify(table, strat).items():
        if len(part) < MIN_PAIRS:
            raise StratumTooSmallError(
                f"Stratum '{name}' has {len(part)} rows, at least {MIN_PAIRS} are required.",
                origin=origin,
            )
        per_stratum[name] = correlate(part.column(var_a), part.column(var_b), method)

    pooled = correlate(table.column(var_a), table.column(var_b), method)
    assert pooled.n == sum(res.n for res in per_stratum.values())

    logger.debug("stratified %s: pooled r=%.6f, %d strata", method, pooled.r, len(per_stratum))
    return StratifiedReport(per_stratum=per_stratum, pooled=pooled)


@dataclass(frozen=True)
class RegressionSpec:
    """Inputs of the ancestral-heredity regression.

    The target ``Q`` is predicted from ``n`` predictors ``P_i`` with standard deviations
    ``sigmas_p``, observed deviations ``deviations_h``, target correlations ``r_qp`` and
    mutual correlations ``r_pp``.
    """

    sigma_q: float
    sigmas_p: tuple[float, ...]
    deviations_h: tuple[float, ...]
    r_qp: tuple[float, ...]
    r_pp: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        """Validate lengths, ranges and the shape of ``r_pp``."""
        origin = "classical-corr.RegressionSpec"
        n = len(self.sigmas_p)
        if n < 1 or not (len(self.deviations_h) == len(self.r_qp) == len(self.r_pp) == n):
            raise ShapeError("All predictor lists must share one length >= 1.", origin=origin)
        if self.sigma_q <= 0 or any(s <= 0 for s in self.sigmas_p):
            raise ShapeError("Standard deviations must be positive.", origin=origin)
        if any(abs(r) > 1 for r in self.r_qp):
            raise ShapeError("Correlations must lie in [-1, 1].", origin=origin)

        matrix = np.asarray(self.r_pp, dtype=np.float64)
        if matrix.shape != (n, n):
            raise ShapeError(f"r_pp must be a {n}x{n} matrix.", origin=origin)
        if not np.allclose(matrix, matrix.T, rtol=0, atol=1e-12):
            raise ShapeError("r_pp must be symmetric.", origin=origin)
        if not np.allclose(np.diag(matrix), 1.0, rtol=0, atol=1e-12):
            raise ShapeError("r_pp must have a unit diagonal.", origin=origin)


def regression_weights(spec: RegressionSpec) -> npt.NDArray[np.float64]:
    """Solve the standardized normal equations ``r_pp @ J = r_qp`` for ``J``.

    :raises DegeneratePredictorsError: If ``r_pp`` is singular or ill-conditioned.
    """
    matrix = np.asarray(spec.r_pp, dtype=np.float64)
    condition = np.linalg.cond(matrix)
    if not np.isfinite(condition) or 1.0 / condition < RCOND_BOUND:
        raise DegeneratePredictorsError(
            f"Predictor correlations are ill-conditioned (cond={condition:.3g}).",
            origin="classical-corr.ancestral_regression",
        )
    return np.asarray(np.linalg.solve(matrix, np.asarray(spec.r_qp)), dtype=np.float64)


def ancestral_regression(spec: RegressionSpec) -> float:
    """Most probable deviation of the target given the predictor deviations.

    ``p_q = sum_i J_i * (sigma_q / sigma_p_i) * h_p_i``. With mutually uncorrelated
    predictors ``J`` equals ``r_qp``.

    Example
    -------
    >>> spec = RegressionSpec(2.0, (1.0,), (1.5,), (0.6,), ((1.0,),))
    >>> round(ancestral_regression(spec), 12)
    1.8

    """
    weights = regression_weights(spec)
    scale = spec.sigma_q / np.asarray(spec.sigmas_p)
    return float(np.sum(weights * scale * np.asarray(spec.deviations_h)))


def _as_pair(
    xs: Sequence[float], ys: Sequence[float], *, origin: str
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.ndim != 1 or x.shape != y.shape:
        raise ShapeError(
            f"Series must be one-dimensional and of equal length, got {x.shape} and {y.shape}.",
            origin=origin,
        )
    if len(x) < MIN_PAIRS:
        raise ShapeError(f"At least {MIN_PAIRS} pairs are required, got {len(x)}.", origin=origin)
    return x, y


def _pearson(
    x: npt.NDArray[np.float64], y: npt.NDArray[np.float64], *, method: Method, origin: str
) -> CorrelationResult:
    xm = x - x.mean()
    ym = y - y.mean()
    sxx = float(np.dot(xm, xm))
    syy = float(np.dot(ym, ym))
    # a constant series need not center to exact zeros, so test the range
    if np.ptp(x) == 0.0 or np.ptp(y) == 0.0 or sxx == 0.0 or syy == 0.0:
        raise DegenerateInputError(
            "A series has zero variance" + (" (all values tied)." if method == "spearman" else "."),
            origin=origin,
        )

    r = float(np.dot(xm, ym)) / math.sqrt(sxx * syy)
    # |r| > 1 can only be a rounding artifact
    r = max(-1.0, min(1.0, r))
    n = len(x)
    return CorrelationResult(r=r, n=n, p_value=_t_test_p_value(r, n), method=method)


def _t_test_p_value(r: float, n: int) -> float:
    if abs(r) == 1.0:
        return 0.0
    t = r * math.sqrt((n - 2) / (1.0 - r * r))
    return float(min(1.0, 2.0 * stats.t.sf(abs(t), n - 2)))
