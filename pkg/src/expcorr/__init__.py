"""expcorr measures how spatially sampled variables relate to each other.

Everything from the ``expcorr`` module is considered public. Everything else is considered
private.

Usage
=====

Stratified correlation
----------------------

The bundled synthetic landscape consists of two processes in two latitude bands. Both tie
``c`` and ``n`` to one latent driver, but with different offsets:

>>> spec = neutralization_landscape()
>>> table = generate_landscape(spec)
>>> len(table), table.variables
(120, ('c', 'n'))

Inside each band the variables are strongly correlated. Pooling the bands mixes the two
processes and the pooled coefficient moves away from the per-band ones:

>>> report = stratified_correlation(table, "c", "n", spec.stratification())
>>> all(res.r > 0.8 for res in report.per_stratum.values()), report.neutralization_gap > 0.05
(True, True)

Spatial functions
-----------------

A variable can be modeled as a polynomial surface over the coordinates:

>>> field = fit_surface(table, "c", degree=1)
>>> field.diagnostics.n, field.diagnostics.degree
(120, 1)

Two surfaces are compared by the cosine of the angle between them, the normalized inner
product over their common domain:

>>> x = MultiPoly.variable("x", ["x", "y"])
>>> y = MultiPoly.variable("y", ["x", "y"])
>>> square = RectDomain(0.0, 1.0, 0.0, 1.0)
>>> fx = FittedField.from_poly(x, "a", square)
>>> round(functional_correlation(fx, FittedField.from_poly(-1 * x, "b", square)).r12, 12)
-1.0

Coupling relations
------------------

Eliminating the coordinates from four fields leaves a relation among the variables only:

>>> planar = {"c": x + y, "n": x - y, "p": 2 * x, "m": 3 * y}
>>> relation = derive_coupling(
...     {name: FittedField.from_poly(p, name, square) for name, p in planar.items()}
... )
>>> print(relation.components[0])
c + n - p
>>> point = {"c": 0.9, "n": -0.3, "p": 0.6, "m": 1.8}  # x = 0.3, y = 0.6
>>> abs(relation.poly(point)) < 1e-12
True
"""

from .correlation import (
    CorrelationResult,
    RegressionSpec,
    StratifiedReport,
    ancestral_regression,
    average_ranks,
    pearson,
    regression_weights,
    spearman,
    stratified_correlation,
)
from .correspondence import (
    BinningSpec,
    CorrespondenceFit,
    CorrespondenceSystem,
    Pick,
    ResidualReport,
    build_correspondence,
    correspondence_objective,
    fit_by_correspondence,
    parse_chain,
    residual_e,
    select_chain,
    total_residual,
)
from .elimination import (
    CouplingCheck,
    CouplingRelation,
    EliminationStep,
    derive_coupling,
    raw_resultant,
    sylvester_resultant,
    verify_coupling,
)
from .functional import (
    FunctionalCorrelation,
    functional_correlation,
    inner_product,
    norm,
    quadrature_inner_product,
    shared_domain,
)
from .ingest import ingest_csv, write_csv
from .polynomial import MultiPoly
from .random_source import Pcg32Rng, RngBase
from .report import RunReport
from .surface import (
    AffineFrame,
    FitDiagnostics,
    FittedField,
    RectDomain,
    evaluate,
    fit_surface,
    to_implicit,
)
from .svg import emit_svg_scatter, render_svg_scatter
from .synthgen import (
    LandscapeSpec,
    ProcessSpec,
    Relation,
    generate_landscape,
    neutralization_landscape,
)
from .table import Band, SampleRow, SampleTable, Stratification, stratify

__version__ = "0.1.0"

__all__ = [
    "AffineFrame",
    "Band",
    "BinningSpec",
    "CorrelationResult",
    "CorrespondenceFit",
    "CorrespondenceSystem",
    "CouplingCheck",
    "CouplingRelation",
    "EliminationStep",
    "FitDiagnostics",
    "FittedField",
    "FunctionalCorrelation",
    "LandscapeSpec",
    "MultiPoly",
    "Pcg32Rng",
    "Pick",
    "ProcessSpec",
    "RectDomain",
    "RegressionSpec",
    "Relation",
    "ResidualReport",
    "RngBase",
    "RunReport",
    "SampleRow",
    "SampleTable",
    "StratifiedReport",
    "Stratification",
    "ancestral_regression",
    "average_ranks",
    "build_correspondence",
    "correspondence_objective",
    "derive_coupling",
    "emit_svg_scatter",
    "evaluate",
    "fit_by_correspondence",
    "fit_surface",
    "functional_correlation",
    "generate_landscape",
    "ingest_csv",
    "inner_product",
    "neutralization_landscape",
    "norm",
    "parse_chain",
    "pearson",
    "quadrature_inner_product",
    "raw_resultant",
    "regression_weights",
    "render_svg_scatter",
    "residual_e",
    "select_chain",
    "shared_domain",
    "spearman",
    "stratified_correlation",
    "stratify",
    "sylvester_resultant",
    "to_implicit",
    "total_residual",
    "verify_coupling",
    "write_csv",
]
