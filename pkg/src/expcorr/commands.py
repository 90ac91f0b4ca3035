import io
import json
from pathlib import Path
from typing import Any, NoReturn

import click

from expcorr.correlation import CorrelationResult, available_methods, stratified_correlation
from expcorr.correspondence import (
    BinningSpec,
    build_correspondence,
    fit_by_correspondence,
    total_residual,
)
from expcorr.elimination import derive_coupling, verify_coupling
from expcorr.errors import ExpcorrError, FileAccessError, FormatError
from expcorr.functional import functional_correlation
from expcorr.ingest import ingest_csv, write_csv
from expcorr.report import ReportFormat, RunReport
from expcorr.surface import DEFAULT_CELLS, DEFAULT_DEGREE, FittedField, fit_surface
from expcorr.svg import emit_svg_scatter
from expcorr.synthgen import LandscapeSpec, generate_landscape, neutralization_landscape
from expcorr.table import SampleTable, Stratification
from expcorr.utils import binning_from_flags, file_digest, split_names, write_text

DEFAULT_BINS = 4


def input_option(func: Any) -> Any:
    """Add ``--input/-i``."""
    return click.option(
        "--input",
        "-i",
        "input_file",
        type=click.Path(exists=True, dir_okay=False),
        required=True,
        help="CSV file with columns id,x,y,<variables...>[,stratum].",
    )(func)


def output_options(func: Any) -> Any:
    """Add ``--format/-f`` and ``--report/-o``."""
    func = click.option(
        "--report",
        "-o",
        "report_file",
        type=click.Path(dir_okay=False),
        help="Write the report to this file instead of stdout.",
    )(func)
    return click.option(
        "--format",
        "-f",
        "fmt",
        type=click.Choice(["json", "text"]),
        default="json",
        help="Report format (default: json).",
    )(func)


def degree_option(default: int) -> Any:
    """Add ``--degree/-d``."""
    return click.option(
        "--degree",
        "-d",
        type=click.IntRange(0, 4),
        default=default,
        help=f"Total degree of the fitted surfaces (default: {default}).",
    )


def objective_option(func: Any) -> Any:
    """Add ``--objective`` and ``--cells``."""
    func = click.option(
        "--cells",
        type=click.IntRange(1),
        default=DEFAULT_CELLS,
        help=f"Grid cells per axis of the correspondence objective (default: {DEFAULT_CELLS}).",
    )(func)
    return click.option(
        "--objective",
        type=click.Choice(["ols", "correspondence"]),
        default="ols",
        help="Fitting objective (default: ols).",
    )(func)


@click.command()
@click.help_option("--help", "-h")
@input_option
@click.option("--vars", "variables", required=True, help="Two variables, e.g. c,n.")
@click.option(
    "--method",
    type=click.Choice(available_methods()),
    default=available_methods()[0],
    help=f"Correlation coefficient (default: {available_methods()[0]}).",
)
@click.option(
    "--strata",
    help="Comma separated name=lo:hi bands, e.g. low=0:30,high=30:70 (default: one band).",
)
@click.option("--axis", type=click.Choice(["x", "y"]), default="y", help="Band axis (default: y).")
@click.option("--plot", type=click.Path(dir_okay=False), help="Write an SVG scatter plot.")
@output_options
@click.pass_context
def corr(
    ctx: click.Context,
    input_file: str,
    variables: str,
    method: str,
    strata: str | None,
    axis: str,
    plot: str | None,
    fmt: ReportFormat,
    report_file: str | None,
) -> None:
    r"""Correlate two variables per stratum and pooled.

    \b
    Example:
    \b
    $ expcorr corr -i soil.csv --vars c,n --strata low=0:30,high=30:70
    """
    report = RunReport("corr", parameters=dict(ctx.params))
    try:
        table = _read(input_file, report)
        var_a, var_b = split_names(variables, count=2)
        strat = (
            Stratification.parse(strata, axis="x" if axis == "x" else "y")
            if strata
            else Stratification.covering(table, axis="x" if axis == "x" else "y")
        )
        result = stratified_correlation(table, var_a, var_b, strat, method)
        if plot:
            emit_svg_scatter(table, var_a, var_b, strat, plot)
    except ExpcorrError as error:
        _fail(ctx, error)

    report.results = {
        "method": method,
        "pooled": _correlation(result.pooled),
        "per_stratum": {k: _correlation(v) for k, v in result.per_stratum.items()},
        "neutralization_gap": result.neutralization_gap,
        "pooled_between": result.pooled_between,
    }
    _emit(ctx, report, fmt, report_file)


@click.command()
@click.help_option("--help", "-h")
@input_option
@click.option("--vars", "variables", required=True, help="Variables to fit, e.g. c or c,n.")
@degree_option(DEFAULT_DEGREE)
@objective_option
@click.option(
    "--save-field",
    type=click.Path(dir_okay=False),
    help="Write the fitted fields as JSON (variable name to field).",
)
@output_options
@click.pass_context
def fit(
    ctx: click.Context,
    input_file: str,
    variables: str,
    degree: int,
    objective: str,
    cells: int,
    save_field: str | None,
    fmt: ReportFormat,
    report_file: str | None,
) -> None:
    r"""Fit polynomial surfaces w = f(x, y).

    \b
    Example:
    \b
    $ expcorr fit -i soil.csv --vars c -d 2 --save-field c.json
    """
    report = RunReport("fit", parameters=dict(ctx.params))
    try:
        table = _read(input_file, report)
        fields = {
            v: _fit(table, v, degree, objective, cells) for v in split_names(variables)
        }
        if save_field:
            documents = {v: f.to_dict() for v, f in fields.items()}
            write_text(save_field, json.dumps(documents, indent=2) + "\n")
    except ExpcorrError as error:
        _fail(ctx, error)

    report.results = {v: _field(f) for v, f in fields.items()}
    _emit(ctx, report, fmt, report_file)


@click.command()
@click.help_option("--help", "-h")
@input_option
@click.option("--vars", "variables", required=True, help="Two variables, e.g. c,n.")
@degree_option(DEFAULT_DEGREE)
@objective_option
@click.option("--centered", is_flag=True, help="Subtract the domain means first (extension).")
@click.option(
    "--integration",
    type=click.Choice(["exact-monomial", "quadrature"]),
    default="exact-monomial",
    help="Integration method (default: exact-monomial).",
)
@click.option(
    "--order",
    type=click.IntRange(1),
    help="Gauss-Legendre points per axis (default: exact for the fields).",
)
@output_options
@click.pass_context
def fcorr(
    ctx: click.Context,
    input_file: str,
    variables: str,
    degree: int,
    objective: str,
    cells: int,
    centered: bool,
    integration: str,
    order: int | None,
    fmt: ReportFormat,
    report_file: str | None,
) -> None:
    r"""Functional correlation of two fitted surfaces.

    \b
    Example:
    \b
    $ expcorr fcorr -i soil.csv --vars c,n -d 2
    """
    report = RunReport("fcorr", parameters=dict(ctx.params))
    try:
        table = _read(input_file, report)
        var_a, var_b = split_names(variables, count=2)
        f1 = _fit(table, var_a, degree, objective, cells)
        f2 = _fit(table, var_b, degree, objective, cells)
        result = functional_correlation(
            f1,
            f2,
            centered=centered,
            integration="quadrature" if integration == "quadrature" else "exact-monomial",
            order=order,
        )
    except ExpcorrError as error:
        _fail(ctx, error)

    for name in result.negative_fields:
        report.warnings.append(f"Field '{name}' takes negative values on the domain.")
    report.results = {
        "r12": result.r12,
        "inner": result.inner,
        "norm1": result.norm1,
        "norm2": result.norm2,
        "domain": result.domain.to_dict(),
        "method": result.method,
        "centered": result.centered,
        "negative_fields": list(result.negative_fields),
        "n": len(table),
        "degree": degree,
        "fields": {f.variable: _field(f) for f in (f1, f2)},
    }
    _emit(ctx, report, fmt, report_file)


@click.command()
@click.help_option("--help", "-h")
@input_option
@click.option(
    "--vars",
    "variables",
    default="c,n,p,m",
    help="Four variables in pipeline order (default: c,n,p,m).",
)
@degree_option(1)
@output_options
@click.pass_context
def couple(
    ctx: click.Context,
    input_file: str,
    variables: str,
    degree: int,
    fmt: ReportFormat,
    report_file: str | None,
) -> None:
    r"""Derive a coupling relation by eliminating x and y.

    Higher degrees make the resultants grow quickly; degree 1 or 2 is practical.

    \b
    Example:
    \b
    $ expcorr couple -i soil.csv --vars c,n,p,m -d 1
    """
    report = RunReport("couple", parameters=dict(ctx.params))
    try:
        table = _read(input_file, report)
        names = split_names(variables, count=4)
        fields = {v: _fit(table, v, degree, "ols", DEFAULT_CELLS) for v in names}
        relation = derive_coupling(fields)
        check = verify_coupling(relation, table)
    except ExpcorrError as error:
        _fail(ctx, error)

    report.results = {
        "relation": str(relation.poly),
        "terms": relation.poly.to_dict(),
        "scale": relation.scale,
        "components": [str(c) for c in relation.components],
        "provenance": [str(s) for s in relation.provenance],
        "prune_tolerance": relation.prune_tolerance,
        "verification": {
            "max_abs": check.max_abs,
            "rms": check.rms,
            "n": len(table),
            "method": "sylvester-resultant",
        },
        "degree": degree,
    }
    _emit(ctx, report, fmt, report_file)


@click.command()
@click.help_option("--help", "-h")
@click.option(
    "--config",
    "-c",
    type=click.Path(exists=True, dir_okay=False),
    help="Landscape JSON config (default: the bundled two-process landscape).",
)
@click.option("--out", type=click.Path(dir_okay=False), required=True, help="CSV to write.")
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), help="Override the config seed.")
@output_options
@click.pass_context
def synth(
    ctx: click.Context,
    config: str | None,
    out: str,
    seed: int | None,
    fmt: ReportFormat,
    report_file: str | None,
) -> None:
    r"""Generate a synthetic multi-process landscape.

    \b
    Example:
    \b
    $ expcorr synth --out synth.csv --seed 7
    """
    report = RunReport("synth", parameters=dict(ctx.params))
    try:
        spec = _landscape(config, report) if config else neutralization_landscape()
        if seed is not None:
            spec = LandscapeSpec(spec.processes, seed=seed, x_range=spec.x_range)
        table = generate_landscape(spec)
        buffer = io.StringIO()
        write_csv(table, buffer)
        write_text(out, buffer.getvalue())
    except ExpcorrError as error:
        _fail(ctx, error)

    report.results = {
        "rows": len(table),
        "variables": list(table.variables),
        "seed": spec.seed,
        "processes": {p.name: p.sample_count for p in spec.processes},
        "generator": "pcg32",
        "output": file_digest(out),
    }
    _emit(ctx, report, fmt, report_file)


@click.command()
@click.help_option("--help", "-h")
@input_option
@click.option("--vars", "variables", required=True, help="Variables A,B, e.g. c,n.")
@click.option("--bins-a", type=click.IntRange(1), help="Equal-width bins for A.")
@click.option("--edges-a", help="Explicit comma separated bin edges for A.")
@click.option("--bins-b", type=click.IntRange(1), help="Equal-width bins for B.")
@click.option("--edges-b", help="Explicit comma separated bin edges for B.")
@click.option(
    "--weighting",
    type=click.Choice(["collapsed", "members"]),
    default="collapsed",
    help="Weight of each reachable B bin (default: collapsed).",
)
@click.option(
    "--fit-degree",
    type=click.IntRange(0, 4),
    help="Also fit g: B -> A of this degree by minimizing the residuals.",
)
@output_options
@click.pass_context
def residual(
    ctx: click.Context,
    input_file: str,
    variables: str,
    bins_a: int | None,
    edges_a: str | None,
    bins_b: int | None,
    edges_b: str | None,
    weighting: str,
    fit_degree: int | None,
    fmt: ReportFormat,
    report_file: str | None,
) -> None:
    r"""Correspondence residuals of A through B.

    Without --bins-*/--edges-* each side uses 4 equal-width bins.

    \b
    Example:
    \b
    $ expcorr residual -i soil.csv --vars c,n --bins-a 4 --bins-b 4
    """
    report = RunReport("residual", parameters=dict(ctx.params))
    try:
        table = _read(input_file, report)
        var_a, var_b = split_names(variables, count=2)
        bin_a = binning_from_flags(bins_a, edges_a, flag="--bins-a/--edges-a")
        bin_b = binning_from_flags(bins_b, edges_b, flag="--bins-b/--edges-b")
        bin_a = bin_a or BinningSpec.equal_width(DEFAULT_BINS)
        bin_b = bin_b or BinningSpec.equal_width(DEFAULT_BINS)

        system = build_correspondence(table, var_a, var_b, bin_a, bin_b)
        result = total_residual(
            system, weighting="members" if weighting == "members" else "collapsed"
        )
        fitted = (
            fit_by_correspondence(table, var_a, var_b, bin_b, fit_degree, bin_a=bin_a)
            if fit_degree is not None
            else None
        )
    except ExpcorrError as error:
        _fail(ctx, error)

    report.results = {
        "method": "correspondence-residual",
        "weighting": weighting,
        "n": len(table),
        "total": result.total,
        "per_point": result.per_point,
    }
    if fitted is not None:
        report.results["fit"] = {
            "poly": str(fitted.poly),
            "terms": fitted.poly.to_dict(),
            "objective": fitted.objective,
            "degree": fitted.degree,
            "n": fitted.n,
        }
    _emit(ctx, report, fmt, report_file)


def _read(path: str, report: RunReport) -> SampleTable:
    report.inputs[path] = file_digest(path)
    return ingest_csv(path, report.warnings)


def _landscape(path: str, report: RunReport) -> LandscapeSpec:
    report.inputs[path] = file_digest(path)
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError) as error:
        raise FileAccessError(
            f"{path}: cannot read as UTF-8 ({error}).", origin="cli.synth"
        ) from None
    except json.JSONDecodeError as error:
        raise FormatError(f"{path}: {error}.", origin="cli.synth") from None
    return LandscapeSpec.from_dict(data)


def _fit(table: SampleTable, variable: str, degree: int, objective: str, cells: int) -> FittedField:
    return fit_surface(
        table,
        variable,
        degree,
        "correspondence" if objective == "correspondence" else "ols",
        cells=cells,
    )


def _correlation(result: CorrelationResult) -> dict[str, Any]:
    return {"r": result.r, "n": result.n, "p_value": result.p_value, "method": result.method}


def _field(field: FittedField) -> dict[str, Any]:
    assert field.diagnostics is not None
    return {
        "poly": str(field.poly),
        "terms": field.poly.to_dict(),
        "domain": field.domain.to_dict(),
        "rss": field.diagnostics.rss,
        "r_squared": field.diagnostics.r_squared,
        "n": field.diagnostics.n,
        "degree": field.diagnostics.degree,
        "method": field.diagnostics.objective,
    }


def _emit(
    ctx: click.Context, report: RunReport, fmt: ReportFormat, report_file: str | None
) -> None:
    for warning in report.warnings:
        click.secho(f"WARNING: {warning}", fg="yellow", err=True)

    text = report.render(fmt)
    if not report_file:
        click.echo(text)
        return
    try:
        write_text(report_file, text + "\n")
    except ExpcorrError as error:
        _fail(ctx, error)


def _fail(ctx: click.Context, error: ExpcorrError) -> NoReturn:
    origin = f" [{error.origin}]" if error.origin else ""
    click.secho(f"ERROR{origin}: {error}", fg="red", err=True)
    ctx.exit(error.exit_code)
