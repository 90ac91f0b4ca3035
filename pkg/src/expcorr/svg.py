"""SVG 1.1 scatter plots of two variables, colored by stratum."""

import logging
from pathlib import Path
from xml.sax.saxutils import escape, quoteattr

from .table import SampleTable, Stratification, stratify
from .utils import write_text

logger = logging.getLogger(__name__)

WIDTH, HEIGHT = 640, 480
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 70, 130, 30, 60
RADIUS = 3
PALETTE = (
    "#1f77b4",
    "#ff7f0e",
    "#2ca02c",
    "#d62728",
    "#9467bd",
    "#8c564b",
    "#e377c2",
    "#7f7f7f",
)


def render_svg_scatter(
    table: SampleTable, var_a: str, var_b: str, strat: Stratification | None = None
) -> str:
    """Return the SVG document of a ``var_a`` (horizontal) vs ``var_b`` scatter plot.

    Every row is one circle colored by its stratum; empty strata are left out of the legend.

    Example
    -------
    >>> from expcorr.table import SampleRow
    >>> rows = [SampleRow(str(i), 0, i, {"c": i, "n": i * i}) for i in range(3)]
    >>> svg = render_svg_scatter(SampleTable(rows, variables=["c", "n"]), "c", "n")
    >>> svg.count("<circle")
    3

    """
    table.require(var_a, var_b, origin="cli.emit_svg_scatter")
    strat = strat or Stratification.covering(table)
    parts = stratify(table, strat)
    color = {name: PALETTE[i % len(PALETTE)] for i, name in enumerate(strat.names)}

    xs, ys = table.column(var_a), table.column(var_b)
    x_lo, x_hi = _range(xs.tolist())
    y_lo, y_hi = _range(ys.tolist())
    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def px(v: float) -> str:
        return f"{MARGIN_LEFT + (v - x_lo) / (x_hi - x_lo) * plot_w:.3f}"

    def py(v: float) -> str:
        return f"{MARGIN_TOP + (y_hi - v) / (y_hi - y_lo) * plot_h:.3f}"

    bottom, right = MARGIN_TOP + plot_h, MARGIN_LEFT + plot_w
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" '
        f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<line x1="{MARGIN_LEFT}" y1="{bottom}" x2="{right}" y2="{bottom}" stroke="black"/>',
        f'<line x1="{MARGIN_LEFT}" y1="{MARGIN_TOP}" x2="{MARGIN_LEFT}" y2="{bottom}" '
        'stroke="black"/>',
        _text(MARGIN_LEFT, bottom + 18, f"{x_lo:.4g}", "middle"),
        _text(right, bottom + 18, f"{x_hi:.4g}", "middle"),
        _text(MARGIN_LEFT - 6, bottom, f"{y_lo:.4g}", "end"),
        _text(MARGIN_LEFT - 6, MARGIN_TOP + 4, f"{y_hi:.4g}", "end"),
        _text(MARGIN_LEFT + plot_w // 2, HEIGHT - 15, var_a, "middle"),
        _text(15, MARGIN_TOP + plot_h // 2, var_b, "middle", rotate=True),
    ]

    for name, part in parts.items():
        for row in part:
            lines.append(
                f'<circle cx="{px(row.values[var_a])}" cy="{py(row.values[var_b])}" '
                f'r="{RADIUS}" fill="{color[name]}"><title>{escape(row.id)}</title></circle>'
            )

    legend = [name for name, part in parts.items() if len(part)]
    for i, name in enumerate(legend):
        y = MARGIN_TOP + 10 + 20 * i
        lines.append(
            f'<rect x="{right + 20}" y="{y - 8}" width="10" height="10" fill="{color[name]}"/>'
        )
        lines.append(_text(right + 36, y + 1, name, "start"))

    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def emit_svg_scatter(
    table: SampleTable,
    var_a: str,
    var_b: str,
    strat: Stratification | None,
    path: Path | str,
) -> None:
    """Write ``render_svg_scatter`` to ``path``.

    :raises FileAccessError: If ``path`` cannot be written.
    """
    write_text(path, render_svg_scatter(table, var_a, var_b, strat))
    logger.info("Wrote scatter plot %s", path)


def _range(values: list[float]) -> tuple[float, float]:
    lo, hi = min(values, default=0.0), max(values, default=1.0)
    if lo == hi:
        return lo - 0.5, hi + 0.5
    return lo, hi


def _text(x: float, y: float, content: str, anchor: str, *, rotate: bool = False) -> str:
    transform = f' transform="rotate(-90 {x} {y})"' if rotate else ""
    return (
        f'<text x="{x}" y="{y}" font-family="sans-serif" font-size="12" '
        f"text-anchor={quoteattr(anchor)}{transform}>{escape(content)}</text>"
    )
