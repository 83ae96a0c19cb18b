"""Grouped-bar SVG charts for experiment results.

Charts are built by direct string assembly with fixed float formatting, so
the same rows always produce byte-identical SVG, regardless of platform or
worker count.  One bar group per p_max value; one colored series per
(scheme, solver, w1) combination; bar height is the median over seeds.
"""

from __future__ import annotations

import numpy as np

VALUE_FIELDS = ("total_energy_j", "total_time_s", "mean_accuracy", "objective")

_PALETTE = (
    "#4e79a7",
    "#f28e2b",
    "#e15759",
    "#76b7b2",
    "#59a14f",
    "#edc948",
    "#b07aa1",
    "#ff9da7",
    "#9c755f",
    "#bab0ac",
)

_MARGIN_LEFT = 78.0
_MARGIN_RIGHT = 16.0
_MARGIN_TOP = 34.0
_MARGIN_BOTTOM = 46.0
_PLOT_HEIGHT = 260.0
_BAR_WIDTH = 13.0
_GROUP_GAP = 26.0
_LEGEND_LINE = 16.0


def _fmt(x: float) -> str:
    return format(float(x), ".2f")


def bar_chart_data(rows, value_field: str):
    """Aggregate rows for plotting.

    Returns ``(pmax_values, series)`` where ``series`` is a sorted list of
    ``((scheme, solver, w1), medians)`` and ``medians`` has one entry per
    p_max value (None when that cell has no rows).
    """
    if value_field not in VALUE_FIELDS:
        raise ValueError(f"value_field must be one of {VALUE_FIELDS}")
    rows = list(rows)
    if not rows:
        raise ValueError("no rows to plot")
    pmax_values = sorted({r.p_max for r in rows})
    keys = sorted({(r.scheme, r.solver, r.w1) for r in rows})
    series = []
    for key in keys:
        medians = []
        for p in pmax_values:
            cell = [
                getattr(r, value_field)
                for r in rows
                if (r.scheme, r.solver, r.w1) == key and r.p_max == p
            ]
            medians.append(float(np.median(cell)) if cell else None)
        series.append((key, medians))
    return pmax_values, series


def render_bar_chart(rows, value_field: str, title: str | None = None) -> str:
    """Render rows as a grouped-bar SVG string."""
    pmax_values, series = bar_chart_data(rows, value_field)
    if title is None:
        title = f"median {value_field} vs p_max"
    n_groups = len(pmax_values)
    n_series = len(series)
    group_width = n_series * _BAR_WIDTH + _GROUP_GAP
    plot_width = max(240.0, n_groups * group_width)
    legend_height = _LEGEND_LINE * n_series
    width = _MARGIN_LEFT + plot_width + _MARGIN_RIGHT
    height = _MARGIN_TOP + legend_height + _PLOT_HEIGHT + _MARGIN_BOTTOM
    top = _MARGIN_TOP + legend_height
    axis_y = top + _PLOT_HEIGHT

    peak = 0.0
    for _, medians in series:
        for v in medians:
            if v is not None and v > peak:
                peak = v
    if peak <= 0.0:
        peak = 1.0
    y_max = peak * 1.05

    def bar_height(v: float) -> float:
        return _PLOT_HEIGHT * v / y_max

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}" '
        f'height="{_fmt(height)}" viewBox="0 0 {_fmt(width)} {_fmt(height)}">',
        f'<rect x="0" y="0" width="{_fmt(width)}" height="{_fmt(height)}" fill="#ffffff"/>',
        f'<text x="{_fmt(_MARGIN_LEFT)}" y="20" font-family="sans-serif" '
        f'font-size="13" font-weight="bold">{title}</text>',
    ]
    for idx, (key, _) in enumerate(series):
        scheme, solver, w1 = key
        y = _MARGIN_TOP + idx * _LEGEND_LINE
        color = _PALETTE[idx % len(_PALETTE)]
        parts.append(
            f'<rect x="{_fmt(_MARGIN_LEFT)}" y="{_fmt(y)}" width="10" height="10" '
            f'fill="{color}"/>'
        )
        parts.append(
            f'<text x="{_fmt(_MARGIN_LEFT + 15.0)}" y="{_fmt(y + 9.0)}" '
            f'font-family="sans-serif" font-size="11">'
            f"{scheme}/{solver} w1={format(w1, '.3g')}</text>"
        )
    # y axis with five ticks
    for tick in np.linspace(0.0, y_max, 6):
        y = axis_y - bar_height(tick)
        parts.append(
            f'<line x1="{_fmt(_MARGIN_LEFT - 4.0)}" y1="{_fmt(y)}" '
            f'x2="{_fmt(_MARGIN_LEFT + plot_width)}" y2="{_fmt(y)}" '
            f'stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(_MARGIN_LEFT - 8.0)}" y="{_fmt(y + 4.0)}" '
            f'font-family="sans-serif" font-size="10" text-anchor="end">'
            f"{format(tick, '.3g')}</text>"
        )
    parts.append(
        f'<line x1="{_fmt(_MARGIN_LEFT)}" y1="{_fmt(top)}" x2="{_fmt(_MARGIN_LEFT)}" '
        f'y2="{_fmt(axis_y)}" stroke="#333333" stroke-width="1"/>'
    )
    parts.append(
        f'<line x1="{_fmt(_MARGIN_LEFT)}" y1="{_fmt(axis_y)}" '
        f'x2="{_fmt(_MARGIN_LEFT + plot_width)}" y2="{_fmt(axis_y)}" '
        f'stroke="#333333" stroke-width="1"/>'
    )
    for gi, p in enumerate(pmax_values):
        gx = _MARGIN_LEFT + gi * group_width + _GROUP_GAP / 2.0
        for si, (_, medians) in enumerate(series):
            v = medians[gi]
            if v is None:
                continue
            h = bar_height(v)
            x = gx + si * _BAR_WIDTH
            color = _PALETTE[si % len(_PALETTE)]
            parts.append(
                f'<rect x="{_fmt(x)}" y="{_fmt(axis_y - h)}" '
                f'width="{_fmt(_BAR_WIDTH - 2.0)}" height="{_fmt(h)}" fill="{color}"/>'
            )
        parts.append(
            f'<text x="{_fmt(gx + n_series * _BAR_WIDTH / 2.0)}" '
            f'y="{_fmt(axis_y + 16.0)}" font-family="sans-serif" font-size="11" '
            f'text-anchor="middle">{format(p, ".3g")}</text>'
        )
    parts.append(
        f'<text x="{_fmt(_MARGIN_LEFT + plot_width / 2.0)}" '
        f'y="{_fmt(axis_y + 34.0)}" font-family="sans-serif" font-size="11" '
        f'text-anchor="middle">p_max (W)</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_svg(svg_text: str, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(svg_text)
