"""Deterministic figure generation from structured results.

Figures are self-contained SVG files with an embedded metadata block
listing the plotted points; identical results produce byte-identical
assets, so no timestamps, random ids, or library versions appear.
"""

from __future__ import annotations

import json
import logging
import re
from pathlib import Path

from ..executor.results import StructuredResults

logger = logging.getLogger(__name__)

WIDTH = 640
HEIGHT = 400
MARGIN = 56


def _fmt(value: float) -> str:
    return f"{value:.6g}"


def _slug(text: str) -> str:
    return re.sub(r"[^a-z0-9]+", "-", text.lower()).strip("-")


def _svg_document(body: str, data_block: dict, title: str) -> str:
    data_json = json.dumps(data_block, sort_keys=True, separators=(",", ":"))
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">\n'
        f"<title>{title}</title>\n"
        f"<metadata>{data_json}</metadata>\n"
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>\n'
        f"{body}\n"
        "</svg>\n"
    )


def _axes(label_x: str, label_y: str) -> str:
    x0, y0 = MARGIN, HEIGHT - MARGIN
    x1, y1 = WIDTH - MARGIN, MARGIN
    return (
        f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black" stroke-width="1"/>\n'
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black" stroke-width="1"/>\n'
        f'<text x="{(x0 + x1) // 2}" y="{HEIGHT - 16}" text-anchor="middle" '
        f'font-size="13">{label_x}</text>\n'
        f'<text x="16" y="{(y0 + y1) // 2}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 16 {(y0 + y1) // 2})">{label_y}</text>'
    )


def line_plot(points: list[tuple[int, float]], title: str, label_x: str, label_y: str) -> str:
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    x_span = (x_hi - x_lo) or 1
    y_span = (y_hi - y_lo) or 1

    def sx(x: float) -> str:
        return _fmt(MARGIN + (x - x_lo) / x_span * (WIDTH - 2 * MARGIN))

    def sy(y: float) -> str:
        return _fmt(HEIGHT - MARGIN - (y - y_lo) / y_span * (HEIGHT - 2 * MARGIN))

    polyline = " ".join(f"{sx(x)},{sy(y)}" for x, y in points)
    markers = "\n".join(
        f'<circle cx="{sx(x)}" cy="{sy(y)}" r="2.5" fill="#1f4e9c"/>' for x, y in points
    )
    body = (
        _axes(label_x, label_y)
        + f'\n<polyline points="{polyline}" fill="none" stroke="#1f4e9c" stroke-width="1.5"/>\n'
        + markers
        + f'\n<text x="{WIDTH // 2}" y="24" text-anchor="middle" font-size="15">{title}</text>'
    )
    data = {"kind": "line", "title": title, "points": [[x, y] for x, y in points]}
    return _svg_document(body, data, title)


def bar_chart(bars: list[tuple[str, float]], title: str, label_y: str) -> str:
    top = max((v for _, v in bars), default=1.0) or 1.0
    n = len(bars)
    slot = (WIDTH - 2 * MARGIN) / max(n, 1)
    body_parts = [_axes("", label_y)]
    for i, (name, value) in enumerate(bars):
        height = (value / top) * (HEIGHT - 2 * MARGIN)
        x = MARGIN + i * slot + slot * 0.2
        y = HEIGHT - MARGIN - height
        body_parts.append(
            f'<rect x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(slot * 0.6)}" '
            f'height="{_fmt(height)}" fill="#3a7d44"/>'
        )
        body_parts.append(
            f'<text x="{_fmt(x + slot * 0.3)}" y="{HEIGHT - MARGIN + 16}" '
            f'text-anchor="middle" font-size="11">{name}</text>'
        )
        body_parts.append(
            f'<text x="{_fmt(x + slot * 0.3)}" y="{_fmt(y - 6)}" text-anchor="middle" '
            f'font-size="11">{_fmt(value)}</text>'
        )
    body_parts.append(
        f'<text x="{WIDTH // 2}" y="24" text-anchor="middle" font-size="15">{title}</text>'
    )
    data = {"kind": "bar", "title": title, "bars": [[n, v] for n, v in bars]}
    return _svg_document("\n".join(body_parts), data, title)


def generate_figures(results: StructuredResults, out_dir: str | Path) -> list[Path]:
    """One line plot per loss series plus one bar chart per metric table."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    for series in results.series:
        if not series.points:
            logger.warning("skipping empty loss series %s/run%d", series.split, series.run_index)
            continue
        title = f"{series.split} loss (run {series.run_index})"
        path = out_dir / f"loss_{_slug(series.split)}_run{series.run_index}.svg"
        path.write_text(
            line_plot(series.points, title, "step", "loss"), encoding="utf-8", newline="\n"
        )
        written.append(path)

    for (stage, metric), cells in sorted(results.table().items()):
        bars = [(f"run {c.run_index}", c.value) for c in sorted(cells, key=lambda c: c.run_index)]
        if not bars:
            logger.warning("skipping empty metric table %s/%s", stage, metric)
            continue
        path = out_dir / f"metric_{_slug(stage)}_{_slug(metric)}.svg"
        path.write_text(
            bar_chart(bars, f"{metric} ({stage})", metric), encoding="utf-8", newline="\n"
        )
        written.append(path)
    return written


def block_diagram(labels: list[str], out_path: str | Path) -> Path:
    """Deterministic left-to-right block diagram of pipeline components."""
    out_path = Path(out_path)
    n = max(len(labels), 1)
    box_w = (WIDTH - 2 * MARGIN - (n - 1) * 24) / n
    box_h = 56
    y = HEIGHT / 2 - box_h / 2
    parts = []
    for i, label in enumerate(labels):
        x = MARGIN + i * (box_w + 24)
        parts.append(
            f'<rect x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(box_w)}" height="{box_h}" '
            'fill="#eef2fa" stroke="#1f4e9c" stroke-width="1.5" rx="8"/>'
        )
        parts.append(
            f'<text x="{_fmt(x + box_w / 2)}" y="{_fmt(y + box_h / 2 + 5)}" '
            f'text-anchor="middle" font-size="13">{label}</text>'
        )
        if i + 1 < n:
            ax = x + box_w
            parts.append(
                f'<line x1="{_fmt(ax)}" y1="{_fmt(y + box_h / 2)}" x2="{_fmt(ax + 24)}" '
                f'y2="{_fmt(y + box_h / 2)}" stroke="#1f4e9c" stroke-width="1.5"/>'
            )
            parts.append(
                f'<polygon points="{_fmt(ax + 24)},{_fmt(y + box_h / 2)} '
                f'{_fmt(ax + 16)},{_fmt(y + box_h / 2 - 4)} '
                f'{_fmt(ax + 16)},{_fmt(y + box_h / 2 + 4)}" fill="#1f4e9c"/>'
            )
    data = {"kind": "blocks", "labels": labels}
    out_path.write_text(
        _svg_document("\n".join(parts), data, "architecture"), encoding="utf-8", newline="\n"
    )
    return out_path
