"""Interpretability by similarity decomposition: how much each generated
attribute of a class agrees with a query video, as ranked tables and a
static bar chart.

Attributes are embedded raw — no photo template — so the score reflects the
attribute phrase itself, and entries are sorted by descending cosine with
ties keeping the attribute list's order.
"""
from __future__ import annotations

import csv
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .core import as_vector, cosine
from .embedders import TextEmbedder
from .errors import InvalidInputError

FORMATS = ("markdown", "csv", "svg_bar")

_EXT = {"markdown": "md", "csv": "csv", "svg_bar": "svg"}


@dataclass(frozen=True)
class AttributionReport:
    video_id: str
    class_name: str
    entries: tuple[tuple[str, float], ...]  # (attribute, cosine), sorted desc
    predicted_class: Optional[str] = None
    predicted_score: Optional[float] = None


def attribute_contributions(
    video_vec, attributes: Sequence[str], embedder: TextEmbedder
) -> list[tuple[str, float]]:
    """Cosine of the video against each attribute embedding, sorted
    descending; ties keep list order (stable sort)."""
    attributes = [a for a in attributes if a and a.strip()]
    if not attributes:
        raise InvalidInputError("no attributes to score")
    video_vec = as_vector(video_vec)
    matrix = embedder.embed(attributes)
    scored = [
        (attr, cosine(video_vec, matrix[i])) for i, attr in enumerate(attributes)
    ]
    return sorted(scored, key=lambda e: -e[1])


def build_report(
    video_id: str,
    class_name: str,
    video_vec,
    attributes: Sequence[str],
    embedder: TextEmbedder,
    predicted_class: Optional[str] = None,
    predicted_score: Optional[float] = None,
) -> AttributionReport:
    return AttributionReport(
        video_id=video_id,
        class_name=class_name,
        entries=tuple(attribute_contributions(video_vec, attributes, embedder)),
        predicted_class=predicted_class,
        predicted_score=predicted_score,
    )


def _slug(text: str) -> str:
    return re.sub(r"[^0-9A-Za-z_-]+", "_", text).strip("_") or "unnamed"


def report_filename(report: AttributionReport, format: str) -> str:
    return f"explain_{_slug(report.video_id)}_{_slug(report.class_name)}.{_EXT[format]}"


def emit_report(report: AttributionReport, format: str, out_dir) -> Path:
    """Write the report in the requested format; returns the file path."""
    if format not in FORMATS:
        raise InvalidInputError(f"unknown report format {format!r}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / report_filename(report, format)
    if format == "markdown":
        path.write_text(_markdown(report), encoding="utf-8")
    elif format == "csv":
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["attribute", "cosine"])
            for attr, score in report.entries:
                writer.writerow([attr, f"{score:.6f}"])
    else:
        path.write_text(_svg_bars(report), encoding="utf-8")
    return path


def _markdown(report: AttributionReport) -> str:
    lines = [
        f"# Attribute contributions: video `{report.video_id}` vs class `{report.class_name}`",
        "",
    ]
    if report.predicted_class is not None:
        score = (
            f" (score {report.predicted_score:.4f})"
            if report.predicted_score is not None
            else ""
        )
        lines += [f"Predicted class: **{report.predicted_class}**{score}", ""]
    lines += ["| attribute | cosine |", "| --- | --- |"]
    for attr, score in report.entries:
        lines.append(f"| {attr} | {score:.4f} |")
    return "\n".join(lines) + "\n"


def _svg_bars(report: AttributionReport) -> str:
    """Static horizontal bar chart, one bar per attribute."""
    bar_h, gap, label_w, chart_w, pad = 22, 6, 220, 360, 10
    n = len(report.entries)
    height = pad * 2 + n * bar_h + (n - 1) * gap + 20
    width = label_w + chart_w + 70
    max_abs = max(abs(s) for _, s in report.entries) or 1.0

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'font-family="sans-serif" font-size="12">',
        f'<text x="{pad}" y="{pad + 4}" font-weight="bold">'
        f"{_esc(report.video_id)} vs {_esc(report.class_name)}</text>",
    ]
    y = pad + 14
    for attr, score in report.entries:
        w = int(round(chart_w * abs(score) / max_abs))
        fill = "#4878a8" if score >= 0 else "#a85048"
        parts.append(
            f'<text x="{label_w - 6}" y="{y + bar_h - 7}" text-anchor="end">'
            f"{_esc(attr)}</text>"
        )
        parts.append(
            f'<rect x="{label_w}" y="{y}" width="{max(w, 1)}" height="{bar_h - 4}" '
            f'fill="{fill}"/>'
        )
        parts.append(
            f'<text x="{label_w + max(w, 1) + 6}" y="{y + bar_h - 7}">{score:.4f}</text>'
        )
        y += bar_h + gap
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _esc(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
    )
