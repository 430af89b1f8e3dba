"""Serialization of analysis results and dependency-free SVG charts.

All outputs are deterministic functions of the bundle: fixed key order,
reals rendered with 6 decimal places (3 on chart labels), no timestamps.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from xml.sax.saxutils import escape

from .biasmetrics import BiasReport, CorrelationResult
from .errors import FileError
from .posmap import PositionalDistribution

_PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
    "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f",
)


@dataclass(frozen=True)
class AnalysisBundle:
    """Everything one analysis run produced, ready for serialization."""

    corpus_name: str
    k: int
    phi: str
    top_n: int
    k_prime: int
    bin_positions: str
    aggregation: str
    seed: int
    gold_distribution: PositionalDistribution
    gold_lead_bias_fraction: float
    gold_unmapped_fraction: float
    skipped_short_articles: int
    models: tuple[BiasReport, ...]
    correlations: tuple[tuple[str, CorrelationResult], ...]

    def __post_init__(self) -> None:
        for report in self.models:
            if (
                report.model_distribution.k != self.k
                or report.gold_distribution.k != self.k
            ):
                raise ValueError(
                    f"report for {report.model_name!r} does not share k={self.k}"
                )

    def series(self) -> list[tuple[str, tuple[float, ...]]]:
        """(name, mass) pairs: gold first, then models in bundle order."""
        out = [("gold", self.gold_distribution.mass)]
        out.extend(
            (report.model_name, report.model_distribution.mass)
            for report in self.models
        )
        return out


def _f6(value: float) -> str:
    return f"{value:.6f}"


def _json_render(value: object, indent: int) -> str:
    pad = "  " * indent
    if isinstance(value, float):
        return _f6(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        if all(isinstance(item, (int, float, str)) for item in value):
            return "[" + ", ".join(_json_render(item, 0) for item in value) + "]"
        inner = ",\n".join(
            pad + "  " + _json_render(item, indent + 1) for item in value
        )
        return "[\n" + inner + "\n" + pad + "]"
    if isinstance(value, dict):
        if not value:
            return "{}"
        inner = ",\n".join(
            f'{pad}  {json.dumps(key, ensure_ascii=False)}: '
            + _json_render(item, indent + 1)
            for key, item in value.items()
        )
        return "{\n" + inner + "\n" + pad + "}"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _distribution_document(distribution: PositionalDistribution) -> dict:
    return {
        "k": distribution.k,
        "support_positions": list(distribution.support_positions),
        "mass": list(distribution.mass),
    }


def bundle_document(bundle: AnalysisBundle) -> dict:
    """The bundle as a plain dict with fixed key order."""
    gold = _distribution_document(bundle.gold_distribution)
    gold["lead_bias_fraction"] = bundle.gold_lead_bias_fraction
    gold["unmapped_fraction"] = bundle.gold_unmapped_fraction
    gold["skipped_short_articles"] = bundle.skipped_short_articles
    return {
        "corpus_name": bundle.corpus_name,
        "k": bundle.k,
        "config": {
            "phi": bundle.phi,
            "top_n": bundle.top_n,
            "k_prime": bundle.k_prime,
            "bin_positions": bundle.bin_positions,
            "aggregation": bundle.aggregation,
            "seed": bundle.seed,
        },
        "gold_distribution": gold,
        "models": [
            {
                "name": report.model_name,
                "wasserstein": report.wasserstein,
                "rouge": {
                    "r1": report.rouge.r1,
                    "r2": report.rouge.r2,
                    "rl": report.rouge.rl,
                },
                "lead_bias_fraction": report.lead_bias_fraction,
                "unmapped_fraction": report.unmapped_fraction,
                "skipped_short_articles": report.skipped_short_articles,
                "distribution": _distribution_document(report.model_distribution),
            }
            for report in bundle.models
        ],
        "correlations": [
            {
                "metric": metric,
                "rho": result.rho,
                "p_value": result.p_value,
                "n": result.n,
                "method": result.method,
                "stars": result.stars,
            }
            for metric, result in bundle.correlations
        ],
    }


def emit_json(bundle: AnalysisBundle, path: str | Path) -> None:
    """Write the bundle as a single deterministic JSON document."""
    path = Path(path)
    text = _json_render(bundle_document(bundle), 0) + "\n"
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise FileError(f"cannot write {path}: {exc}") from exc


def emit_csv(bundle: AnalysisBundle, out_dir: str | Path) -> None:
    """Write distributions.csv, metrics.csv, and correlations.csv."""
    out_dir = Path(out_dir)
    try:
        with (out_dir / "distributions.csv").open(
            "w", encoding="utf-8", newline=""
        ) as handle:
            writer = csv.writer(handle)
            writer.writerow(
                ["series"] + [f"segment_{j}" for j in range(1, bundle.k + 1)]
            )
            for name, mass in bundle.series():
                writer.writerow([name] + [_f6(m) for m in mass])

        with (out_dir / "metrics.csv").open(
            "w", encoding="utf-8", newline=""
        ) as handle:
            writer = csv.writer(handle)
            writer.writerow(
                [
                    "model",
                    "wasserstein",
                    "r1",
                    "r2",
                    "rl",
                    "lead_bias_fraction",
                    "unmapped_fraction",
                ]
            )
            for report in bundle.models:
                writer.writerow(
                    [
                        report.model_name,
                        _f6(report.wasserstein),
                        _f6(report.rouge.r1),
                        _f6(report.rouge.r2),
                        _f6(report.rouge.rl),
                        _f6(report.lead_bias_fraction),
                        _f6(report.unmapped_fraction),
                    ]
                )

        with (out_dir / "correlations.csv").open(
            "w", encoding="utf-8", newline=""
        ) as handle:
            writer = csv.writer(handle)
            writer.writerow(["metric", "rho", "p_value", "stars"])
            for metric, result in bundle.correlations:
                writer.writerow([metric, _f6(result.rho), _f6(result.p_value), result.stars])
    except OSError as exc:
        raise FileError(f"cannot write csv outputs in {out_dir}: {exc}") from exc


def _svg_open(width: int, height: int) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif">',
    ]


def _write_svg(lines: list[str], path: Path) -> None:
    lines.append("</svg>")
    try:
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise FileError(f"cannot write {path}: {exc}") from exc


def render_distribution_chart(bundle: AnalysisBundle, path: str | Path) -> None:
    """Line chart of every series' mass over segments 1..k."""
    path = Path(path)
    series = bundle.series()
    k = bundle.k
    width, height = 760, 420
    left, top = 70.0, 40.0
    plot_w, plot_h = 470.0, 320.0
    y_max = max(max(mass) for _, mass in series)

    def x_at(segment_index: int) -> float:
        if k == 1:
            return left + plot_w / 2
        return left + segment_index * plot_w / (k - 1)

    def y_at(value: float) -> float:
        return top + (1.0 - value / y_max) * plot_h

    lines = _svg_open(width, height)
    lines.append(
        f'<text x="{left:.1f}" y="22" font-size="15" font-weight="bold">'
        f"Positional distributions: {escape(bundle.corpus_name)}</text>"
    )
    bottom = top + plot_h
    lines.append(
        f'<line x1="{left:.1f}" y1="{bottom:.1f}" x2="{left + plot_w:.1f}" '
        f'y2="{bottom:.1f}" stroke="black"/>'
    )
    lines.append(
        f'<line x1="{left:.1f}" y1="{top:.1f}" x2="{left:.1f}" '
        f'y2="{bottom:.1f}" stroke="black"/>'
    )
    for j in range(k):
        x = x_at(j)
        lines.append(
            f'<line x1="{x:.2f}" y1="{bottom:.1f}" x2="{x:.2f}" '
            f'y2="{bottom + 5:.1f}" stroke="black"/>'
        )
        lines.append(
            f'<text x="{x:.2f}" y="{bottom + 20:.1f}" font-size="11" '
            f'text-anchor="middle">{j + 1}</text>'
        )
    for tick in range(5):
        value = y_max * tick / 4
        y = y_at(value)
        lines.append(
            f'<line x1="{left - 5:.1f}" y1="{y:.2f}" x2="{left:.1f}" '
            f'y2="{y:.2f}" stroke="black"/>'
        )
        lines.append(
            f'<text x="{left - 9:.1f}" y="{y + 4:.2f}" font-size="11" '
            f'text-anchor="end">{value:.3f}</text>'
        )
    lines.append(
        f'<text x="{left + plot_w / 2:.1f}" y="{bottom + 42:.1f}" font-size="13" '
        f'text-anchor="middle">article segment</text>'
    )
    lines.append(
        f'<text x="18" y="{top + plot_h / 2:.1f}" font-size="13" text-anchor="middle" '
        f'transform="rotate(-90 18 {top + plot_h / 2:.1f})">summary-sentence mass</text>'
    )
    legend_x = left + plot_w + 28
    for index, (name, mass) in enumerate(series):
        color = _PALETTE[index % len(_PALETTE)]
        points = " ".join(
            f"{x_at(j):.2f},{y_at(mass[j]):.2f}" for j in range(k)
        )
        lines.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="2" '
            f'points="{points}"/>'
        )
        y_legend = top + index * 22
        lines.append(
            f'<rect x="{legend_x:.1f}" y="{y_legend:.1f}" width="14" height="14" '
            f'fill="{color}"/>'
        )
        lines.append(
            f'<text x="{legend_x + 20:.1f}" y="{y_legend + 12:.1f}" '
            f'font-size="12">{escape(name)}</text>'
        )
    _write_svg(lines, path)


def render_bias_bars(bundle: AnalysisBundle, path: str | Path) -> None:
    """Paired bars per model: ROUGE-1 on the left scale, Wasserstein on the right."""
    path = Path(path)
    if not bundle.models:
        raise ValueError("bias bar chart needs at least one model report")
    reports = sorted(bundle.models, key=lambda r: r.model_name)
    width, height = 760, 420
    left, top = 80.0, 40.0
    plot_w, plot_h = 600.0, 300.0
    bottom = top + plot_h
    w_values = [report.wasserstein for report in reports]
    w_scale = max(w_values) if max(w_values) > 0 else 1.0

    def r1_height(value: float) -> float:
        return value * plot_h

    def w_height(value: float) -> float:
        return value / w_scale * plot_h

    lines = _svg_open(width, height)
    lines.append(
        f'<text x="{left:.1f}" y="22" font-size="15" font-weight="bold">'
        f"Performance and position bias: {escape(bundle.corpus_name)}</text>"
    )
    lines.append(
        f'<line x1="{left:.1f}" y1="{bottom:.1f}" x2="{left + plot_w:.1f}" '
        f'y2="{bottom:.1f}" stroke="black"/>'
    )
    lines.append(
        f'<line x1="{left:.1f}" y1="{top:.1f}" x2="{left:.1f}" '
        f'y2="{bottom:.1f}" stroke="black"/>'
    )
    lines.append(
        f'<line x1="{left + plot_w:.1f}" y1="{top:.1f}" x2="{left + plot_w:.1f}" '
        f'y2="{bottom:.1f}" stroke="black"/>'
    )
    for tick in range(5):
        fraction = tick / 4
        y = bottom - fraction * plot_h
        lines.append(
            f'<text x="{left - 8:.1f}" y="{y + 4:.2f}" font-size="11" '
            f'text-anchor="end">{fraction:.2f}</text>'
        )
        lines.append(
            f'<text x="{left + plot_w + 8:.1f}" y="{y + 4:.2f}" font-size="11" '
            f'text-anchor="start">{fraction * w_scale:.3f}</text>'
        )
    lines.append(
        f'<text x="20" y="{top + plot_h / 2:.1f}" font-size="13" text-anchor="middle" '
        f'transform="rotate(-90 20 {top + plot_h / 2:.1f})">ROUGE-1 F1</text>'
    )
    lines.append(
        f'<text x="{width - 16}" y="{top + plot_h / 2:.1f}" font-size="13" '
        f'text-anchor="middle" transform="rotate(90 {width - 16} '
        f'{top + plot_h / 2:.1f})">Wasserstein distance</text>'
    )
    group_w = plot_w / len(reports)
    bar_w = min(42.0, group_w * 0.28)
    for index, report in enumerate(reports):
        center = left + (index + 0.5) * group_w
        hr = r1_height(report.rouge.r1)
        hw = w_height(report.wasserstein)
        x_r1 = center - bar_w - 3
        x_w = center + 3
        lines.append(
            f'<rect class="bar-r1" x="{x_r1:.2f}" y="{bottom - hr:.2f}" '
            f'width="{bar_w:.2f}" height="{hr:.2f}" fill="{_PALETTE[0]}"/>'
        )
        lines.append(
            f'<rect class="bar-w" x="{x_w:.2f}" y="{bottom - hw:.2f}" '
            f'width="{bar_w:.2f}" height="{hw:.2f}" fill="{_PALETTE[1]}"/>'
        )
        lines.append(
            f'<text class="value" x="{x_r1 + bar_w / 2:.2f}" y="{bottom - hr - 5:.2f}" '
            f'font-size="11" text-anchor="middle">{report.rouge.r1:.3f}</text>'
        )
        lines.append(
            f'<text class="value" x="{x_w + bar_w / 2:.2f}" y="{bottom - hw - 5:.2f}" '
            f'font-size="11" text-anchor="middle">{report.wasserstein:.3f}</text>'
        )
        lines.append(
            f'<text x="{center:.2f}" y="{bottom + 18:.1f}" font-size="12" '
            f'text-anchor="middle">{escape(report.model_name)}</text>'
        )
    legend_y = height - 26
    lines.append(
        f'<rect x="{left:.1f}" y="{legend_y}" width="14" height="14" fill="{_PALETTE[0]}"/>'
    )
    lines.append(
        f'<text x="{left + 20:.1f}" y="{legend_y + 12}" font-size="12">ROUGE-1 F1</text>'
    )
    lines.append(
        f'<rect x="{left + 140:.1f}" y="{legend_y}" width="14" height="14" fill="{_PALETTE[1]}"/>'
    )
    lines.append(
        f'<text x="{left + 160:.1f}" y="{legend_y + 12}" font-size="12">'
        f"Wasserstein distance</text>"
    )
    _write_svg(lines, path)
