"""Report emission: text confusion tables, SVG charts, and metric files.

SVG is hand-assembled so outputs stay byte-stable and diffable under version
control; confusion matrices render with true classes on rows and predicted
classes on columns.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from ..evaluation import AggregateReport, BinaryConfusion, ClassMetrics, percent, precision_recall

_CLASSES = ("nonliteral", "literal")


def confusion_rows(cm: BinaryConfusion) -> list[list[int]]:
    """Row-major counts, true class on rows: [[tp, fn], [fp, tn]]."""
    return [[cm.tp, cm.fn], [cm.fp, cm.tn]]


def confusion_text(cm: BinaryConfusion, model_id: str = "") -> str:
    rows = confusion_rows(cm)
    header = f"{'':>16} {'pred:nonliteral':>16} {'pred:literal':>16}"
    lines = [f"confusion matrix{f' [{model_id}]' if model_id else ''} (rows = true class)"]
    lines.append(header)
    for cls, row in zip(_CLASSES, rows):
        lines.append(f"{'true:' + cls:>16} {row[0]:>16} {row[1]:>16}")
    return "\n".join(lines) + "\n"


def metrics_csv(rows: list[tuple[str, ClassMetrics]]) -> str:
    """RFC 4180 CSV with two-decimal percent strings."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["model_id", "class", "precision", "recall"])
    for model_id, metrics in rows:
        writer.writerow(
            [model_id, "metaphorical", percent(metrics.precision_metaphorical), percent(metrics.recall_metaphorical)]
        )
        writer.writerow(
            [model_id, "literal", percent(metrics.precision_literal), percent(metrics.recall_literal)]
        )
    return buf.getvalue()


def metrics_json(model_id: str, cm: BinaryConfusion, mapping: str) -> str:
    metrics = precision_recall(cm)
    return json.dumps(
        {
            "model_id": model_id,
            "mapping": mapping,
            "confusion": {"tp": cm.tp, "fp": cm.fp, "fn": cm.fn, "tn": cm.tn},
            "total": cm.total,
            "metrics": metrics.rendered(),
        },
        indent=2,
        sort_keys=True,
    )


def _svg(width: int, height: int, body: list[str]) -> str:
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif">'
    )
    return "\n".join([head, *body, "</svg>"]) + "\n"


def _heat_color(fraction: float) -> str:
    # white -> steel blue ramp
    r = round(255 - fraction * (255 - 70))
    g = round(255 - fraction * (255 - 130))
    b = round(255 - fraction * (255 - 180))
    return f"rgb({r},{g},{b})"


def confusion_svg(cm: BinaryConfusion, model_id: str = "") -> str:
    rows = confusion_rows(cm)
    peak = max(max(row) for row in rows) or 1
    cell = 110
    left, top = 150, 70
    body = []
    title = f"Confusion matrix{f' — {model_id}' if model_id else ''} (rows = true)"
    body.append(f'<text x="{left}" y="24" font-size="16">{title}</text>')
    for c, cls in enumerate(_CLASSES):
        body.append(
            f'<text x="{left + c * cell + cell / 2:.0f}" y="{top - 12}" font-size="13" '
            f'text-anchor="middle">pred:{cls}</text>'
        )
    for r, cls in enumerate(_CLASSES):
        body.append(
            f'<text x="{left - 10}" y="{top + r * cell + cell / 2 + 5:.0f}" font-size="13" '
            f'text-anchor="end">true:{cls}</text>'
        )
        for c in range(2):
            count = rows[r][c]
            x, y = left + c * cell, top + r * cell
            body.append(
                f'<rect x="{x}" y="{y}" width="{cell}" height="{cell}" '
                f'fill="{_heat_color(count / peak)}" stroke="#444"/>'
            )
            shade = "#000" if count / peak < 0.6 else "#fff"
            body.append(
                f'<text x="{x + cell / 2:.0f}" y="{y + cell / 2 + 6:.0f}" font-size="18" '
                f'fill="{shade}" text-anchor="middle">{count}</text>'
            )
    return _svg(left + 2 * cell + 40, top + 2 * cell + 40, body)


_BAR_METRICS = (
    ("lj_identified", "L&amp;J identified"),
    ("lj_basic_correct", "L&amp;J basic meanings"),
    ("additional", "additional annotations"),
)
_SUB_METRICS = (
    ("additional_basic_correct", "additional: basic meanings"),
    ("additional_metaphorical", "additional: plausible"),
)
_BAR_FILLS = ("#4878a8", "#76a869", "#c8913d")
_SUB_FILLS = ("#8bb8e0", "#d9c27a")


def qualitative_bars_svg(reports: list[tuple[str, AggregateReport]]) -> str:
    """Grouped percentage bars per model, with narrow sub-bars for the two
    additional-annotation sub-metrics (computed over additional=true records)."""
    group_w = 240
    left, top, plot_h = 70, 56, 220
    width = left + group_w * max(1, len(reports)) + 40
    height = top + plot_h + 120
    body = [f'<text x="{left}" y="24" font-size="16">Qualitative category percentages</text>']
    for g in (0, 25, 50, 75, 100):
        y = top + plot_h - plot_h * g / 100
        body.append(
            f'<line x1="{left - 6}" y1="{y:.0f}" x2="{width - 30}" y2="{y:.0f}" stroke="#ddd"/>'
        )
        body.append(
            f'<text x="{left - 10}" y="{y + 4:.0f}" font-size="11" text-anchor="end">{g}%</text>'
        )
    for gi, (model_id, report) in enumerate(reports):
        gx = left + gi * group_w + 16
        values = report.rendered()
        for bi, (key, _label) in enumerate(_BAR_METRICS):
            value = getattr(report, f"pct_{key}")
            x = gx + bi * 62
            if value is None:
                body.append(f'<text x="{x + 20}" y="{top + plot_h - 4}" font-size="11">n/a</text>')
                continue
            h = plot_h * value
            body.append(
                f'<rect x="{x}" y="{top + plot_h - h:.1f}" width="40" height="{h:.1f}" '
                f'fill="{_BAR_FILLS[bi]}"/>'
            )
            body.append(
                f'<text x="{x + 20}" y="{top + plot_h - h - 5:.1f}" font-size="11" '
                f'text-anchor="middle">{values["pct_" + key]}</text>'
            )
        # sub-bars ride alongside the additional-annotations bar
        for si, (key, _label) in enumerate(_SUB_METRICS):
            value = getattr(report, f"pct_{key}")
            x = gx + 2 * 62 + 42 + si * 16
            if value is None:
                continue
            h = plot_h * value
            body.append(
                f'<rect x="{x}" y="{top + plot_h - h:.1f}" width="12" height="{h:.1f}" '
                f'fill="{_SUB_FILLS[si]}"/>'
            )
        body.append(
            f'<text x="{gx + 90}" y="{top + plot_h + 22}" font-size="13" '
            f'text-anchor="middle">{model_id} (n={report.n}, additional n={report.additional_denominator})</text>'
        )
    legend_y = top + plot_h + 44
    legend = list(zip(_BAR_FILLS, [label for _k, label in _BAR_METRICS])) + list(
        zip(_SUB_FILLS, [label for _k, label in _SUB_METRICS])
    )
    for li, (fill, label) in enumerate(legend):
        x = left + (li % 3) * 220
        y = legend_y + (li // 3) * 22
        body.append(f'<rect x="{x}" y="{y - 10}" width="12" height="12" fill="{fill}"/>')
        body.append(f'<text x="{x + 18}" y="{y}" font-size="12">{label}</text>')
    return _svg(width, height, body)


def emit_report(run_dir: str | Path, formats: set[str] | None = None) -> list[Path]:
    """Write report files for a scored run directory; returns written paths."""
    run_dir = Path(run_dir)
    formats = formats or {"text", "svg", "csv", "json"}
    written: list[Path] = []
    manifest_path = run_dir / "manifest.json"
    if not manifest_path.exists():
        raise FileNotFoundError(f"{run_dir} has no manifest.json")
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    model_id = manifest["model"]["model_id"]

    confusion_path = run_dir / "confusion.json"
    if confusion_path.exists():
        counts = json.loads(confusion_path.read_text(encoding="utf-8"))["confusion"]
        cm = BinaryConfusion(tp=counts["tp"], fp=counts["fp"], fn=counts["fn"], tn=counts["tn"])
        if "text" in formats:
            path = run_dir / "report.txt"
            path.write_text(confusion_text(cm, model_id), encoding="utf-8")
            written.append(path)
        if "svg" in formats:
            path = run_dir / "confusion.svg"
            path.write_text(confusion_svg(cm, model_id), encoding="utf-8")
            written.append(path)
        if "csv" in formats:
            path = run_dir / "metrics.csv"
            path.write_text(metrics_csv([(model_id, precision_recall(cm))]), encoding="utf-8", newline="")
            written.append(path)
        if "json" in formats:
            path = run_dir / "metrics.json"
            path.write_text(metrics_json(model_id, cm, manifest.get("mapping", "")), encoding="utf-8")
            written.append(path)

    aggregate_path = run_dir / "qualitative_aggregate.json"
    if aggregate_path.exists() and "svg" in formats:
        data = json.loads(aggregate_path.read_text(encoding="utf-8"))
        report = AggregateReport(
            n=data["n"],
            pct_lj_identified=data["pct_lj_identified"],
            pct_lj_basic_correct=data["pct_lj_basic_correct"],
            pct_additional=data["pct_additional"],
            pct_additional_metaphorical=data["pct_additional_metaphorical"],
            pct_additional_basic_correct=data["pct_additional_basic_correct"],
            additional_denominator=data["additional_denominator"],
        )
        path = run_dir / "qualitative.svg"
        path.write_text(qualitative_bars_svg([(model_id, report)]), encoding="utf-8")
        written.append(path)
    if not written:
        raise FileNotFoundError(f"{run_dir} contains no scored results to report on")
    return written
