"""End-to-end run orchestration and record export.

A run directory is the reproducibility envelope: manifest with content
digests, raw responses, parsed units, projected token labels, and (for
TroFi) the confusion matrix and metrics.  All files except the manifest are
deterministic for a given manifest and complete cache; timestamps and
transport counters live only in the manifest.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
import time
from pathlib import Path
from typing import Callable

from .. import alignment, corpus, evaluation, output_parser, prompting
from ..gateway import CompletionResult, Gateway, GatewayError, ModelConfig
from .recordlog import latest_per_key, read_log
from .reports import emit_report, metrics_csv, metrics_json

logger = logging.getLogger(__name__)

RESPONSES_FILE = "responses.jsonl"
PARSED_FILE = "parsed.jsonl"
LABELS_FILE = "labels.jsonl"
PREDICTIONS_FILE = "predictions.jsonl"
ITEMS_FILE = "items.jsonl"
RECORD_LOG_FILE = "annotations.jsonl"

# Manifest keys that may differ between otherwise identical runs.
VOLATILE_MANIFEST_KEYS = ("started_at", "finished_at", "stats")


def _dumps(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, sort_keys=True)


def _write_jsonl(path: Path, rows: list[dict]) -> None:
    path.write_text("".join(_dumps(row) + "\n" for row in rows), encoding="utf-8")


def file_digest(path: str | Path) -> str:
    h = hashlib.sha256()
    h.update(Path(path).read_bytes())
    return h.hexdigest()


def unit_to_dict(u: output_parser.UnitAnnotation) -> dict:
    return {
        "surface": u.surface,
        "kind": u.kind.value,
        "pos": u.pos,
        "judgment": u.judgment.value,
        "gloss": u.gloss,
    }


def diag_to_dict(d: output_parser.ParseDiagnostic) -> dict:
    return {"kind": d.kind.value, "location": d.location, "message": d.message}


def _load_corpus(path: str | Path, corpus_format: str):
    if corpus_format == "trofi":
        return corpus.load_trofi(path)
    if corpus_format == "mwlb":
        return corpus.load_mwlb(path)
    raise ValueError(f"unknown corpus format {corpus_format!r}")


def cli_run(
    corpus_path: str | Path,
    corpus_format: str,
    out_dir: str | Path,
    config: ModelConfig,
    template_path: str | Path | None = None,
    mapping: alignment.JudgmentMapping = alignment.JudgmentMapping.YES_NONLITERAL,
    backend=None,
    progress: Callable[[dict], None] | None = None,
    clock: Callable[[], str] = lambda: time.strftime("%Y-%m-%dT%H:%M:%S%z"),
) -> Path:
    """Run the full pipeline over a corpus and write a run directory."""
    corpus_path = Path(corpus_path)
    records = _load_corpus(corpus_path, corpus_format)
    if not records:
        raise corpus.CorpusFormatError(f"{corpus_path}: no usable records")
    template = (
        prompting.load_template(template_path)
        if template_path is not None
        else prompting.default_template()
    )

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    corpus_digest = file_digest(corpus_path)
    tmpl_digest = prompting.template_digest(template)
    run_id = hashlib.sha256(
        "\x00".join(
            [corpus_digest, tmpl_digest, config.model_id, repr(config.top_p), mapping.value]
        ).encode("utf-8")
    ).hexdigest()[:16]

    manifest: dict = {
        "run_id": run_id,
        "corpus": {
            "path": str(corpus_path),
            "digest": corpus_digest,
            "format": corpus_format,
            "records": len(records),
        },
        "template": {"version": template.version, "digest": tmpl_digest},
        "model": {
            k: (str(v) if isinstance(v, Path) else v)
            for k, v in dataclasses.asdict(config).items()
        },
        "mapping": mapping.value,
        "started_at": clock(),
        "finished_at": None,
        "stats": None,
    }
    manifest_path = out_dir / "manifest.json"
    # Digests are on disk before the first request goes out.
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True), encoding="utf-8")

    gw = Gateway(config, backend=backend)
    results = gw.run_batch(records, template, progress=progress)

    response_rows = []
    parsed_rows = []
    label_rows = []
    parsed_by_id: dict[str, output_parser.ParsedOutput] = {}
    labels_by_id: dict[str, list[alignment.TokenLabel]] = {}
    cache_hits = 0
    errors = 0
    for record in records:
        outcome = results[record.id]
        if isinstance(outcome, GatewayError):
            errors += 1
            response_rows.append(
                {"id": record.id, "error": {"kind": outcome.kind, "message": str(outcome)}}
            )
            parsed = output_parser.parse("", list(record.tokens))
        else:
            assert isinstance(outcome, CompletionResult)
            cache_hits += outcome.from_cache
            response_rows.append(
                {"id": record.id, "text": outcome.text, "finish_reason": outcome.finish_reason}
            )
            parsed = output_parser.parse(outcome.text, list(record.tokens))
        parsed_by_id[record.id] = parsed
        parsed_rows.append(
            {
                "id": record.id,
                "units": [unit_to_dict(u) for u in parsed.units],
                "diagnostics": [diag_to_dict(d) for d in parsed.diagnostics],
                "coverage": parsed.coverage,
            }
        )
        amap = alignment.align(record.tokens, parsed.units)
        labels = alignment.project_labels(record.tokens, parsed.units, amap)
        labels_by_id[record.id] = labels
        label_rows.append(
            {
                "id": record.id,
                "alignment_cost": amap.cost,
                "labels": [
                    {
                        "token_index": lab.token_index,
                        "judgment": lab.judgment.value,
                        "provenance": lab.provenance.value,
                    }
                    for lab in labels
                ],
            }
        )

    _write_jsonl(out_dir / RESPONSES_FILE, response_rows)
    _write_jsonl(out_dir / PARSED_FILE, parsed_rows)
    _write_jsonl(out_dir / LABELS_FILE, label_rows)

    if corpus_format == "trofi":
        _score_trofi_run(out_dir, records, labels_by_id, mapping, config.model_id)
    else:
        _write_items(out_dir, records, results, parsed_by_id, labels_by_id, config.model_id)

    manifest["finished_at"] = clock()
    manifest["stats"] = {"cache_hits": cache_hits, "errors": errors}
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True), encoding="utf-8")
    return out_dir


def _score_trofi_run(
    out_dir: Path,
    records: list[corpus.TrofiRecord],
    labels_by_id: dict[str, list[alignment.TokenLabel]],
    mapping: alignment.JudgmentMapping,
    model_id: str,
) -> None:
    prediction_rows = []
    scored = []
    for record in records:
        predicted = alignment.focus_prediction(
            labels_by_id[record.id], record.focus_indices, record.gold, mapping
        )
        scored.append((record, predicted))
        prediction_rows.append(
            {
                "id": record.id,
                "target_word": record.target_word,
                "focus_indices": list(record.focus_indices),
                "gold": record.gold.value,
                "predicted": predicted.value,
            }
        )
    _write_jsonl(out_dir / PREDICTIONS_FILE, prediction_rows)
    cm = evaluation.score_trofi(scored)
    (out_dir / "confusion.json").write_text(
        json.dumps(
            {
                "confusion": {"tp": cm.tp, "fp": cm.fp, "fn": cm.fn, "tn": cm.tn},
                "total": cm.total,
                "positive_class": "nonliteral",
            },
            indent=2,
            sort_keys=True,
        ),
        encoding="utf-8",
    )
    metrics = evaluation.precision_recall(cm)
    (out_dir / "metrics.csv").write_text(metrics_csv([(model_id, metrics)]), encoding="utf-8", newline="")
    (out_dir / "metrics.json").write_text(metrics_json(model_id, cm, mapping.value), encoding="utf-8")


def _write_items(
    out_dir: Path,
    records: list[corpus.MwlbRecord],
    results: dict,
    parsed_by_id: dict[str, output_parser.ParsedOutput],
    labels_by_id: dict[str, list[alignment.TokenLabel]],
    model_id: str,
) -> None:
    rows = []
    for record in records:
        outcome = results[record.id]
        raw = outcome.text if isinstance(outcome, CompletionResult) else ""
        parsed = parsed_by_id[record.id]
        rows.append(
            {
                "id": record.id,
                "model_id": model_id,
                "sentence": record.sentence,
                "tokens": [
                    {"surface": t.surface, "start": t.char_span[0], "end": t.char_span[1]}
                    for t in record.tokens
                ],
                "token_labels": [
                    {"judgment": lab.judgment.value, "provenance": lab.provenance.value}
                    for lab in labels_by_id[record.id]
                ],
                "lj_metaphors": [
                    {"token_range": list(s.token_range), "key_indices": list(s.key_indices)}
                    for s in record.lj_metaphors
                ],
                "conceptual_metaphor": record.conceptual_metaphor,
                "units": [unit_to_dict(u) for u in parsed.units],
                "diagnostics": [diag_to_dict(d) for d in parsed.diagnostics],
                "coverage": parsed.coverage,
                "raw_response": raw,
            }
        )
    _write_jsonl(out_dir / ITEMS_FILE, rows)


def rescore_run(
    run_dir: str | Path,
    out_dir: str | Path,
    mapping: alignment.JudgmentMapping,
) -> Path:
    """Re-score an existing TroFi run under a different judgment mapping.

    Run directories are immutable after completion, so the re-scored results
    land in a fresh directory alongside a manifest noting the new mapping.
    """
    run_dir = Path(run_dir)
    out_dir = Path(out_dir)
    if run_dir.resolve() == out_dir.resolve():
        raise ValueError("re-scoring writes a new run directory; pick a different --out")
    manifest = json.loads((run_dir / "manifest.json").read_text(encoding="utf-8"))
    if manifest["corpus"]["format"] != "trofi":
        raise ValueError("re-scoring applies to TroFi runs")
    records = corpus.load_trofi(manifest["corpus"]["path"])
    by_id = {r.id: r for r in records}
    out_dir.mkdir(parents=True, exist_ok=True)

    labels_by_id: dict[str, list[alignment.TokenLabel]] = {}
    ordered: list[corpus.TrofiRecord] = []
    for line in (run_dir / LABELS_FILE).read_text(encoding="utf-8").splitlines():
        row = json.loads(line)
        record = by_id.get(row["id"])
        if record is None:
            raise ValueError(f"corpus no longer contains record {row['id']}")
        ordered.append(record)
        labels_by_id[record.id] = [
            alignment.TokenLabel(
                token_index=lab["token_index"],
                judgment=output_parser.Judgment(lab["judgment"]),
                provenance=alignment.LabelProvenance(lab["provenance"]),
            )
            for lab in row["labels"]
        ]
    manifest["mapping"] = mapping.value
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True), encoding="utf-8"
    )
    _score_trofi_run(out_dir, ordered, labels_by_id, mapping, manifest["model"]["model_id"])
    return out_dir


def export_records(run_dir: str | Path, out_dir: str | Path | None = None) -> dict[str, Path]:
    """Export the latest record per (sentence, model, annotator) plus conflicts."""
    run_dir = Path(run_dir)
    out_dir = Path(out_dir) if out_dir is not None else run_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    entries, tail = read_log(run_dir / RECORD_LOG_FILE)
    if tail is not None:
        logger.warning(
            "record log has a corrupt tail at byte %d (%s); exporting complete entries",
            tail.byte_offset,
            tail.reason,
        )
    latest = latest_per_key(entries)
    records = [e.record for e in latest]

    header = [
        "sentence_id",
        "model_id",
        "annotator_id",
        "lj_identified",
        "lj_basic_correct",
        "additional",
        "additional_metaphorical",
        "additional_basic_correct",
        "note",
    ]

    def cell(value) -> str:
        if value is None:
            return ""
        if isinstance(value, bool):
            return "1" if value else "0"
        return str(value).replace("\t", " ").replace("\n", " ")

    tsv_lines = ["\t".join(header)]
    for r in records:
        d = r.to_dict()
        tsv_lines.append("\t".join(cell(d[h]) for h in header))
    tsv_path = out_dir / "export.tsv"
    tsv_path.write_text("\n".join(tsv_lines) + "\n", encoding="utf-8")

    json_path = out_dir / "export.json"
    json_path.write_text(
        json.dumps([r.to_dict() for r in records], indent=2, sort_keys=True), encoding="utf-8"
    )

    merged, conflicts = evaluation.consensus(records)
    conflicts_path = out_dir / "conflicts.json"
    conflicts_path.write_text(
        json.dumps(
            [
                {
                    "sentence_id": c.sentence_id,
                    "model_id": c.model_id,
                    "records": [r.to_dict() for r in c.records],
                }
                for c in conflicts
            ],
            indent=2,
            sort_keys=True,
        ),
        encoding="utf-8",
    )
    written = {"tsv": tsv_path, "json": json_path, "conflicts": conflicts_path}
    if merged:
        aggregate = evaluation.aggregate_qualitative(merged)
        agg_path = out_dir / "qualitative_aggregate.json"
        agg_path.write_text(
            json.dumps(
                {
                    "n": aggregate.n,
                    "additional_denominator": aggregate.additional_denominator,
                    "pct_lj_identified": aggregate.pct_lj_identified,
                    "pct_lj_basic_correct": aggregate.pct_lj_basic_correct,
                    "pct_additional": aggregate.pct_additional,
                    "pct_additional_metaphorical": aggregate.pct_additional_metaphorical,
                    "pct_additional_basic_correct": aggregate.pct_additional_basic_correct,
                    "rendered": aggregate.rendered(),
                },
                indent=2,
                sort_keys=True,
            ),
            encoding="utf-8",
        )
        written["aggregate"] = agg_path
    return written
