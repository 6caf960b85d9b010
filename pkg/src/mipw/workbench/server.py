"""Local annotation service: JSON API over a run directory plus the static UI.

Binds localhost by default; this is a single-researcher tool with no
authentication.  All writes go through the append-only record log, so no API
call sequence can corrupt earlier annotations.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import HTMLResponse, JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from ..evaluation import QualitativeRecord, consensus, validate_record
from .recordlog import RecordLog, latest_per_key
from .runner import ITEMS_FILE, RECORD_LOG_FILE

logger = logging.getLogger(__name__)

STATIC_DIR = Path(__file__).parent / "static"

_FALLBACK_PAGE = """<!doctype html>
<html><head><title>mipw annotation</title></head>
<body><h1>mipw annotation service</h1>
<p>The browser UI bundle is not installed. The JSON API is live under
<code>/api/items</code>, <code>/api/export</code> and <code>/api/conflicts</code>.</p>
</body></html>
"""


class RecordPayload(BaseModel):
    model_id: str | None = None
    annotator_id: str
    lj_identified: bool
    lj_basic_correct: bool
    additional: bool
    additional_metaphorical: bool | None = None
    additional_basic_correct: bool | None = None
    note: str | None = None


def _load_items(run_dir: Path) -> dict[str, dict]:
    items_path = run_dir / ITEMS_FILE
    if not items_path.exists():
        raise FileNotFoundError(
            f"{run_dir} has no {ITEMS_FILE}; serve expects an MWLB-format run"
        )
    items: dict[str, dict] = {}
    for line in items_path.read_text(encoding="utf-8").splitlines():
        row = json.loads(line)
        items[row["id"]] = row
    return items


def create_app(run_dir: str | Path) -> FastAPI:
    run_dir = Path(run_dir)
    items = _load_items(run_dir)
    manifest = json.loads((run_dir / "manifest.json").read_text(encoding="utf-8"))
    default_model = manifest["model"]["model_id"]
    # Raises CorruptLogError on mid-log damage: refuse to start.
    log = RecordLog(run_dir / RECORD_LOG_FILE)

    app = FastAPI(title="mipw annotation service")
    app.state.record_log = log

    def completion_map() -> dict[str, list[str]]:
        done: dict[str, set[str]] = {}
        for entry in latest_per_key(log.entries()):
            done.setdefault(entry.record.sentence_id, set()).add(entry.record.annotator_id)
        return {k: sorted(v) for k, v in done.items()}

    @app.get("/api/items")
    def list_items():
        completed = completion_map()
        out = []
        for item_id in sorted(items):
            item = dict(items[item_id])
            item["completed_by"] = completed.get(item_id, [])
            out.append(item)
        return out

    @app.get("/api/items/{item_id}")
    def get_item(item_id: str):
        if item_id not in items:
            raise HTTPException(status_code=404, detail=f"unknown item {item_id}")
        item = dict(items[item_id])
        item["completed_by"] = completion_map().get(item_id, [])
        return item

    @app.post("/api/items/{item_id}/records", status_code=201)
    def post_record(item_id: str, payload: RecordPayload):
        if item_id not in items:
            raise HTTPException(status_code=404, detail=f"unknown item {item_id}")
        record = QualitativeRecord(
            sentence_id=item_id,
            model_id=payload.model_id or default_model,
            annotator_id=payload.annotator_id,
            lj_identified=payload.lj_identified,
            lj_basic_correct=payload.lj_basic_correct,
            additional=payload.additional,
            additional_metaphorical=payload.additional_metaphorical,
            additional_basic_correct=payload.additional_basic_correct,
            note=payload.note,
        )
        problems = validate_record(record)
        if problems:
            return JSONResponse(
                status_code=422,
                content={
                    "detail": [
                        {"loc": ["body", field], "msg": message, "type": "invariant_violation"}
                        for field, message in problems
                    ]
                },
            )
        entry = log.append(record)
        return {"seq": entry.seq, "ts": entry.ts}

    @app.get("/api/export")
    def export():
        latest = latest_per_key(log.entries())
        return {"records": [e.record.to_dict() for e in latest]}

    @app.get("/api/conflicts")
    def conflicts():
        latest = latest_per_key(log.entries())
        _merged, found = consensus([e.record for e in latest])
        return {
            "conflicts": [
                {
                    "sentence_id": c.sentence_id,
                    "model_id": c.model_id,
                    "records": [r.to_dict() for r in c.records],
                }
                for c in found
            ]
        }

    if (STATIC_DIR / "index.html").exists():
        app.mount("/", StaticFiles(directory=STATIC_DIR, html=True), name="ui")
    else:

        @app.get("/", response_class=HTMLResponse)
        def fallback_index():
            return _FALLBACK_PAGE

    return app


def serve(run_dir: str | Path, port: int, host: str = "127.0.0.1") -> None:
    """Run the annotation service until interrupted."""
    import uvicorn

    if host not in ("127.0.0.1", "localhost", "::1"):
        logger.warning("binding %s exposes the unauthenticated service beyond localhost", host)
    app = create_app(run_dir)
    try:
        uvicorn.run(app, host=host, port=port, log_level="info")
    except OSError as exc:
        raise OSError(f"cannot bind {host}:{port}: {exc}") from exc
