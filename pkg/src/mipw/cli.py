"""mipw command line: ingest | run | parse | score | report | serve | export."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import alignment, corpus, output_parser
from .gateway import ModelConfig, PlaybackBackend
from .workbench import cli_run, emit_report, export_records, rescore_run, serve

logger = logging.getLogger(__name__)


def _add_corpus_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--corpus", required=True, help="corpus file path")
    p.add_argument("--format", required=True, choices=["trofi", "mwlb"], dest="corpus_format")


def _mapping(value: str) -> alignment.JudgmentMapping:
    return alignment.JudgmentMapping(value)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mipw", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="load and validate a corpus")
    _add_corpus_args(p)
    p.add_argument("--out", help="write the validation report JSON here")

    p = sub.add_parser("run", help="prompt a model over a corpus and score it")
    _add_corpus_args(p)
    p.add_argument("--template", help="prompt template asset (defaults to the shipped one)")
    p.add_argument("--model", required=True, help="model id, e.g. gpt-4o")
    p.add_argument("--top-p", type=float, default=0.1)
    p.add_argument("--base-url", help="OpenAI-compatible endpoint base URL")
    p.add_argument("--cache-dir", help="content-addressed response cache directory")
    p.add_argument(
        "--mapping",
        type=_mapping,
        default=alignment.JudgmentMapping.YES_NONLITERAL,
        metavar="yes-nonliteral|yes-literal",
    )
    p.add_argument("--playback", help="playback fixtures JSON (digest -> response text)")
    p.add_argument("--max-attempts", type=int, default=5)
    p.add_argument("--max-in-flight", type=int, default=4)
    p.add_argument("--out", required=True, help="run directory to create")

    p = sub.add_parser("parse", help="parse one raw model response")
    p.add_argument("--input", help="response text file ('-' or omitted reads stdin)")
    p.add_argument("--sentence", help="source sentence, enables coverage and --align")
    p.add_argument("--align", action="store_true", help="also dump the alignment op trace")
    p.add_argument("--out", help="write JSON here instead of stdout")

    p = sub.add_parser("score", help="re-score an existing run under a different mapping")
    p.add_argument("--run", required=True, help="existing run directory")
    p.add_argument(
        "--mapping",
        type=_mapping,
        default=alignment.JudgmentMapping.YES_NONLITERAL,
        metavar="yes-nonliteral|yes-literal",
    )
    p.add_argument("--out", required=True, help="new run directory for the re-scored results")

    p = sub.add_parser("report", help="emit reports for a scored run")
    p.add_argument("--run", required=True)
    p.add_argument(
        "--formats",
        default="text,svg,csv,json",
        help="comma-separated subset of text,svg,csv,json",
    )

    p = sub.add_parser("serve", help="serve the annotation API and UI for a run")
    p.add_argument("--run", required=True)
    p.add_argument("--port", type=int, default=8008)
    p.add_argument("--host", default="127.0.0.1")

    p = sub.add_parser("export", help="export annotation records from a run")
    p.add_argument("--run", required=True)
    p.add_argument("--out", help="output directory (defaults to the run directory)")
    return parser


def _cmd_ingest(args) -> int:
    loader = corpus.load_trofi if args.corpus_format == "trofi" else corpus.load_mwlb
    records = loader(args.corpus)
    report = corpus.validate(records)
    sys.stdout.write(f"loaded {len(records)} record(s) from {args.corpus}\n")
    sys.stdout.write(report.to_text())
    if args.out:
        Path(args.out).write_text(report.to_json(), encoding="utf-8")
        sys.stdout.write(f"report written to {args.out}\n")
    return 0 if report.ok() else 1


def _cmd_run(args) -> int:
    config = ModelConfig(
        model_id=args.model,
        top_p=args.top_p,
        max_attempts=args.max_attempts,
        max_in_flight=args.max_in_flight,
        cache_dir=args.cache_dir,
    )
    backend = None
    if args.playback:
        backend = PlaybackBackend.from_file(args.playback)
    elif args.base_url:
        from .gateway import HttpBackend

        backend = HttpBackend(base_url=args.base_url)

    def progress(event: dict) -> None:
        status = "ok" if event["ok"] else f"error:{event['error']}"
        sys.stderr.write(f"[{event['done']}/{event['total']}] {event['id']}: {status}\n")

    out = cli_run(
        corpus_path=args.corpus,
        corpus_format=args.corpus_format,
        out_dir=args.out,
        config=config,
        template_path=args.template,
        mapping=args.mapping,
        backend=backend,
        progress=progress,
    )
    sys.stdout.write(f"run written to {out}\n")
    return 0


def _cmd_parse(args) -> int:
    if args.input and args.input != "-":
        text = Path(args.input).read_text(encoding="utf-8")
    else:
        text = sys.stdin.read()
    tokens = corpus.tokenize(args.sentence) if args.sentence else None
    parsed = output_parser.parse(text, tokens)
    payload = json.loads(parsed.to_json())
    if args.align:
        if tokens is None:
            sys.stderr.write("--align requires --sentence\n")
            return 2
        amap = alignment.align(tokens, parsed.units)
        payload["alignment"] = amap.to_json_obj()
    rendered = json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False)
    if args.out:
        Path(args.out).write_text(rendered + "\n", encoding="utf-8")
    else:
        sys.stdout.write(rendered + "\n")
    return 0


def _cmd_score(args) -> int:
    out = rescore_run(args.run, args.out, args.mapping)
    sys.stdout.write(f"re-scored run written to {out}\n")
    return 0


def _cmd_report(args) -> int:
    formats = {f.strip() for f in args.formats.split(",") if f.strip()}
    written = emit_report(args.run, formats)
    for path in written:
        sys.stdout.write(f"wrote {path}\n")
    return 0


def _cmd_serve(args) -> int:
    serve(args.run, port=args.port, host=args.host)
    return 0


def _cmd_export(args) -> int:
    written = export_records(args.run, args.out)
    for kind, path in written.items():
        sys.stdout.write(f"wrote {kind}: {path}\n")
    return 0


_COMMANDS = {
    "ingest": _cmd_ingest,
    "run": _cmd_run,
    "parse": _cmd_parse,
    "score": _cmd_score,
    "report": _cmd_report,
    "serve": _cmd_serve,
    "export": _cmd_export,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO)
    try:
        return _COMMANDS[args.command](args)
    except (corpus.CorpusFormatError, FileNotFoundError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
