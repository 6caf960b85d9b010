from .recordlog import CorruptLogError, CorruptTail, RecordLog, RecordLogEntry, latest_per_key, read_log
from .reports import confusion_svg, confusion_text, emit_report, metrics_csv, qualitative_bars_svg
from .runner import cli_run, export_records, rescore_run
from .server import create_app, serve

__all__ = [
    "CorruptLogError",
    "CorruptTail",
    "RecordLog",
    "RecordLogEntry",
    "latest_per_key",
    "read_log",
    "confusion_svg",
    "confusion_text",
    "emit_report",
    "metrics_csv",
    "qualitative_bars_svg",
    "cli_run",
    "export_records",
    "rescore_run",
    "create_app",
    "serve",
]
