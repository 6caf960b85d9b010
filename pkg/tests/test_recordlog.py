import json

import pytest

from mipw.evaluation import QualitativeRecord
from mipw.workbench.recordlog import (
    CorruptLogError,
    RecordLog,
    latest_per_key,
    read_log,
)


def record(sid: str, annotator: str = "a1", lj: bool = True) -> QualitativeRecord:
    return QualitativeRecord(
        sentence_id=sid,
        model_id="m",
        annotator_id=annotator,
        lj_identified=lj,
        lj_basic_correct=False,
        additional=False,
    )


@pytest.fixture()
def populated_log(tmp_path):
    path = tmp_path / "log.jsonl"
    log = RecordLog(path, clock=lambda: "T0")
    for i in range(5):
        log.append(record(f"s{i}", annotator=f"a{i % 2}"))
    return path


class TestAppendAndRead:
    def test_round_trip(self, populated_log):
        entries, tail = read_log(populated_log)
        assert tail is None
        assert [e.seq for e in entries] == [1, 2, 3, 4, 5]
        assert entries[0].record.sentence_id == "s0"

    def test_sequence_continues_across_reopen(self, populated_log):
        log = RecordLog(populated_log)
        entry = log.append(record("s9"))
        assert entry.seq == 6

    def test_missing_file_is_empty(self, tmp_path):
        entries, tail = read_log(tmp_path / "absent.jsonl")
        assert entries == [] and tail is None

    def test_entries_immutable_snapshot(self, populated_log):
        log = RecordLog(populated_log)
        snapshot = log.entries()
        log.append(record("s10"))
        assert len(log.entries()) == len(snapshot) + 1


class TestCrashConsistency:
    def test_every_byte_truncation(self, populated_log, tmp_path):
        data = populated_log.read_bytes()
        boundaries = [0]
        for i, b in enumerate(data):
            if b == ord("\n"):
                boundaries.append(i + 1)
        complete_before = {}
        for cut in range(len(data) + 1):
            complete_before[cut] = sum(1 for b in boundaries[1:] if b <= cut)
        victim = tmp_path / "victim.jsonl"
        for cut in range(len(data) + 1):
            victim.write_bytes(data[:cut])
            entries, tail = read_log(victim)
            # never loses a complete entry
            assert len(entries) == complete_before[cut], f"cut at {cut}"
            # identifies the corrupt tail exactly when the cut is mid-entry
            if cut in boundaries:
                assert tail is None, f"cut at {cut}"
            else:
                assert tail is not None, f"cut at {cut}"
                assert tail.byte_offset == max(b for b in boundaries if b <= cut)
                assert tail.after_seq == complete_before[cut]

    def test_mid_log_corruption_refuses(self, populated_log):
        data = populated_log.read_bytes()
        lines = data.split(b"\n")
        lines[1] = b'{"seq": 99, "broken": true}'
        populated_log.write_bytes(b"\n".join(lines))
        with pytest.raises(CorruptLogError) as err:
            read_log(populated_log)
        assert err.value.seq == 2

    def test_recovery_truncates_tail_then_appends(self, populated_log):
        with open(populated_log, "ab") as fh:
            fh.write(b'{"seq": 6, "ts": "T", "record"')  # partial write, no newline
        log = RecordLog(populated_log)
        assert len(log.entries()) == 5
        entry = log.append(record("s-new"))
        assert entry.seq == 6
        entries, tail = read_log(populated_log)
        assert tail is None
        assert [e.seq for e in entries] == [1, 2, 3, 4, 5, 6]

    def test_history_preserved_verbatim(self, populated_log):
        before = populated_log.read_bytes()
        log = RecordLog(populated_log)
        log.append(record("s5"))
        after = populated_log.read_bytes()
        assert after.startswith(before)


class TestLatestPerKey:
    def test_last_write_wins(self, tmp_path):
        log = RecordLog(tmp_path / "log.jsonl", clock=lambda: "T")
        log.append(record("s1", annotator="alice", lj=True))
        log.append(record("s1", annotator="alice", lj=False))
        log.append(record("s1", annotator="bob", lj=True))
        latest = latest_per_key(log.entries())
        assert len(latest) == 2
        alice = next(e for e in latest if e.record.annotator_id == "alice")
        assert alice.record.lj_identified is False
        assert alice.seq == 2

    def test_entry_line_is_json(self, tmp_path):
        log = RecordLog(tmp_path / "log.jsonl", clock=lambda: "T")
        entry = log.append(record("s1"))
        parsed = json.loads(entry.to_line())
        assert parsed["seq"] == 1
        assert parsed["record"]["sentence_id"] == "s1"
