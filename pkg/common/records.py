"""Reading and writing run artifacts.

Tables are CSV with a header row; corpora, transcripts
and other structured records are line-delimited JSON (UTF-8).
Output is byte-stable: keys are sorted and floats use ``repr``.
"""

from typing import Any, Dict, Iterable, Iterator, List, Mapping, Sequence
from pathlib import Path
import csv
import threading

import simplejson


__all__ = (
    'dump_record',
    'write_jsonl',
    'append_jsonl',
    'read_jsonl',
    'write_csv',
    'JsonlAppender',
)


def dump_record(record: Mapping[str, Any]) -> str:
    """Serializes a record as a single JSON line (without newline).

    ``Decimal`` values are written as exact JSON numbers.
    """
    return simplejson.dumps(
        record,
        sort_keys=True,
        ensure_ascii=False,
        use_decimal=True,
        separators=(',', ':'),
    )


def write_jsonl(path: Path, records: Iterable[Mapping[str, Any]]) -> int:
    """(Over)writes ``path`` with one record per line.

    :returns: number of records written
    """
    count = 0
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='\n') as fh:
        for record in records:
            fh.write(dump_record(record))
            fh.write('\n')
            count += 1
    return count


def append_jsonl(path: Path, records: Iterable[Mapping[str, Any]]) -> None:
    """Appends records to ``path``, flushing after the batch
    so that partial output survives interruption."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'a', encoding='utf-8', newline='\n') as fh:
        for record in records:
            fh.write(dump_record(record))
            fh.write('\n')
        fh.flush()


def read_jsonl(path: Path) -> Iterator[Dict[str, Any]]:
    """Yields records from a line-delimited JSON file, skipping blank lines.

    A truncated last line (interrupted write) is ignored.
    """
    with open(path, 'r', encoding='utf-8') as fh:
        lines = fh.read().split('\n')
    for idx, line in enumerate(lines):
        if not line.strip():
            continue
        try:
            yield simplejson.loads(line, use_decimal=True)
        except simplejson.JSONDecodeError:
            if idx == len(lines) - 1:
                return
            raise


def write_csv(
    path: Path,
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
) -> int:
    """Writes a CSV table with a header row.

    :returns: number of data rows written
    """
    count = 0
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='') as fh:
        writer = csv.writer(fh, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([
                repr(float(cell)) if isinstance(cell, float) else cell
                for cell in row
            ])
            count += 1
    return count


class JsonlAppender:
    """Thread-safe line appender, used for transcripts."""

    def __init__(self, path: Path):
        self.path = path
        self._lock = threading.Lock()

    def append(self, record: Mapping[str, Any]) -> None:
        with self._lock:
            append_jsonl(self.path, [record])

    def extend(self, records: List[Mapping[str, Any]]) -> None:
        with self._lock:
            append_jsonl(self.path, records)
