"""Plain CSV output with ``#`` comment headers, and the matching reader."""

from __future__ import annotations

import io
import sys
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .errors import DegenerateInputError, PwlCorrError
from .sampling import Family, SampleBatch


class CsvFormatError(PwlCorrError, ValueError):
    """A CSV input file is malformed."""


def format_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def render_csv(rows: Iterable[Sequence], header: Sequence[str],
               comments: Optional[Mapping[str, object]] = None) -> str:
    buf = io.StringIO()
    for key, value in (comments or {}).items():
        buf.write(f"# {key}: {format_value(value)}\n")
    width = len(header)
    buf.write(",".join(header) + "\n")
    for row in rows:
        if len(row) != width:
            raise DegenerateInputError(f"row has {len(row)} fields, header has {width}")
        buf.write(",".join(format_value(v) for v in row) + "\n")
    return buf.getvalue()


def emit_csv(rows, header, path=None, comments=None) -> None:
    """Write rows to ``path`` (or stdout when ``path`` is None or ``-``)."""
    text = render_csv(rows, header, comments)
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def split_body(text: str) -> str:
    """The part of a CSV document that excludes ``#`` comment lines."""
    return "".join(line for line in text.splitlines(True) if not line.startswith("#"))


def read_csv(path):
    """Return ``(header, rows, comments)``; numeric fields come back as floats."""
    text = sys.stdin.read() if str(path) == "-" else Path(path).read_text()
    comments, header, rows = {}, None, []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        if line.startswith("#"):
            key, sep, value = line[1:].partition(":")
            if sep:
                comments[key.strip()] = value.strip()
            continue
        fields = [f.strip() for f in line.split(",")]
        if header is None:
            header = fields
            continue
        if len(fields) != len(header):
            raise CsvFormatError(f"{path}:{lineno}: expected {len(header)} fields, got {len(fields)}")
        rows.append([_maybe_float(f) for f in fields])
    if header is None:
        raise CsvFormatError(f"{path}: missing header line")
    return header, rows, comments


def _maybe_float(s: str):
    try:
        return float(s)
    except ValueError:
        return s


def write_pairs(batch: SampleBatch, path=None, extra=None) -> None:
    comments = {"family": batch.family.value, "r": batch.true_r, "seed": batch.seed,
                "stream": batch.stream_index}
    if batch.original_len is not None:
        comments["original_len"] = batch.original_len
    comments.update(extra or {})
    emit_csv(zip(batch.xs, batch.ys), ("x", "y"), path, comments)


def read_pairs(path) -> SampleBatch:
    """Load a two-column ``x,y`` file; metadata comments are optional."""
    header, rows, comments = read_csv(path)
    if len(header) != 2:
        raise CsvFormatError(f"{path}: expected two columns, got {header}")
    try:
        arr = np.array(rows, dtype=float).reshape(-1, 2)
    except ValueError as exc:
        raise CsvFormatError(f"{path}: non-numeric pair data ({exc})") from None
    if arr.shape[0] == 0:
        raise CsvFormatError(f"{path}: no sample pairs")
    try:
        family = Family(comments.get("family", "gaussian"))
        r = float(comments.get("r", "nan"))
        seed = int(comments.get("seed", 0))
        stream = int(comments.get("stream", 0))
        olen = int(comments["original_len"]) if "original_len" in comments else None
    except ValueError as exc:
        raise CsvFormatError(f"{path}: bad metadata ({exc})") from None
    return SampleBatch(arr[:, 0], arr[:, 1], family, r, seed, stream, original_len=olen)
