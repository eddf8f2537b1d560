"""Deterministic CSV and JSON emission.

A report is anything with ``to_json()``; CSV output additionally needs
``csv_header`` and ``csv_rows()``.  Field order is whatever the report
builds, so the same report always serialises to the same bytes.
"""

from __future__ import annotations

import contextlib
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from typing import IO, Iterator

from .errors import EnactiveError

FORMATS = ("csv", "json")


class DestinationError(EnactiveError):
    """The report destination cannot be written."""


@dataclass
class Table:
    """A ready-made report: a JSON payload and a CSV table."""

    payload: dict
    csv_header: tuple[str, ...] = ()
    rows: list[tuple] = field(default_factory=list)

    def to_json(self) -> dict:
        return self.payload

    def csv_rows(self) -> Iterator[tuple]:
        return iter(self.rows)


def render_json(obj: object) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def csv_writer(fh: IO[str]) -> "csv._writer":
    return csv.writer(fh, lineterminator="\n")


def render(report: object, fmt: str) -> str:
    if fmt == "json":
        return render_json(report.to_json())  # type: ignore[attr-defined]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv_writer(buf)
        w.writerow(report.csv_header)  # type: ignore[attr-defined]
        w.writerows(report.csv_rows())  # type: ignore[attr-defined]
        return buf.getvalue()
    raise ValueError(f"unknown format {fmt!r}")


@contextlib.contextmanager
def open_destination(destination: str | None) -> Iterator[IO[str]]:
    """Standard output for ``None`` or ``-``, otherwise a UTF-8 file opened for writing."""
    if destination in (None, "-"):
        yield sys.stdout
        sys.stdout.flush()
        return
    try:
        fh = open(destination, "w", encoding="utf-8", newline="")
    except OSError as exc:
        raise DestinationError(f"cannot write {destination}: {exc.strerror or exc}") from None
    with fh:
        yield fh


def emit_report(report: object, fmt: str, destination: str | None = None) -> None:
    text = render(report, fmt)
    with open_destination(destination) as fh:
        fh.write(text)
