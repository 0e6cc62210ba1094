"""Flatten processed documents into one-row-per-entity tables.

CSV output follows RFC 4180 with a fixed header; JSONL output carries one
object per line with the same keys (plus an ``extras`` object for custom
span attributes, which have no CSV column). Booleans serialize as
true/false, missing values as an empty CSV field or JSON null.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .docmodel import Document, sentence_index_of, span_char_range, span_text

CSV_COLUMNS = (
    "doc_id",
    "ent_text",
    "start_char",
    "end_char",
    "category",
    "cui",
    "similarity",
    "is_negated",
    "is_historical",
    "is_hypothetical",
    "is_uncertain",
    "is_family",
    "section_category",
    "sentence_text",
)


@dataclass
class ExtractionRow:
    doc_id: str
    ent_text: str
    start_char: int
    end_char: int
    category: str
    cui: str | None
    similarity: float | None
    is_negated: bool
    is_historical: bool
    is_hypothetical: bool
    is_uncertain: bool
    is_family: bool
    section_category: str | None
    sentence_text: str
    extras: dict = field(default_factory=dict)


def to_rows(doc: Document, doc_id: str) -> list[ExtractionRow]:
    """One row per entity, in document order."""
    rows = []
    for entity in doc.entities:
        start_char, end_char = span_char_range(doc, entity.span)
        si = sentence_index_of(doc, entity.span.start_token)
        sentence = span_text(doc, doc.sentences[si]) if si is not None else ""
        rows.append(
            ExtractionRow(
                doc_id=doc_id,
                ent_text=doc.text[start_char:end_char],
                start_char=start_char,
                end_char=end_char,
                category=entity.category,
                cui=entity.cui,
                similarity=entity.similarity,
                is_negated=entity.is_negated,
                is_historical=entity.is_historical,
                is_hypothetical=entity.is_hypothetical,
                is_uncertain=entity.is_uncertain,
                is_family=entity.is_family,
                section_category=entity.section_category,
                sentence_text=sentence,
                extras=dict(entity.span.attrs),
            )
        )
    return rows


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_rows(
    rows: Iterable[ExtractionRow], fmt: str, path: str | Path
) -> int:
    """Write rows as CSV or JSONL; returns the number of rows written."""
    if fmt not in ("csv", "jsonl"):
        raise ValueError(f"unknown output format {fmt!r}")
    count = 0
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if fmt == "csv":
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_COLUMNS)
            for row in rows:
                writer.writerow([_csv_cell(getattr(row, col)) for col in CSV_COLUMNS])
                count += 1
        else:
            for row in rows:
                record = {col: getattr(row, col) for col in CSV_COLUMNS}
                if row.extras:
                    record["extras"] = row.extras
                fh.write(json.dumps(record, ensure_ascii=False) + "\n")
                count += 1
    return count


def read_corpus(path: str | Path) -> Iterator[tuple[str, str]]:
    """Yield (doc_id, text) pairs from a corpus location.

    A directory is read as UTF-8 ``.txt`` files in sorted name order with
    the file stem as doc_id; a single ``.jsonl`` file is read as one
    {"doc_id", "text"} object per line.
    """
    path = Path(path)
    if path.is_dir():
        for note in sorted(path.glob("*.txt")):
            yield note.stem, note.read_text(encoding="utf-8")
        return
    if not path.exists():
        raise FileNotFoundError(f"corpus not found: {path}")
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                yield str(obj["doc_id"]), str(obj["text"])
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise ValueError(f"{path}:{lineno}: bad corpus record: {exc}") from exc
