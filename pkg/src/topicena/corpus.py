"""Corpus loading, sentence segmentation, and score-band group labeling.

Documents are split into utterances on a boundary marker (a literal ``.`` by
default). The literal rule is deliberately naive about abbreviations and
decimals; pass a regex rule for anything smarter.
"""
from __future__ import annotations

import csv
import json
import re
import string
from dataclasses import dataclass, field
from pathlib import Path

from .errors import (
    DuplicateDocId,
    EmptyDocument,
    MissingScore,
    ParseError,
    ScoreOutOfRange,
)

GroupLabel = str

CORPUS_CSV_HEADER = ["doc_id", "assignment_id", "score", "full_text"]

_NON_CONTENT = set(string.punctuation) | set(string.whitespace)


@dataclass(frozen=True)
class Document:
    doc_id: str
    full_text: str
    assignment_id: str = ""
    score: int | None = None
    extra: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not self.doc_id:
            raise ValueError("doc_id must be non-empty")
        if not self.full_text.strip():
            raise ValueError(f"document {self.doc_id!r} has empty full_text")
        if self.score is not None and not 1 <= int(self.score) <= 6:
            raise ValueError(
                f"document {self.doc_id!r} score {self.score} outside [1, 6]"
            )


@dataclass(frozen=True)
class Utterance:
    doc_id: str
    utterance_index: int
    text: str
    conversation_id: str | None = None
    group: GroupLabel | None = None

    def __post_init__(self):
        if self.utterance_index < 0:
            raise ValueError("utterance_index must be >= 0")
        if not self.text.strip():
            raise ValueError(
                f"utterance ({self.doc_id!r}, {self.utterance_index}) has empty text"
            )
        if self.conversation_id is None:
            # each document is one conversation unless the caller says otherwise
            object.__setattr__(self, "conversation_id", self.doc_id)

    @property
    def key(self) -> tuple[str, int]:
        return (self.doc_id, self.utterance_index)


@dataclass(frozen=True)
class SegmentationRule:
    """Boundary specification: a literal marker by default, a regex if ``regex``."""

    boundary: str = "."
    regex: bool = False

    def split_pattern(self) -> str:
        return self.boundary if self.regex else re.escape(self.boundary)


PERIOD_RULE = SegmentationRule()


def _is_content(fragment: str) -> bool:
    return any(ch not in _NON_CONTENT for ch in fragment)


def segment_document(
    doc: Document,
    rule: SegmentationRule = PERIOD_RULE,
    group: GroupLabel | None = None,
) -> list[Utterance]:
    """Split a document into utterances on the rule's boundary marker.

    Fragments that trim to nothing or contain only punctuation/whitespace are
    dropped. Raises EmptyDocument when nothing survives.
    """
    fragments = re.split(rule.split_pattern(), doc.full_text)
    texts = [frag.strip() for frag in fragments if _is_content(frag)]
    if not texts:
        raise EmptyDocument(f"document {doc.doc_id!r} yields no utterances")
    return [
        Utterance(doc.doc_id, i, text, conversation_id=doc.doc_id, group=group)
        for i, text in enumerate(texts)
    ]


def derive_group_label(
    doc: Document,
    low_range: tuple[int, int],
    high_range: tuple[int, int],
    labels: tuple[GroupLabel, GroupLabel] = ("LOW", "HIGH"),
) -> GroupLabel:
    """Map a document's score into one of two labels via inclusive score bands."""
    if max(low_range[0], high_range[0]) <= min(low_range[1], high_range[1]):
        raise ValueError(f"score bands {low_range} and {high_range} overlap")
    if doc.score is None:
        raise MissingScore(f"document {doc.doc_id!r} has no score")
    if low_range[0] <= doc.score <= low_range[1]:
        return labels[0]
    if high_range[0] <= doc.score <= high_range[1]:
        return labels[1]
    raise ScoreOutOfRange(
        f"document {doc.doc_id!r} score {doc.score} in neither {low_range} nor {high_range}"
    )


def segment_corpus(
    docs: list[Document],
    rule: SegmentationRule = PERIOD_RULE,
    low_range: tuple[int, int] | None = None,
    high_range: tuple[int, int] | None = None,
    labels: tuple[GroupLabel, GroupLabel] = ("LOW", "HIGH"),
) -> list[Utterance]:
    """Segment every document, attaching a score-band group when bands are given.

    Documents without a score are left ungrouped rather than rejected; the
    strict per-document path is `derive_group_label`.
    """
    utterances: list[Utterance] = []
    for doc in docs:
        group = None
        if low_range is not None and high_range is not None and doc.score is not None:
            group = derive_group_label(doc, low_range, high_range, labels)
        utterances.extend(segment_document(doc, rule, group=group))
    return utterances


# ---------------------------------------------------------------------------
# corpus files


def load_corpus(path, format: str = "csv") -> list[Document]:
    """Load documents from a CSV or JSONL corpus file, preserving record order."""
    path = Path(path)
    if format == "csv":
        return _load_corpus_csv(path)
    if format == "jsonl":
        return _load_corpus_jsonl(path)
    raise ValueError(f"unknown corpus format {format!r}")


def _parse_score(raw, path, line) -> int | None:
    if raw is None or raw == "":
        return None
    try:
        return int(raw)
    except (TypeError, ValueError):
        raise ParseError(f"score {raw!r} is not an integer", path, line) from None


def _load_corpus_csv(path: Path) -> list[Document]:
    docs: list[Document] = []
    seen: set[str] = set()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or set(CORPUS_CSV_HEADER) - set(reader.fieldnames):
            raise ParseError(
                f"header must contain {CORPUS_CSV_HEADER}, got {reader.fieldnames}",
                path,
                line=1,
            )
        for row in reader:
            line = reader.line_num
            if row.get("doc_id") in seen:
                raise DuplicateDocId(f"{path}:{line}: duplicate doc_id {row['doc_id']!r}")
            try:
                doc = Document(
                    doc_id=row.get("doc_id") or "",
                    full_text=row.get("full_text") or "",
                    assignment_id=row.get("assignment_id") or "",
                    score=_parse_score(row.get("score"), path, line),
                )
            except ValueError as exc:
                raise ParseError(str(exc), path, line) from exc
            seen.add(doc.doc_id)
            docs.append(doc)
    return docs


def _load_corpus_jsonl(path: Path) -> list[Document]:
    docs: list[Document] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", path, line_no) from exc
            if not isinstance(obj, dict):
                raise ParseError("record must be a JSON object", path, line_no)
            doc_id = obj.get("doc_id", "")
            if doc_id in seen:
                raise DuplicateDocId(f"{path}:{line_no}: duplicate doc_id {doc_id!r}")
            extra = obj.get("extra") or {}
            if not isinstance(extra, dict):
                raise ParseError("extra must be an object", path, line_no)
            try:
                doc = Document(
                    doc_id=doc_id,
                    full_text=obj.get("full_text", ""),
                    assignment_id=obj.get("assignment_id", ""),
                    score=_parse_score(obj.get("score"), path, line_no),
                    extra={str(k): str(v) for k, v in extra.items()},
                )
            except ValueError as exc:
                raise ParseError(str(exc), path, line_no) from exc
            seen.add(doc.doc_id)
            docs.append(doc)
    return docs


def write_corpus(docs: list[Document], path, format: str = "csv") -> None:
    path = Path(path)
    if format == "csv":
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CORPUS_CSV_HEADER)
            for doc in docs:
                score = "" if doc.score is None else str(doc.score)
                writer.writerow([doc.doc_id, doc.assignment_id, score, doc.full_text])
    elif format == "jsonl":
        with open(path, "w", encoding="utf-8") as fh:
            for doc in docs:
                rec = {
                    "doc_id": doc.doc_id,
                    "assignment_id": doc.assignment_id,
                    "score": doc.score,
                    "full_text": doc.full_text,
                    "extra": doc.extra,
                }
                fh.write(json.dumps(rec, sort_keys=True, ensure_ascii=False) + "\n")
    else:
        raise ValueError(f"unknown corpus format {format!r}")


# ---------------------------------------------------------------------------
# utterance table (the contract file between corpus and everything downstream)


def write_utterance_table(utterances: list[Utterance], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for utt in utterances:
            rec = {
                "doc_id": utt.doc_id,
                "utterance_index": utt.utterance_index,
                "conversation_id": utt.conversation_id,
                "text": utt.text,
                "group": utt.group,
            }
            fh.write(json.dumps(rec, sort_keys=True, ensure_ascii=False) + "\n")


def read_utterance_table(path) -> list[Utterance]:
    path = Path(path)
    utterances: list[Utterance] = []
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", path, line_no) from exc
            try:
                utterances.append(
                    Utterance(
                        doc_id=obj["doc_id"],
                        utterance_index=int(obj["utterance_index"]),
                        text=obj["text"],
                        conversation_id=obj.get("conversation_id"),
                        group=obj.get("group"),
                    )
                )
            except (KeyError, ValueError) as exc:
                raise ParseError(str(exc), path, line_no) from exc
    return utterances


def utterance_counts(utterances: list[Utterance]) -> dict[str, int]:
    """Utterances per document."""
    counts: dict[str, int] = {}
    for utt in utterances:
        counts[utt.doc_id] = counts.get(utt.doc_id, 0) + 1
    return counts


def assignment_counts(
    utterances: list[Utterance], docs: list[Document]
) -> dict[str, dict]:
    """Per-assignment essay/utterance totals plus per-document counts."""
    per_doc = utterance_counts(utterances)
    report: dict[str, dict] = {}
    for doc in docs:
        entry = report.setdefault(
            doc.assignment_id, {"essays": 0, "utterances": 0, "per_doc": {}}
        )
        entry["essays"] += 1
        entry["utterances"] += per_doc.get(doc.doc_id, 0)
        entry["per_doc"][doc.doc_id] = per_doc.get(doc.doc_id, 0)
    return report
