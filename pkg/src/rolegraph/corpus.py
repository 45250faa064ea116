"""Corpus data model: role taxonomy, sentence records, supervision arrays.

File formats:
  * corpus — line-delimited JSON, one object per line with keys ``doc_id``,
    ``sent_index``, ``text`` and an optional ``label``;
  * partition — a JSON object mapping each ``doc_id`` to ``"train"`` or
    ``"eval"``;
  * labels — a JSON object mapping sentence index to label name; indices
    absent from the object are hidden (to be predicted).

All types are immutable after construction and safe to share across threads.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import CorpusError, PartitionError, TaxonomyError


class RoleLabel(enum.IntEnum):
    """The 13 rhetorical-role categories, coded 0..12 in canonical order."""

    PREAMBLE = 0
    FAC = 1
    RLC = 2
    ISSUE = 3
    ARG_PETITIONER = 4
    ARG_RESPONDENT = 5
    ANALYSIS = 6
    STA = 7
    PRE_RELIED = 8
    PRE_NOT_RELIED = 9
    RATIO = 10
    RPC = 11
    NONE = 12

    @classmethod
    def parse(cls, name: str) -> "RoleLabel":
        """Look up a label by name, case-insensitively."""
        try:
            return cls[name.strip().upper()]
        except KeyError:
            raise TaxonomyError(f"unknown role label {name!r}") from None

    @classmethod
    def from_code(cls, code: int) -> "RoleLabel":
        """Look up a label by its integer code."""
        try:
            return cls(code)
        except ValueError:
            raise TaxonomyError(f"role code {code} outside 0..12") from None

    def format(self) -> str:
        """Canonical upper-case spelling; inverse of :meth:`parse`."""
        return self.name


NUM_CLASSES = len(RoleLabel)

TRAIN = "train"
EVAL = "eval"


@dataclass(frozen=True)
class SentenceRecord:
    """One sentence of a document, identified by (doc_id, sent_index)."""

    doc_id: str
    sent_index: int
    text: str
    label: Optional[RoleLabel] = None


def _record_from_obj(obj: dict, lineno: int) -> SentenceRecord:
    if not isinstance(obj, dict):
        raise CorpusError(f"line {lineno}: expected a JSON object")
    doc_id = obj.get("doc_id")
    sent_index = obj.get("sent_index")
    text = obj.get("text")
    if not isinstance(doc_id, str) or not doc_id:
        raise CorpusError(f"line {lineno}: missing or non-string doc_id")
    if isinstance(sent_index, bool) or not isinstance(sent_index, int) or sent_index < 0:
        raise CorpusError(f"line {lineno}: sent_index must be a non-negative integer")
    if not isinstance(text, str):
        raise CorpusError(f"line {lineno}: missing or non-string text")
    raw_label = obj.get("label")
    label: Optional[RoleLabel] = None
    if raw_label is not None:
        if not isinstance(raw_label, str):
            raise CorpusError(f"line {lineno}: label must be a string or null")
        try:
            label = RoleLabel.parse(raw_label)
        except TaxonomyError as exc:
            raise TaxonomyError(f"line {lineno}: {exc}") from None
    return SentenceRecord(doc_id=doc_id, sent_index=sent_index, text=text, label=label)


def read_corpus(path) -> list[SentenceRecord]:
    """Read a line-delimited JSON corpus.

    Records come back in file order; the global sentence index of a record is
    its (0-based) position in that order. Blank lines are ignored. Validates
    that (doc_id, sent_index) pairs are unique and that the indices of every
    document form a contiguous range starting at 0.
    """
    records: list[SentenceRecord] = []
    seen: dict[tuple[str, int], int] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"line {lineno}: invalid JSON ({exc.msg})") from None
            rec = _record_from_obj(obj, lineno)
            key = (rec.doc_id, rec.sent_index)
            if key in seen:
                raise CorpusError(
                    f"line {lineno}: duplicate (doc_id, sent_index) {key!r}, "
                    f"first seen on line {seen[key]}"
                )
            seen[key] = lineno
            records.append(rec)
    _check_contiguity(records)
    return records


def _check_contiguity(records: Sequence[SentenceRecord]) -> None:
    per_doc: dict[str, list[int]] = {}
    for rec in records:
        per_doc.setdefault(rec.doc_id, []).append(rec.sent_index)
    for doc_id, indices in per_doc.items():
        if sorted(indices) != list(range(len(indices))):
            raise CorpusError(
                f"document {doc_id!r}: sent_index values are not a contiguous "
                f"range starting at 0"
            )


def write_corpus(records: Iterable[SentenceRecord], path) -> None:
    """Write records as line-delimited JSON, one object per line."""
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            obj: dict = {
                "doc_id": rec.doc_id,
                "sent_index": rec.sent_index,
                "text": rec.text,
            }
            if rec.label is not None:
                obj["label"] = rec.label.format()
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


def read_partition(path) -> dict[str, str]:
    """Read a partition spec: JSON object mapping doc_id -> "train" | "eval"."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise PartitionError(f"invalid partition JSON: {exc.msg}") from None
    if not isinstance(obj, dict):
        raise PartitionError("partition spec must be a JSON object")
    for doc_id, side in obj.items():
        if side not in (TRAIN, EVAL):
            raise PartitionError(
                f"document {doc_id!r}: partition value must be "
                f"'{TRAIN}' or '{EVAL}', got {side!r}"
            )
    return obj


def labels_from_mapping(mapping, n: int) -> "LabelArray":
    """Label array over ``n`` sentences from an index -> label-name mapping.

    Keys may be ints or their decimal strings (the JSON form); indices absent
    from the mapping are hidden.
    """
    assignments = np.full(n, -1, dtype=np.int64)
    mask = np.ones(n, dtype=bool)
    for key, name in mapping.items():
        try:
            idx = int(key)
        except (TypeError, ValueError):
            raise CorpusError(f"labels: non-integer sentence index {key!r}") from None
        if not 0 <= idx < n:
            raise CorpusError(f"labels: sentence index {idx} outside 0..{n - 1}")
        if not isinstance(name, str):
            raise CorpusError(f"labels: value for index {idx} must be a label name")
        assignments[idx] = int(RoleLabel.parse(name))
        mask[idx] = False
    if bool(mask.all()):
        raise CorpusError("labels: every sentence is hidden, nothing to diffuse from")
    return LabelArray(assignments=assignments, mask=mask)


def read_labels(path, n: int) -> "LabelArray":
    """Read a labels file: JSON object mapping sentence index -> label name."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"invalid labels JSON: {exc.msg}") from None
    if not isinstance(obj, dict):
        raise CorpusError("labels file must be a JSON object")
    return labels_from_mapping(obj, n)


def write_labels(labels: "LabelArray", path) -> None:
    """Write the visible assignments of a label array as a labels file."""
    obj = {
        str(i): RoleLabel.from_code(int(labels.assignments[i])).format()
        for i in range(labels.n)
        if not labels.mask[i]
    }
    Path(path).write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")


@dataclass(frozen=True)
class LabelArray:
    """Per-sentence label assignments plus a hidden/visible mask.

    ``assignments[i]`` is the class code of sentence i, or -1 when unknown.
    ``mask[i]`` is True when the label is hidden (to be predicted). Hidden
    sentences may still carry their gold assignment for later scoring; the
    supervision matrix from :meth:`onehot` zeroes them regardless.
    """

    assignments: np.ndarray
    mask: np.ndarray
    k: int = NUM_CLASSES

    def __post_init__(self) -> None:
        a = np.asarray(self.assignments, dtype=np.int64)
        m = np.asarray(self.mask, dtype=bool)
        if a.ndim != 1 or m.shape != a.shape:
            raise PartitionError("assignments and mask must be 1-d and same length")
        if np.any(a >= self.k) or np.any(a < -1):
            raise TaxonomyError("assignment code outside -1..k-1")
        if np.any((a < 0) & ~m):
            raise PartitionError("visible sentence without a label")
        object.__setattr__(self, "assignments", a)
        object.__setattr__(self, "mask", m)

    @property
    def n(self) -> int:
        return int(self.assignments.shape[0])

    def masked_indices(self) -> list[int]:
        return [int(i) for i in np.nonzero(self.mask)[0]]

    def onehot(self) -> np.ndarray:
        """n×k supervision matrix: one-hot rows where visible, zero rows where hidden."""
        y = np.zeros((self.n, self.k), dtype=np.float64)
        visible = np.nonzero(~self.mask)[0]
        y[visible, self.assignments[visible]] = 1.0
        return y


def split_mask(
    records: Sequence[SentenceRecord], partition: dict[str, str]
) -> tuple[LabelArray, list[int]]:
    """Build the supervision array for a train/eval partition.

    Train-partition sentences keep their labels visible; eval-partition
    sentences are masked. Returns the label array and the list of masked
    global indices, in ascending order.
    """
    corpus_docs = {rec.doc_id for rec in records}
    unknown = sorted(set(partition) - corpus_docs)
    if unknown:
        raise PartitionError(f"partition names unknown documents: {unknown}")
    unassigned = sorted(corpus_docs - set(partition))
    if unassigned:
        raise PartitionError(f"documents missing from partition: {unassigned}")
    for doc_id, side in partition.items():
        if side not in (TRAIN, EVAL):
            raise PartitionError(
                f"document {doc_id!r}: partition value must be "
                f"'{TRAIN}' or '{EVAL}', got {side!r}"
            )

    n = len(records)
    assignments = np.full(n, -1, dtype=np.int64)
    mask = np.zeros(n, dtype=bool)
    for i, rec in enumerate(records):
        if rec.label is not None:
            assignments[i] = int(rec.label)
        if partition[rec.doc_id] == EVAL:
            mask[i] = True
        elif rec.label is None:
            raise PartitionError(
                f"train document {rec.doc_id!r} sentence {rec.sent_index} has no label"
            )
    if n == 0 or bool(mask.all()):
        raise PartitionError("no supervision available: every sentence is masked")
    labels = LabelArray(assignments=assignments, mask=mask)
    return labels, labels.masked_indices()
