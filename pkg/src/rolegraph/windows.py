"""Sentence cleaning and fixed-width context windows.

Cleaning happens first: each sentence is whitespace-tokenized, tokens are
compared case-insensitively against the stopword list after trimming
leading/trailing punctuation, and the surviving tokens are re-joined with
single spaces in their original form (case and inner punctuation kept).

Windows are built over the *cleaned* sentences of one document: slot
positions i-2 .. i+2, with ``<pad>`` filling positions that fall off either
end. The rendered form joins the five slots with `` </s> ``, so every
rendered window contains exactly four separators.
"""
from __future__ import annotations

import string
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .corpus import SentenceRecord
from .errors import CorpusError, DataError

PAD = "<pad>"
SEPARATOR = " </s> "
RADIUS = 2
WIDTH = 2 * RADIUS + 1

_PUNCT = string.punctuation


@dataclass(frozen=True)
class StopwordList:
    """Case-insensitive word set used by :func:`strip_stopwords`."""

    words: frozenset[str]

    def __post_init__(self) -> None:
        if not self.words:
            raise DataError("stopword list is empty")
        object.__setattr__(self, "words", frozenset(w.lower() for w in self.words))

    def __contains__(self, token: str) -> bool:
        return token.lower() in self.words

    @classmethod
    def from_words(cls, words: Iterable[str]) -> "StopwordList":
        return cls(words=frozenset(words))

    @classmethod
    def from_file(cls, path) -> "StopwordList":
        words = []
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            word = line.strip()
            if word and not word.startswith("#"):
                words.append(word)
        if not words:
            raise DataError(f"stopword file has no words: {path}")
        return cls.from_words(words)

    @classmethod
    def default(cls) -> "StopwordList":
        ref = resources.files("rolegraph.data").joinpath("stopwords_en.txt")
        words = []
        for line in ref.read_text(encoding="utf-8").splitlines():
            word = line.strip()
            if word and not word.startswith("#"):
                words.append(word)
        return cls.from_words(words)


def strip_stopwords(text: str, stopwords: StopwordList) -> str:
    """Remove stopword tokens; keep everything else exactly as written.

    A token matches a stopword when it equals one case-insensitively after
    leading and trailing punctuation are trimmed; the kept tokens re-join
    with single spaces, untrimmed.
    """
    kept = []
    for token in text.split():
        if token.strip(_PUNCT) not in stopwords:
            kept.append(token)
    return " ".join(kept)


@dataclass(frozen=True)
class ContextWindow:
    """Five cleaned-sentence slots centered on one sentence."""

    doc_id: str
    sent_index: int
    slots: tuple[str, str, str, str, str]

    def render(self, separator: str = SEPARATOR) -> str:
        return separator.join(self.slots)


def build_window(
    doc_id: str, cleaned: Sequence[str], index: int, pad_token: str = PAD
) -> ContextWindow:
    """Window for sentence ``index`` of one document's cleaned sentences."""
    n = len(cleaned)
    if not 0 <= index < n:
        raise IndexError(f"sentence index {index} out of range for {n} sentences")
    slots = tuple(
        cleaned[pos] if 0 <= pos < n else pad_token
        for pos in range(index - RADIUS, index + RADIUS + 1)
    )
    return ContextWindow(doc_id=doc_id, sent_index=index, slots=slots)


def windowize_corpus(
    records: Sequence[SentenceRecord],
    stopwords: StopwordList | None = None,
    pad_token: str = PAD,
    clean: bool = True,
) -> Iterator[ContextWindow]:
    """Clean every sentence, then yield one window per sentence, in corpus
    order. Records must arrive grouped by document with ascending indices,
    the way the corpus reader returns them. ``clean=False`` skips stopword
    removal and windows the raw text."""
    if clean and stopwords is None:
        stopwords = StopwordList.default()
    by_doc: dict[str, list[SentenceRecord]] = {}
    order: list[str] = []
    for rec in records:
        if rec.doc_id not in by_doc:
            by_doc[rec.doc_id] = []
            order.append(rec.doc_id)
        elif order[-1] != rec.doc_id:
            raise CorpusError(f"document {rec.doc_id!r} appears in two separate runs")
        group = by_doc[rec.doc_id]
        if group and rec.sent_index != group[-1].sent_index + 1:
            raise CorpusError(
                f"document {rec.doc_id!r}: sentence {rec.sent_index} "
                f"follows {group[-1].sent_index}"
            )
        group.append(rec)
    for doc_id in order:
        if clean:
            cleaned = [strip_stopwords(r.text, stopwords) for r in by_doc[doc_id]]
        else:
            cleaned = [r.text for r in by_doc[doc_id]]
        for idx in range(len(cleaned)):
            yield build_window(doc_id, cleaned, idx, pad_token=pad_token)
