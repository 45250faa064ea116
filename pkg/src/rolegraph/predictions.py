"""Prediction records and their JSONL wire format.

One object per line: ``{"index": i, "label": name, "scores": [k reals],
"undecided": bool}``. Both classifiers emit this shape, and the evaluation
harness consumes it.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .corpus import RoleLabel
from .errors import DataError
from .diffusion import DiffusionResult


@dataclass(frozen=True)
class Prediction:
    index: int
    label: RoleLabel
    scores: tuple[float, ...]
    undecided: bool = False


def from_diffusion(
    result: DiffusionResult, masked_indices: Sequence[int]
) -> list[Prediction]:
    """Predictions for the masked nodes of a diffusion run."""
    undecided = set(result.undecided)
    out = []
    for i in masked_indices:
        i = int(i)
        row = result.scores[i]
        if i in undecided or not row.any():
            label = RoleLabel.NONE
            flag = True
        else:
            label = RoleLabel.from_code(int(np.argmax(row)))
            flag = False
        out.append(
            Prediction(
                index=i,
                label=label,
                scores=tuple(float(v) for v in row),
                undecided=flag,
            )
        )
    return out


def from_scores(scores: np.ndarray, masked_indices: Sequence[int]) -> list[Prediction]:
    """Argmax predictions from a dense score matrix (e.g. softmax output)."""
    out = []
    for i in masked_indices:
        i = int(i)
        row = scores[i]
        out.append(
            Prediction(
                index=i,
                label=RoleLabel.from_code(int(np.argmax(row))),
                scores=tuple(float(v) for v in row),
                undecided=False,
            )
        )
    return out


def render_jsonl(predictions: Iterable[Prediction]) -> str:
    lines = []
    for p in predictions:
        lines.append(
            json.dumps(
                {
                    "index": p.index,
                    "label": p.label.format(),
                    "scores": list(p.scores),
                    "undecided": p.undecided,
                },
                ensure_ascii=False,
            )
            + "\n"
        )
    return "".join(lines)


def write_jsonl(predictions: Iterable[Prediction], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(render_jsonl(predictions))


def read_jsonl(path) -> list[Prediction]:
    out: list[Prediction] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"line {lineno}: invalid JSON ({exc.msg})") from None
            if not isinstance(obj, dict) or "index" not in obj or "label" not in obj:
                raise DataError(f"line {lineno}: expected index and label fields")
            if isinstance(obj["index"], bool) or not isinstance(obj["index"], int):
                raise DataError(f"line {lineno}: index must be an integer")
            out.append(
                Prediction(
                    index=obj["index"],
                    label=RoleLabel.parse(str(obj["label"])),
                    scores=tuple(float(v) for v in obj.get("scores", ())),
                    undecided=bool(obj.get("undecided", False)),
                )
            )
    return out
