"""Held-out evaluation: confusion matrix, per-class P/R/F1, macro-F1.

Conventions:
- confusion[g][p] counts sentences whose gold class is g and predicted
  class is p; accuracy is the trace over the total.
- precision, recall, and F1 are 0 whenever their denominator is 0.
- macro-F1 averages over the classes *present* in the evaluation, i.e.
  classes with gold support or at least one prediction; classes absent
  from both sides do not dilute the mean.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .corpus import NUM_CLASSES, RoleLabel
from .errors import DataError


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class EvalReport:
    model_name: str
    n_eval: int
    accuracy: float
    macro_f1: float
    per_class: Mapping[RoleLabel, ClassMetrics]
    confusion: np.ndarray


def evaluate(
    gold: Mapping[int, RoleLabel],
    predictions: Mapping[int, RoleLabel],
    model_name: str,
) -> EvalReport:
    """Score predictions against gold labels over the same index set."""
    gold_ix = set(gold)
    pred_ix = set(predictions)
    if gold_ix != pred_ix:
        only_gold = sorted(gold_ix - pred_ix)[:5]
        only_pred = sorted(pred_ix - gold_ix)[:5]
        raise DataError(
            "evaluation index sets differ: "
            f"missing predictions for {only_gold}, extra predictions at {only_pred}"
        )
    if not gold:
        raise DataError("nothing to evaluate: empty gold set")

    confusion = np.zeros((NUM_CLASSES, NUM_CLASSES), dtype=np.int64)
    for idx in gold_ix:
        confusion[int(gold[idx]), int(predictions[idx])] += 1

    n_eval = int(confusion.sum())
    accuracy = float(np.trace(confusion)) / n_eval

    per_class: dict[RoleLabel, ClassMetrics] = {}
    f1_present: list[float] = []
    for code in range(NUM_CLASSES):
        tp = int(confusion[code, code])
        support = int(confusion[code].sum())
        predicted = int(confusion[:, code].sum())
        precision = tp / predicted if predicted else 0.0
        recall = tp / support if support else 0.0
        f1 = (
            2.0 * precision * recall / (precision + recall)
            if precision + recall
            else 0.0
        )
        per_class[RoleLabel.from_code(code)] = ClassMetrics(
            precision=precision, recall=recall, f1=f1, support=support
        )
        if support or predicted:
            f1_present.append(f1)
    macro_f1 = sum(f1_present) / len(f1_present)

    return EvalReport(
        model_name=model_name,
        n_eval=n_eval,
        accuracy=accuracy,
        macro_f1=macro_f1,
        per_class=per_class,
        confusion=confusion,
    )


def render_table(reports: Sequence[EvalReport]) -> str:
    """One ``name  XX.XX%`` accuracy line per report, aligned."""
    if not reports:
        raise DataError("no reports to render")
    width = max(len(r.model_name) for r in reports)
    lines = [f"{r.model_name:<{width}}  {100.0 * r.accuracy:.2f}%\n" for r in reports]
    return "".join(lines)


def render_report(report: EvalReport) -> str:
    """Full text report: headline numbers plus a per-class block."""
    lines = [
        f"model: {report.model_name}\n",
        f"sentences evaluated: {report.n_eval}\n",
        f"accuracy: {100.0 * report.accuracy:.2f}%\n",
        f"macro-F1: {100.0 * report.macro_f1:.2f}%\n",
        "\n",
        f"{'class':<16} {'precision':>9} {'recall':>9} {'f1':>9} {'support':>8}\n",
    ]
    for label, m in report.per_class.items():
        lines.append(
            f"{label.name:<16} {m.precision:>9.4f} {m.recall:>9.4f} "
            f"{m.f1:>9.4f} {m.support:>8d}\n"
        )
    return "".join(lines)


def report_to_dict(report: EvalReport) -> dict:
    return {
        "model": report.model_name,
        "n_eval": report.n_eval,
        "accuracy": report.accuracy,
        "macro_f1": report.macro_f1,
        "per_class": {
            label.name: {
                "precision": m.precision,
                "recall": m.recall,
                "f1": m.f1,
                "support": m.support,
            }
            for label, m in report.per_class.items()
        },
        "confusion": report.confusion.tolist(),
    }


def write_report(report: EvalReport, path) -> None:
    Path(path).write_text(
        json.dumps(report_to_dict(report), indent=2, sort_keys=False) + "\n",
        encoding="utf-8",
    )
