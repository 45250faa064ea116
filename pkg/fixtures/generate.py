#!/usr/bin/env python3
"""Regenerate the synthetic fixture corpus and the golden pipeline outputs.

Run from the repository root:

    python3 fixtures/generate.py

Writes corpus.jsonl / embeddings.emb / partition.json / labels.json next to
this script, then replays both pipelines through the CLI and stores their
outputs under golden/. Everything is seeded, so reruns are byte-identical.

The corpus is 3 documents x 20 sentences, labels cycling through all 13
roles. Embeddings are unit-norm class centers (mutually orthogonal, so
cross-class cosine is ~0) plus small within-class noise; two held-out
sentences are deliberately blended toward a wrong class so the golden
reports contain real confusions.
"""
from __future__ import annotations

import contextlib
import io
import json
import sys
from pathlib import Path

import numpy as np

from rolegraph.cli import main as cli_main
from rolegraph.corpus import RoleLabel, read_corpus, read_partition, split_mask, write_labels
from rolegraph.embeddings import EmbeddingMatrix, write_embeddings

HERE = Path(__file__).resolve().parent
GOLDEN = HERE / "golden"

SEED = 2023
DIMS = 16
DOCS = ("d1", "d2", "d3")
SENTS_PER_DOC = 20
PARTITION = {"d1": "train", "d2": "train", "d3": "eval"}

# (doc index, sentence index) pairs whose vectors lean toward a wrong class.
CONFUSED = {(2, 3): 0.55, (2, 11): 0.60}

_SUBJECTS = [
    "the appellant", "the respondent", "the learned counsel", "the trial court",
    "the high court", "the petitioner", "the accused", "the witness",
    "the tribunal", "the state",
]
_VERBS = [
    "submitted that", "contended that", "held that", "observed that",
    "argued that", "recorded that", "found that", "noted that",
    "concluded that", "stated that",
]
_OBJECTS = [
    "the agreement was executed under protest",
    "the notice was served within the limitation period",
    "the evidence on record supports the conviction",
    "the statutory provision applies retrospectively",
    "the compensation awarded was inadequate",
    "the confession was not voluntary",
    "the appeal deserves to be allowed",
    "the precedent squarely covers the present facts",
    "the sentence of imprisonment was excessive",
    "the land acquisition followed due process",
]


def _sentence(rng: np.random.Generator, role: RoleLabel) -> str:
    s = _SUBJECTS[int(rng.integers(len(_SUBJECTS)))]
    v = _VERBS[int(rng.integers(len(_VERBS)))]
    o = _OBJECTS[int(rng.integers(len(_OBJECTS)))]
    return f"In the matter of {role.name.lower().replace('_', ' ')}, {s} {v} {o}."


def _centers(rng: np.random.Generator, k: int, dims: int) -> np.ndarray:
    # Orthonormal columns via QR -> cross-class cosine is exactly 0 up to
    # float noise, far below the 0.5 edge threshold.
    q, _ = np.linalg.qr(rng.normal(size=(dims, dims)))
    return q[:, :k].T


def build_inputs() -> None:
    rng = np.random.default_rng(SEED)
    centers = _centers(rng, len(RoleLabel), DIMS)

    records = []
    vectors = []
    for di, doc in enumerate(DOCS):
        for si in range(SENTS_PER_DOC):
            g = di * SENTS_PER_DOC + si
            role = RoleLabel.from_code(g % len(RoleLabel))
            vec = centers[int(role)] + 0.04 * rng.normal(size=DIMS)
            mix = CONFUSED.get((di, si))
            if mix is not None:
                other = RoleLabel.from_code((int(role) + 1) % len(RoleLabel))
                vec = (1.0 - mix) * centers[int(role)] + mix * centers[int(other)]
                vec = vec + 0.02 * rng.normal(size=DIMS)
            vec = vec / np.linalg.norm(vec)
            vectors.append(vec)
            records.append(
                {
                    "doc_id": doc,
                    "sent_index": si,
                    "text": _sentence(rng, role),
                    "label": role.name,
                }
            )

    with open(HERE / "corpus.jsonl", "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
    write_embeddings(
        EmbeddingMatrix(data=np.asarray(vectors, dtype=np.float32)),
        HERE / "embeddings.emb",
    )
    (HERE / "partition.json").write_text(
        json.dumps(PARTITION, indent=2) + "\n", encoding="utf-8"
    )
    labels, _ = split_mask(read_corpus(HERE / "corpus.jsonl"), read_partition(HERE / "partition.json"))
    write_labels(labels, HERE / "labels.json")


def _run(argv: list[str]) -> str:
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = cli_main(argv)
    if code != 0:
        raise SystemExit(f"fixture pipeline step failed ({code}): {argv}")
    return buf.getvalue()


def build_golden() -> None:
    GOLDEN.mkdir(exist_ok=True)
    corpus = str(HERE / "corpus.jsonl")
    emb = str(HERE / "embeddings.emb")
    labels = str(HERE / "labels.json")
    partition = str(HERE / "partition.json")
    graph = str(GOLDEN / "graph.sgraph")

    _run(["build-graph", emb, "-o", graph])

    _run(
        [
            "diffuse", "--alpha", "0.5", "--closed-form", graph, labels,
            "-o", str(GOLDEN / "diffusion_preds.jsonl"),
        ]
    )
    text = _run(
        [
            "evaluate", str(GOLDEN / "diffusion_preds.jsonl"),
            "--corpus", corpus, "--partition", partition,
            "--model-name", "diffusion",
            "--json", str(GOLDEN / "diffusion_report.json"),
        ]
    )
    (GOLDEN / "diffusion_report.txt").write_text(text, encoding="utf-8")

    _run(
        [
            "gcn-train", graph, emb, labels, str(GOLDEN / "gcn.gcn1"),
            "--hidden", "32", "--epochs", "200", "--seed", "42",
            "--loss-history", str(GOLDEN / "gcn_loss.csv"),
        ]
    )
    _run(
        [
            "gcn-predict", graph, emb, str(GOLDEN / "gcn.gcn1"), labels,
            "-o", str(GOLDEN / "gcn_preds.jsonl"),
        ]
    )
    text = _run(
        [
            "evaluate", str(GOLDEN / "gcn_preds.jsonl"),
            "--corpus", corpus, "--partition", partition,
            "--model-name", "gcn",
            "--json", str(GOLDEN / "gcn_report.json"),
        ]
    )
    (GOLDEN / "gcn_report.txt").write_text(text, encoding="utf-8")

    table = _run(["evaluate", str(GOLDEN / "diffusion_preds.jsonl"),
                  "--corpus", corpus, "--partition", partition,
                  "--model-name", "diffusion"])
    if "accuracy" not in table:
        raise SystemExit("evaluate produced no accuracy line")


if __name__ == "__main__":
    build_inputs()
    build_golden()
    sys.stdout.write(f"fixture + golden files regenerated under {HERE}\n")
