"""The acceptance gate: one test per required behavior of the pipeline.

Each test here re-derives its expected values through an independent route
(brute force, hand algebra, finite differences, or checked-in golden files)
rather than trusting the implementation under test. A summary hook in
conftest.py prints one PASS/FAIL line per criterion at the end of the run.
"""
from __future__ import annotations

import contextlib
import io
import math
import time
from pathlib import Path

import numpy as np
import pytest

from rolegraph.cli import main as cli_main
from rolegraph.corpus import NUM_CLASSES, RoleLabel, labels_from_mapping
from rolegraph.diffusion import (
    DiffusionConfig,
    diffuse_closed_form,
    diffuse_iterative,
    fixed_point_residual,
)
from rolegraph.embeddings import EmbeddingMatrix, read_embeddings, write_embeddings
from rolegraph.gcn import GcnModel, TrainConfig, forward, loss_and_grads, predict, train
from rolegraph.graph import (
    DIFFUSION,
    GCN,
    SentenceGraph,
    build_graph,
    normalize,
    parse_graph,
    read_graph,
    render_graph,
    write_graph,
)
from rolegraph.windows import PAD, SEPARATOR, build_window, windowize_corpus
from rolegraph.corpus import SentenceRecord

from conftest import random_embeddings


# --------------------------------------------------------------------------
# similarity graph vs. an O(n^2) per-pair recomputation


def _oracle_edges(x: np.ndarray, threshold: float) -> dict[tuple[int, int], float]:
    """Brute-force pairwise cosine edges, computed one dot product at a time."""
    x64 = x.astype(np.float64)
    n = x64.shape[0]
    edges: dict[tuple[int, int], float] = {}
    for i in range(n):
        for j in range(i + 1, n):
            num = float(np.dot(x64[i], x64[j]))
            den = math.sqrt(float(np.dot(x64[i], x64[i]))) * math.sqrt(
                float(np.dot(x64[j], x64[j]))
            )
            value = min(1.0, max(-1.0, num / den))
            if value > threshold:
                edges[(i, j)] = value
    return edges


def test_graph_matches_brute_force_pairwise_oracle():
    rng = np.random.default_rng(2023)
    started = time.monotonic()
    for trial in range(50):
        n = 200 if trial == 0 else int(rng.integers(2, 151))
        d = 32 if trial == 0 else int(rng.integers(1, 33))
        threshold = float(rng.uniform(0.0, 0.7))
        x = random_embeddings(rng, n, d)
        graph = build_graph(EmbeddingMatrix(data=x), threshold=threshold)
        expected = _oracle_edges(x, threshold)
        got = {
            (int(i), int(j)): float(w)
            for i, j, w in zip(graph.sources, graph.targets, graph.weights)
        }
        assert set(got) == set(expected), f"edge sets differ on trial {trial}"
        for pair, weight in expected.items():
            assert abs(got[pair] - weight) <= 1e-12, f"weight off at {pair}"
    assert time.monotonic() - started < 10.0


# --------------------------------------------------------------------------
# label diffusion: the two solution routes agree and both satisfy the
# fixed-point equation they claim to solve


def _random_diffusion_instance(rng: np.random.Generator):
    n = int(rng.integers(4, 101))
    d = int(rng.integers(3, 9))
    x = random_embeddings(rng, n, d)
    graph = build_graph(EmbeddingMatrix(data=x), threshold=0.3)
    norm = normalize(graph, DIFFUSION)
    y = np.zeros((n, NUM_CLASSES))
    labeled = rng.choice(n, size=max(1, n // 4), replace=False)
    for i in labeled:
        y[int(i), int(rng.integers(NUM_CLASSES))] = 1.0
    return norm, y


def test_diffusion_closed_form_and_iterative_agree():
    rng = np.random.default_rng(77)
    cfg = DiffusionConfig(alpha=0.5)
    started = time.monotonic()
    for _ in range(20):
        norm, y = _random_diffusion_instance(rng)
        direct = diffuse_closed_form(norm, y, cfg)
        iterated = diffuse_iterative(norm, y, cfg)
        assert iterated.converged
        gap = float(np.max(np.abs(direct.scores - iterated.scores)))
        assert gap <= 1e-6
        assert fixed_point_residual(norm, y, iterated, cfg.alpha) <= 1e-7
        assert fixed_point_residual(norm, y, direct, cfg.alpha) <= 1e-7
    assert time.monotonic() - started < 10.0


def test_diffusion_two_node_hand_computed_scores():
    # Two nodes, one edge, node 0 labeled with class 0, alpha = 1/2.
    # P = [[0,1],[1,0]], so solving (I - P/2) F = Y/2 by hand:
    #   F0 = (1/2) * (4/3) * 1 = 2/3,  F1 = (1/2) * (2/3) * 1 = 1/3.
    g = SentenceGraph(
        n=2,
        threshold=0.5,
        sources=np.array([0]),
        targets=np.array([1]),
        weights=np.array([1.0]),
    )
    norm = normalize(g, DIFFUSION)
    y = np.zeros((2, NUM_CLASSES))
    y[0, 0] = 1.0
    direct = diffuse_closed_form(norm, y, DiffusionConfig(alpha=0.5))
    # the iterative route approaches the same fixed point; a tolerance well
    # below 1e-9 keeps its geometric tail out of the comparison
    iterated = diffuse_iterative(norm, y, DiffusionConfig(alpha=0.5, tol=1e-12))
    assert iterated.converged
    for result in (direct, iterated):
        assert abs(result.scores[0, 0] - 2.0 / 3.0) <= 1e-9
        assert abs(result.scores[1, 0] - 1.0 / 3.0) <= 1e-9
        assert float(np.abs(result.scores[:, 1:]).max()) <= 1e-9


# --------------------------------------------------------------------------
# GCN gradients vs. central finite differences


def _gradcheck_instance(seed: int):
    """A tiny labeled graph whose hidden pre-activations stay clear of the
    ReLU kink, so finite differences cannot straddle it."""
    for attempt in range(1000):
        rng = np.random.default_rng(seed * 1000 + attempt)
        n = int(rng.integers(1, 9))
        d = int(rng.integers(2, 7))
        h = int(rng.integers(2, 6))
        x = random_embeddings(rng, n, d)
        graph = build_graph(EmbeddingMatrix(data=x), threshold=0.2)
        norm = normalize(graph, GCN)
        model = GcnModel.init(d=d, h=h, k=NUM_CLASSES, seed=seed * 1000 + attempt)
        a1 = norm.matrix @ (x.astype(np.float64) @ model.w0)
        if float(np.abs(a1).min()) <= 1e-2:
            continue  # too close to the kink: take the next deterministic draw
        y = np.zeros((n, NUM_CLASSES))
        mask = np.zeros(n, dtype=bool)
        for i in range(n):
            if n > 1 and rng.random() < 0.3:
                mask[i] = True
            else:
                y[i, int(rng.integers(NUM_CLASSES))] = 1.0
        if mask.all():
            mask[0] = False
            y[0, 0] = 1.0
        return model, norm, EmbeddingMatrix(data=x), y, mask
    raise AssertionError("could not find a kink-free instance")


def _numeric_grad(model, norm, x, y, mask, which: str, step: float) -> np.ndarray:
    base = getattr(model, which)
    grad = np.zeros_like(base)
    for idx in np.ndindex(base.shape):
        bumped = base.copy()
        bumped[idx] = base[idx] + step
        plus = loss_and_grads(model.__class__(**{**_weights(model), which: bumped}), norm, x, y, mask)[0]
        bumped[idx] = base[idx] - step
        minus = loss_and_grads(model.__class__(**{**_weights(model), which: bumped}), norm, x, y, mask)[0]
        grad[idx] = (plus - minus) / (2.0 * step)
    return grad


def _weights(model) -> dict:
    return {"w0": model.w0, "w1": model.w1, "seed": model.seed}


def _normwise_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    scale = max(float(np.abs(analytic).max()), float(np.abs(numeric).max()), 1e-300)
    return float(np.abs(analytic - numeric).max()) / scale


def test_gcn_gradients_match_central_differences():
    started = time.monotonic()
    worst = 0.0
    for seed in range(20):
        model, norm, x, y, mask = _gradcheck_instance(seed)
        _, g_w0, g_w1 = loss_and_grads(model, norm, x, y, mask)
        n_w0 = _numeric_grad(model, norm, x, y, mask, "w0", step=1e-4)
        n_w1 = _numeric_grad(model, norm, x, y, mask, "w1", step=1e-4)
        worst = max(worst, _normwise_error(g_w0, n_w0), _normwise_error(g_w1, n_w1))
    assert worst < 1e-4, f"worst norm-wise gradient error {worst:.3e}"
    assert time.monotonic() - started < 30.0


# --------------------------------------------------------------------------
# GCN forward-pass properties: stochastic rows, exact permutation
# equivariance, two-hop locality


def test_gcn_forward_row_stochastic_equivariant_local():
    rng = np.random.default_rng(101)

    # rows sum to one
    x = random_embeddings(rng, 30, 6)
    graph = build_graph(EmbeddingMatrix(data=x), threshold=0.2)
    norm = normalize(graph, GCN)
    model = GcnModel.init(d=6, h=5, k=NUM_CLASSES, seed=1)
    z = forward(model, norm, EmbeddingMatrix(data=x))
    assert float(np.abs(z.sum(axis=1) - 1.0).max()) <= 1e-9
    assert z.min() >= 0.0

    # permuting the nodes permutes the output rows bit-for-bit
    n = 20
    x = random_embeddings(rng, n, 5)
    graph = build_graph(EmbeddingMatrix(data=x), threshold=0.1)
    model = GcnModel.init(d=5, h=4, k=NUM_CLASSES, seed=2)
    perm = rng.permutation(n)
    inv = np.empty(n, dtype=np.int64)
    inv[perm] = np.arange(n)
    src, tgt = inv[graph.sources], inv[graph.targets]
    flip = src > tgt
    src[flip], tgt[flip] = tgt[flip], src[flip]
    permuted_graph = SentenceGraph(
        n=n,
        threshold=graph.threshold,
        sources=src,
        targets=tgt,
        weights=graph.weights.copy(),
    )
    z = forward(model, normalize(graph, GCN), EmbeddingMatrix(data=x))
    z_perm = forward(
        model, normalize(permuted_graph, GCN), EmbeddingMatrix(data=x[perm])
    )
    assert np.array_equal(z_perm, z[perm]), "permutation changed some output bits"

    # two layers see exactly two hops: on a 7-node path, perturbing the far
    # end must leave nodes more than two edges away bit-identical
    path = SentenceGraph(
        n=7,
        threshold=0.5,
        sources=np.arange(6),
        targets=np.arange(1, 7),
        weights=np.full(6, 0.9),
    )
    x = random_embeddings(rng, 7, 4)
    x_far = x.copy()
    x_far[6] += 1.0
    model = GcnModel.init(d=4, h=4, k=NUM_CLASSES, seed=3)
    norm = normalize(path, GCN)
    z_near = forward(model, norm, EmbeddingMatrix(data=x))
    z_far = forward(model, norm, EmbeddingMatrix(data=x_far))
    assert np.array_equal(z_near[:4], z_far[:4])
    assert not np.array_equal(z_near[4:], z_far[4:])


# --------------------------------------------------------------------------
# GCN learning on a separable two-community instance


def test_gcn_learns_two_clique_fixture():
    rng = np.random.default_rng(42)
    half, d = 10, 8
    centers = np.zeros((2, d))
    centers[0, 0] = 1.0
    centers[1, 1] = 1.0
    x = np.vstack(
        [
            centers[0] + 0.05 * rng.normal(size=(half, d)),
            centers[1] + 0.05 * rng.normal(size=(half, d)),
        ]
    ).astype(np.float32)
    graph = build_graph(EmbeddingMatrix(data=x), threshold=0.5)
    # sanity: the construction really is two components
    within = sum(
        1 for i, j in zip(graph.sources, graph.targets) if (i < half) == (j < half)
    )
    assert within == graph.num_edges > 0

    truth = np.array([int(RoleLabel.FAC)] * half + [int(RoleLabel.RPC)] * half)
    labeled = [0, 1, 2, half, half + 1, half + 2]
    labels = labels_from_mapping(
        {i: RoleLabel.from_code(truth[i]).name for i in labeled}, 2 * half
    )
    norm = normalize(graph, GCN)
    emb = EmbeddingMatrix(data=x)
    model = GcnModel.init(d=d, h=16, k=NUM_CLASSES, seed=42)
    trained, history = train(
        model, norm, emb, labels.onehot(), labels.mask, TrainConfig(epochs=200)
    )
    assert len(history) == 200 and history[-1] < history[0]

    z = forward(trained, norm, emb)
    guesses = np.argmax(z, axis=1)
    labeled_acc = float(np.mean(guesses[labeled] == truth[labeled]))
    masked = labels.masked_indices()
    masked_acc = float(np.mean(guesses[masked] == truth[masked]))
    assert labeled_acc == 1.0
    assert masked_acc >= 0.9
    # predict() agrees with the raw argmax route
    for idx, label in predict(trained, norm, emb, masked):
        assert int(label) == int(guesses[idx])


# --------------------------------------------------------------------------
# context windows


def test_context_windows_exact_and_count_preserving():
    cleaned = ["first sentence", "second sentence", "third sentence"]
    expected = {
        0: (PAD, PAD, "first sentence", "second sentence", "third sentence"),
        1: (PAD, "first sentence", "second sentence", "third sentence", PAD),
        2: ("first sentence", "second sentence", "third sentence", PAD, PAD),
    }
    for index, slots in expected.items():
        window = build_window("doc", cleaned, index)
        assert window.slots == slots
        rendered = window.render()
        assert rendered.count(SEPARATOR) == 4
        assert rendered == SEPARATOR.join(slots)
        assert rendered.count(PAD) == slots.count(PAD)

    rng = np.random.default_rng(55)
    vocabulary = ["the", "court", "held", "appeal", "that", "order", "was"]
    for _ in range(10):
        records = []
        for doc in range(int(rng.integers(1, 6))):
            for sent in range(int(rng.integers(1, 12))):
                words = rng.choice(vocabulary, size=int(rng.integers(1, 8)))
                records.append(
                    SentenceRecord(
                        doc_id=f"doc{doc}",
                        sent_index=sent,
                        text=" ".join(words),
                    )
                )
        windows = list(windowize_corpus(records))
        assert len(windows) == len(records)
        assert [(w.doc_id, w.sent_index) for w in windows] == [
            (r.doc_id, r.sent_index) for r in records
        ]


# --------------------------------------------------------------------------
# binary and text format round-trips


def test_emb1_and_sgraph1_roundtrips(tmp_path):
    rng = np.random.default_rng(300)
    for trial in range(100):
        n = int(rng.integers(1, 13))
        d = int(rng.integers(1, 9))
        x = random_embeddings(rng, n, d)
        path = tmp_path / f"emb_{trial}.emb"
        write_embeddings(EmbeddingMatrix(data=x), path)
        back = read_embeddings(path)
        assert np.array_equal(back.data, x)  # value-identical
        second = tmp_path / f"emb_{trial}_again.emb"
        write_embeddings(back, second)
        assert second.read_bytes() == path.read_bytes()  # byte-identical

    for trial in range(100):
        n = int(rng.integers(2, 25))
        d = int(rng.integers(2, 7))
        graph = build_graph(
            EmbeddingMatrix(data=random_embeddings(rng, n, d)),
            threshold=float(rng.uniform(0.0, 0.6)),
        )
        path = tmp_path / f"g_{trial}.sgraph"
        write_graph(graph, path)
        back = read_graph(path)
        assert back.n == graph.n and back.threshold == graph.threshold
        assert np.array_equal(back.sources, graph.sources)
        assert np.array_equal(back.targets, graph.targets)
        assert np.array_equal(back.weights, graph.weights)  # value-identical
        assert render_graph(back) == path.read_text(encoding="utf-8")
        assert parse_graph(render_graph(back)).num_edges == graph.num_edges


# --------------------------------------------------------------------------
# end-to-end golden pipelines through the CLI


def _run_cli(argv: list[str]) -> str:
    buffer = io.StringIO()
    with contextlib.redirect_stdout(buffer):
        code = cli_main(argv)
    assert code == 0, f"pipeline step failed ({code}): {argv}"
    return buffer.getvalue()


def test_end_to_end_pipelines_reproduce_golden_reports(
    fixtures_dir, golden_dir, tmp_path, capsys
):
    started = time.monotonic()
    corpus = str(fixtures_dir / "corpus.jsonl")
    emb = str(fixtures_dir / "embeddings.emb")
    labels = str(fixtures_dir / "labels.json")
    partition = str(fixtures_dir / "partition.json")
    graph = tmp_path / "graph.sgraph"

    _run_cli(["build-graph", emb, "-o", str(graph)])
    assert graph.read_bytes() == (golden_dir / "graph.sgraph").read_bytes()

    diffusion_preds = tmp_path / "diffusion_preds.jsonl"
    _run_cli(
        [
            "diffuse", "--alpha", "0.5", "--closed-form",
            str(graph), labels, "-o", str(diffusion_preds),
        ]
    )
    assert (
        diffusion_preds.read_bytes()
        == (golden_dir / "diffusion_preds.jsonl").read_bytes()
    )
    diffusion_json = tmp_path / "diffusion_report.json"
    report = _run_cli(
        [
            "evaluate", str(diffusion_preds),
            "--corpus", corpus, "--partition", partition,
            "--model-name", "diffusion", "--json", str(diffusion_json),
        ]
    )
    assert report == (golden_dir / "diffusion_report.txt").read_text(encoding="utf-8")
    assert (
        diffusion_json.read_bytes()
        == (golden_dir / "diffusion_report.json").read_bytes()
    )

    checkpoint = tmp_path / "gcn.gcn1"
    losses = tmp_path / "gcn_loss.csv"
    _run_cli(
        [
            "gcn-train", str(graph), emb, labels, str(checkpoint),
            "--hidden", "32", "--epochs", "200", "--seed", "42",
            "--loss-history", str(losses),
        ]
    )
    assert checkpoint.read_bytes() == (golden_dir / "gcn.gcn1").read_bytes()
    assert losses.read_bytes() == (golden_dir / "gcn_loss.csv").read_bytes()

    gcn_preds = tmp_path / "gcn_preds.jsonl"
    _run_cli(
        ["gcn-predict", str(graph), emb, str(checkpoint), labels, "-o", str(gcn_preds)]
    )
    assert gcn_preds.read_bytes() == (golden_dir / "gcn_preds.jsonl").read_bytes()

    gcn_json = tmp_path / "gcn_report.json"
    report = _run_cli(
        [
            "evaluate", str(gcn_preds),
            "--corpus", corpus, "--partition", partition,
            "--model-name", "gcn", "--json", str(gcn_json),
        ]
    )
    assert report == (golden_dir / "gcn_report.txt").read_text(encoding="utf-8")
    assert gcn_json.read_bytes() == (golden_dir / "gcn_report.json").read_bytes()

    assert time.monotonic() - started < 60.0
