"""FastAPI application: thin JSON adapters over the core modules.

Configuration problems (bad hyperparameters, invalid modes) map to HTTP
400; malformed or inconsistent payloads map to 422. All handlers are pure
functions of their request bodies — the service keeps no state between
calls.
"""
from __future__ import annotations

import base64

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..corpus import RoleLabel, SentenceRecord, labels_from_mapping
from ..diffusion import DiffusionConfig, diffuse_closed_form, diffuse_iterative
from ..embeddings import EmbeddingMatrix
from ..errors import ConfigError, DataError, DimensionError
from ..evaluation import evaluate, report_to_dict
from ..gcn import GcnModel, TrainConfig, forward, model_from_bytes, model_to_bytes, train
from ..graph import DIFFUSION, GCN, SentenceGraph, build_graph, normalize
from ..predictions import Prediction, from_diffusion, from_scores
from ..windows import StopwordList, windowize_corpus
from . import models as m


def _embeddings_in(rows: list[list[float]]) -> EmbeddingMatrix:
    if not rows:
        raise DimensionError("embeddings must have at least one row")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise DimensionError(f"embedding rows have mixed widths {sorted(widths)}")
    return EmbeddingMatrix(data=np.asarray(rows, dtype=np.float32))


def _graph_in(g: m.Graph) -> SentenceGraph:
    return SentenceGraph(
        n=g.n,
        threshold=g.threshold,
        sources=np.array([e.source for e in g.edges], dtype=np.int64),
        targets=np.array([e.target for e in g.edges], dtype=np.int64),
        weights=np.array([e.weight for e in g.edges], dtype=np.float64),
    )


def _graph_out(g: SentenceGraph) -> dict:
    return {
        "n": g.n,
        "threshold": g.threshold,
        "edges": [
            {"source": int(i), "target": int(j), "weight": float(w)}
            for i, j, w in zip(g.sources, g.targets, g.weights)
        ],
        "num_edges": g.num_edges,
    }


def _predictions_out(preds: list[Prediction]) -> list[dict]:
    return [
        {
            "index": p.index,
            "label": p.label.name,
            "scores": list(p.scores),
            "undecided": p.undecided,
        }
        for p in preds
    ]


def _checkpoint_in(encoded: str) -> GcnModel:
    try:
        raw = base64.b64decode(encoded, validate=True)
    except (ValueError, TypeError):
        raise DataError("checkpoint_b64 is not valid base64") from None
    return model_from_bytes(raw)


def create_app() -> FastAPI:
    app = FastAPI(title="rolegraph", version=__version__)

    @app.exception_handler(ConfigError)
    async def _config_error(request: Request, exc: ConfigError) -> JSONResponse:
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(DataError)
    async def _data_error(request: Request, exc: DataError) -> JSONResponse:
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.get("/health", response_model=m.HealthResponse)
    async def health() -> m.HealthResponse:
        return m.HealthResponse(status="ok", version=__version__)

    @app.post("/graph/build", response_model=m.BuildGraphResponse)
    async def graph_build(req: m.BuildGraphRequest) -> m.BuildGraphResponse:
        graph = build_graph(_embeddings_in(req.embeddings), threshold=req.threshold)
        return m.BuildGraphResponse(**_graph_out(graph))

    @app.post("/diffusion/run", response_model=m.DiffusionResponse)
    async def diffusion_run(req: m.DiffusionRequest) -> m.DiffusionResponse:
        cfg = DiffusionConfig(alpha=req.alpha, max_iters=req.max_iters, tol=req.tol)
        graph = _graph_in(req.graph)
        labels = labels_from_mapping(req.labels, graph.n)
        norm = normalize(graph, DIFFUSION)
        runner = diffuse_closed_form if req.closed_form else diffuse_iterative
        result = runner(norm, labels.onehot(), cfg)
        preds = from_diffusion(result, labels.masked_indices())
        return m.DiffusionResponse(
            predictions=_predictions_out(preds),
            iterations_run=result.iterations_run,
            converged=result.converged,
            undecided=list(result.undecided),
        )

    @app.post("/gcn/train", response_model=m.GcnTrainResponse)
    async def gcn_train(req: m.GcnTrainRequest) -> m.GcnTrainResponse:
        emb = _embeddings_in(req.embeddings)
        graph = _graph_in(req.graph)
        labels = labels_from_mapping(req.labels, graph.n)
        cfg = TrainConfig(learning_rate=req.lr, epochs=req.epochs)
        model = GcnModel.init(d=emb.dims, h=req.hidden, seed=req.seed)
        trained, history = train(
            model, normalize(graph, GCN), emb, labels.onehot(), labels.mask, cfg
        )
        return m.GcnTrainResponse(
            checkpoint_b64=base64.b64encode(model_to_bytes(trained)).decode("ascii"),
            loss_history=history,
        )

    @app.post("/gcn/predict", response_model=m.PredictionsResponse)
    async def gcn_predict(req: m.GcnPredictRequest) -> m.PredictionsResponse:
        graph = _graph_in(req.graph)
        model = _checkpoint_in(req.checkpoint_b64)
        scores = forward(model, normalize(graph, GCN), _embeddings_in(req.embeddings))
        indices = req.indices if req.indices is not None else list(range(graph.n))
        for i in indices:
            if not 0 <= i < graph.n:
                raise DataError(f"prediction index {i} outside 0..{graph.n - 1}")
        preds = from_scores(scores, indices)
        return m.PredictionsResponse(predictions=_predictions_out(preds))

    @app.post("/windows/render", response_model=m.WindowResponse)
    async def windows_render(req: m.WindowRequest) -> m.WindowResponse:
        records = [
            SentenceRecord(doc_id=s.doc_id, sent_index=s.sent_index, text=s.text)
            for s in req.sentences
        ]
        stopwords = (
            StopwordList.from_words(req.stopwords) if req.stopwords is not None else None
        )
        windows = [
            m.WindowOut(
                doc_id=w.doc_id, sent_index=w.sent_index, input=w.render(req.separator)
            )
            for w in windowize_corpus(
                records, stopwords=stopwords, pad_token=req.pad_token, clean=req.clean
            )
        ]
        return m.WindowResponse(windows=windows)

    @app.post("/evaluate", response_model=m.EvaluateResponse)
    async def evaluate_run(req: m.EvaluateRequest) -> m.EvaluateResponse:
        gold = {i: RoleLabel.parse(v) for i, v in req.gold.items()}
        preds = {i: RoleLabel.parse(v) for i, v in req.predictions.items()}
        report = evaluate(gold, preds, req.name)
        return m.EvaluateResponse(**report_to_dict(report))

    return app


app = create_app()
