"""Request/response schemas for the HTTP service.

Graphs travel as explicit edge lists, embeddings as nested float lists,
and labels as index -> name objects — the JSON twins of the package's
file formats. Checkpoints cross the wire base64-encoded.
"""
from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field


class Edge(BaseModel):
    source: int
    target: int
    weight: float


class Graph(BaseModel):
    n: int = Field(ge=1)
    threshold: float = 0.5
    edges: list[Edge] = Field(default_factory=list)


class BuildGraphRequest(BaseModel):
    embeddings: list[list[float]]
    threshold: float = 0.5


class BuildGraphResponse(Graph):
    num_edges: int


class DiffusionRequest(BaseModel):
    graph: Graph
    labels: dict[int, str]
    alpha: float = 0.5
    tol: float = 1e-8
    max_iters: int = 1000
    closed_form: bool = False


class PredictionOut(BaseModel):
    index: int
    label: str
    scores: list[float]
    undecided: bool = False


class DiffusionResponse(BaseModel):
    predictions: list[PredictionOut]
    iterations_run: int
    converged: bool
    undecided: list[int]


class GcnTrainRequest(BaseModel):
    graph: Graph
    embeddings: list[list[float]]
    labels: dict[int, str]
    hidden: int = 64
    lr: float = 1e-2
    epochs: int = 200
    seed: int = 0


class GcnTrainResponse(BaseModel):
    checkpoint_b64: str
    loss_history: list[float]


class GcnPredictRequest(BaseModel):
    graph: Graph
    embeddings: list[list[float]]
    checkpoint_b64: str
    indices: Optional[list[int]] = None


class PredictionsResponse(BaseModel):
    predictions: list[PredictionOut]


class Sentence(BaseModel):
    doc_id: str
    sent_index: int
    text: str
    label: Optional[str] = None


class WindowRequest(BaseModel):
    sentences: list[Sentence]
    pad_token: str = "<pad>"
    separator: str = " </s> "
    clean: bool = True
    stopwords: Optional[list[str]] = None


class WindowOut(BaseModel):
    doc_id: str
    sent_index: int
    input: str


class WindowResponse(BaseModel):
    windows: list[WindowOut]


class EvaluateRequest(BaseModel):
    predictions: dict[int, str]
    gold: dict[int, str]
    name: str = "model"


class ClassMetricsOut(BaseModel):
    precision: float
    recall: float
    f1: float
    support: int


class EvaluateResponse(BaseModel):
    model: str
    n_eval: int
    accuracy: float
    macro_f1: float
    per_class: dict[str, ClassMetricsOut]
    confusion: list[list[int]]


class HealthResponse(BaseModel):
    status: str
    version: str
