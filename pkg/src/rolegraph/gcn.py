"""Two-layer graph convolutional network with hand-derived gradients.

The forward pass is

    Z = softmax(A' @ relu(A' @ X @ W0) @ W1)

with A' the self-loop-augmented symmetric normalization. Softmax rows use
max subtraction for stability. Training is full-graph gradient descent with
adaptive moment estimates, and the loss is mean cross-entropy over the
visible (unmasked) nodes only.

Neighborhood mixing sums each row's contributions in value-sorted order, so
the per-entry accumulation is invariant under node permutation: permuting
the nodes of the inputs permutes the output rows bit-exactly.

Checkpoint format: 4 ASCII magic bytes ``GCN1``, then d, h, k as unsigned
32-bit little-endian integers, then W0 and W1 as IEEE-754 32-bit
little-endian floats, row-major.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .corpus import NUM_CLASSES, RoleLabel
from .embeddings import EmbeddingMatrix
from .errors import ConfigError, DataError, DimensionError, FormatError, NonFiniteError
from .graph import GCN, NormalizedGraph

MAGIC = b"GCN1"
_HEADER = struct.Struct("<4sIII")

DEFAULT_HIDDEN = 64


@dataclass(frozen=True)
class GcnModel:
    """Trainable weight matrices of the two convolution layers."""

    w0: np.ndarray
    w1: np.ndarray
    seed: Optional[int] = None

    def __post_init__(self) -> None:
        w0 = np.asarray(self.w0, dtype=np.float64)
        w1 = np.asarray(self.w1, dtype=np.float64)
        if w0.ndim != 2 or w1.ndim != 2:
            raise DimensionError("weight matrices must be 2-d")
        if w0.shape[1] != w1.shape[0]:
            raise DimensionError(
                f"layer widths disagree: w0 is {w0.shape}, w1 is {w1.shape}"
            )
        if not (np.all(np.isfinite(w0)) and np.all(np.isfinite(w1))):
            raise NonFiniteError("model weights contain NaN or infinity")
        object.__setattr__(self, "w0", w0)
        object.__setattr__(self, "w1", w1)

    @property
    def d(self) -> int:
        return int(self.w0.shape[0])

    @property
    def h(self) -> int:
        return int(self.w0.shape[1])

    @property
    def k(self) -> int:
        return int(self.w1.shape[1])

    @classmethod
    def init(
        cls, d: int, h: int = DEFAULT_HIDDEN, k: int = NUM_CLASSES, seed: int = 0
    ) -> "GcnModel":
        """Uniform init in +-sqrt(6 / (fan_in + fan_out)), per layer."""
        if d < 1 or h < 1 or k < 1:
            raise ConfigError(f"layer sizes must be positive, got d={d} h={h} k={k}")
        rng = np.random.default_rng(seed)
        lim0 = np.sqrt(6.0 / (d + h))
        lim1 = np.sqrt(6.0 / (h + k))
        w0 = rng.uniform(-lim0, lim0, size=(d, h))
        w1 = rng.uniform(-lim1, lim1, size=(h, k))
        return cls(w0=w0, w1=w1, seed=seed)


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-2
    epochs: int = 200
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self) -> None:
        if not self.learning_rate > 0.0:
            raise ConfigError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if not (0.0 <= self.beta1 < 1.0 and 0.0 <= self.beta2 < 1.0):
            raise ConfigError("moment decays must lie in [0, 1)")


def _mix(graph: NormalizedGraph, dense: np.ndarray) -> np.ndarray:
    """A' @ dense with per-row, value-sorted summation.

    Sorting the terms before the reduction makes each output entry a
    function of the multiset of contributions only, which is what makes the
    forward pass exactly permutation-equivariant.
    """
    mat = graph.matrix
    out = np.zeros((mat.shape[0], dense.shape[1]), dtype=np.float64)
    indptr, indices, data = mat.indptr, mat.indices, mat.data
    for i in range(mat.shape[0]):
        lo, hi = indptr[i], indptr[i + 1]
        if lo == hi:
            continue
        terms = data[lo:hi, None] * dense[indices[lo:hi]]
        terms.sort(axis=0)
        out[i] = terms.sum(axis=0)
    return out


def _project(rows: np.ndarray, weight: np.ndarray) -> np.ndarray:
    """rows @ weight computed row by row, so each output row depends only on
    its own input row's arithmetic."""
    out = np.empty((rows.shape[0], weight.shape[1]), dtype=np.float64)
    for i in range(rows.shape[0]):
        out[i] = rows[i] @ weight
    return out


def _require_finite(name: str, *arrays: np.ndarray) -> None:
    for arr in arrays:
        if not np.all(np.isfinite(arr)):
            raise NonFiniteError(f"non-finite values after {name}")


def _check_shapes(model: GcnModel, graph: NormalizedGraph, x: EmbeddingMatrix) -> None:
    if graph.mode != GCN:
        raise ConfigError(f"forward requires a {GCN!r}-mode graph, got {graph.mode!r}")
    if graph.n != x.rows:
        raise DimensionError(f"graph has {graph.n} nodes but features have {x.rows} rows")
    if x.dims != model.d:
        raise DimensionError(f"feature dim {x.dims} != model input dim {model.d}")


def _forward_cached(model: GcnModel, graph: NormalizedGraph, x64: np.ndarray) -> dict:
    s0 = _project(x64, model.w0)
    _require_finite("input projection", s0)
    a1 = _mix(graph, s0)
    _require_finite("first graph convolution", a1)
    hidden = np.maximum(a1, 0.0)
    s1 = _project(hidden, model.w1)
    _require_finite("hidden projection", s1)
    a2 = _mix(graph, s1)
    _require_finite("second graph convolution", a2)
    shift = a2 - a2.max(axis=1, keepdims=True)
    expo = np.exp(shift)
    total = expo.sum(axis=1, keepdims=True)
    z = expo / total
    log_z = shift - np.log(total)
    _require_finite("softmax", z, log_z)
    return {"a1": a1, "hidden": hidden, "z": z, "log_z": log_z}


def forward(model: GcnModel, graph: NormalizedGraph, x: EmbeddingMatrix) -> np.ndarray:
    """Row-stochastic prediction matrix Z; every row sums to 1."""
    _check_shapes(model, graph, x)
    return _forward_cached(model, graph, x.data.astype(np.float64))["z"]


def loss_and_grads(
    model: GcnModel,
    graph: NormalizedGraph,
    x: EmbeddingMatrix,
    y: np.ndarray,
    mask: np.ndarray,
) -> tuple[float, np.ndarray, np.ndarray]:
    """Mean cross-entropy over visible nodes and its analytic gradients.

    The backward pass goes through softmax-cross-entropy, the second graph
    convolution, the ReLU, and the first graph convolution; the adjacency is
    symmetric, so its transpose products reuse the same matrix.
    """
    _check_shapes(model, graph, x)
    y = np.asarray(y, dtype=np.float64)
    mask = np.asarray(mask, dtype=bool)
    if y.shape != (graph.n, model.k) or mask.shape != (graph.n,):
        raise DimensionError("supervision matrix or mask shape mismatch")
    visible = ~mask
    m = int(visible.sum())
    if m == 0:
        raise DataError("no visible nodes to compute the loss on")

    x64 = x.data.astype(np.float64)
    cache = _forward_cached(model, graph, x64)
    z, log_z = cache["z"], cache["log_z"]
    loss = -float((y[visible] * log_z[visible]).sum()) / m

    g_logits = np.zeros_like(z)
    g_logits[visible] = (z[visible] - y[visible]) / m
    g_s1 = graph.matrix @ g_logits
    g_w1 = cache["hidden"].T @ g_s1
    g_hidden = g_s1 @ model.w1.T
    g_a1 = g_hidden * (cache["a1"] > 0.0)
    g_s0 = graph.matrix @ g_a1
    g_w0 = x64.T @ g_s0
    return loss, g_w0, g_w1


def train(
    model: GcnModel,
    graph: NormalizedGraph,
    x: EmbeddingMatrix,
    y: np.ndarray,
    mask: np.ndarray,
    cfg: TrainConfig | None = None,
) -> tuple[GcnModel, list[float]]:
    """Full-graph training; returns the trained model and per-epoch losses.

    Deterministic given the initial model; aborts with a diagnostic naming
    the epoch if weights or intermediates stop being finite.
    """
    cfg = cfg or TrainConfig()
    w0 = model.w0.copy()
    w1 = model.w1.copy()
    mom = [np.zeros_like(w0), np.zeros_like(w1)]
    sec = [np.zeros_like(w0), np.zeros_like(w1)]
    history: list[float] = []
    for epoch in range(cfg.epochs):
        try:
            current = GcnModel(w0=w0, w1=w1, seed=model.seed)
            loss, g_w0, g_w1 = loss_and_grads(current, graph, x, y, mask)
        except NonFiniteError as exc:
            raise NonFiniteError(f"training aborted at epoch {epoch}: {exc}") from exc
        history.append(float(loss))
        t = epoch + 1
        for slot, (w, g) in enumerate(((w0, g_w0), (w1, g_w1))):
            mom[slot] = cfg.beta1 * mom[slot] + (1.0 - cfg.beta1) * g
            sec[slot] = cfg.beta2 * sec[slot] + (1.0 - cfg.beta2) * (g * g)
            m_hat = mom[slot] / (1.0 - cfg.beta1**t)
            v_hat = sec[slot] / (1.0 - cfg.beta2**t)
            w -= cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.eps)
        if not (np.all(np.isfinite(w0)) and np.all(np.isfinite(w1))):
            raise NonFiniteError(f"training aborted at epoch {epoch}: weights diverged")
    return GcnModel(w0=w0, w1=w1, seed=model.seed), history


def predict(
    model: GcnModel,
    graph: NormalizedGraph,
    x: EmbeddingMatrix,
    masked_indices: Sequence[int],
) -> list[tuple[int, RoleLabel]]:
    """Argmax of the forward rows at the masked indices; ties break low."""
    z = forward(model, graph, x)
    return [
        (int(i), RoleLabel.from_code(int(np.argmax(z[int(i)]))))
        for i in masked_indices
    ]


def model_to_bytes(model: GcnModel) -> bytes:
    """Serialize to the GCN1 checkpoint encoding."""
    header = _HEADER.pack(MAGIC, model.d, model.h, model.k)
    body = (
        model.w0.astype("<f4").tobytes(order="C")
        + model.w1.astype("<f4").tobytes(order="C")
    )
    return header + body


def save_model(model: GcnModel, path) -> None:
    """Write a GCN1 checkpoint."""
    Path(path).write_bytes(model_to_bytes(model))


def model_from_bytes(raw: bytes) -> GcnModel:
    """Parse a GCN1 checkpoint; weights come back at 32-bit precision."""
    if len(raw) < _HEADER.size:
        raise FormatError(
            f"truncated header: {len(raw)} bytes, need at least {_HEADER.size}"
        )
    magic, d, h, k = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
    expected = _HEADER.size + 4 * (d * h + h * k)
    if len(raw) != expected:
        raise FormatError(
            f"truncated payload: {len(raw)} bytes, header implies {expected}"
        )
    if d < 1 or h < 1 or k < 1:
        raise DimensionError(f"degenerate checkpoint dims d={d} h={h} k={k}")
    flat = np.frombuffer(raw, dtype="<f4", offset=_HEADER.size)
    w0 = flat[: d * h].reshape(d, h).astype(np.float64)
    w1 = flat[d * h :].reshape(h, k).astype(np.float64)
    if not (np.all(np.isfinite(w0)) and np.all(np.isfinite(w1))):
        raise NonFiniteError("checkpoint contains NaN or infinity")
    return GcnModel(w0=w0, w1=w1, seed=None)


def load_model(path) -> GcnModel:
    """Read a GCN1 checkpoint file."""
    return model_from_bytes(Path(path).read_bytes())


def render_loss_history(history: Sequence[float]) -> str:
    """Loss history as CSV with an ``epoch,loss`` header."""
    lines = ["epoch,loss\n"]
    for epoch, loss in enumerate(history):
        lines.append(f"{epoch},{loss!r}\n")
    return "".join(lines)


def write_loss_history(history: Sequence[float], path) -> None:
    Path(path).write_text(render_loss_history(history), encoding="utf-8")
