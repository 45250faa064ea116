"""Thresholded cosine-similarity graphs over sentence embeddings.

An edge joins two sentences exactly when the cosine similarity of their
embedding vectors is strictly above the threshold, and the similarity is the
edge weight. The graph stores each unordered pair once (source < target), so
the adjacency is symmetric by construction and carries no self-edges.

Two symmetric normalizations are provided: ``diffusion`` rescales the
adjacency by inverse square-root degrees, and ``gcn`` does the same after
adding unit self-loops so every diagonal entry stays strictly positive.

Text file format (SGRAPH1): a header line ``#SGRAPH1 n=<n> threshold=<t>``
followed by one edge per line, ``i<TAB>j<TAB>weight`` with ``i < j`` and the
weight printed as the shortest decimal that round-trips the 64-bit value.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .embeddings import EmbeddingMatrix
from .errors import (
    ConfigError,
    DimensionError,
    FormatError,
    ZeroVectorError,
)

DEFAULT_THRESHOLD = 0.5

DIFFUSION = "diffusion"
GCN = "gcn"

# Row-block size for the pairwise similarity pass; fixed so the arithmetic
# path never depends on input size.
_BLOCK = 512


def cosine(x, y) -> float:
    """Cosine similarity of two vectors, accumulated in 64-bit precision.

    The result is clamped to [-1, 1] to absorb rounding.
    """
    xv = np.asarray(x, dtype=np.float64)
    yv = np.asarray(y, dtype=np.float64)
    if xv.ndim != 1 or yv.ndim != 1:
        raise DimensionError("cosine expects 1-d vectors")
    if xv.shape[0] != yv.shape[0]:
        raise DimensionError(
            f"vector lengths differ: {xv.shape[0]} vs {yv.shape[0]}"
        )
    if xv.shape[0] < 1:
        raise DimensionError("cosine expects vectors of length >= 1")
    nx = float(np.dot(xv, xv)) ** 0.5
    ny = float(np.dot(yv, yv)) ** 0.5
    if nx == 0.0 or ny == 0.0:
        raise ZeroVectorError("cosine similarity undefined for a zero vector")
    value = float(np.dot(xv, yv)) / (nx * ny)
    return min(1.0, max(-1.0, value))


def _node_sums(
    n: int, src: np.ndarray, tgt: np.ndarray, w: np.ndarray
) -> np.ndarray:
    """Weighted degree per node, summed in value-sorted order.

    Sorting each node's incident weights before the reduction makes the
    degree a function of the weight multiset alone, so relabeling the nodes
    reproduces every degree bit-exactly.
    """
    degrees = np.zeros(n, dtype=np.float64)
    if not src.size:
        return degrees
    nodes = np.concatenate([src, tgt])
    wts = np.concatenate([w, w])
    order = np.lexsort((wts, nodes))
    nodes, wts = nodes[order], wts[order]
    starts = np.concatenate([[0], np.nonzero(np.diff(nodes))[0] + 1])
    degrees[nodes[starts]] = np.add.reduceat(wts, starts)
    return degrees


@dataclass(frozen=True)
class SentenceGraph:
    """Weighted undirected sentence graph with upper-triangle edge storage.

    ``sources[e] < targets[e]`` for every edge e; weights are 64-bit reals in
    (threshold, 1]. ``degrees[i]`` is the weighted degree of node i, summed
    in value-sorted order so it does not depend on how nodes are numbered.
    """

    n: int
    threshold: float
    sources: np.ndarray
    targets: np.ndarray
    weights: np.ndarray
    degrees: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise DimensionError(f"graph needs at least one node, got n={self.n}")
        if not 0.0 <= self.threshold < 1.0:
            raise ConfigError(f"threshold must be in [0, 1), got {self.threshold}")
        src = np.asarray(self.sources, dtype=np.int64)
        tgt = np.asarray(self.targets, dtype=np.int64)
        w = np.asarray(self.weights, dtype=np.float64)
        if not (src.shape == tgt.shape == w.shape) or src.ndim != 1:
            raise DimensionError("edge arrays must be 1-d and of equal length")
        if src.size:
            if np.any(src < 0) or np.any(tgt >= self.n):
                raise FormatError("edge endpoint outside 0..n-1")
            if np.any(src >= tgt):
                raise FormatError("edges must satisfy source < target")
            if np.any(w <= self.threshold) or np.any(w > 1.0):
                raise FormatError(
                    f"edge weights must lie in ({self.threshold}, 1]"
                )
            order = np.lexsort((tgt, src))
            src, tgt, w = src[order], tgt[order], w[order]
            pair_ids = src * self.n + tgt
            if np.any(np.diff(pair_ids) == 0):
                raise FormatError("duplicate edge")
        degrees = _node_sums(self.n, src, tgt, w)
        object.__setattr__(self, "sources", src)
        object.__setattr__(self, "targets", tgt)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "degrees", degrees)

    @property
    def num_edges(self) -> int:
        return int(self.sources.shape[0])

    def adjacency(self) -> sp.csr_matrix:
        """Full symmetric adjacency as a sparse CSR matrix."""
        rows = np.concatenate([self.sources, self.targets])
        cols = np.concatenate([self.targets, self.sources])
        data = np.concatenate([self.weights, self.weights])
        return sp.csr_matrix((data, (rows, cols)), shape=(self.n, self.n))


def build_graph(
    m: EmbeddingMatrix, threshold: float = DEFAULT_THRESHOLD
) -> SentenceGraph:
    """Build the thresholded cosine-similarity graph over all row pairs.

    An edge (i, j) with weight cos(x_i, x_j) exists iff the cosine is
    strictly greater than the threshold. Norms are computed once per row and
    all accumulation happens in 64-bit precision, so the result is
    deterministic and exactly symmetric.
    """
    if not 0.0 <= threshold < 1.0:
        raise ConfigError(f"threshold must be in [0, 1), got {threshold}")
    x = m.data.astype(np.float64)
    norms = np.sqrt(np.einsum("ij,ij->i", x, x))
    zero = np.nonzero(norms == 0.0)[0]
    if zero.size:
        raise ZeroVectorError(f"embedding row {int(zero[0])} has zero norm")

    n = m.rows
    src_parts: list[np.ndarray] = []
    tgt_parts: list[np.ndarray] = []
    w_parts: list[np.ndarray] = []
    for start in range(0, n, _BLOCK):
        stop = min(start + _BLOCK, n)
        sim = x[start:stop] @ x.T
        sim /= np.outer(norms[start:stop], norms)
        np.clip(sim, -1.0, 1.0, out=sim)
        rows, cols = np.nonzero(sim > threshold)
        keep = rows + start < cols
        src_parts.append(rows[keep] + start)
        tgt_parts.append(cols[keep])
        w_parts.append(sim[rows[keep], cols[keep]])

    sources = np.concatenate(src_parts) if src_parts else np.zeros(0, dtype=np.int64)
    targets = np.concatenate(tgt_parts) if tgt_parts else np.zeros(0, dtype=np.int64)
    weights = np.concatenate(w_parts) if w_parts else np.zeros(0, dtype=np.float64)
    return SentenceGraph(
        n=n, threshold=threshold, sources=sources, targets=targets, weights=weights
    )


@dataclass(frozen=True)
class NormalizedGraph:
    """Symmetrically normalized adjacency, ready for diffusion or convolution.

    In ``diffusion`` mode the matrix is D^{-1/2} A D^{-1/2}; rows and columns
    of isolated nodes are all zero and those nodes are listed in
    ``isolated``. In ``gcn`` mode unit self-loops are added first, so no
    division by zero occurs and every diagonal entry is strictly positive.
    """

    n: int
    mode: str
    matrix: sp.csr_matrix
    isolated: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.mode not in (DIFFUSION, GCN):
            raise ConfigError(f"unknown normalization mode {self.mode!r}")
        if self.matrix.shape != (self.n, self.n):
            raise DimensionError("normalized matrix shape does not match n")


def normalize(g: SentenceGraph, mode: str) -> NormalizedGraph:
    """Symmetrically normalize the adjacency for the given mode.

    Each off-diagonal entry is computed once per unordered pair and mirrored,
    so the result is exactly symmetric. Isolated nodes are a reported
    condition, never an error.
    """
    if mode not in (DIFFUSION, GCN):
        raise ConfigError(f"unknown normalization mode {mode!r}")
    isolated = tuple(int(i) for i in np.nonzero(g.degrees == 0.0)[0])
    if mode == DIFFUSION:
        scale = np.zeros(g.n, dtype=np.float64)
        connected = g.degrees > 0.0
        scale[connected] = 1.0 / np.sqrt(g.degrees[connected])
        # grouping: the two scale factors multiply first (commutative), so
        # the entry is identical however the pair's endpoints are labeled
        off = g.weights * (scale[g.sources] * scale[g.targets])
        rows = np.concatenate([g.sources, g.targets])
        cols = np.concatenate([g.targets, g.sources])
        data = np.concatenate([off, off])
    else:
        scale = 1.0 / np.sqrt(g.degrees + 1.0)
        off = g.weights * (scale[g.sources] * scale[g.targets])
        diag = scale * scale
        loop = np.arange(g.n, dtype=np.int64)
        rows = np.concatenate([g.sources, g.targets, loop])
        cols = np.concatenate([g.targets, g.sources, loop])
        data = np.concatenate([off, off, diag])
    matrix = sp.csr_matrix((data, (rows, cols)), shape=(g.n, g.n))
    return NormalizedGraph(n=g.n, mode=mode, matrix=matrix, isolated=isolated)


def _shortest_decimal(value: float) -> str:
    """Shortest decimal string that parses back to the same 64-bit value."""
    s = repr(float(value))
    return s[:-2] if s.endswith(".0") else s


_HEADER_RE = re.compile(r"^#SGRAPH1 n=(\d+) threshold=(\S+)$")


def write_graph(g: SentenceGraph, path) -> None:
    """Write a graph in the SGRAPH1 text format."""
    Path(path).write_text(render_graph(g), encoding="utf-8")


def render_graph(g: SentenceGraph) -> str:
    """SGRAPH1 text for a graph, edges in canonical (source, target) order."""
    lines = [f"#SGRAPH1 n={g.n} threshold={_shortest_decimal(g.threshold)}\n"]
    for i, j, w in zip(g.sources, g.targets, g.weights):
        lines.append(f"{i}\t{j}\t{_shortest_decimal(w)}\n")
    return "".join(lines)


def read_graph(path) -> SentenceGraph:
    """Read an SGRAPH1 file; round-trips written graphs value-identically."""
    return parse_graph(Path(path).read_text(encoding="utf-8"))


def parse_graph(text: str) -> SentenceGraph:
    lines = text.splitlines()
    if not lines:
        raise FormatError("empty graph file")
    header = _HEADER_RE.match(lines[0])
    if header is None:
        raise FormatError(f"bad header line {lines[0]!r}")
    n = int(header.group(1))
    try:
        threshold = float(header.group(2))
    except ValueError:
        raise FormatError(f"bad threshold {header.group(2)!r}") from None
    sources: list[int] = []
    targets: list[int] = []
    weights: list[float] = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise FormatError(f"line {lineno}: expected i<TAB>j<TAB>weight")
        try:
            i, j, w = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise FormatError(f"line {lineno}: malformed edge fields") from None
        if i >= j:
            raise FormatError(f"line {lineno}: edges require source < target")
        if i < 0 or j >= n:
            raise FormatError(f"line {lineno}: endpoint outside 0..{n - 1}")
        if w <= threshold or w > 1.0:
            raise FormatError(
                f"line {lineno}: weight {parts[2]} outside ({threshold}, 1]"
            )
        sources.append(i)
        targets.append(j)
        weights.append(w)
    return SentenceGraph(
        n=n,
        threshold=threshold,
        sources=np.asarray(sources, dtype=np.int64),
        targets=np.asarray(targets, dtype=np.int64),
        weights=np.asarray(weights, dtype=np.float64),
    )
