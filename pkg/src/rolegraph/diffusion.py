"""Semi-supervised label diffusion over the normalized sentence graph.

Starting from the one-hot supervision matrix Y, the iterative update

    F <- alpha * P @ F + (1 - alpha) * Y

is a contraction for 0 < alpha < 1 (the spectral radius of P is at most 1),
so it converges to the unique fixed point F* = (1 - alpha) (I - alpha P)^-1 Y.
The closed form solves the corresponding linear system directly instead of
inverting the matrix.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.sparse import csgraph

from .corpus import RoleLabel
from .errors import ConfigError, DimensionError
from .graph import DIFFUSION, NormalizedGraph

# Largest n the closed form will factorize; beyond this, iterate.
DIRECT_SOLVE_LIMIT = 20000


@dataclass(frozen=True)
class DiffusionConfig:
    alpha: float = 0.5
    max_iters: int = 1000
    tol: float = 1e-8

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"alpha must be in (0, 1), got {self.alpha}")
        if self.max_iters < 1:
            raise ConfigError(f"max_iters must be >= 1, got {self.max_iters}")
        if not self.tol > 0.0:
            raise ConfigError(f"tol must be positive, got {self.tol}")


@dataclass(frozen=True)
class DiffusionResult:
    """Converged score matrix plus per-masked-node argmax predictions.

    ``undecided`` lists the nodes whose score row is entirely zero: masked
    nodes with no graph path to any labeled node. Predictions are defined
    only for masked nodes with a nonzero score row.
    """

    scores: np.ndarray
    iterations_run: int
    converged: bool
    undecided: tuple[int, ...]
    predictions: dict[int, int]


def _check_inputs(p: NormalizedGraph, y: np.ndarray) -> np.ndarray:
    if p.mode != DIFFUSION:
        raise ConfigError(
            f"diffusion requires a {DIFFUSION!r}-mode graph, got {p.mode!r}"
        )
    y = np.asarray(y, dtype=np.float64)
    if y.ndim != 2:
        raise DimensionError("supervision matrix must be 2-d")
    if y.shape[0] != p.n:
        raise DimensionError(f"supervision rows {y.shape[0]} != graph nodes {p.n}")
    return y


def _unreachable_mask(p: NormalizedGraph, y: np.ndarray) -> np.ndarray:
    """Masked nodes in components without any labeled node.

    Exactly these rows of the fixed point are all-zero, since every score is
    a nonnegative sum of label mass propagated along paths.
    """
    masked = ~y.any(axis=1)
    if not masked.any():
        return masked
    n_comp, comp = csgraph.connected_components(p.matrix, directed=False)
    has_label = np.zeros(n_comp, dtype=bool)
    has_label[comp[~masked]] = True
    return masked & ~has_label[comp]


def _finish(
    p: NormalizedGraph,
    y: np.ndarray,
    scores: np.ndarray,
    iterations: int,
    converged: bool,
) -> DiffusionResult:
    masked = ~y.any(axis=1)
    unreachable = _unreachable_mask(p, y)
    undecided = tuple(int(i) for i in np.nonzero(unreachable)[0])
    predictions = {
        int(i): int(np.argmax(scores[i]))
        for i in np.nonzero(masked & ~unreachable)[0]
    }
    return DiffusionResult(
        scores=scores,
        iterations_run=iterations,
        converged=converged,
        undecided=undecided,
        predictions=predictions,
    )


def diffuse_iterative(
    p: NormalizedGraph, y: np.ndarray, cfg: DiffusionConfig | None = None
) -> DiffusionResult:
    """Iterate the diffusion update from F = Y until the max-abs change per
    entry drops below ``cfg.tol`` or ``cfg.max_iters`` is reached."""
    cfg = cfg or DiffusionConfig()
    y = _check_inputs(p, y)
    mat = p.matrix
    scores = y.copy()
    for iteration in range(1, cfg.max_iters + 1):
        nxt = cfg.alpha * (mat @ scores) + (1.0 - cfg.alpha) * y
        delta = float(np.max(np.abs(nxt - scores))) if nxt.size else 0.0
        scores = nxt
        if delta < cfg.tol:
            return _finish(p, y, scores, iteration, True)
    return _finish(p, y, scores, cfg.max_iters, False)


def diffuse_closed_form(
    p: NormalizedGraph, y: np.ndarray, cfg: DiffusionConfig | None = None
) -> DiffusionResult:
    """Solve (I - alpha P) F = (1 - alpha) Y with a direct sparse LU solve."""
    cfg = cfg or DiffusionConfig()
    y = _check_inputs(p, y)
    if p.n > DIRECT_SOLVE_LIMIT:
        raise ConfigError(
            f"n={p.n} exceeds the direct-solve guard ({DIRECT_SOLVE_LIMIT}); "
            f"use diffuse_iterative instead"
        )
    system = (sp.identity(p.n, format="csc") - cfg.alpha * p.matrix).tocsc()
    rhs = (1.0 - cfg.alpha) * y
    scores = np.asarray(spla.splu(system).solve(rhs))
    if scores.ndim == 1:
        scores = scores[:, None]
    # Rows that decouple from all supervision are exactly zero at the fixed
    # point, and isolated rows equal their prior exactly; pin both so
    # factorization noise cannot leak into the all-zero-row contract.
    unreachable = _unreachable_mask(p, y)
    scores[unreachable] = 0.0
    if p.isolated:
        iso = list(p.isolated)
        scores[iso] = rhs[iso]
    return _finish(p, y, scores, 0, True)


def predict(
    result: DiffusionResult, masked_indices: Sequence[int]
) -> list[tuple[int, RoleLabel]]:
    """Argmax class per masked node; ties break to the lowest class code and
    undecided (all-zero) rows map to NONE."""
    undecided = set(result.undecided)
    out: list[tuple[int, RoleLabel]] = []
    for i in masked_indices:
        i = int(i)
        if i in undecided or not result.scores[i].any():
            out.append((i, RoleLabel.NONE))
        else:
            out.append((i, RoleLabel.from_code(int(np.argmax(result.scores[i])))))
    return out


def fixed_point_residual(
    p: NormalizedGraph, y: np.ndarray, result: DiffusionResult, alpha: float
) -> float:
    """Max-abs residual of the diffusion fixed-point equation at the result."""
    y = np.asarray(y, dtype=np.float64)
    recon = alpha * (p.matrix @ result.scores) + (1.0 - alpha) * y
    return float(np.max(np.abs(result.scores - recon))) if y.size else 0.0
