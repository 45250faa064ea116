"""Shared test helpers: fixture paths and the acceptance summary lines."""
from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

REPO = Path(__file__).resolve().parent.parent
FIXTURES = REPO / "fixtures"
GOLDEN = FIXTURES / "golden"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def golden_dir() -> Path:
    return GOLDEN


def random_embeddings(rng: np.random.Generator, n: int, d: int) -> np.ndarray:
    """Random float32 rows with no zero vectors."""
    x = rng.normal(size=(n, d)).astype(np.float32)
    # regenerate any row that landed at (or numerically near) zero
    for i in range(n):
        while not np.linalg.norm(x[i]) > 1e-3:
            x[i] = rng.normal(size=d).astype(np.float32)
    return x


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print one PASS/FAIL line per acceptance criterion after the run."""
    seen: dict[str, str] = {}
    for status, marker in (("passed", "PASS"), ("failed", "FAIL"), ("error", "FAIL")):
        for rep in terminalreporter.stats.get(status, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance" not in nodeid:
                continue
            name = nodeid.split("::")[-1].replace("test_", "", 1)
            # keep the worst outcome if a test reports more than once
            if seen.get(name) != "FAIL":
                seen[name] = marker
    if seen:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name in sorted(seen):
            terminalreporter.write_line(f"ACCEPTANCE {seen[name]}: {name}")
