"""rolegraph: sentence-similarity graphs over legal documents, with label
diffusion and graph-convolutional classification of rhetorical roles."""

__version__ = "0.1.0"

from .corpus import (
    EVAL,
    NUM_CLASSES,
    TRAIN,
    LabelArray,
    RoleLabel,
    SentenceRecord,
    read_corpus,
    read_labels,
    read_partition,
    split_mask,
    write_corpus,
)
from .diffusion import (
    DiffusionConfig,
    DiffusionResult,
    diffuse_closed_form,
    diffuse_iterative,
)
from .embeddings import EmbeddingMatrix, read_embeddings, write_embeddings
from .errors import (
    ConfigError,
    CorpusError,
    DataError,
    DimensionError,
    FormatError,
    NonFiniteError,
    PartitionError,
    RoleGraphError,
    TaxonomyError,
    ZeroVectorError,
)
from .evaluation import EvalReport, evaluate, render_report, render_table
from .gcn import GcnModel, TrainConfig, forward, load_model, save_model, train
from .graph import (
    DEFAULT_THRESHOLD,
    DIFFUSION,
    GCN,
    NormalizedGraph,
    SentenceGraph,
    build_graph,
    cosine,
    normalize,
    read_graph,
    write_graph,
)
from .predictions import Prediction, read_jsonl, write_jsonl
from .windows import ContextWindow, StopwordList, build_window, strip_stopwords, windowize_corpus

__all__ = [
    "__version__",
    "EVAL",
    "NUM_CLASSES",
    "TRAIN",
    "LabelArray",
    "RoleLabel",
    "SentenceRecord",
    "read_corpus",
    "read_labels",
    "read_partition",
    "split_mask",
    "write_corpus",
    "DiffusionConfig",
    "DiffusionResult",
    "diffuse_closed_form",
    "diffuse_iterative",
    "EmbeddingMatrix",
    "read_embeddings",
    "write_embeddings",
    "ConfigError",
    "CorpusError",
    "DataError",
    "DimensionError",
    "FormatError",
    "NonFiniteError",
    "PartitionError",
    "RoleGraphError",
    "TaxonomyError",
    "ZeroVectorError",
    "EvalReport",
    "evaluate",
    "render_report",
    "render_table",
    "GcnModel",
    "TrainConfig",
    "forward",
    "load_model",
    "save_model",
    "train",
    "DEFAULT_THRESHOLD",
    "DIFFUSION",
    "GCN",
    "NormalizedGraph",
    "SentenceGraph",
    "build_graph",
    "cosine",
    "normalize",
    "read_graph",
    "write_graph",
    "Prediction",
    "read_jsonl",
    "write_jsonl",
    "ContextWindow",
    "StopwordList",
    "build_window",
    "strip_stopwords",
    "windowize_corpus",
]
