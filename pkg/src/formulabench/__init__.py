"""Toolkit for building and evaluating math formula retrieval test collections.

Covers LaTeX formula parsing into layout and operator trees, visual-identity
clustering, judgment pooling, relevance aggregation, run scoring under
instance-based and visually-distinct conventions, cross-stratum ranking
comparison, a baseline structural retriever, a CLI, and an HTTP assessment
service.
"""

from .clustering import ClusterIndex, VisualCluster, cluster_corpus, visual_id_of
from .collection import (
    FormulaInstance,
    RankedRun,
    RunEntry,
    Topic,
    read_corpus,
    read_qrels,
    read_run,
    read_topics,
    write_qrels,
    write_run,
)
from .errors import FormulaBenchError
from .judgments import (
    SCALES,
    GradeScale,
    JudgmentSet,
    QrelRecord,
    aggregate_max_visual,
    aggregate_sum_ntcir,
    binarize,
    cohen_kappa,
    get_scale,
)
from .latex import (
    CanonicalKey,
    OperatorTree,
    SymbolLayoutTree,
    canonical_key,
    normalize_tokens,
    parse_slt,
    serialize_opt,
    serialize_slt,
    slt_to_opt,
    tokenize_latex,
)
from .meta import (
    count_swaps,
    kendall_tau_b,
    mean_gap,
    rank_systems,
    stratify_by_complexity,
)
from .metrics import (
    EvalResult,
    average_precision,
    dedup_visual,
    evaluate_run,
    ndcg,
    precision_at_k,
    prime_filter,
    reciprocal_rank,
)
from .pooling import (
    Pool,
    PoolItem,
    pool_round_robin_min_unique,
    pool_top_k,
    pool_visually_distinct,
    select_instances,
)
from .retriever import BaselineRetriever, score_dice, slt_features, wildcard_match

__version__ = "0.1.0"

__all__ = [
    "FormulaBenchError",
    "CanonicalKey",
    "SymbolLayoutTree",
    "OperatorTree",
    "tokenize_latex",
    "normalize_tokens",
    "parse_slt",
    "serialize_slt",
    "slt_to_opt",
    "serialize_opt",
    "canonical_key",
    "FormulaInstance",
    "Topic",
    "RunEntry",
    "RankedRun",
    "read_corpus",
    "read_topics",
    "read_run",
    "write_run",
    "read_qrels",
    "write_qrels",
    "VisualCluster",
    "ClusterIndex",
    "cluster_corpus",
    "visual_id_of",
    "GradeScale",
    "SCALES",
    "get_scale",
    "QrelRecord",
    "JudgmentSet",
    "aggregate_sum_ntcir",
    "aggregate_max_visual",
    "binarize",
    "cohen_kappa",
    "Pool",
    "PoolItem",
    "pool_round_robin_min_unique",
    "pool_top_k",
    "pool_visually_distinct",
    "select_instances",
    "EvalResult",
    "dedup_visual",
    "prime_filter",
    "precision_at_k",
    "average_precision",
    "reciprocal_rank",
    "ndcg",
    "evaluate_run",
    "stratify_by_complexity",
    "kendall_tau_b",
    "mean_gap",
    "count_swaps",
    "rank_systems",
    "BaselineRetriever",
    "slt_features",
    "score_dice",
    "wildcard_match",
]
