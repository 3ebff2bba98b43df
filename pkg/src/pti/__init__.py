"""Candidate generation for cross-lingual entity linking.

Builds sparse prior/posterior probability indexes over character n-gram
tokens of entity mentions, blending target-language and pivot-language
training counts, and retrieves top-K candidate entities per mention. Ships
a frequency-prior baseline and an evaluation harness with recall@K,
query-difficulty breakdowns and coverage ceilings.
"""

from .baselines import WikiPriorsIndex, build_wikipriors, wikipriors_generate
from .corpus import (
    Corpus,
    CorpusParseError,
    EvalSplit,
    LabeledQuery,
    MentionEntityPair,
    QueryType,
    build_eval_split,
    classify_query,
    generate_synthetic,
    load_corpus,
    load_queries,
    load_split,
    normalize_mention,
    save_corpus,
    save_queries,
    save_split,
)
from .estimators import PtiCandidateGenerator, WikiPriorsCandidateGenerator
from .evaluation import (
    EvalReport,
    RecallBreakdown,
    SweepResult,
    TypeRecall,
    ceiling_recall,
    evaluate,
    recall_at_k,
    recall_breakdown,
    sweep,
)
from .index import (
    DEFAULT_ALPHA_GRID,
    DEFAULT_LAMBDA_GRID,
    DEFAULT_TAU_GRID,
    CountTable,
    IndexChecksumError,
    IndexFormatError,
    IndexMeta,
    IndexParseError,
    IndexVersionError,
    PtiIndex,
    SmoothingMeta,
    apply_threshold,
    build_index,
    count_cooccurrences,
    deserialize_index,
    empty_count_table,
    fuse_indexes,
    merge_count_tables,
    serialize_index,
    smooth_pivot_probabilities,
)
from .scorer import (
    DEFAULT_K,
    CandidateList,
    ScoreMap,
    candidate_space,
    normalize_scores,
    score_entities,
    top_k,
)
from .tokenizer import TokenizerConfig, mention_tokens, tokenize, wildcard_expand

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # corpus
    "Corpus",
    "CorpusParseError",
    "EvalSplit",
    "LabeledQuery",
    "MentionEntityPair",
    "QueryType",
    "build_eval_split",
    "classify_query",
    "generate_synthetic",
    "load_corpus",
    "load_queries",
    "load_split",
    "normalize_mention",
    "save_corpus",
    "save_queries",
    "save_split",
    # tokenizer
    "TokenizerConfig",
    "tokenize",
    "wildcard_expand",
    "mention_tokens",
    # index
    "CountTable",
    "IndexMeta",
    "SmoothingMeta",
    "PtiIndex",
    "IndexFormatError",
    "IndexVersionError",
    "IndexChecksumError",
    "IndexParseError",
    "count_cooccurrences",
    "empty_count_table",
    "merge_count_tables",
    "build_index",
    "apply_threshold",
    "smooth_pivot_probabilities",
    "fuse_indexes",
    "serialize_index",
    "deserialize_index",
    "DEFAULT_ALPHA_GRID",
    "DEFAULT_LAMBDA_GRID",
    "DEFAULT_TAU_GRID",
    # scorer
    "ScoreMap",
    "CandidateList",
    "score_entities",
    "top_k",
    "normalize_scores",
    "candidate_space",
    "DEFAULT_K",
    # baselines
    "WikiPriorsIndex",
    "build_wikipriors",
    "wikipriors_generate",
    # estimators
    "PtiCandidateGenerator",
    "WikiPriorsCandidateGenerator",
    # evaluation
    "TypeRecall",
    "RecallBreakdown",
    "EvalReport",
    "SweepResult",
    "recall_at_k",
    "recall_breakdown",
    "ceiling_recall",
    "evaluate",
    "sweep",
]
