"""Recall measurement, per-type breakdowns, ceilings and parameter sweeps.

A candidate generator is anything callable as ``generator(mention, k) ->
CandidateList`` — the estimators' bound ``generate`` methods qualify — and
recall@K is the percentage of gold entities found among the top K
candidates. The ceiling is the recall an oracle generator would reach given
a candidate space: the coverage of gold entities by that space.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from sklearn.base import clone
from sklearn.model_selection import ParameterGrid

from .corpus import QueryType
from .scorer import CandidateList
from .validation import check_positive_int

__all__ = [
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

Generator = Callable[[str, int], CandidateList]


def _as_generator(generator) -> Generator:
    if hasattr(generator, "generate"):
        return generator.generate
    if callable(generator):
        return generator
    raise TypeError(f"not a candidate generator: {type(generator).__name__}")


def _hits(
    generator: Generator, queries: Sequence, k: int, threads: int
) -> list[bool]:
    """Whether each query's gold entity appears in its top-K candidates.

    Queries may be (mention, entity) pairs or typed query tuples; extra
    elements are ignored. Order of results matches the input order even
    when candidate generation runs on multiple threads.
    """
    mentions = [q[0] for q in queries]
    golds = [q[1] for q in queries]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            lists = list(pool.map(lambda m: generator(m, k), mentions))
    else:
        lists = [generator(m, k) for m in mentions]
    return [gold in cl.entities() for gold, cl in zip(golds, lists)]


def recall_at_k(generator, queries: Sequence, k: int, threads: int = 1) -> float:
    """Percentage of queries whose gold entity is among the top K candidates."""
    check_positive_int(k, "k")
    check_positive_int(threads, "threads")
    if not queries:
        raise ValueError("cannot compute recall over an empty query list")
    hits = _hits(_as_generator(generator), queries, k, threads)
    return 100.0 * sum(hits) / len(hits)


@dataclass(frozen=True)
class TypeRecall:
    recall: float
    n: int


@dataclass(frozen=True)
class RecallBreakdown:
    """Recall split by query type, plus the count-weighted micro average."""

    micro_recall: float
    per_type: dict[QueryType, TypeRecall]


def recall_breakdown(
    generator, queries: Sequence, k: int, threads: int = 1
) -> RecallBreakdown:
    """Per-type recall over typed queries, generating once per query.

    ``queries`` holds (mention, entity, QueryType) tuples. Types that do not
    occur are absent from the result, and the micro average equals plain
    recall over the whole list.
    """
    check_positive_int(k, "k")
    check_positive_int(threads, "threads")
    if not queries:
        raise ValueError("cannot compute recall over an empty query list")
    hits = _hits(_as_generator(generator), queries, k, threads)
    totals: dict[QueryType, int] = {}
    found: dict[QueryType, int] = {}
    for query, hit in zip(queries, hits):
        qtype = QueryType(query[2])
        totals[qtype] = totals.get(qtype, 0) + 1
        found[qtype] = found.get(qtype, 0) + int(hit)
    per_type = {
        qtype: TypeRecall(100.0 * found[qtype] / totals[qtype], totals[qtype])
        for qtype in QueryType
        if qtype in totals
    }
    micro = 100.0 * sum(hits) / len(hits)
    return RecallBreakdown(micro_recall=micro, per_type=per_type)


def ceiling_recall(space: Iterable[str], queries: Sequence) -> float:
    """Best possible recall given a candidate space: gold-entity coverage."""
    if not queries:
        raise ValueError("cannot compute a ceiling over an empty query list")
    space = set(space)
    return 100.0 * sum(1 for q in queries if q[1] in space) / len(queries)


@dataclass(frozen=True)
class EvalReport:
    """One evaluation run, serializable as a fixed-field-order JSON document."""

    k: int
    method: str
    config: dict
    micro_recall: float
    per_type: dict[str, dict]
    ceiling: dict[str, float]

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "method": self.method,
            "config": self.config,
            "micro_recall": self.micro_recall,
            "per_type": self.per_type,
            "ceiling": self.ceiling,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2)


def evaluate(
    generator,
    queries: Sequence,
    k: int,
    method: str,
    config: dict,
    spaces: dict[str, Iterable[str]],
    threads: int = 1,
) -> EvalReport:
    """Assemble a full report: breakdown over typed queries plus ceilings."""
    breakdown = recall_breakdown(generator, queries, k, threads)
    per_type = {
        qtype.value: {"recall": tr.recall, "n": tr.n}
        for qtype, tr in breakdown.per_type.items()
    }
    ceiling = {label: ceiling_recall(space, queries) for label, space in spaces.items()}
    return EvalReport(
        k=k,
        method=method,
        config=config,
        micro_recall=breakdown.micro_recall,
        per_type=per_type,
        ceiling=ceiling,
    )


@dataclass(frozen=True)
class SweepResult:
    """Winning configuration of a grid sweep and its test-set report."""

    best_params: dict
    validation_recall: float
    report: EvalReport


def _report_config(estimator) -> dict:
    # "lam" is a Python-identifier workaround; reports use the real name.
    return {
        ("lambda" if name == "lam" else name): value
        for name, value in sorted(estimator.get_params().items())
    }


def sweep(
    estimator,
    param_grid: dict,
    pivot,
    target,
    validation: Sequence,
    test: Sequence,
    k: int,
    method: str,
    spaces: dict[str, Iterable[str]],
    threads: int = 1,
) -> SweepResult:
    """Exhaustive grid search on validation recall, reported on the test set.

    Every grid point is fitted as a clone of ``estimator`` and measured by
    micro recall@K on the validation queries; ties keep the first point in
    grid order, so the outcome is deterministic. Pass precomputed count
    tables as ``pivot`` / ``target`` to share one counting pass across the
    whole grid (only valid while the grid keeps tokenizer parameters fixed).
    """
    check_positive_int(k, "k")
    if not param_grid:
        raise ValueError("empty parameter grid")
    grid = list(ParameterGrid(param_grid))
    best_params = None
    best_recall = -1.0
    best_estimator = None
    for params in grid:
        candidate = clone(estimator).set_params(**params)
        candidate.fit(pivot, target)
        recall = recall_at_k(candidate, validation, k, threads)
        if recall > best_recall:
            best_params, best_recall, best_estimator = params, recall, candidate
    report = evaluate(
        best_estimator, test, k, method, _report_config(best_estimator), spaces, threads
    )
    return SweepResult(best_params=best_params, validation_recall=best_recall, report=report)
