"""Mention scoring and top-K candidate retrieval over a probability index.

A mention's score for an entity sums, over the mention's tokens, the stored
prior P(entity | token) plus a weighted posterior P(token | entity). The
posterior term counterbalances popularity: entities that occur often have
flat posteriors, so it boosts entities whose observed tokens are specific
to them. Only entities sharing at least one stored token with the mention
ever receive a score, which keeps scoring proportional to index row sizes
rather than to the full entity inventory.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterator

from .corpus import normalize_mention
from .index import PtiIndex
from .tokenizer import mention_tokens

__all__ = [
    "ScoreMap",
    "CandidateList",
    "score_entities",
    "top_k",
    "normalize_scores",
    "candidate_space",
    "DEFAULT_K",
]

DEFAULT_K = 30


@dataclass(frozen=True)
class ScoreMap:
    """Raw scores for every entity reachable from one mention's tokens."""

    scores: dict[str, float]
    query_tokens: frozenset[str]
    lam: float


@dataclass(frozen=True)
class CandidateList:
    """Ranked (entity, score) candidates, at most ``k`` of them.

    Scores are non-increasing and ties are broken by ascending entity id,
    so equal inputs always rank identically.
    """

    candidates: tuple[tuple[str, float], ...]
    k: int

    def entities(self) -> list[str]:
        return [entity for entity, _ in self.candidates]

    def __len__(self) -> int:
        return len(self.candidates)

    def __iter__(self) -> Iterator[tuple[str, float]]:
        return iter(self.candidates)


def score_entities(index: PtiIndex, mention: str, lam: float = 1.0) -> ScoreMap:
    """Score all entities reachable from the mention's tokens.

    ``score(e) = sum_t prior[t][e] + lam * sum_t posterior[e][t]`` over the
    mention's token set. Entities reachable only through the posterior (a
    possibility once rows are thresholded) are still scored. Tokens are
    visited in sorted order — prior terms first, then posterior terms — so
    accumulated floats are identical across runs and platforms.
    """
    if lam < 0:
        raise ValueError(f"lambda must be >= 0, got {lam}")
    mention = normalize_mention(mention)
    if not mention:
        raise ValueError("mention is empty after normalization")
    tokens = mention_tokens(mention, index.meta.tokenizer)
    ordered = sorted(tokens)
    scores: dict[str, float] = {}
    for token in ordered:
        row = index.prior.get(token)
        if row:
            for entity, prob in row.items():
                scores[entity] = scores.get(entity, 0.0) + prob
    if lam > 0:
        by_token = index.posterior_by_token()
        for token in ordered:
            col = by_token.get(token)
            if col:
                for entity, prob in col.items():
                    scores[entity] = scores.get(entity, 0.0) + lam * prob
    return ScoreMap(scores, frozenset(tokens), lam)


def top_k(score_map: ScoreMap, k: int) -> CandidateList:
    """The ``k`` best-scoring entities via heap selection.

    Touches each scored entity once (no full sort of the candidate space);
    ties break by ascending entity id. Fewer than ``k`` candidates are
    returned when fewer entities were scored.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    best = heapq.nsmallest(k, score_map.scores.items(), key=lambda kv: (-kv[1], kv[0]))
    return CandidateList(tuple(best), k)


def normalize_scores(score_map: ScoreMap) -> ScoreMap:
    """Rescale scores to sum to one. Ranking is unchanged (scores are > 0)."""
    if not score_map.scores:
        raise ValueError("cannot normalize an empty score map")
    total = sum(score_map.scores.values())
    return ScoreMap(
        {entity: score / total for entity, score in score_map.scores.items()},
        score_map.query_tokens,
        score_map.lam,
    )


def candidate_space(index: PtiIndex) -> set[str]:
    """All entities any query could ever retrieve from this index."""
    space = set(index.posterior)
    for row in index.prior.values():
        space.update(row)
    return space
