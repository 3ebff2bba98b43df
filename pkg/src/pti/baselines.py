"""Mention-level prior baseline with word-level and pivot-language fallback.

The baseline ranks entities by P(entity | mention) estimated directly from
training frequencies, trying progressively weaker evidence until K
candidates are found: the exact mention in the target language, then in the
pivot language, then individual words of the mention in each language. For
multi-word mentions the word stage sums the priors of the distinct words.
"""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import Corpus, normalize_mention
from .scorer import CandidateList

__all__ = ["WikiPriorsIndex", "build_wikipriors", "wikipriors_generate"]

ProbTable = dict[str, dict[str, float]]


@dataclass(frozen=True)
class WikiPriorsIndex:
    """Per-language mention-level and word-level P(entity | key) tables."""

    pivot_mention_prior: ProbTable
    pivot_word_prior: ProbTable
    target_mention_prior: ProbTable | None
    target_word_prior: ProbTable | None
    pivot_language: str
    target_language: str | None

    def candidate_space(self) -> set[str]:
        """Every entity the fallback chain could ever return."""
        space: set[str] = set()
        for table in (self.pivot_mention_prior, self.target_mention_prior):
            if table:
                for row in table.values():
                    space.update(row)
        return space


def _language_tables(corpus: Corpus) -> tuple[ProbTable, ProbTable]:
    mention_counts: dict[str, dict[str, int]] = {}
    word_counts: dict[str, dict[str, int]] = {}
    for (mention, entity), count in corpus.pairs.items():
        row = mention_counts.setdefault(mention, {})
        row[entity] = row.get(entity, 0) + count
        for word in sorted(set(mention.split(" "))):
            row = word_counts.setdefault(word, {})
            row[entity] = row.get(entity, 0) + count

    def normalized(counts: dict[str, dict[str, int]]) -> ProbTable:
        out: ProbTable = {}
        for key, row in counts.items():
            total = sum(row.values())
            out[key] = {entity: value / total for entity, value in row.items()}
        return out

    return normalized(mention_counts), normalized(word_counts)


def build_wikipriors(pivot: Corpus, target: Corpus | None = None) -> WikiPriorsIndex:
    """Estimate the per-language prior tables from training corpora.

    ``target=None`` (or an empty target corpus) builds the zero-shot variant
    with pivot-language tables only.
    """
    if len(pivot) == 0:
        raise ValueError("pivot corpus is empty")
    pivot_mentions, pivot_words = _language_tables(pivot)
    target_mentions = target_words = None
    target_language = None
    if target is not None and len(target) > 0:
        target_mentions, target_words = _language_tables(target)
        target_language = target.language
    return WikiPriorsIndex(
        pivot_mention_prior=pivot_mentions,
        pivot_word_prior=pivot_words,
        target_mention_prior=target_mentions,
        target_word_prior=target_words,
        pivot_language=pivot.language,
        target_language=target_language,
    )


def _word_scores(table: ProbTable, mention: str) -> dict[str, float]:
    scores: dict[str, float] = {}
    for word in sorted(set(mention.split(" "))):
        row = table.get(word)
        if row:
            for entity, prob in row.items():
                scores[entity] = scores.get(entity, 0.0) + prob
    return scores


def wikipriors_generate(
    index: WikiPriorsIndex, mention: str, k: int, zero_shot: bool = False
) -> CandidateList:
    """Top-K candidates via the four-stage fallback chain.

    Each stage appends its entities in (probability desc, entity id asc)
    order, skipping entities already taken, and the chain stops as soon as K
    candidates are collected. ``zero_shot=True`` forces the pivot-only
    behaviour even when target tables exist. An entity keeps the score from
    the first stage that produced it, so scores are non-increasing only
    within a stage.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    mention = normalize_mention(mention)
    if not mention:
        raise ValueError("mention is empty after normalization")

    taken: list[tuple[str, float]] = []
    seen: set[str] = set()

    def extend(scores: dict[str, float] | None) -> None:
        if not scores:
            return
        for entity, score in sorted(scores.items(), key=lambda kv: (-kv[1], kv[0])):
            if len(taken) >= k:
                break
            if entity not in seen:
                seen.add(entity)
                taken.append((entity, score))

    use_target = index.target_mention_prior is not None and not zero_shot
    if use_target:
        extend(index.target_mention_prior.get(mention))
    if len(taken) < k:
        extend(index.pivot_mention_prior.get(mention))
    if len(taken) < k and use_target:
        extend(_word_scores(index.target_word_prior, mention))
    if len(taken) < k:
        extend(_word_scores(index.pivot_word_prior, mention))
    return CandidateList(tuple(taken), k)
