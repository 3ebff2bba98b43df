"""Mention-entity corpora: loading, validation, difficulty typing and splits.

A corpus is a multiset of (mention, entity) observations for one language,
stored as merged counts. The on-disk format is plain TSV, one observation
per line: ``mention<TAB>entity[<TAB>count]``, UTF-8, ``#`` comments ignored.
"""

from __future__ import annotations

import hashlib
import random
import unicodedata
from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple


class CorpusParseError(ValueError):
    """A corpus or query file line could not be parsed."""

    def __init__(self, path: str | Path, line_no: int, message: str):
        self.path = str(path)
        self.line_no = line_no
        super().__init__(f"{path}:{line_no}: {message}")


def normalize_mention(mention: str) -> str:
    """Canonical mention form: NFC, casefolded, whitespace trimmed and collapsed.

    Applied on every ingestion path so that equal surface forms always map to
    the same corpus key. Idempotent.
    """
    folded = unicodedata.normalize("NFC", mention).casefold()
    return " ".join(folded.split())


class MentionEntityPair(NamedTuple):
    mention: str
    entity: str
    count: int
    language: str


class QueryType(str, Enum):
    """Difficulty of a (mention, entity) query relative to target training data."""

    EASY = "easy"      # the exact pair occurs in training data
    MEDIUM = "medium"  # the entity occurs, but only under other mentions
    HARD = "hard"      # the entity is unseen in training data


def _check_entity(entity: str) -> None:
    if not entity:
        raise ValueError("entity id must be non-empty")
    if any(ch.isspace() for ch in entity):
        raise ValueError(f"entity id contains whitespace: {entity!r}")


class Corpus:
    """Immutable multiset of mention-entity observations for one language.

    ``pairs`` maps ``(normalized mention, entity) -> total count``. Duplicate
    observations merge by summing counts, so a corpus and its TSV encoding
    carry exactly the same information.
    """

    __slots__ = ("pairs", "language", "entity_set", "mention_set")

    def __init__(self, pairs: Iterable[tuple], language: str = "und"):
        counts: dict[tuple[str, str], int] = {}
        for item in pairs:
            if len(item) == 2:
                mention, entity = item
                count = 1
            else:
                mention, entity, count = item
            mention = normalize_mention(mention)
            if not mention:
                raise ValueError("mention is empty after normalization")
            _check_entity(entity)
            if count < 1:
                raise ValueError(f"count must be >= 1, got {count}")
            key = (mention, entity)
            counts[key] = counts.get(key, 0) + count
        self._init_from_counts(counts, language)

    @classmethod
    def _from_counts(cls, counts: dict[tuple[str, str], int], language: str) -> "Corpus":
        # Fast path for internal callers that already hold normalized,
        # validated counts.
        corpus = cls.__new__(cls)
        corpus._init_from_counts(dict(counts), language)
        return corpus

    def _init_from_counts(self, counts: dict[tuple[str, str], int], language: str) -> None:
        object.__setattr__(self, "pairs", counts)
        object.__setattr__(self, "language", language)
        object.__setattr__(self, "entity_set", frozenset(e for _, e in counts))
        object.__setattr__(self, "mention_set", frozenset(m for m, _ in counts))

    def __setattr__(self, name, value):
        raise AttributeError("Corpus is immutable")

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self) -> Iterator[MentionEntityPair]:
        for (mention, entity), count in self.pairs.items():
            yield MentionEntityPair(mention, entity, count, self.language)

    def __contains__(self, pair: tuple[str, str]) -> bool:
        return pair in self.pairs

    def __eq__(self, other) -> bool:
        if not isinstance(other, Corpus):
            return NotImplemented
        return self.pairs == other.pairs and self.language == other.language

    def __repr__(self) -> str:
        return (
            f"Corpus(language={self.language!r}, distinct_pairs={len(self.pairs)}, "
            f"total_count={self.total_count})"
        )

    @property
    def total_count(self) -> int:
        return sum(self.pairs.values())

    def count(self, mention: str, entity: str) -> int:
        return self.pairs.get((normalize_mention(mention), entity), 0)

    def fingerprint(self) -> str:
        """Stable short hash of the corpus content, used as index provenance."""
        h = hashlib.sha256()
        h.update(self.language.encode("utf-8") + b"\n")
        for (mention, entity), count in sorted(self.pairs.items()):
            h.update(f"{mention}\t{entity}\t{count}\n".encode("utf-8"))
        return h.hexdigest()[:16]


def load_corpus(path: str | Path, language: str = "und") -> Corpus:
    """Read a TSV corpus file.

    Each non-comment, non-blank line is ``mention<TAB>entity[<TAB>count]``
    with count defaulting to 1. Mentions are normalized and identical pairs
    merged. An empty file yields an empty corpus.

    Raises:
        CorpusParseError: malformed line (field count, bad count, empty
            mention, whitespace in entity), reported with its line number.
    """
    counts: dict[tuple[str, str], int] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, 1):
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) not in (2, 3):
                raise CorpusParseError(
                    path, line_no, f"expected 2 or 3 tab-separated fields, got {len(fields)}"
                )
            mention = normalize_mention(fields[0])
            entity = fields[1]
            count = 1
            if len(fields) == 3:
                try:
                    count = int(fields[2])
                except ValueError:
                    raise CorpusParseError(path, line_no, f"count is not an integer: {fields[2]!r}")
            if not mention:
                raise CorpusParseError(path, line_no, "mention is empty after normalization")
            if count < 1:
                raise CorpusParseError(path, line_no, f"count must be >= 1, got {count}")
            try:
                _check_entity(entity)
            except ValueError as exc:
                raise CorpusParseError(path, line_no, str(exc))
            key = (mention, entity)
            counts[key] = counts.get(key, 0) + count
    return Corpus._from_counts(counts, language)


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    """Write a corpus as sorted three-column TSV (deterministic byte output)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for (mention, entity), count in sorted(corpus.pairs.items()):
            fh.write(f"{mention}\t{entity}\t{count}\n")


def classify_query(mention: str, entity: str, target_train: Corpus) -> QueryType:
    """Type a query by what the target-language training data contains.

    Easy if the exact pair is observed, medium if the entity is observed
    under other mentions only, hard if the entity is unseen. Against an
    empty corpus every query is hard (the zero-shot case).
    """
    mention = normalize_mention(mention)
    if (mention, entity) in target_train.pairs:
        return QueryType.EASY
    if entity in target_train.entity_set:
        return QueryType.MEDIUM
    return QueryType.HARD


class LabeledQuery(NamedTuple):
    mention: str
    entity: str
    query_type: QueryType


@dataclass(frozen=True)
class EvalSplit:
    """A training corpus plus typed validation and test query lists.

    Validation and test never share a (mention, entity) pair, and every
    query's type is consistent with `classify_query` against ``train``.
    """

    train: Corpus
    validation: list[LabeledQuery]
    test: list[LabeledQuery]


def build_eval_split(
    target_corpus: Corpus, max_per_type: int = 1000, seed: int = 0
) -> EvalSplit:
    """Hold out typed queries for validation and test, adapting the train set.

    Draws up to ``max_per_type`` unique pairs of each query type into each of
    validation and test, without replacement, against the progressively
    shrinking train set:

    * easy queries are drawn from pairs observed at least twice; one
      occurrence is held out, so the pair remains in train;
    * medium queries remove their pair entirely while the entity keeps at
      least one other mention in train;
    * hard queries remove every remaining pair of an entity that no earlier
      query depends on, and all of those pairs become hard queries.

    This keeps every reported type valid against the final train set. Types
    the corpus cannot supply are simply underfilled. Deterministic for a
    given seed.
    """
    if max_per_type < 1:
        raise ValueError(f"max_per_type must be >= 1, got {max_per_type}")
    rng = random.Random(seed)
    remaining: dict[tuple[str, str], int] = dict(target_corpus.pairs)
    mentions_of: dict[str, set[str]] = defaultdict(set)
    for mention, entity in remaining:
        mentions_of[entity].add(mention)

    used: set[tuple[str, str]] = set()
    protected: set[str] = set()  # entities that must stay observable in train
    validation: list[LabeledQuery] = []
    test: list[LabeledQuery] = []

    def shuffled(items):
        ordered = sorted(items)
        rng.shuffle(ordered)
        return ordered

    def bucket_for(n_valid: int, n_test: int):
        if n_valid < max_per_type:
            return validation
        if n_test < max_per_type:
            return test
        return None

    # Easy stage: hold out one occurrence of a repeated pair.
    n_valid = n_test = 0
    for pair in shuffled(p for p, c in remaining.items() if c >= 2):
        bucket = bucket_for(n_valid, n_test)
        if bucket is None:
            break
        mention, entity = pair
        remaining[pair] -= 1
        used.add(pair)
        protected.add(entity)
        bucket.append(LabeledQuery(mention, entity, QueryType.EASY))
        if bucket is validation:
            n_valid += 1
        else:
            n_test += 1

    # Medium stage: remove a pair whose entity keeps another mention.
    n_valid = n_test = 0
    for pair in shuffled(p for p in remaining if p not in used):
        bucket = bucket_for(n_valid, n_test)
        if bucket is None:
            break
        mention, entity = pair
        if pair not in remaining or len(mentions_of[entity]) < 2:
            continue
        del remaining[pair]
        mentions_of[entity].discard(mention)
        used.add(pair)
        protected.add(entity)
        bucket.append(LabeledQuery(mention, entity, QueryType.MEDIUM))
        if bucket is validation:
            n_valid += 1
        else:
            n_test += 1

    # Hard stage: evict whole entities, using every evicted pair as a query.
    n_valid = n_test = 0
    need = 2 * max_per_type
    for entity in shuffled(e for e, ms in mentions_of.items() if ms and e not in protected):
        if need <= 0:
            break
        pairs = [(m, entity) for m in sorted(mentions_of[entity]) if (m, entity) in remaining]
        if not pairs or len(pairs) > need:
            continue
        for pair in pairs:
            bucket = bucket_for(n_valid, n_test)
            if bucket is None:
                break
            del remaining[pair]
            used.add(pair)
            bucket.append(LabeledQuery(pair[0], entity, QueryType.HARD))
            if bucket is validation:
                n_valid += 1
            else:
                n_test += 1
            need -= 1
        mentions_of[entity].clear()

    train = Corpus._from_counts(remaining, target_corpus.language)
    return EvalSplit(train=train, validation=validation, test=test)


def generate_synthetic(
    n_entities: int, n_pairs: int, alphabet: str, seed: int, language: str = "syn"
) -> Corpus:
    """Deterministic pseudo-random corpus for tests and benchmarks.

    Every entity gets a lexical stem; its mentions are stem variants
    (suffixes, prefixes, clipped forms, extra words), so mentions of the
    same entity share character n-grams. Entity popularity is skewed so
    frequent pairs repeat, which makes easy-query sampling possible.
    ``n_pairs`` is the number of occurrence draws, i.e. ``total_count`` of
    the result; distinct entities may be fewer than ``n_entities``.
    """
    if n_entities < 1:
        raise ValueError(f"n_entities must be >= 1, got {n_entities}")
    if n_pairs < 1:
        raise ValueError(f"n_pairs must be >= 1, got {n_pairs}")
    letters = sorted(set(alphabet) - set(" \t\n\r"))
    if not letters:
        raise ValueError("alphabet must contain at least one non-whitespace character")
    rng = random.Random(seed)

    def word(lo: int, hi: int) -> str:
        return "".join(rng.choice(letters) for _ in range(rng.randint(lo, hi)))

    entities = [f"E{i:06d}" for i in range(n_entities)]
    variants: list[list[str]] = []
    for _ in entities:
        stem = word(3, 8)
        forms = [stem]
        for _ in range(rng.randint(1, 4)):
            kind = rng.randrange(4)
            if kind == 0:
                forms.append(stem + word(1, 3))
            elif kind == 1:
                forms.append(word(1, 2) + stem)
            elif kind == 2 and len(stem) > 3:
                forms.append(stem[:-1])
            else:
                forms.append(stem + " " + word(2, 5))
        normalized = []
        for form in forms:
            form = normalize_mention(form)
            if form and form not in normalized:
                normalized.append(form)
        variants.append(normalized)

    weights = [1.0 / (rank + 1) for rank in range(n_entities)]
    counts: dict[tuple[str, str], int] = {}
    for idx in rng.choices(range(n_entities), weights=weights, k=n_pairs):
        forms = variants[idx]
        # Quadratic skew: early variants (the stem itself) dominate.
        form = forms[int(rng.random() ** 2 * len(forms))]
        key = (form, entities[idx])
        counts[key] = counts.get(key, 0) + 1
    return Corpus._from_counts(counts, language)


_QUERY_TYPES = {t.value for t in QueryType}


def load_queries(path: str | Path) -> list[tuple[str, str, QueryType | None]]:
    """Read a query TSV: ``mention<TAB>entity[<TAB>count][<TAB>type]``.

    A third column is taken as a count if it parses as an integer, or as a
    query type if it is one of easy/medium/hard. Counts are accepted for
    compatibility with corpus files but not returned.
    """
    queries: list[tuple[str, str, QueryType | None]] = []
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, 1):
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) < 2 or len(fields) > 4:
                raise CorpusParseError(
                    path, line_no, f"expected 2 to 4 tab-separated fields, got {len(fields)}"
                )
            mention = normalize_mention(fields[0])
            entity = fields[1]
            if not mention:
                raise CorpusParseError(path, line_no, "mention is empty after normalization")
            try:
                _check_entity(entity)
            except ValueError as exc:
                raise CorpusParseError(path, line_no, str(exc))
            qtype: QueryType | None = None
            rest = fields[2:]
            if rest and rest[0] not in _QUERY_TYPES:
                try:
                    count = int(rest[0])
                except ValueError:
                    raise CorpusParseError(
                        path, line_no, f"third field is neither a count nor a query type: {rest[0]!r}"
                    )
                if count < 1:
                    raise CorpusParseError(path, line_no, f"count must be >= 1, got {count}")
                rest = rest[1:]
            if rest:
                if rest[0] not in _QUERY_TYPES:
                    raise CorpusParseError(path, line_no, f"unknown query type: {rest[0]!r}")
                qtype = QueryType(rest[0])
                if len(rest) > 1:
                    raise CorpusParseError(path, line_no, "unexpected trailing field")
            queries.append((mention, entity, qtype))
    return queries


def save_queries(
    queries: Iterable[tuple[str, str, QueryType]], path: str | Path
) -> None:
    """Write typed queries as ``mention<TAB>entity<TAB>1<TAB>type`` lines.

    The constant count column keeps query files structurally valid corpus
    TSVs; the held-out occurrence it stands for is always a single draw.
    """
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for mention, entity, qtype in queries:
            fh.write(f"{mention}\t{entity}\t1\t{qtype.value}\n")


def save_split(split: EvalSplit, out_dir: str | Path) -> None:
    """Write ``train.tsv``, ``valid.tsv`` and ``test.tsv`` under ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_corpus(split.train, out / "train.tsv")
    save_queries(split.validation, out / "valid.tsv")
    save_queries(split.test, out / "test.tsv")


def load_split(split_dir: str | Path, language: str = "und") -> EvalSplit:
    """Read a split written by `save_split`. Untyped query rows are rejected."""
    split_dir = Path(split_dir)
    train = load_corpus(split_dir / "train.tsv", language)

    def typed(path: Path) -> list[LabeledQuery]:
        out = []
        for line_no, (mention, entity, qtype) in enumerate(load_queries(path), 1):
            if qtype is None:
                raise CorpusParseError(path, line_no, "query row is missing its type column")
            out.append(LabeledQuery(mention, entity, qtype))
        return out

    return EvalSplit(
        train=train,
        validation=typed(split_dir / "valid.tsv"),
        test=typed(split_dir / "test.tsv"),
    )
