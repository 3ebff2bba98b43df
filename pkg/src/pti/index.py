"""Token-entity count tables and prior/posterior probability indexes.

The index holds four sparse tables derived from one blended token-entity
count table: ``prior`` P(entity | token), ``posterior`` P(token | entity),
and the occupancy distributions ``token_prob`` P(token) and ``entity_prob``
P(entity). Counts from a pivot-language corpus are down-weighted by a factor
``alpha`` before being added to target-language counts; with an empty target
table and ``alpha=1`` this degenerates to the zero-shot, pivot-only index.

All tables are plain nested dicts (token -> entity -> value and transposes):
the data is extremely sparse and the access pattern is row lookups.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable

from .corpus import Corpus
from .tokenizer import TokenizerConfig, mention_tokens

__all__ = [
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
    "FORMAT_MAGIC",
]

# Hyperparameter grids that sweeps search by default.
DEFAULT_ALPHA_GRID = (0.1, 0.4, 1.0)
DEFAULT_LAMBDA_GRID = (0.2, 0.4, 1.0)
DEFAULT_TAU_GRID = (0.0, 0.01, 0.1)

FORMAT_MAGIC = "PTI1"


class IndexFormatError(ValueError):
    """A serialized index file is unusable."""


class IndexVersionError(IndexFormatError):
    """The file does not start with a supported format header."""


class IndexChecksumError(IndexFormatError):
    """The file content does not match its recorded checksum."""


class IndexParseError(IndexFormatError):
    """A structurally invalid record was found after checksum verification."""


@dataclass(frozen=True)
class CountTable:
    """Sparse token-entity co-occurrence counts with consistent marginals.

    ``joint[token][entity]`` is the co-occurrence count; ``token_marginal``
    and ``entity_marginal`` are its row and column sums and ``total`` the
    grand total. Values are exact integers when derived from a corpus;
    pivot down-weighting and shard merges of weighted tables may introduce
    fractional values. ``source`` is the fingerprint of the originating
    corpus, if any.
    """

    joint: dict[str, dict[str, float]]
    token_marginal: dict[str, float]
    entity_marginal: dict[str, float]
    total: float
    tokenizer: TokenizerConfig
    source: str | None = None

    @property
    def num_entries(self) -> int:
        return sum(len(row) for row in self.joint.values())

    def is_empty(self) -> bool:
        return not self.joint


def empty_count_table(config: TokenizerConfig) -> CountTable:
    """The neutral element for blending: no observations at all."""
    return CountTable({}, {}, {}, 0, config)


def count_cooccurrences(corpus: Corpus, config: TokenizerConfig) -> CountTable:
    """Count token-entity co-occurrences over a corpus.

    Every occurrence of a pair contributes the pair's count to each distinct
    token of the mention (set semantics, wildcard variants included when
    enabled). Tokens are visited in sorted order per mention so the table's
    construction order does not depend on hash seeding.
    """
    joint: dict[str, dict[str, float]] = {}
    for (mention, entity), count in corpus.pairs.items():
        for token in sorted(mention_tokens(mention, config)):
            row = joint.get(token)
            if row is None:
                row = joint[token] = {}
            row[entity] = row.get(entity, 0) + count
    return _table_from_joint(joint, config, source=corpus.fingerprint())


def _table_from_joint(
    joint: dict[str, dict[str, float]], config: TokenizerConfig, source: str | None
) -> CountTable:
    token_marginal: dict[str, float] = {}
    entity_marginal: dict[str, float] = {}
    total = 0
    for token, row in joint.items():
        row_sum = 0
        for entity, value in row.items():
            row_sum += value
            entity_marginal[entity] = entity_marginal.get(entity, 0) + value
        token_marginal[token] = row_sum
        total += row_sum
    return CountTable(joint, token_marginal, entity_marginal, total, config, source)


def merge_count_tables(a: CountTable, b: CountTable) -> CountTable:
    """Add two count tables built with the same tokenizer (shard merge).

    Exactly commutative and associative on integer-valued tables; marginals
    are recomputed from the merged joint so they stay consistent by
    construction.
    """
    if a.tokenizer != b.tokenizer:
        raise ValueError(
            f"cannot merge tables with different tokenizers: {a.tokenizer} vs {b.tokenizer}"
        )
    joint: dict[str, dict[str, float]] = {t: dict(row) for t, row in a.joint.items()}
    for token, row in b.joint.items():
        out = joint.get(token)
        if out is None:
            joint[token] = dict(row)
        else:
            for entity, value in row.items():
                out[entity] = out.get(entity, 0) + value
    sources = sorted(s for s in (a.source, b.source) if s)
    source = None
    if sources:
        source = hashlib.sha256("+".join(sources).encode("utf-8")).hexdigest()[:16]
    return _table_from_joint(joint, a.tokenizer, source)


@dataclass(frozen=True)
class SmoothingMeta:
    """Extra state needed to reconstruct additively smoothed probabilities."""

    beta: float
    universe_size: int
    total: float


@dataclass(frozen=True)
class IndexMeta:
    """Construction parameters and provenance carried by an index."""

    alpha: float
    tau: float
    tokenizer: TokenizerConfig
    target_fingerprint: str | None = None
    pivot_fingerprint: str | None = None
    smoothing: SmoothingMeta | None = None


@dataclass(eq=True)
class PtiIndex:
    """Sparse prior/posterior probability index over mention tokens.

    Rows of ``prior`` (per token) and ``posterior`` (per entity) are
    probability distributions at build time; after thresholding they may sum
    to less than one. Empty rows are never stored.
    """

    prior: dict[str, dict[str, float]]
    posterior: dict[str, dict[str, float]]
    token_prob: dict[str, float]
    entity_prob: dict[str, float]
    meta: IndexMeta
    _posterior_by_token: dict[str, dict[str, float]] | None = field(
        default=None, compare=False, repr=False
    )

    @property
    def num_prior_entries(self) -> int:
        return sum(len(row) for row in self.prior.values())

    @property
    def num_posterior_entries(self) -> int:
        return sum(len(row) for row in self.posterior.values())

    def posterior_by_token(self) -> dict[str, dict[str, float]]:
        """Token-major view of ``posterior``, built lazily and cached.

        Scoring walks the posterior by query token; after thresholding the
        posterior support of a token can differ from its prior support, so
        the transpose cannot be folded into ``prior``.
        """
        cache = self._posterior_by_token
        if cache is None:
            cache = {}
            for entity, row in self.posterior.items():
                for token, prob in row.items():
                    col = cache.get(token)
                    if col is None:
                        col = cache[token] = {}
                    col[entity] = prob
            self._posterior_by_token = cache
        return cache


def build_index(
    target_counts: CountTable, pivot_counts: CountTable, alpha: float = 1.0
) -> PtiIndex:
    """Build a probability index from blended target and pivot counts.

    Pivot counts are scaled by ``alpha`` and added to target counts; all four
    probability tables are then read off the blended table, so the prior and
    posterior always satisfy the Bayes identity
    ``prior[t][e] * token_prob[t] == posterior[e][t] * entity_prob[e]``.
    Pass an empty target table with ``alpha=1`` for a zero-shot index.
    """
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    if target_counts.tokenizer != pivot_counts.tokenizer:
        raise ValueError(
            "target and pivot counts use different tokenizers: "
            f"{target_counts.tokenizer} vs {pivot_counts.tokenizer}"
        )
    if target_counts.is_empty() and (pivot_counts.is_empty() or alpha == 0):
        raise ValueError("no observations to index (both count tables effectively empty)")

    # Blend ĉ(t, e) = c_target(t, e) + alpha * c_pivot(t, e), reusing an
    # input table untouched when the other side contributes nothing.
    if pivot_counts.is_empty() or alpha == 0:
        blended = target_counts.joint
    elif target_counts.is_empty() and alpha == 1:
        blended = pivot_counts.joint
    else:
        blended = {t: dict(row) for t, row in target_counts.joint.items()}
        for token, row in pivot_counts.joint.items():
            out = blended.get(token)
            if out is None:
                out = blended[token] = {}
            for entity, count in row.items():
                out[entity] = out.get(entity, 0) + alpha * count

    token_marginal: dict[str, float] = {}
    entity_marginal: dict[str, float] = {}
    total = 0
    for token, row in blended.items():
        row_sum = 0
        for entity, value in row.items():
            row_sum += value
            entity_marginal[entity] = entity_marginal.get(entity, 0) + value
        token_marginal[token] = row_sum
        total += row_sum

    prior: dict[str, dict[str, float]] = {}
    posterior: dict[str, dict[str, float]] = {}
    for token, row in blended.items():
        row_total = token_marginal[token]
        prior[token] = {entity: value / row_total for entity, value in row.items()}
        for entity, value in row.items():
            col = posterior.get(entity)
            if col is None:
                col = posterior[entity] = {}
            col[token] = value / entity_marginal[entity]
    token_prob = {token: value / total for token, value in token_marginal.items()}
    entity_prob = {entity: value / total for entity, value in entity_marginal.items()}

    meta = IndexMeta(
        alpha=alpha,
        tau=0.0,
        tokenizer=target_counts.tokenizer,
        target_fingerprint=target_counts.source,
        pivot_fingerprint=pivot_counts.source,
    )
    return PtiIndex(prior, posterior, token_prob, entity_prob, meta)


def apply_threshold(index: PtiIndex, tau: float) -> PtiIndex:
    """Drop every prior and posterior entry whose probability is below ``tau``.

    Entries equal to ``tau`` are kept, rows left empty are removed, and
    nothing is renormalized, so surviving rows may sum to less than one.
    The occupancy tables are unaffected. ``tau=0`` returns an equal copy.
    """
    if not 0 <= tau < 1:
        raise ValueError(f"tau must be in [0, 1), got {tau}")

    def pruned(rows: dict[str, dict[str, float]]) -> dict[str, dict[str, float]]:
        out: dict[str, dict[str, float]] = {}
        for key, row in rows.items():
            kept = {k: p for k, p in row.items() if p >= tau}
            if kept:
                out[key] = kept
        return out

    return PtiIndex(
        pruned(index.prior),
        pruned(index.posterior),
        dict(index.token_prob),
        dict(index.entity_prob),
        replace(index.meta, tau=tau),
    )


def smooth_pivot_probabilities(
    pivot_counts: CountTable, beta: float, entity_universe: Iterable[str]
) -> PtiIndex:
    """Additively smoothed pivot-only index.

    Stored probabilities become ``(c(t,e) + beta) / (c(t) + beta * |E|)`` for
    the prior (``|E|`` the entity universe size) and the symmetric form over
    the observed token vocabulary for the posterior. Only observed (t, e)
    entries are stored; the implied probability mass of unobserved ones is
    recoverable from the smoothing metadata. Occupancy tables stay unsmoothed.
    """
    if beta <= 0:
        raise ValueError(f"beta must be > 0, got {beta}")
    if pivot_counts.is_empty():
        raise ValueError("cannot smooth an empty count table")
    universe = set(entity_universe)
    observed = set(pivot_counts.entity_marginal)
    if not observed <= universe:
        missing = sorted(observed - universe)[:3]
        raise ValueError(f"entity_universe is missing observed entities, e.g. {missing}")

    n_entities = len(universe)
    n_tokens = len(pivot_counts.token_marginal)
    prior: dict[str, dict[str, float]] = {}
    posterior: dict[str, dict[str, float]] = {}
    for token, row in pivot_counts.joint.items():
        denom = pivot_counts.token_marginal[token] + beta * n_entities
        prior[token] = {entity: (value + beta) / denom for entity, value in row.items()}
        for entity, value in row.items():
            col = posterior.get(entity)
            if col is None:
                col = posterior[entity] = {}
            col[token] = (value + beta) / (
                pivot_counts.entity_marginal[entity] + beta * n_tokens
            )
    total = pivot_counts.total
    token_prob = {t: v / total for t, v in pivot_counts.token_marginal.items()}
    entity_prob = {e: v / total for e, v in pivot_counts.entity_marginal.items()}

    meta = IndexMeta(
        alpha=1.0,
        tau=0.0,
        tokenizer=pivot_counts.tokenizer,
        pivot_fingerprint=pivot_counts.source,
        smoothing=SmoothingMeta(beta=beta, universe_size=n_entities, total=float(total)),
    )
    return PtiIndex(prior, posterior, token_prob, entity_prob, meta)


def _fuse_rows(
    a_rows: dict[str, dict[str, float]],
    b_rows: dict[str, dict[str, float]],
    gamma: float,
) -> dict[str, dict[str, float]]:
    out: dict[str, dict[str, float]] = {}
    for key, a_row in a_rows.items():
        b_row = b_rows.get(key)
        if b_row is None or gamma == 0:
            # No second distribution to mix in: carry the row over unchanged.
            out[key] = dict(a_row)
            continue
        merged = dict(a_row)
        for k, p in b_row.items():
            merged[k] = merged.get(k, 0.0) + gamma * p
        norm = sum(merged.values())
        out[key] = {k: v / norm for k, v in merged.items()}
    if gamma > 0:
        for key, b_row in b_rows.items():
            if key in a_rows:
                continue
            norm = sum(b_row.values())
            out[key] = {k: p / norm for k, p in b_row.items()}
    return out


def fuse_indexes(target_index: PtiIndex, pivot_index: PtiIndex, gamma: float) -> PtiIndex:
    """Mix two indexes at the probability level instead of the count level.

    Each fused prior row is proportional to ``P_target + gamma * P_pivot``,
    renormalized to sum to one; likewise for posterior rows. Rows present on
    only one side are carried over renormalized (the mixing weight cancels),
    and with ``gamma=0`` the result equals the target index on its own rows.
    Occupancy tables are mixed with the same weight. Intended for unpruned
    inputs; threshold the fused index afterwards if needed.
    """
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    if target_index.meta.tokenizer != pivot_index.meta.tokenizer:
        raise ValueError(
            "cannot fuse indexes with different tokenizers: "
            f"{target_index.meta.tokenizer} vs {pivot_index.meta.tokenizer}"
        )

    def fuse_flat(a: dict[str, float], b: dict[str, float]) -> dict[str, float]:
        if gamma == 0:
            return dict(a)
        merged = dict(a)
        for k, p in b.items():
            merged[k] = merged.get(k, 0.0) + gamma * p
        norm = sum(merged.values())
        return {k: v / norm for k, v in merged.items()}

    meta = IndexMeta(
        alpha=target_index.meta.alpha,
        tau=0.0,
        tokenizer=target_index.meta.tokenizer,
        target_fingerprint=target_index.meta.target_fingerprint,
        pivot_fingerprint=pivot_index.meta.pivot_fingerprint,
    )
    return PtiIndex(
        _fuse_rows(target_index.prior, pivot_index.prior, gamma),
        _fuse_rows(target_index.posterior, pivot_index.posterior, gamma),
        fuse_flat(target_index.token_prob, pivot_index.token_prob),
        fuse_flat(target_index.entity_prob, pivot_index.entity_prob),
        meta,
    )


def _format_float(value: float) -> str:
    # repr() is the shortest string that round-trips the exact double, which
    # makes serialization lossless and byte-deterministic.
    return repr(float(value))


def serialize_index(index: PtiIndex, path: str | Path) -> None:
    """Write an index as a sorted, checksummed UTF-8 text file.

    Layout: one header line, then one record per stored probability in
    sorted order, then a trailing ``SHA256`` line over everything above it.
    Record fields are tab-separated (tokens may contain spaces); floats use
    shortest round-trip notation so deserialization is exact.
    """
    meta = index.meta
    cfg = meta.tokenizer
    head = (
        f"{FORMAT_MAGIC} {_format_float(meta.alpha)} {_format_float(meta.tau)} "
        f"{cfg.n_min} {cfg.n_max} {int(cfg.wildcard)} "
        f"{meta.target_fingerprint or '-'} {meta.pivot_fingerprint or '-'}"
    )
    if meta.smoothing is not None:
        s = meta.smoothing
        head += (
            f" beta={_format_float(s.beta)} universe={s.universe_size}"
            f" total={_format_float(s.total)}"
        )

    checksum = hashlib.sha256()
    with open(path, "w", encoding="utf-8", newline="\n") as fh:

        def emit(line: str) -> None:
            data = line + "\n"
            checksum.update(data.encode("utf-8"))
            fh.write(data)

        emit(head)
        for token in sorted(index.prior):
            row = index.prior[token]
            for entity in sorted(row):
                emit(f"PRIOR\t{token}\t{entity}\t{_format_float(row[entity])}")
        for entity in sorted(index.posterior):
            row = index.posterior[entity]
            for token in sorted(row):
                emit(f"POST\t{entity}\t{token}\t{_format_float(row[token])}")
        for token in sorted(index.token_prob):
            emit(f"TOKP\t{token}\t{_format_float(index.token_prob[token])}")
        for entity in sorted(index.entity_prob):
            emit(f"ENTP\t{entity}\t{_format_float(index.entity_prob[entity])}")
        fh.write(f"SHA256 {checksum.hexdigest()}\n")


def _parse_float(text: str, what: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise IndexParseError(f"{what} is not a number: {text!r}")
    if math.isnan(value) or math.isinf(value):
        raise IndexParseError(f"{what} is not finite: {text!r}")
    return value


def _parse_header(line: str) -> IndexMeta:
    parts = line.split(" ")
    if not parts or parts[0] != FORMAT_MAGIC:
        raise IndexVersionError(
            f"unsupported index format (expected {FORMAT_MAGIC} header, got {parts[0]!r})"
        )
    if len(parts) < 8:
        raise IndexParseError(f"header has {len(parts)} fields, expected at least 8")
    alpha = _parse_float(parts[1], "header alpha")
    tau = _parse_float(parts[2], "header tau")
    try:
        n_min, n_max = int(parts[3]), int(parts[4])
        wildcard = {"0": False, "1": True}[parts[5]]
    except (ValueError, KeyError):
        raise IndexParseError(f"bad tokenizer fields in header: {line!r}")
    target_fp = None if parts[6] == "-" else parts[6]
    pivot_fp = None if parts[7] == "-" else parts[7]
    extras: dict[str, str] = {}
    for part in parts[8:]:
        key, sep, value = part.partition("=")
        if not sep:
            raise IndexParseError(f"bad header extra field: {part!r}")
        extras[key] = value
    smoothing = None
    if extras:
        try:
            smoothing = SmoothingMeta(
                beta=_parse_float(extras.pop("beta"), "header beta"),
                universe_size=int(extras.pop("universe")),
                total=_parse_float(extras.pop("total"), "header total"),
            )
        except KeyError as exc:
            raise IndexParseError(f"incomplete smoothing metadata: missing {exc}")
        except ValueError:
            raise IndexParseError("bad smoothing metadata in header")
        if extras:
            raise IndexParseError(f"unknown header fields: {sorted(extras)}")
    try:
        config = TokenizerConfig(n_min, n_max, wildcard)
    except ValueError as exc:
        raise IndexParseError(str(exc))
    return IndexMeta(alpha, tau, config, target_fp, pivot_fp, smoothing)


def deserialize_index(path: str | Path) -> PtiIndex:
    """Read an index written by `serialize_index`, verifying its checksum.

    The checksum is verified before any record is interpreted, so truncated
    or edited files fail loudly rather than loading partially.

    Raises:
        IndexVersionError: unknown format header.
        IndexChecksumError: content does not match the trailing checksum.
        IndexParseError: structural problems (bad records, missing checksum).
    """
    with open(path, encoding="utf-8", newline="\n") as fh:
        lines = fh.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise IndexVersionError("empty index file")
    if not lines[0].split(" ")[:1] == [FORMAT_MAGIC]:
        # Check the magic before anything else so foreign files get the
        # clearer "wrong format" error instead of a checksum complaint.
        raise IndexVersionError(
            f"unsupported index format (expected {FORMAT_MAGIC} header)"
        )
    last = lines[-1]
    if not last.startswith("SHA256 "):
        raise IndexParseError("missing trailing checksum line (file truncated?)")
    expected = last[len("SHA256 ") :]
    body = "".join(line + "\n" for line in lines[:-1])
    actual = hashlib.sha256(body.encode("utf-8")).hexdigest()
    if actual != expected:
        raise IndexChecksumError(
            f"index checksum mismatch: file says {expected[:12]}…, content is {actual[:12]}…"
        )

    meta = _parse_header(lines[0])
    prior: dict[str, dict[str, float]] = {}
    posterior: dict[str, dict[str, float]] = {}
    token_prob: dict[str, float] = {}
    entity_prob: dict[str, float] = {}
    for line_no, line in enumerate(lines[1:-1], 2):
        fields = line.split("\t")
        tag = fields[0]
        if tag in ("PRIOR", "POST"):
            if len(fields) != 4:
                raise IndexParseError(f"line {line_no}: {tag} record needs 4 fields")
            _, key, sub, prob = fields
            rows = prior if tag == "PRIOR" else posterior
            rows.setdefault(key, {})[sub] = _parse_float(prob, f"line {line_no}: probability")
        elif tag in ("TOKP", "ENTP"):
            if len(fields) != 3:
                raise IndexParseError(f"line {line_no}: {tag} record needs 3 fields")
            _, key, prob = fields
            table = token_prob if tag == "TOKP" else entity_prob
            table[key] = _parse_float(prob, f"line {line_no}: probability")
        else:
            raise IndexParseError(f"line {line_no}: unknown record tag {tag!r}")
    return PtiIndex(prior, posterior, token_prob, entity_prob, meta)
