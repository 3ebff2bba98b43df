"""Candidate generators with the scikit-learn estimator protocol.

Both estimators follow the usual contract: hyperparameters are constructor
arguments stored verbatim, ``fit`` builds the index and returns ``self``,
fitted state lives in trailing-underscore attributes, and ``get_params`` /
``set_params`` / ``clone`` work as for any other estimator, which makes the
generators usable with stock grid-search utilities.
"""

from __future__ import annotations

from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .baselines import WikiPriorsIndex, build_wikipriors, wikipriors_generate
from .corpus import Corpus
from .index import (
    CountTable,
    apply_threshold,
    build_index,
    count_cooccurrences,
    empty_count_table,
)
from .scorer import (
    DEFAULT_K,
    CandidateList,
    candidate_space,
    normalize_scores,
    score_entities,
    top_k,
)
from .tokenizer import TokenizerConfig
from .validation import check_non_negative, check_positive_int, check_unit_interval

__all__ = ["PtiCandidateGenerator", "WikiPriorsCandidateGenerator"]


def _as_count_table(data: Corpus | CountTable, config: TokenizerConfig) -> CountTable:
    if isinstance(data, CountTable):
        if data.tokenizer != config:
            raise ValueError(
                "precomputed count table was built with a different tokenizer: "
                f"{data.tokenizer} vs {config}"
            )
        return data
    if isinstance(data, Corpus):
        return count_cooccurrences(data, config)
    raise TypeError(f"expected Corpus or CountTable, got {type(data).__name__}")


class _GeneratorMixin:
    def _check_fitted(self) -> None:
        if not hasattr(self, "index_"):
            raise NotFittedError(
                f"This {type(self).__name__} instance is not fitted yet; "
                "call 'fit' before generating candidates."
            )

    def predict(self, mentions) -> list[str | None]:
        """Single best entity per mention (None when nothing is retrievable)."""
        out = []
        for mention in mentions:
            candidates = self.generate(mention, k=1)
            out.append(candidates.entities()[0] if len(candidates) else None)
        return out


class PtiCandidateGenerator(_GeneratorMixin, BaseEstimator):
    """Token-index candidate generator.

    Parameters
    ----------
    ngram_min, ngram_max : int
        Inclusive character n-gram length range for tokenization.
    wildcard : bool
        Also index and query single-position wildcard variants of each token.
    alpha : float
        Weight applied to pivot-language counts before blending with
        target-language counts.
    lam : float
        Weight of the posterior P(token | entity) term at query time;
        counterbalances entity popularity.
    tau : float
        Pruning threshold: stored probabilities below it are dropped after
        the index is built.
    k : int
        Default number of candidates per query.

    Attributes
    ----------
    index_ : PtiIndex
        The fitted probability index.

    Examples
    --------
    >>> corpus = Corpus([("roma", "Q220"), ("rome", "Q220"), ("parigi", "Q90")])
    >>> gen = PtiCandidateGenerator(k=2).fit(corpus)
    >>> gen.generate("roma").entities()[0]
    'Q220'
    """

    def __init__(
        self,
        ngram_min: int = 2,
        ngram_max: int = 5,
        wildcard: bool = False,
        alpha: float = 1.0,
        lam: float = 1.0,
        tau: float = 0.0,
        k: int = DEFAULT_K,
    ):
        self.ngram_min = ngram_min
        self.ngram_max = ngram_max
        self.wildcard = wildcard
        self.alpha = alpha
        self.lam = lam
        self.tau = tau
        self.k = k

    def fit(self, pivot: Corpus | CountTable, target: Corpus | CountTable | None = None):
        """Build the index from a pivot and an optional target corpus.

        Either argument may be a precomputed `CountTable` (built with a
        matching tokenizer), which lets parameter sweeps over the blending
        and scoring weights reuse one counting pass. With ``target=None``
        the index is the zero-shot, pivot-only one.
        """
        config = TokenizerConfig(self.ngram_min, self.ngram_max, self.wildcard)
        check_non_negative(self.alpha, "alpha")
        check_non_negative(self.lam, "lam")
        check_unit_interval(self.tau, "tau")
        check_positive_int(self.k, "k")
        pivot_counts = _as_count_table(pivot, config)
        if target is None:
            target_counts = empty_count_table(config)
        else:
            target_counts = _as_count_table(target, config)
        index = build_index(target_counts, pivot_counts, self.alpha)
        if self.tau > 0:
            index = apply_threshold(index, self.tau)
        self.index_ = index
        return self

    def generate(
        self, mention: str, k: int | None = None, normalize: bool = False
    ) -> CandidateList:
        """Top-K candidates for one mention (``k=None`` uses the default)."""
        self._check_fitted()
        scores = score_entities(self.index_, mention, self.lam)
        if normalize and scores.scores:
            scores = normalize_scores(scores)
        return top_k(scores, self.k if k is None else k)

    def candidate_space(self) -> set[str]:
        """All entities this fitted generator could ever return."""
        self._check_fitted()
        return candidate_space(self.index_)


class WikiPriorsCandidateGenerator(_GeneratorMixin, BaseEstimator):
    """Frequency-prior baseline generator with the same interface.

    Parameters
    ----------
    k : int
        Default number of candidates per query.
    zero_shot : bool
        Ignore target-language tables at query time even if fitted with a
        target corpus.

    Attributes
    ----------
    index_ : WikiPriorsIndex
        The fitted per-language prior tables.
    """

    def __init__(self, k: int = DEFAULT_K, zero_shot: bool = False):
        self.k = k
        self.zero_shot = zero_shot

    def fit(self, pivot: Corpus, target: Corpus | None = None):
        if not isinstance(pivot, Corpus) or (
            target is not None and not isinstance(target, Corpus)
        ):
            raise TypeError("WikiPriorsCandidateGenerator fits from Corpus objects only")
        check_positive_int(self.k, "k")
        self.index_ = build_wikipriors(pivot, target)
        return self

    def generate(self, mention: str, k: int | None = None) -> CandidateList:
        self._check_fitted()
        return wikipriors_generate(
            self.index_, mention, self.k if k is None else k, self.zero_shot
        )

    def candidate_space(self) -> set[str]:
        self._check_fitted()
        return self.index_.candidate_space()
