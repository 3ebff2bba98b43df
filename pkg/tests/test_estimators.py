"""Scikit-learn protocol compliance and estimator behaviour."""

from __future__ import annotations

import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from pti import (
    Corpus,
    PtiCandidateGenerator,
    TokenizerConfig,
    WikiPriorsCandidateGenerator,
    build_index,
    count_cooccurrences,
    empty_count_table,
    generate_synthetic,
)


@pytest.fixture
def pivot():
    return generate_synthetic(20, 200, "abcd", seed=0, language="pl")


@pytest.fixture
def target():
    return generate_synthetic(15, 120, "abcd", seed=1, language="tl")


class TestSklearnProtocol:
    def test_get_params_round_trip(self):
        est = PtiCandidateGenerator(ngram_min=3, ngram_max=4, alpha=0.4, lam=0.2, tau=0.01, k=10)
        params = est.get_params()
        assert params["alpha"] == 0.4
        assert params["lam"] == 0.2
        rebuilt = PtiCandidateGenerator(**params)
        assert rebuilt.get_params() == params

    def test_set_params_returns_self(self):
        est = PtiCandidateGenerator()
        assert est.set_params(alpha=0.1, k=7) is est
        assert est.alpha == 0.1 and est.k == 7

    def test_set_params_rejects_unknown(self):
        with pytest.raises(ValueError):
            PtiCandidateGenerator().set_params(bogus=1)

    def test_clone_copies_params_not_fit_state(self, pivot):
        est = PtiCandidateGenerator(alpha=0.4).fit(pivot)
        fresh = clone(est)
        assert fresh.get_params() == est.get_params()
        assert not hasattr(fresh, "index_")

    def test_not_fitted_errors(self):
        est = PtiCandidateGenerator()
        with pytest.raises(NotFittedError):
            est.generate("roma")
        with pytest.raises(NotFittedError):
            est.predict(["roma"])
        with pytest.raises(NotFittedError):
            est.candidate_space()

    def test_wikipriors_protocol(self, pivot):
        est = WikiPriorsCandidateGenerator(k=5, zero_shot=True)
        assert clone(est).get_params() == {"k": 5, "zero_shot": True}
        with pytest.raises(NotFittedError):
            est.generate("roma")
        assert est.fit(pivot) is est
        assert hasattr(est, "index_")


class TestPtiFit:
    def test_fit_returns_self_and_sets_index(self, pivot):
        est = PtiCandidateGenerator()
        assert est.fit(pivot) is est
        assert est.index_.meta.alpha == 1.0

    def test_zero_shot_fit_without_target(self, pivot):
        est = PtiCandidateGenerator().fit(pivot)
        config = TokenizerConfig(2, 5)
        expected = build_index(
            empty_count_table(config), count_cooccurrences(pivot, config), 1.0
        )
        assert est.index_ == expected

    def test_fit_from_corpus_equals_fit_from_counts(self, pivot, target):
        config = TokenizerConfig(2, 5)
        from_corpora = PtiCandidateGenerator(alpha=0.4).fit(pivot, target)
        from_counts = PtiCandidateGenerator(alpha=0.4).fit(
            count_cooccurrences(pivot, config), count_cooccurrences(target, config)
        )
        assert from_corpora.index_ == from_counts.index_

    def test_tau_applied_during_fit(self, pivot):
        plain = PtiCandidateGenerator().fit(pivot)
        pruned = PtiCandidateGenerator(tau=0.1).fit(pivot)
        assert pruned.index_.meta.tau == 0.1
        assert pruned.index_.num_prior_entries < plain.index_.num_prior_entries

    def test_mismatched_count_table_rejected(self, pivot):
        counts = count_cooccurrences(pivot, TokenizerConfig(2, 3))
        with pytest.raises(ValueError):
            PtiCandidateGenerator(ngram_min=2, ngram_max=5).fit(counts)

    def test_refit_replaces_index(self, pivot, target):
        est = PtiCandidateGenerator().fit(pivot)
        first = est.index_
        est.fit(target)
        assert est.index_ != first

    @pytest.mark.parametrize(
        "params",
        [
            {"alpha": -1.0},
            {"lam": -0.5},
            {"tau": 1.0},
            {"tau": -0.01},
            {"k": 0},
            {"ngram_min": 0},
            {"ngram_min": 4, "ngram_max": 2},
        ],
    )
    def test_bad_params_rejected_at_fit(self, pivot, params):
        with pytest.raises(ValueError):
            PtiCandidateGenerator(**params).fit(pivot)

    def test_wrong_input_type(self):
        with pytest.raises(TypeError):
            PtiCandidateGenerator().fit(["not", "a", "corpus"])


class TestGenerateAndPredict:
    def test_generate_uses_default_k(self, pivot):
        est = PtiCandidateGenerator(k=3).fit(pivot)
        mention = sorted(pivot.mention_set)[0]
        assert len(est.generate(mention)) <= 3

    def test_generate_k_override(self, pivot):
        est = PtiCandidateGenerator(k=3).fit(pivot)
        mention = sorted(pivot.mention_set)[0]
        assert len(est.generate(mention, k=1)) == 1

    def test_generate_normalize_keeps_ranking(self, pivot):
        est = PtiCandidateGenerator(k=10).fit(pivot)
        mention = sorted(pivot.mention_set)[0]
        raw = est.generate(mention)
        norm = est.generate(mention, normalize=True)
        assert raw.entities() == norm.entities()
        assert sum(score for _, score in norm) <= 1.0 + 1e-9

    def test_predict_returns_top_entity_or_none(self):
        corpus = Corpus([("roma", "E1", 3), ("rom", "E2", 1)], "it")
        est = PtiCandidateGenerator(ngram_min=2, ngram_max=2).fit(corpus)
        assert est.predict(["roma", "zzzz"]) == ["E1", None]

    def test_estimator_matches_functional_path(self, pivot):
        from pti import score_entities, top_k

        est = PtiCandidateGenerator(lam=0.4, k=5).fit(pivot)
        mention = sorted(pivot.mention_set)[2]
        direct = top_k(score_entities(est.index_, mention, 0.4), 5)
        assert est.generate(mention).candidates == direct.candidates

    def test_candidate_space_covers_generated(self, pivot, target):
        est = PtiCandidateGenerator(alpha=0.4).fit(pivot, target)
        space = est.candidate_space()
        assert space == set(pivot.entity_set) | set(target.entity_set)
        for mention in sorted(pivot.mention_set)[:10]:
            assert set(est.generate(mention).entities()) <= space


class TestWikiPriorsEstimator:
    def test_fit_generate(self, pivot, target):
        est = WikiPriorsCandidateGenerator(k=5).fit(pivot, target)
        mention = sorted(target.mention_set)[0]
        result = est.generate(mention)
        assert len(result) <= 5

    def test_zero_shot_param_matters(self, pivot):
        target = Corpus([("onlyhere", "TX", 4)], "tl")
        supervised = WikiPriorsCandidateGenerator(k=5).fit(pivot, target)
        zero_shot = WikiPriorsCandidateGenerator(k=5, zero_shot=True).fit(pivot, target)
        assert supervised.generate("onlyhere").entities() == ["TX"]
        assert zero_shot.generate("onlyhere").entities() == []

    def test_rejects_count_tables(self, pivot):
        counts = count_cooccurrences(pivot, TokenizerConfig(2, 3))
        with pytest.raises(TypeError):
            WikiPriorsCandidateGenerator().fit(counts)

    def test_predict(self, pivot):
        est = WikiPriorsCandidateGenerator().fit(pivot)
        mention = sorted(pivot.mention_set)[0]
        prediction = est.predict([mention])[0]
        assert prediction in pivot.entity_set
