"""Character n-gram decomposition and wildcard expansion."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pti import TokenizerConfig, mention_tokens, tokenize, wildcard_expand

mentions = st.text(
    alphabet=st.characters(blacklist_categories=("Cs",)), min_size=1, max_size=12
)


class TestTokenizerConfig:
    def test_defaults(self):
        config = TokenizerConfig()
        assert (config.n_min, config.n_max, config.wildcard) == (2, 5, False)

    @pytest.mark.parametrize("n_min, n_max", [(0, 3), (-1, 2), (4, 3)])
    def test_invalid_ranges(self, n_min, n_max):
        with pytest.raises(ValueError):
            TokenizerConfig(n_min=n_min, n_max=n_max)

    def test_hashable_and_comparable(self):
        assert TokenizerConfig(2, 5) == TokenizerConfig(2, 5)
        assert len({TokenizerConfig(2, 5), TokenizerConfig(2, 5)}) == 1


class TestTokenize:
    def test_bigrams_only(self):
        assert tokenize("roma", TokenizerConfig(2, 2)) == {"ro", "om", "ma"}

    def test_range_of_lengths(self):
        assert tokenize("rom", TokenizerConfig(2, 3)) == {"ro", "om", "rom"}

    def test_repeated_substrings_collapse(self):
        """Set semantics: 'aaaa' has one distinct bigram."""
        assert tokenize("aaaa", TokenizerConfig(2, 2)) == {"aa"}

    def test_short_mention_yields_itself(self):
        assert tokenize("a", TokenizerConfig(2, 5)) == {"a"}

    def test_length_counted_in_code_points(self):
        assert tokenize("日本語", TokenizerConfig(2, 2)) == {"日本", "本語"}

    def test_spaces_are_ordinary_characters(self):
        assert "w y" in tokenize("new york", TokenizerConfig(3, 3))

    def test_empty_mention_rejected(self):
        with pytest.raises(ValueError):
            tokenize("", TokenizerConfig(2, 5))

    @given(mentions, st.integers(1, 4), st.integers(0, 3))
    @settings(max_examples=200)
    def test_token_count_bound(self, mention, n_min, spread):
        """At most L - n + 1 n-grams exist per length, fewer after dedup."""
        config = TokenizerConfig(n_min, n_min + spread)
        tokens = tokenize(mention, config)
        bound = sum(
            max(0, len(mention) - n + 1) for n in range(config.n_min, config.n_max + 1)
        )
        assert len(tokens) <= max(1, bound)
        assert tokens  # a mention never decomposes to nothing

    @given(mentions)
    def test_short_inputs_map_to_themselves(self, mention):
        config = TokenizerConfig(2, 5)
        if len(mention) < 2:
            assert tokenize(mention, config) == {mention}


class TestWildcardExpand:
    def test_single_token(self):
        assert wildcard_expand({"ro"}) == {"ro", "*o", "r*"}

    def test_originals_always_kept(self):
        tokens = {"ro", "om"}
        assert tokens <= wildcard_expand(tokens)

    def test_expansion_of_existing_wildcard_token(self):
        """A literal '*' position expands like any other character."""
        assert wildcard_expand({"r*"}) == {"r*", "**"}

    @given(st.sets(st.text(min_size=1, max_size=5), min_size=1, max_size=8))
    @settings(max_examples=200)
    def test_size_bound(self, tokens):
        """|expand(S)| <= |S| * (1 + max token length)."""
        expanded = wildcard_expand(tokens)
        longest = max(len(t) for t in tokens)
        assert len(expanded) <= len(tokens) * (1 + longest)

    def test_idempotent_on_fixed_points(self):
        assert wildcard_expand({"*"}) == {"*"}


class TestMentionTokens:
    def test_without_wildcard_equals_tokenize(self):
        config = TokenizerConfig(2, 3)
        assert mention_tokens("roma", config) == tokenize("roma", config)

    def test_with_wildcard_superset(self):
        plain = TokenizerConfig(2, 2)
        wild = TokenizerConfig(2, 2, wildcard=True)
        assert mention_tokens("roma", plain) < mention_tokens("roma", wild)

    def test_wildcard_match_is_string_equality(self):
        """'r*' from 'ro' and from 'ra' are the same token, so a shared
        wildcard variant is the mechanism by which near-miss spellings meet."""
        wild = TokenizerConfig(2, 2, wildcard=True)
        assert mention_tokens("ro", wild) & mention_tokens("ra", wild) == {"r*"}
