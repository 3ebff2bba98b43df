"""Character n-gram decomposition of mention strings.

Mentions are broken into the set of all character n-grams with lengths in a
configured inclusive range. Set semantics: repeated substrings contribute one
token. An optional wildcard mode adds, for every token, each variant with one
position replaced by ``*``; wildcard tokens are matched by string equality
like any other token, so the expansion must be applied on both the build and
the query side.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = ["TokenizerConfig", "tokenize", "wildcard_expand", "mention_tokens"]

WILDCARD = "*"


@dataclass(frozen=True)
class TokenizerConfig:
    """N-gram length bounds and wildcard switch; hashable and immutable."""

    n_min: int = 2
    n_max: int = 5
    wildcard: bool = False

    def __post_init__(self):
        if self.n_min < 1:
            raise ValueError(f"n_min must be >= 1, got {self.n_min}")
        if self.n_max < self.n_min:
            raise ValueError(
                f"n_max must be >= n_min, got n_min={self.n_min}, n_max={self.n_max}"
            )


def tokenize(mention: str, config: TokenizerConfig = TokenizerConfig()) -> set[str]:
    """Set of character n-grams of ``mention`` for each length in the range.

    A mention shorter than ``n_min`` yields itself as its only token, so no
    mention ever tokenizes to nothing. Length is counted in code points.
    """
    if not mention:
        raise ValueError("cannot tokenize an empty mention")
    if len(mention) < config.n_min:
        return {mention}
    tokens: set[str] = set()
    for n in range(config.n_min, config.n_max + 1):
        for i in range(len(mention) - n + 1):
            tokens.add(mention[i : i + n])
    return tokens


def wildcard_expand(tokens: set[str]) -> set[str]:
    """Originals plus every single-position ``*`` substitution of each token."""
    expanded = set(tokens)
    for token in tokens:
        for i in range(len(token)):
            expanded.add(token[:i] + WILDCARD + token[i + 1 :])
    return expanded


def mention_tokens(mention: str, config: TokenizerConfig) -> set[str]:
    """Full decomposition used on both index and query side."""
    tokens = tokenize(mention, config)
    if config.wildcard:
        tokens = wildcard_expand(tokens)
    return tokens
