"""Deterministic table-driven backend for offline tests and fixtures.

The table maps (context, token) -> probability. Contexts are whole masked
sentences for masked backends and space-joined token prefixes for causal
backends (the empty prefix keys the first-token distribution). Probability
mass the table leaves unassigned is spread uniformly over the rest of the
vocabulary, so every distribution sums to one; an empty table is the
uniform backend. Tokenization is whitespace splitting over a fixed
vocabulary. Everything is a dict lookup: bit-identical across runs.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from ..errors import DataFormatError
from .base import (
    CAUSAL,
    MASKED,
    BackendDescriptor,
    LanguageModelBackend,
    TokenizedSentence,
    check_position,
)

DEFAULT_MASK = "[MASK]"

# table rows may be keyed (context, token) -> prob or context -> {token: prob}
TableLike = Mapping


def _normalize_context(context: str) -> str:
    return " ".join(context.split())


class MockBackend(LanguageModelBackend):
    """Whitespace-tokenizing backend scored from an explicit probability table."""

    def __init__(
        self,
        kind: str,
        vocabulary: Iterable[str],
        table: TableLike | None = None,
        mask_literal: str | None = None,
        name: str = "mock",
    ) -> None:
        vocab = tuple(vocabulary)
        if kind == MASKED:
            if mask_literal is None:
                mask_literal = DEFAULT_MASK
            if mask_literal not in vocab:
                vocab = vocab + (mask_literal,)
        self.descriptor = BackendDescriptor(
            name=name,
            kind=kind,
            vocabulary=vocab,
            mask_literal=mask_literal if kind == MASKED else None,
            concurrent_safe=True,
        )
        self._index = {token: i for i, token in enumerate(vocab)}
        self._table: dict[str, dict[str, float]] = {}
        for key, value in (table or {}).items():
            if isinstance(key, tuple):
                context, token = key
                self._table.setdefault(_normalize_context(context), {})[token] = float(value)
            else:
                self._table[_normalize_context(key)] = {t: float(p) for t, p in value.items()}
        for context, row in self._table.items():
            unknown = [t for t in row if t not in self._index]
            if unknown:
                raise DataFormatError(
                    f"mock table: context {context!r} scores non-vocabulary token(s) {unknown}")
            if any(p < 0.0 or p > 1.0 for p in row.values()):
                raise DataFormatError(f"mock table: context {context!r} has probabilities outside [0, 1]")
            if sum(row.values()) > 1.0 + 1e-9:
                raise DataFormatError(f"mock table: context {context!r} probabilities sum past 1")

    # --- tokenization ----------------------------------------------------

    def tokenize(self, sentence: str) -> TokenizedSentence:
        words = sentence.split()
        unknown = [w for w in words if w not in self._index]
        if unknown:
            raise ValueError(f"mock backend: token(s) not in vocabulary: {unknown}")
        return TokenizedSentence(tuple(self._index[w] for w in words), sentence)

    def detokenize(self, token_ids: Sequence[int]) -> str:
        return " ".join(self.descriptor.vocabulary[i] for i in token_ids)

    # --- distributions ---------------------------------------------------

    def _distribution(self, context: str) -> np.ndarray:
        row = self._table.get(_normalize_context(context), {})
        size = len(self.descriptor.vocabulary)
        assigned = sum(row.values())
        n_rest = size - len(row)
        fill = max(0.0, 1.0 - assigned) / n_rest if n_rest else 0.0
        probs = np.full(size, fill, dtype=np.float64)
        for token, p in row.items():
            probs[self._index[token]] = p
        with np.errstate(divide="ignore"):
            return np.log(probs)

    def mask_fill_logprobs(self, sentence: str) -> np.ndarray:
        self._require(MASKED)
        occurrences = sentence.split().count(self.descriptor.mask_literal)
        if occurrences != 1:
            raise ValueError(
                f"sentence must contain the mask literal exactly once, got {occurrences}: {sentence!r}")
        return self._distribution(sentence)

    def token_logprob_causal(self, tokens: TokenizedSentence, position: int) -> float:
        self._require(CAUSAL)
        check_position(tokens, position)
        prefix = self.detokenize(tokens.tokens[:position])
        return float(self._distribution(prefix)[tokens.tokens[position]])

    def token_logprob_masked(self, tokens: TokenizedSentence, position: int) -> float:
        self._require(MASKED)
        check_position(tokens, position)
        words = [self.descriptor.vocabulary[i] for i in tokens.tokens]
        words[position] = self.descriptor.mask_literal
        return float(self.mask_fill_logprobs(" ".join(words))[tokens.tokens[position]])

    # --- file format -----------------------------------------------------

    @classmethod
    def from_table_file(cls, path: str | Path, name: str | None = None) -> "MockBackend":
        """Load a backend from a TSV of  context<TAB>token<TAB>probability  rows.

        Comment lines declare the backend itself:

            # kind: masked            (or causal)
            # mask: [MASK]            (masked backends; defaults to [MASK])
            # vocab: trout fish ...   (space-separated token list)
        """
        path = Path(path)
        kind: str | None = None
        mask_literal: str | None = None
        vocabulary: tuple[str, ...] | None = None
        table: dict[tuple[str, str], float] = {}
        for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
            if not line.strip():
                continue
            if line.lstrip().startswith("#"):
                body = line.lstrip()[1:].strip()
                key, sep, value = body.partition(":")
                if not sep:
                    continue  # plain comment
                key = key.strip().lower()
                value = value.strip()
                if key == "kind":
                    kind = value
                elif key == "mask":
                    mask_literal = value
                elif key == "vocab":
                    vocabulary = tuple(value.split())
                continue
            cols = line.split("\t")
            if len(cols) != 3:
                raise DataFormatError(
                    f"{path}: row {lineno}: expected context<TAB>token<TAB>probability, got {len(cols)} column(s)")
            context, token, prob_raw = cols
            try:
                prob = float(prob_raw)
            except ValueError as exc:
                raise DataFormatError(f"{path}: row {lineno}: bad probability {prob_raw!r}") from exc
            table[(context, token)] = prob
        if kind is None:
            raise DataFormatError(f"{path}: missing '# kind:' directive")
        if vocabulary is None:
            raise DataFormatError(f"{path}: missing '# vocab:' directive")
        return cls(kind, vocabulary, table, mask_literal=mask_literal, name=name or f"mock:{path.name}")
