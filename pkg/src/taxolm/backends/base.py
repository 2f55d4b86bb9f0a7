"""Language-model backend abstraction.

Two capabilities cover all induction methods: a mask-fill log-probability
distribution over the vocabulary (masked models) and per-token conditional
log-probabilities (masked or causal models). Scores stay in log space end
to end; exp is monotonic, so every downstream ranking is unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import CapabilityError
from ..terminology import Term, Terminology

MASKED = "masked"
CAUSAL = "causal"


@dataclass(frozen=True)
class BackendDescriptor:
    """What a backend is and what it can do."""

    name: str
    kind: str
    vocabulary: tuple[str, ...]
    mask_literal: str | None = None
    concurrent_safe: bool = False

    def __post_init__(self) -> None:
        if self.kind not in (MASKED, CAUSAL):
            raise ValueError(f"unknown backend kind {self.kind!r}")
        if not self.vocabulary:
            raise ValueError("vocabulary must be non-empty")
        if len(set(self.vocabulary)) != len(self.vocabulary):
            raise ValueError("vocabulary contains duplicate tokens")
        if self.kind == MASKED:
            if not self.mask_literal:
                raise ValueError("masked backends must declare a mask literal")
            if self.mask_literal not in self.vocabulary:
                raise ValueError("mask literal must be a vocabulary token")
        elif self.mask_literal is not None:
            raise ValueError("causal backends have no mask literal")


@dataclass(frozen=True)
class TokenizedSentence:
    """Token ids for one sentence, excluding any special delimiter tokens."""

    tokens: tuple[int, ...]
    text: str

    def __len__(self) -> int:
        return len(self.tokens)


def check_position(tokens: TokenizedSentence, position: int) -> None:
    if not 0 <= position < len(tokens):
        raise IndexError(f"position {position} out of range for a {len(tokens)}-token sentence")


class LanguageModelBackend:
    """Interface every model adapter implements.

    Capability methods raise CapabilityError unless the backend's kind
    provides them; adapters override the ones they support.
    """

    descriptor: BackendDescriptor

    def tokenize(self, sentence: str) -> TokenizedSentence:
        raise NotImplementedError

    def detokenize(self, token_ids: Sequence[int]) -> str:
        raise NotImplementedError

    def mask_fill_logprobs(self, sentence: str) -> np.ndarray:
        """Log-probability vector over the vocabulary for the one masked slot."""
        raise CapabilityError(
            f"backend {self.descriptor.name!r} ({self.descriptor.kind}) does not support mask filling")

    def token_logprob_causal(self, tokens: TokenizedSentence, position: int) -> float:
        """log P(w_i | w_<i); position 0 uses the unconditional first-token distribution."""
        raise CapabilityError(
            f"backend {self.descriptor.name!r} ({self.descriptor.kind}) does not support causal scoring")

    def token_logprob_masked(self, tokens: TokenizedSentence, position: int) -> float:
        """log P(w_i | rest of sentence), via masking position i."""
        raise CapabilityError(
            f"backend {self.descriptor.name!r} ({self.descriptor.kind}) does not support masked scoring")

    def term_token_id(self, surface: str) -> int | None:
        """Vocabulary id if the surface is exactly one token, else None."""
        try:
            tokens = self.tokenize(surface)
        except ValueError:
            return None
        return tokens.tokens[0] if len(tokens) == 1 else None

    def _require(self, kind: str) -> None:
        if self.descriptor.kind != kind:
            raise CapabilityError(
                f"backend {self.descriptor.name!r} is {self.descriptor.kind}; {kind} capability required")


def term_token_ids(backend: LanguageModelBackend, terminology: Terminology) -> dict[Term, int | None]:
    """Map each term to its single-token vocabulary id, or None if multi-token."""
    return {term: backend.term_token_id(term.surface) for term in terminology}
