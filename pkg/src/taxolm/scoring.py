"""Sentence scoring: causal log-likelihood and masked pseudo-log-likelihood.

Scores are plain sums of per-token log-probabilities, no length
normalization. The exponentiated form is never materialized: exp is
monotonic, so rankings are identical in log space. Sums use math.fsum,
which makes them independent of position evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import MutableMapping

from .backends.base import CAUSAL, MASKED, LanguageModelBackend


@dataclass(frozen=True)
class SentenceScore:
    """Sum of per-token log-probabilities plus the number of scored tokens."""

    log_score: float
    n_tokens: int

    @property
    def per_token(self) -> float:
        """Length-normalized variant; used only when explicitly requested."""
        return self.log_score / self.n_tokens


CacheLike = MutableMapping


def score_causal(backend: LanguageModelBackend, sentence: str, *, cache: CacheLike | None = None) -> SentenceScore:
    """Left-to-right log-likelihood: sum over i of log P(w_i | w_<i)."""
    return _score(backend, sentence, CAUSAL, cache)


def score_masked(backend: LanguageModelBackend, sentence: str, *, cache: CacheLike | None = None) -> SentenceScore:
    """Pseudo-log-likelihood: sum over i of log P(w_i | sentence with i masked)."""
    return _score(backend, sentence, MASKED, cache)


def score_sentence(backend: LanguageModelBackend, sentence: str, *, cache: CacheLike | None = None) -> SentenceScore:
    """Dispatch to the rule matching the backend kind."""
    return _score(backend, sentence, backend.descriptor.kind, cache)


def _score(backend, sentence, kind, cache):
    key = (backend.descriptor.name, kind, sentence)
    if cache is not None:
        hit = cache.get(key)
        if hit is not None:
            return hit
    tokens = backend.tokenize(sentence)
    if len(tokens) == 0:
        raise ValueError(f"cannot score an empty sentence: {sentence!r}")
    logprob = backend.token_logprob_causal if kind == CAUSAL else backend.token_logprob_masked
    total = math.fsum(logprob(tokens, i) for i in range(len(tokens)))
    score = SentenceScore(log_score=total, n_tokens=len(tokens))
    if cache is not None:
        cache[key] = score
    return score
