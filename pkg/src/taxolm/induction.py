"""Hypernym prediction and top-k taxonomy assembly.

Three methods over a fixed terminology:

* restrict_mlm: mask-fill the hypernym slot, keep only probabilities of
  terminology terms that are single vocabulary tokens, take the top k.
* prompt_mlm: the unrestricted variant; the whole vocabulary competes.
* lm_scorer: render the sentence for every candidate pair and rank the
  candidates by sentence score (causal or pseudo-log-likelihood).

All rankings break score ties lexicographically on the candidate surface,
so induction is deterministic for a given backend and fixture.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .backends.base import MASKED, LanguageModelBackend, term_token_ids
from .errors import CapabilityError
from .prompts import PromptTemplate, lookup, render, render_masked
from .scoring import score_sentence
from .terminology import Taxonomy, TaxonomyEdge, Term, Terminology, as_term, canonicalize

logger = logging.getLogger(__name__)

RESTRICT_MLM = "restrict_mlm"
PROMPT_MLM = "prompt_mlm"
LM_SCORER = "lm_scorer"
METHODS = (RESTRICT_MLM, PROMPT_MLM, LM_SCORER)

# word-boundary / continuation markers tokenizers attach to vocabulary entries
_SUBWORD_MARKERS = ("##", "Ġ", "▁")


@dataclass(frozen=True)
class ScoredCandidate:
    """A candidate hypernym with its log-probability or log sentence score."""

    candidate: Term
    log_score: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.log_score):
            raise ValueError(f"non-finite score for candidate {self.candidate.surface!r}")


@dataclass(frozen=True)
class VocabularyMask:
    """Terminology entries that are single vocabulary tokens.

    These are the only terms a single mask slot can predict; `excluded`
    lists the multi-token terms left out.
    """

    entries: tuple[tuple[Term, int], ...]
    excluded: tuple[Term, ...]

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def terms(self) -> tuple[Term, ...]:
        return tuple(term for term, _ in self.entries)


@dataclass
class InductionConfig:
    """Everything one induction run depends on."""

    method: str
    template: PromptTemplate | str
    k: int
    backend: LanguageModelBackend
    length_normalize: bool = False

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if self.k < 1:
            raise ValueError("k must be >= 1")


def build_vocab_mask(backend: LanguageModelBackend, terminology: Terminology) -> VocabularyMask:
    """Select the terminology entries that map to exactly one vocabulary token."""
    if backend.descriptor.kind != MASKED:
        raise CapabilityError("vocabulary masks require a masked backend")
    ids = term_token_ids(backend, terminology)
    entries = tuple((term, i) for term, i in ids.items() if i is not None)
    excluded = tuple(term for term, i in ids.items() if i is None)
    if not entries:
        raise CapabilityError(
            "restrict_mlm is inapplicable here: no terminology term tokenizes to a single vocabulary token")
    if excluded:
        logger.info("vocabulary mask: kept %d term(s), excluded %d multi-token term(s)",
                    len(entries), len(excluded))
    return VocabularyMask(entries=entries, excluded=excluded)


def _top_k(candidates: Iterable[ScoredCandidate], k: int) -> list[ScoredCandidate]:
    ranked = sorted(candidates, key=lambda c: (-c.log_score, c.candidate.surface))
    return ranked[:k]


def retrieve_restricted(
    backend: LanguageModelBackend,
    template: PromptTemplate,
    term: Term | str,
    mask: VocabularyMask,
    k: int,
) -> list[ScoredCandidate]:
    """Top-k mask-fill candidates restricted to the vocabulary mask, self excluded."""
    term = as_term(term)
    if not len(mask):
        raise CapabilityError("empty vocabulary mask")
    sentence = render_masked(template, term, backend.descriptor.mask_literal)
    logprobs = backend.mask_fill_logprobs(sentence)
    candidates = [
        ScoredCandidate(candidate, float(logprobs[token_id]))
        for candidate, token_id in mask.entries
        if candidate != term and math.isfinite(logprobs[token_id])
    ]
    return _top_k(candidates, k)


def token_to_surface(token: str) -> str:
    """Strip word-boundary markers a tokenizer may attach, then canonicalize."""
    for marker in _SUBWORD_MARKERS:
        if token.startswith(marker):
            token = token[len(marker):]
            break
    return canonicalize(token)


def retrieve_unrestricted(
    backend: LanguageModelBackend,
    template: PromptTemplate,
    term: Term | str,
    k: int,
) -> list[ScoredCandidate]:
    """Top-k mask-fill candidates over the whole vocabulary, self excluded.

    Predicted tokens become terms by stripping subword markers; predictions
    matching nothing in the terminology are kept verbatim (they will count
    as precision errors downstream).
    """
    term = as_term(term)
    backend._require(MASKED)
    sentence = render_masked(template, term, backend.descriptor.mask_literal)
    logprobs = backend.mask_fill_logprobs(sentence)
    vocabulary = backend.descriptor.vocabulary
    order = np.argsort(-logprobs, kind="stable")
    out: list[ScoredCandidate] = []
    seen: set[Term] = set()
    pos = 0
    while pos < len(order) and len(out) < k:
        value = float(logprobs[order[pos]])
        if not math.isfinite(value):
            break
        group: list[int] = []
        while pos < len(order) and logprobs[order[pos]] == value:
            group.append(int(order[pos]))
            pos += 1
        scored = []
        for token_id in group:
            surface = token_to_surface(vocabulary[token_id])
            if not surface:
                continue
            candidate = Term(surface)
            if candidate == term or candidate in seen:
                continue
            seen.add(candidate)
            scored.append(ScoredCandidate(candidate, value))
        scored.sort(key=lambda c: c.candidate.surface)
        out.extend(scored)
    return out[:k]


def select_scored(
    backend: LanguageModelBackend,
    template: PromptTemplate,
    term: Term | str,
    terminology: Terminology,
    k: int,
    *,
    cache=None,
    length_normalize: bool = False,
) -> list[ScoredCandidate]:
    """Top-k terminology candidates by the score of the rendered sentence."""
    term = as_term(term)
    if len(terminology) < 2:
        raise ValueError("terminology must contain at least two terms")
    candidates = []
    for other in terminology:
        if other == term:
            continue
        sentence = render(template, term, other)
        score = score_sentence(backend, sentence, cache=cache)
        value = score.per_token if length_normalize else score.log_score
        candidates.append(ScoredCandidate(other, value))
    return _top_k(candidates, k)


class TaxonomyInducer(BaseEstimator):
    """Zero-shot hypernym predictor with a scikit-learn estimator surface.

    `fit` ingests the terminology (the fixed candidate space) and validates
    the method/backend pairing; `predict` returns top-k hypernym surfaces
    per query term; `induce` assembles the predicted taxonomy. Parameters
    follow scikit-learn conventions, so the estimator works with
    `get_params`/`set_params` grid sweeps.
    """

    def __init__(
        self,
        method: str = RESTRICT_MLM,
        template: PromptTemplate | str = "type",
        k: int = 1,
        backend: LanguageModelBackend | None = None,
        length_normalize: bool = False,
    ) -> None:
        self.method = method
        self.template = template
        self.k = k
        self.backend = backend
        self.length_normalize = length_normalize

    def fit(self, X, y=None) -> "TaxonomyInducer":
        """Validate the configuration and build the candidate space from X."""
        if self.backend is None:
            raise ValueError("a backend is required; pass backend=...")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if int(self.k) < 1:
            raise ValueError("k must be >= 1")
        kind = self.backend.descriptor.kind
        if self.method in (RESTRICT_MLM, PROMPT_MLM) and kind != MASKED:
            raise CapabilityError(f"{self.method} requires a masked backend, got {kind}")
        self.terminology_ = X if isinstance(X, Terminology) else Terminology(X)
        self.template_ = self.template if isinstance(self.template, PromptTemplate) else lookup(self.template)
        self.mask_ = build_vocab_mask(self.backend, self.terminology_) if self.method == RESTRICT_MLM else None
        self._cache: dict = {}
        return self

    def _candidates_for(self, term: Term) -> list[ScoredCandidate]:
        if self.method == RESTRICT_MLM:
            return retrieve_restricted(self.backend, self.template_, term, self.mask_, self.k)
        if self.method == PROMPT_MLM:
            return retrieve_unrestricted(self.backend, self.template_, term, self.k)
        return select_scored(
            self.backend, self.template_, term, self.terminology_, self.k,
            cache=self._cache, length_normalize=self.length_normalize)

    def _predict_terms(self, terms: list[Term]) -> list[list[ScoredCandidate]]:
        work = list(dict.fromkeys(terms))
        if self.backend.descriptor.concurrent_safe and len(work) > 1:
            with ThreadPoolExecutor(max_workers=min(8, len(work))) as pool:
                results = dict(zip(work, pool.map(self._candidates_for, work)))
        else:
            results = {term: self._candidates_for(term) for term in work}
        return [results[term] for term in terms]

    def predict(self, X=None) -> list[list[str]]:
        """Top-k hypernym surfaces per term of X (default: the fitted terminology)."""
        check_is_fitted(self, "terminology_")
        terms = self._query_terms(X)
        return [[c.candidate.surface for c in row] for row in self._predict_terms(terms)]

    def induce(self, X=None) -> Taxonomy:
        """Predicted taxonomy over X; terms with no prediction are skipped."""
        check_is_fitted(self, "terminology_")
        terms = list(dict.fromkeys(self._query_terms(X)))
        edges: list[TaxonomyEdge] = []
        skipped: list[Term] = []
        for term, candidates in zip(terms, self._predict_terms(terms)):
            if not candidates:
                skipped.append(term)
                logger.info("no candidates for %r; term skipped", term.surface)
                continue
            edges.extend(TaxonomyEdge(term, c.candidate) for c in candidates)
        self.skipped_terms_ = tuple(skipped)
        return Taxonomy(edges)

    def score(self, X, y) -> float:
        """Edge-level F-score in [0, 1] of the induced taxonomy against gold y."""
        from .evaluation import evaluate

        gold = y if isinstance(y, Taxonomy) else Taxonomy(y)
        return evaluate(self.induce(X), gold).f_score / 100.0

    def _query_terms(self, X) -> list[Term]:
        if X is None:
            return list(self.terminology_)
        return [as_term(t) for t in X]


def induce(config: InductionConfig, terminology: Terminology) -> Taxonomy:
    """Predict up to k hypernym edges per term with the configured method."""
    inducer = TaxonomyInducer(
        method=config.method,
        template=config.template,
        k=config.k,
        backend=config.backend,
        length_normalize=config.length_normalize,
    )
    return inducer.fit(terminology).induce()
