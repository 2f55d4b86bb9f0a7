"""Diagnostics: single-token hypernym filtering and prompt corpus frequency.

A single mask slot can only ever predict single-token hypernyms, so the
share of terms whose gold hypernyms are all single tokens bounds what the
mask-fill methods can reach. The frequency counter measures how often each
prompt pattern occurs in a plain-text corpus.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .backends.base import MASKED, LanguageModelBackend
from .errors import CapabilityError
from .evaluation import evaluate
from .induction import InductionConfig, induce
from .terminology import Taxonomy, Term, Terminology


@dataclass(frozen=True)
class SingleTokenReport:
    total_terms: int
    retained_pct: float
    f_original: float
    f_filtered: float
    increase_pct: float


@dataclass(frozen=True)
class PromptFrequency:
    pattern: str
    count: int
    avg_f: float | None = None


def filter_single_token(backend: LanguageModelBackend, gold: Taxonomy) -> tuple[Taxonomy, float]:
    """Keep the hyponym terms whose every gold hypernym is a single token.

    Returns the filtered gold taxonomy and the retained percentage over the
    gold's hyponym terms.
    """
    if backend.descriptor.kind != MASKED:
        raise CapabilityError("single-token filtering requires a masked backend (it supplies the tokenizer)")
    hypernyms_of: dict[Term, set[Term]] = {}
    for edge in gold.edges:
        hypernyms_of.setdefault(edge.hyponym, set()).add(edge.hypernym)
    single: dict[Term, bool] = {}

    def is_single(term: Term) -> bool:
        if term not in single:
            single[term] = backend.term_token_id(term.surface) is not None
        return single[term]

    kept = {h for h, hypernyms in hypernyms_of.items() if all(is_single(t) for t in hypernyms)}
    retained_pct = 100.0 * len(kept) / len(hypernyms_of) if hypernyms_of else 100.0
    filtered = Taxonomy(e for e in gold.edges if e.hyponym in kept)
    return filtered, retained_pct


def single_token_report(
    backend: LanguageModelBackend,
    config: InductionConfig,
    terminology: Terminology,
    gold: Taxonomy,
) -> SingleTokenReport:
    """Induce and evaluate on the original data and on the filtered variant.

    `backend` supplies the tokenizer for the filter; `config.backend` does
    the induction (usually the same object). Filtering removes the dropped
    hyponym terms from both the gold and the terminology, so a dataset with
    no multi-token hypernyms reports an increase of exactly zero.
    """
    f_original = evaluate(induce(config, terminology), gold).f_score
    filtered_gold, retained_pct = filter_single_token(backend, gold)
    kept = {e.hyponym for e in filtered_gold.edges}
    dropped = {e.hyponym for e in gold.edges} - kept
    filtered_terminology = Terminology(t for t in terminology if t not in dropped)
    f_filtered = evaluate(induce(config, filtered_terminology), filtered_gold).f_score
    return SingleTokenReport(
        total_terms=len({e.hyponym for e in gold.edges}),
        retained_pct=retained_pct,
        f_original=f_original,
        f_filtered=f_filtered,
        increase_pct=f_filtered - f_original,
    )


def _normalize(text: str) -> str:
    return re.sub(r"\s+", " ", text.lower())


def _count_overlapping(text: str, pattern: str, start_limit: int) -> int:
    """Occurrences of pattern whose start index is below start_limit."""
    count = 0
    start = text.find(pattern)
    while 0 <= start < start_limit:
        count += 1
        start = text.find(pattern, start + 1)
    return count


def count_prompt_frequency(
    corpus: str | Path | Iterable[str | Path],
    patterns: Sequence[str],
) -> list[PromptFrequency]:
    """Case-insensitive overlapping substring counts over the corpus files.

    Whitespace (including newlines) collapses to single spaces on both
    sides, so patterns match across line breaks; counting needs no
    tokenizer and is exactly reproducible.
    """
    paths = [Path(corpus)] if isinstance(corpus, (str, Path)) else [Path(p) for p in corpus]
    needles = [" ".join(_normalize(p).split()) for p in patterns]
    if any(not n for n in needles):
        raise ValueError("patterns must be non-empty")
    counts = [0] * len(needles)
    max_len = max(len(n) for n in needles)
    for path in paths:
        _count_file(path, needles, max_len, counts)
    return [PromptFrequency(pattern=p, count=c) for p, c in zip(patterns, counts)]


def _count_file(path: Path, needles: list[str], max_len: int, counts: list[int], chunk_size: int = 1 << 20) -> None:
    buffer = ""
    pending_space = False
    with open(path, encoding="utf-8", errors="replace") as fh:
        while True:
            chunk = fh.read(chunk_size)
            if not chunk:
                break
            piece = _normalize(chunk)
            if pending_space and piece.startswith(" "):
                piece = piece[1:]
            pending_space = piece.endswith(" ")
            buffer += piece
            if len(buffer) >= max_len:
                # count starts that cannot be affected by the next chunk,
                # keep a tail so boundary-spanning matches count once
                start_limit = len(buffer) - (max_len - 1)
                for i, needle in enumerate(needles):
                    counts[i] += _count_overlapping(buffer, needle, start_limit)
                buffer = buffer[start_limit:]
    for i, needle in enumerate(needles):
        counts[i] += _count_overlapping(buffer, needle, len(buffer))
