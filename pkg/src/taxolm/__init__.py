"""Zero-shot taxonomy induction from pretrained language models.

Arrange a flat terminology into a graph of is-a edges by querying a
language model: mask filling restricted to the terminology, unrestricted
mask filling, or sentence scoring of candidate pairs. Includes edge-level
evaluation, prompt-frequency and single-token diagnostics, and a CLI.
"""

__version__ = "0.1.0"

from .analysis import (
    PromptFrequency,
    SingleTokenReport,
    count_prompt_frequency,
    filter_single_token,
    single_token_report,
)
from .backends import (
    BackendDescriptor,
    LanguageModelBackend,
    MockBackend,
    TokenizedSentence,
    load_backend,
    term_token_ids,
)
from .errors import CapabilityError, DataFormatError, TaxoLMError
from .evaluation import EdgeMetrics, average_metrics, evaluate, stats
from .induction import (
    InductionConfig,
    ScoredCandidate,
    TaxonomyInducer,
    VocabularyMask,
    build_vocab_mask,
    induce,
    retrieve_restricted,
    retrieve_unrestricted,
    select_scored,
)
from .prompts import PromptTemplate, builtin_templates, load_templates, lookup, render, render_masked
from .scoring import SentenceScore, score_causal, score_masked, score_sentence
from .terminology import (
    Taxonomy,
    TaxonomyEdge,
    Term,
    Terminology,
    canonicalize,
    load_taxonomy,
    load_terminology,
    write_taxonomy,
)

__all__ = [
    "BackendDescriptor",
    "CapabilityError",
    "DataFormatError",
    "EdgeMetrics",
    "InductionConfig",
    "LanguageModelBackend",
    "MockBackend",
    "PromptFrequency",
    "PromptTemplate",
    "ScoredCandidate",
    "SentenceScore",
    "SingleTokenReport",
    "TaxoLMError",
    "Taxonomy",
    "TaxonomyEdge",
    "TaxonomyInducer",
    "Term",
    "Terminology",
    "TokenizedSentence",
    "VocabularyMask",
    "average_metrics",
    "build_vocab_mask",
    "builtin_templates",
    "canonicalize",
    "count_prompt_frequency",
    "evaluate",
    "filter_single_token",
    "induce",
    "load_backend",
    "load_taxonomy",
    "load_templates",
    "load_terminology",
    "lookup",
    "render",
    "render_masked",
    "retrieve_restricted",
    "retrieve_unrestricted",
    "score_causal",
    "score_masked",
    "score_sentence",
    "select_scored",
    "single_token_report",
    "stats",
    "term_token_ids",
    "write_taxonomy",
]
