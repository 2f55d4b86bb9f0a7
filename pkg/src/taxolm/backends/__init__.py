"""Model backends: the deterministic mock plus transformers adapters."""

from __future__ import annotations

from .base import (
    CAUSAL,
    MASKED,
    BackendDescriptor,
    LanguageModelBackend,
    TokenizedSentence,
    term_token_ids,
)
from .mock import MockBackend

__all__ = [
    "BackendDescriptor",
    "CAUSAL",
    "LanguageModelBackend",
    "MASKED",
    "MockBackend",
    "TokenizedSentence",
    "load_backend",
    "term_token_ids",
]


def load_backend(spec: str) -> LanguageModelBackend:
    """Build a backend from a model spec string.

    mock:PATH         table-driven mock; kind/vocab declared in the file
    hf-masked:NAME    transformers masked LM checkpoint (name or path)
    hf-causal:NAME    transformers causal LM checkpoint (name or path)
    """
    scheme, sep, rest = spec.partition(":")
    if not sep or not rest:
        raise ValueError(f"bad model spec {spec!r}; expected scheme:name, e.g. mock:table.tsv")
    if scheme == "mock":
        return MockBackend.from_table_file(rest)
    if scheme == "hf-masked":
        from .hf import TransformersMaskedBackend

        return TransformersMaskedBackend(rest)
    if scheme == "hf-causal":
        from .hf import TransformersCausalBackend

        return TransformersCausalBackend(rest)
    raise ValueError(f"unknown backend scheme {scheme!r}; expected mock, hf-masked or hf-causal")
