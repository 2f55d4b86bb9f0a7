"""Adapters over Hugging Face transformers checkpoints (masked and causal).

torch and transformers are imported lazily so the rest of the toolkit
works without them. Checkpoints resolve through the standard transformers
cache; set TAXOLM_MODEL_CACHE to point at a different cache directory.
Inference is forced deterministic: eval mode, no grad, CPU by default.
"""

from __future__ import annotations

import os
from collections import OrderedDict
from typing import Sequence

import numpy as np

from .base import (
    CAUSAL,
    MASKED,
    BackendDescriptor,
    LanguageModelBackend,
    TokenizedSentence,
    check_position,
)

CACHE_ENV_VAR = "TAXOLM_MODEL_CACHE"

# keep the last few full-sentence forward passes; scoring walks positions
_SEQUENCE_CACHE_SIZE = 64


def _cache_dir() -> str | None:
    return os.environ.get(CACHE_ENV_VAR) or None


def _vocabulary(tokenizer, size: int) -> tuple[str, ...]:
    known = min(size, len(tokenizer))
    tokens = tokenizer.convert_ids_to_tokens(list(range(known)))
    out: list[str] = []
    seen: set[str] = set()
    for i in range(size):
        token = tokens[i] if i < known else None
        if token is None or token in seen:
            token = f"<taxolm-unused-{i}>"
        seen.add(token)
        out.append(token)
    return tuple(out)


def _single_token_id(tokenizer, surface: str) -> int | None:
    # mid-sentence (space-prefixed) form first: that is where the slot sits
    for text in (" " + surface, surface):
        ids = tokenizer(text, add_special_tokens=False)["input_ids"]
        if len(ids) == 1 and ids[0] != tokenizer.unk_token_id:
            return int(ids[0])
    return None


class TransformersMaskedBackend(LanguageModelBackend):
    """Masked LM adapter (BERT/RoBERTa style checkpoints)."""

    def __init__(self, model_name: str, device: str = "cpu") -> None:
        import torch
        from transformers import AutoModelForMaskedLM, AutoTokenizer

        self._torch = torch
        self._tokenizer = AutoTokenizer.from_pretrained(model_name, cache_dir=_cache_dir())
        self._model = AutoModelForMaskedLM.from_pretrained(model_name, cache_dir=_cache_dir())
        self._model.to(device).eval()
        self._device = device
        size = int(self._model.get_output_embeddings().weight.shape[0])
        self.descriptor = BackendDescriptor(
            name=model_name,
            kind=MASKED,
            vocabulary=_vocabulary(self._tokenizer, size),
            mask_literal=self._tokenizer.mask_token,
            concurrent_safe=False,
        )

    def tokenize(self, sentence: str) -> TokenizedSentence:
        ids = self._tokenizer(sentence, add_special_tokens=False)["input_ids"]
        return TokenizedSentence(tuple(int(i) for i in ids), sentence)

    def detokenize(self, token_ids: Sequence[int]) -> str:
        return self._tokenizer.decode(list(token_ids))

    def _logprobs_at(self, input_ids: list[int], position: int) -> np.ndarray:
        torch = self._torch
        batch = torch.tensor([input_ids], device=self._device)
        with torch.no_grad():
            logits = self._model(input_ids=batch).logits[0, position]
        return torch.log_softmax(logits.double(), dim=-1).cpu().numpy()

    def mask_fill_logprobs(self, sentence: str) -> np.ndarray:
        mask_id = self._tokenizer.mask_token_id
        ids = [int(i) for i in self._tokenizer(sentence)["input_ids"]]
        positions = [i for i, t in enumerate(ids) if t == mask_id]
        if len(positions) != 1:
            raise ValueError(
                f"sentence must contain the mask literal exactly once, got {len(positions)}: {sentence!r}")
        return self._logprobs_at(ids, positions[0])

    def token_logprob_masked(self, tokens: TokenizedSentence, position: int) -> float:
        check_position(tokens, position)
        ids = list(tokens.tokens)
        target = ids[position]
        ids[position] = self._tokenizer.mask_token_id
        full = [int(i) for i in self._tokenizer.build_inputs_with_special_tokens(ids)]
        positions = [i for i, t in enumerate(full) if t == self._tokenizer.mask_token_id]
        if len(positions) != 1:
            raise ValueError("sentence already contains the mask literal; cannot score it")
        return float(self._logprobs_at(full, positions[0])[target])

    def term_token_id(self, surface: str) -> int | None:
        return _single_token_id(self._tokenizer, surface)


class TransformersCausalBackend(LanguageModelBackend):
    """Causal LM adapter (GPT-2 style checkpoints)."""

    def __init__(self, model_name: str, device: str = "cpu") -> None:
        import torch
        from transformers import AutoModelForCausalLM, AutoTokenizer

        self._torch = torch
        self._tokenizer = AutoTokenizer.from_pretrained(model_name, cache_dir=_cache_dir())
        self._model = AutoModelForCausalLM.from_pretrained(model_name, cache_dir=_cache_dir())
        self._model.to(device).eval()
        self._device = device
        bos = self._tokenizer.bos_token_id
        if bos is None:
            bos = self._tokenizer.eos_token_id
        if bos is None:
            raise ValueError(f"{model_name}: no BOS/EOS token to condition the first position on")
        self._bos = int(bos)
        self._cache: OrderedDict[tuple[int, ...], np.ndarray] = OrderedDict()
        size = int(self._model.get_output_embeddings().weight.shape[0])
        self.descriptor = BackendDescriptor(
            name=model_name,
            kind=CAUSAL,
            vocabulary=_vocabulary(self._tokenizer, size),
            mask_literal=None,
            concurrent_safe=False,
        )

    def tokenize(self, sentence: str) -> TokenizedSentence:
        ids = self._tokenizer(sentence, add_special_tokens=False)["input_ids"]
        return TokenizedSentence(tuple(int(i) for i in ids), sentence)

    def detokenize(self, token_ids: Sequence[int]) -> str:
        return self._tokenizer.decode(list(token_ids))

    def _sequence_logprobs(self, ids: tuple[int, ...]) -> np.ndarray:
        """Per-position log P(w_i | BOS, w_<i) for the whole sentence, cached."""
        hit = self._cache.get(ids)
        if hit is not None:
            self._cache.move_to_end(ids)
            return hit
        torch = self._torch
        batch = torch.tensor([[self._bos, *ids]], device=self._device)
        with torch.no_grad():
            logits = self._model(input_ids=batch).logits[0]
        # row j predicts input position j + 1, so rows 0..n-1 cover the sentence
        logprobs = torch.log_softmax(logits[:-1].double(), dim=-1)
        targets = torch.tensor(ids).unsqueeze(1)
        out = logprobs.gather(1, targets).squeeze(1).cpu().numpy()
        self._cache[ids] = out
        if len(self._cache) > _SEQUENCE_CACHE_SIZE:
            self._cache.popitem(last=False)
        return out

    def token_logprob_causal(self, tokens: TokenizedSentence, position: int) -> float:
        check_position(tokens, position)
        return float(self._sequence_logprobs(tokens.tokens)[position])

    def term_token_id(self, surface: str) -> int | None:
        return _single_token_id(self._tokenizer, surface)
