import pytest

from taxolm.backends.mock import MockBackend
from taxolm.terminology import Terminology

# six-term fixture: five single-token terms plus one multi-word term
FIXTURE_TERMS = ["trout", "fish", "salmon", "animal", "plant", "rainbow trout"]

MASKED_VOCAB = [
    "trout", "fish", "salmon", "animal", "plant", "rainbow", "oak",
    "is", "a", "type", "of", "more", "general", "specific", "than", "kind",
    "[MASK]",
]

MASKED_TABLE = {
    "trout is a type of [MASK]": {"fish": 0.50, "animal": 0.20, "salmon": 0.05},
    "salmon is a type of [MASK]": {"fish": 0.55, "animal": 0.15},
    "fish is a type of [MASK]": {"animal": 0.60},
    "plant is a type of [MASK]": {"animal": 0.05, "fish": 0.02},
    "animal is a type of [MASK]": {"plant": 0.10},
    "rainbow trout is a type of [MASK]": {"fish": 0.40, "trout": 0.30},
}

CAUSAL_VOCAB = [
    "trout", "fish", "salmon", "animal", "plant", "rainbow",
    "is", "a", "type", "of", "more", "general", "specific", "than",
]

CAUSAL_TABLE = {
    "trout is a type of": {"fish": 0.50, "animal": 0.20, "salmon": 0.05},
    "salmon is a type of": {"fish": 0.55, "animal": 0.15},
    "fish is a type of": {"animal": 0.60},
    "plant is a type of": {"animal": 0.05, "fish": 0.02},
    "animal is a type of": {"plant": 0.10},
    "rainbow trout is a type of": {"fish": 0.40, "trout": 0.30},
}


@pytest.fixture
def terminology():
    return Terminology(FIXTURE_TERMS)


@pytest.fixture
def masked_mock():
    return MockBackend("masked", MASKED_VOCAB, MASKED_TABLE)


@pytest.fixture
def causal_mock():
    return MockBackend("causal", CAUSAL_VOCAB, CAUSAL_TABLE)


@pytest.fixture
def uniform_causal_mock():
    return MockBackend("causal", ["a", "b", "c", "d"])


# --- tiny local transformers checkpoints ------------------------------------
#
# Built once per session with fixed seeds and saved to disk, then loaded
# through the standard adapters. Inference is CPU and no-grad, so induced
# outputs are byte-identical across runs.

TINY_WORDS = [
    "[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]",
    "trout", "salmon", "fish", "animal", "plant", "oak", "pine", "tree",
    "rose", "flower", "dog", "cat", "mammal", "bird", "hawk", "eagle",
    "shark", "whale", "apple", "fruit", "carrot", "vegetable",
    "is", "a", "type", "of", "kind", "more", "general", "specific", "than",
]

TINY_GOLD_EDGES = [
    ("trout", "fish"), ("salmon", "fish"), ("shark", "fish"),
    ("whale", "mammal"), ("dog", "mammal"), ("cat", "mammal"),
    ("hawk", "bird"), ("eagle", "bird"),
    ("oak", "tree"), ("pine", "tree"), ("rose", "flower"),
    ("apple", "fruit"), ("carrot", "vegetable"),
    ("fish", "animal"), ("mammal", "animal"), ("bird", "animal"),
    ("tree", "plant"), ("flower", "plant"), ("fruit", "plant"),
    ("vegetable", "plant"),
]

TINY_TERMS = [edge[0] for edge in TINY_GOLD_EDGES]


def _build_tiny_masked(out_dir):
    import torch
    from tokenizers import Tokenizer
    from tokenizers.models import WordPiece
    from tokenizers.normalizers import BertNormalizer
    from tokenizers.pre_tokenizers import BertPreTokenizer
    from tokenizers.processors import TemplateProcessing
    from transformers import BertConfig, BertForMaskedLM, PreTrainedTokenizerFast

    vocab = {w: i for i, w in enumerate(TINY_WORDS)}
    tk = Tokenizer(WordPiece(vocab, unk_token="[UNK]"))
    tk.normalizer = BertNormalizer(lowercase=True)
    tk.pre_tokenizer = BertPreTokenizer()
    tk.post_processor = TemplateProcessing(
        single="[CLS] $A [SEP]",
        pair="[CLS] $A [SEP] $B [SEP]",
        special_tokens=[("[CLS]", vocab["[CLS]"]), ("[SEP]", vocab["[SEP]"])],
    )
    tokenizer = PreTrainedTokenizerFast(
        tokenizer_object=tk, unk_token="[UNK]", pad_token="[PAD]",
        cls_token="[CLS]", sep_token="[SEP]", mask_token="[MASK]")
    torch.manual_seed(0)
    config = BertConfig(
        vocab_size=len(TINY_WORDS), hidden_size=32, num_hidden_layers=1,
        num_attention_heads=2, intermediate_size=64, max_position_embeddings=64)
    model = BertForMaskedLM(config).eval()
    model.save_pretrained(out_dir)
    tokenizer.save_pretrained(out_dir)


def _build_tiny_causal(out_dir):
    import torch
    from tokenizers import Tokenizer
    from tokenizers.models import WordLevel
    from tokenizers.normalizers import Lowercase
    from tokenizers.pre_tokenizers import Whitespace
    from transformers import GPT2Config, GPT2LMHeadModel, PreTrainedTokenizerFast

    words = ["<unk>", "<|endoftext|>"] + [w for w in TINY_WORDS if not w.startswith("[")]
    vocab = {w: i for i, w in enumerate(words)}
    tk = Tokenizer(WordLevel(vocab, unk_token="<unk>"))
    tk.normalizer = Lowercase()
    tk.pre_tokenizer = Whitespace()
    tokenizer = PreTrainedTokenizerFast(
        tokenizer_object=tk, unk_token="<unk>",
        bos_token="<|endoftext|>", eos_token="<|endoftext|>")
    torch.manual_seed(1)
    config = GPT2Config(
        vocab_size=len(words), n_embd=32, n_layer=1, n_head=2,
        n_positions=64, bos_token_id=1, eos_token_id=1)
    model = GPT2LMHeadModel(config).eval()
    model.save_pretrained(out_dir)
    tokenizer.save_pretrained(out_dir)


@pytest.fixture(scope="session")
def tiny_masked_dir(tmp_path_factory):
    pytest.importorskip("torch")
    pytest.importorskip("transformers")
    out = tmp_path_factory.mktemp("tiny-masked-lm")
    _build_tiny_masked(out)
    return str(out)


@pytest.fixture(scope="session")
def tiny_causal_dir(tmp_path_factory):
    pytest.importorskip("torch")
    pytest.importorskip("transformers")
    out = tmp_path_factory.mktemp("tiny-causal-lm")
    _build_tiny_causal(out)
    return str(out)
