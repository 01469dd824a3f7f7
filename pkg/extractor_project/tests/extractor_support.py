"""Shared helpers for extractor tests: the toy model recipe and TSV builders.

The model is real transformers plumbing (fast tokenizer with offset
mapping, multi-layer encoder emitting all hidden states) but with random
weights and a vocabulary trained on the toy corpus below, so tests run
in seconds without any pretrained download.
"""

import torch
from tokenizers import Tokenizer, models, pre_tokenizers, trainers
from transformers import PreTrainedTokenizerFast, RobertaConfig, RobertaModel

CORPUS = [
    "the portal opened in the old town square",
    "a fox ran through the portal at dawn",
    "the town kept its old stone walls",
    "every dawn the square filled with voices",
    "stone by stone the walls grew higher",
    "the fox watched the town from the hills",
    "voices echoed through the portal all night",
    "the old square was quiet at dawn",
]

N_LAYERS = 3  # hidden states: embedding layer + 3
HIDDEN = 16
MAX_LEN = 16


def build_tiny_model(path) -> str:
    """Train a toy BPE vocabulary and save a random-weight encoder to path."""
    tok = Tokenizer(models.BPE(unk_token="[UNK]"))
    tok.pre_tokenizer = pre_tokenizers.Whitespace()
    trainer = trainers.BpeTrainer(
        vocab_size=120, special_tokens=["[PAD]", "[UNK]"], min_frequency=1
    )
    tok.train_from_iterator(CORPUS, trainer)
    fast = PreTrainedTokenizerFast(
        tokenizer_object=tok,
        unk_token="[UNK]",
        pad_token="[PAD]",
        model_max_length=MAX_LEN,
    )
    fast.save_pretrained(path)

    torch.manual_seed(0)
    config = RobertaConfig(
        vocab_size=len(fast),
        hidden_size=HIDDEN,
        num_hidden_layers=N_LAYERS,
        num_attention_heads=2,
        intermediate_size=32,
        max_position_embeddings=MAX_LEN + 8,
        pad_token_id=fast.pad_token_id,
    )
    RobertaModel(config).save_pretrained(path)
    return str(path)


def make_tsv(path, rows, header=True):
    lines = []
    if header:
        lines.append("word\tperiod\tocc_id\tsentence\tspan_start\tspan_end")
    for row in rows:
        lines.append("\t".join(str(x) for x in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def occ_row(word, period, occ_id, sentence):
    """Row with the span located by surface search in the sentence."""
    start = sentence.index(word)
    return (word, period, occ_id, sentence, start, start + len(word))
