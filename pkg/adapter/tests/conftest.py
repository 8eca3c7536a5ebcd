import json
import random
import subprocess
import sys

import pytest
import torch

torch.set_num_threads(1)

RIGHT_WORDS = ["order", "security", "defence", "tradition"]
LEFT_WORDS = ["welfare", "education", "labour", "equality"]
OTHER_WORDS = ["roads", "culture", "environment", "tourism"]
FILLER = ["the", "we", "plan", "support", "for", "country"]
ALL_WORDS = RIGHT_WORDS + LEFT_WORDS + OTHER_WORDS + FILLER

RIGHT_CODES = ["104", "605", "201.1"]
LEFT_CODES = ["202", "504", "403"]
OTHER_CODES = ["501", "0", "411"]


def scale_bench(*argv):
    """Run the workbench CLI; the adapter talks to it only via files."""
    proc = subprocess.run(
        [sys.executable, "-m", "scale_bench.cli", *map(str, argv)],
        capture_output=True,
        text=True,
    )
    return proc


def make_rows(n_manifestos, statements_per, seed, words_per_text=6,
              year_range=(2015, 2021)):
    rng = random.Random(seed)
    rows = []
    for i in range(n_manifestos):
        theta = -0.8 + 1.6 * i / max(n_manifestos - 1, 1)
        p_right = 0.25 * (1 + theta)
        p_left = 0.25 * (1 - theta)
        mid = f"m{i:03d}"
        year = year_range[0] + i % (year_range[1] - year_range[0] + 1)
        for j in range(statements_per):
            u = rng.random()
            if u < p_right:
                words, codes = RIGHT_WORDS, RIGHT_CODES
            elif u < p_right + p_left:
                words, codes = LEFT_WORDS, LEFT_CODES
            else:
                words, codes = OTHER_WORDS, OTHER_CODES
            text = " ".join(
                rng.choice(words) if k % 2 == 0 else rng.choice(FILLER)
                for k in range(words_per_text)
            )
            rows.append({
                "statement_id": f"{mid}-s{j:03d}",
                "manifesto_id": mid,
                "party": f"p{i % 4}",
                "country": f"C{i % 3}",
                "language": "aa",
                "year": year,
                "month": 1 + i % 12,
                "position": j,
                "text": text,
                "code": rng.choice(codes),
            })
    return rows


def write_rows(rows, path):
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row) + "\n")


@pytest.fixture(scope="session")
def tiny_model_dir(tmp_path_factory):
    """A local randomly-initialized encoder + word-level tokenizer; no
    downloads."""
    from tokenizers import Tokenizer, models, pre_tokenizers, processors
    from transformers import BertConfig, BertModel, PreTrainedTokenizerFast

    out = tmp_path_factory.mktemp("tiny-encoder")
    vocab = {"[PAD]": 0, "[UNK]": 1, "[CLS]": 2, "[SEP]": 3}
    for word in ALL_WORDS:
        vocab[word] = len(vocab)
    tok = Tokenizer(models.WordLevel(vocab, unk_token="[UNK]"))
    tok.pre_tokenizer = pre_tokenizers.Whitespace()
    tok.post_processor = processors.TemplateProcessing(
        single="[CLS] $A [SEP]",
        pair="[CLS] $A [SEP] $B [SEP]",
        special_tokens=[("[CLS]", 2), ("[SEP]", 3)],
    )
    fast = PreTrainedTokenizerFast(
        tokenizer_object=tok, pad_token="[PAD]", unk_token="[UNK]",
        cls_token="[CLS]", sep_token="[SEP]",
    )
    torch.manual_seed(0)
    config = BertConfig(
        vocab_size=len(vocab), hidden_size=32, num_hidden_layers=1,
        num_attention_heads=2, intermediate_size=64, max_position_embeddings=512,
    )
    BertModel(config).save_pretrained(out)
    fast.save_pretrained(out)
    return out


@pytest.fixture(scope="session")
def scale_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("scale") / "registry.json"
    proc = scale_bench("registry", "--dump", "--out", path)
    assert proc.returncode == 0, proc.stderr
    return path


@pytest.fixture(scope="session")
def statement_corpus(tmp_path_factory):
    path = tmp_path_factory.mktemp("corpus") / "statements.jsonl"
    write_rows(make_rows(n_manifestos=10, statements_per=20, seed=5), path)
    return path


@pytest.fixture(scope="session")
def chunk_fixture(tmp_path_factory):
    """Long-statement corpus plus its chunk file built by the workbench CLI."""
    base = tmp_path_factory.mktemp("chunks")
    corpus_path = base / "corpus.jsonl"
    write_rows(
        make_rows(n_manifestos=50, statements_per=25, seed=9, words_per_text=10),
        corpus_path,
    )
    chunks_path = base / "chunks.jsonl"
    proc = scale_bench("chunk", "--corpus", corpus_path, "--out", chunks_path,
                       "--max-tokens", "400", "--min-tokens", "100")
    assert proc.returncode == 0, proc.stderr
    return corpus_path, chunks_path
