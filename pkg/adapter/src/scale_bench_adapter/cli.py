"""Adapter CLI: fine-tune predictors and emit prediction-exchange files.

Subcommands: train-statements, predict-statements, train-chunks,
predict-chunks, translate.  Configuration comes from a JSON file
(``--config``) holding AdapterConfig fields; a few common fields are
overridable by flags.  Model directories store the head+encoder weights
alongside the resolved config, so prediction needs no extra flags.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import torch

from .config import AdapterConfig
from .data import LabelMap, read_chunks, read_corpus_rows, read_split
from .models import build_chunk_classifier, build_chunk_regressor, build_statement_classifier
from .predicting import (
    predict_chunk_scores,
    predict_chunk_stances,
    predict_statements,
    write_exchange,
)
from .training import train_chunk_model, train_statement_classifier
from .translate import MarianTranslator, translate_corpus, write_corpus_rows


def _config_from_args(args) -> AdapterConfig:
    config = AdapterConfig.from_json(args.config) if args.config else AdapterConfig()
    overrides = {}
    for name in ("track", "base_model", "label_space", "scale_file", "epochs",
                 "learning_rate", "batch_size", "seed", "max_length",
                 "chunk_max_length"):
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    if getattr(args, "dev_checkpoint", False):
        overrides["dev_checkpoint"] = True
    return replace(config, **overrides) if overrides else config


def _subset_rows(rows, split_path, subset):
    if split_path is None:
        return rows, ""
    split = read_split(split_path)
    ids = split[subset]
    return [r for r in rows if r.manifesto_id in ids], split["name"]


def _save_model(out_dir: Path, model, config: AdapterConfig, labels) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    torch.save(model.state_dict(), out_dir / "model.pt")
    payload = {"config": config.to_dict(), "labels": list(labels)}
    (out_dir / "adapter.json").write_text(json.dumps(payload, indent=2, sort_keys=True),
                                          encoding="utf-8")


def _load_model(model_dir: Path):
    payload = json.loads((model_dir / "adapter.json").read_text(encoding="utf-8"))
    config = AdapterConfig(**payload["config"])
    labels = payload["labels"]
    if config.track == "long-input-regressor":
        model = build_chunk_regressor(config)
    elif config.track == "long-input-classifier":
        model = build_chunk_classifier(config, n_labels=len(labels))
    else:
        model = build_statement_classifier(config, n_labels=len(labels))
    state = torch.load(model_dir / "model.pt", map_location="cpu", weights_only=True)
    model.load_state_dict(state)
    return model, config, labels


def cmd_train_statements(args) -> int:
    config = _config_from_args(args)
    rows = read_corpus_rows(args.corpus)
    train_rows, _ = _subset_rows(rows, args.split, "train")
    dev_rows, _ = _subset_rows(rows, args.split, "dev") if args.split else ([], "")
    label_map = LabelMap.for_space(config.label_space, config.scale_file)
    model, _, result = train_statement_classifier(train_rows, dev_rows, config, label_map)
    for entry in result.history:
        extra = f"  dev={entry['dev_metric']:.4f}" if "dev_metric" in entry else ""
        print(f"epoch {entry['epoch']}  loss={entry['mean_loss']:.6f}{extra}")
    _save_model(Path(args.out_dir), model, config, label_map.labels)
    print(f"saved statement classifier -> {args.out_dir}")
    return 0


def cmd_predict_statements(args) -> int:
    model, config, labels = _load_model(Path(args.model_dir))
    from .models import load_tokenizer

    tokenizer = load_tokenizer(config)
    label_map = LabelMap.for_space(config.label_space, config.scale_file)
    rows = read_corpus_rows(args.corpus)
    rows, split_name = _subset_rows(rows, args.split, args.subset)
    out_rows = predict_statements(model, tokenizer, rows, config, label_map,
                                  model_name=args.name, split_name=split_name)
    write_exchange(out_rows, args.out)
    print(f"wrote {len(out_rows)} statement predictions -> {args.out}")
    return 0


def cmd_train_chunks(args) -> int:
    config = _config_from_args(args)
    if config.track not in ("long-input-regressor", "long-input-classifier"):
        config = replace(config, track="long-input-regressor")
    rows = read_corpus_rows(args.corpus)
    chunks = read_chunks(args.chunks)
    if args.split:
        split = read_split(args.split)
        train_chunks = [c for c in chunks if c.manifesto_id in split["train"]]
        dev_chunks = [c for c in chunks if c.manifesto_id in split["dev"]]
    else:
        train_chunks, dev_chunks = chunks, []
    model, _, result = train_chunk_model(train_chunks, dev_chunks, rows, config)
    for entry in result.history:
        extra = f"  dev={entry['dev_metric']:.4f}" if "dev_metric" in entry else ""
        print(f"epoch {entry['epoch']}  loss={entry['mean_loss']:.6f}{extra}")
    labels = (("hard_left", "centre_left", "centrist", "centre_right", "hard_right")
              if config.track == "long-input-classifier" else ("score",))
    _save_model(Path(args.out_dir), model, config, labels)
    print(f"saved chunk model ({config.track}) -> {args.out_dir}")
    return 0


def cmd_predict_chunks(args) -> int:
    model, config, _ = _load_model(Path(args.model_dir))
    from .models import load_tokenizer

    tokenizer = load_tokenizer(config)
    rows = read_corpus_rows(args.corpus)
    chunks = read_chunks(args.chunks)
    if args.split:
        split = read_split(args.split)
        chunks = [c for c in chunks if c.manifesto_id in split[args.subset]]
        split_name = split["name"]
    else:
        split_name = ""
    if config.track == "long-input-classifier":
        out_rows = predict_chunk_stances(model, tokenizer, chunks, rows, config,
                                         model_name=args.name, split_name=split_name)
    else:
        out_rows = predict_chunk_scores(model, tokenizer, chunks, rows, config,
                                        model_name=args.name, split_name=split_name)
    write_exchange(out_rows, args.out)
    print(f"wrote {len(out_rows)} chunk predictions -> {args.out}")
    return 0


def cmd_translate(args) -> int:
    rows = read_corpus_rows(args.corpus)
    translator = MarianTranslator(batch_size=args.batch_size)
    translated, skipped = translate_corpus(rows, translator)
    write_corpus_rows(translated, args.out)
    if skipped:
        print("skipped languages: "
              + ", ".join(f"{k} ({v})" for k, v in sorted(skipped.items())))
    print(f"wrote {len(translated)} statements -> {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scale-bench-adapter")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="AdapterConfig JSON")
        p.add_argument("--track")
        p.add_argument("--base-model", dest="base_model")
        p.add_argument("--label-space", dest="label_space")
        p.add_argument("--scale-file", dest="scale_file")
        p.add_argument("--epochs", type=int)
        p.add_argument("--learning-rate", dest="learning_rate", type=float)
        p.add_argument("--batch-size", dest="batch_size", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--max-length", dest="max_length", type=int)
        p.add_argument("--chunk-max-length", dest="chunk_max_length", type=int)
        p.add_argument("--dev-checkpoint", dest="dev_checkpoint", action="store_true")

    p = sub.add_parser("train-statements")
    common(p)
    p.add_argument("--corpus", required=True)
    p.add_argument("--split")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_train_statements)

    p = sub.add_parser("predict-statements")
    p.add_argument("--model-dir", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--split")
    p.add_argument("--subset", choices=["train", "dev", "test"], default="test")
    p.add_argument("--name", default="adapter")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict_statements)

    p = sub.add_parser("train-chunks")
    common(p)
    p.add_argument("--corpus", required=True)
    p.add_argument("--chunks", required=True)
    p.add_argument("--split")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_train_chunks)

    p = sub.add_parser("predict-chunks")
    p.add_argument("--model-dir", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--chunks", required=True)
    p.add_argument("--split")
    p.add_argument("--subset", choices=["train", "dev", "test"], default="test")
    p.add_argument("--name", default="adapter")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict_chunks)

    p = sub.add_parser("translate")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--batch-size", type=int, default=16)
    p.set_defaults(func=cmd_translate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
