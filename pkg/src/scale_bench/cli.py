"""Command-line workbench: ingest, registry, score, chunk, split, train,
predict, evaluate, simulate, report.

Every run writes a reproducibility manifest (resolved config, input file
hashes, tool version) alongside its outputs, and output files are written
atomically (temp file + rename).  Exit codes: 0 ok, 2 usage, 3 data error,
4 numeric failure.

A JSON config file (``--config``) may hold defaults per subcommand (keys
named after the subcommand, flag names with dashes or underscores); explicit
flags override it.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
from pathlib import Path

from . import __version__, baseline, chunking, evaluation, noisesim, scales, splits
from .corpus import Corpus, corpus_stats, load_corpus, parse_corpus, write_corpus
from .errors import DataError, NumericError, ScaleBenchError

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4


# --------------------------------------------------------------------------
# Output plumbing
# --------------------------------------------------------------------------


def atomic_write_text(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def write_manifest(target: Path, args: argparse.Namespace, inputs: list[Path]) -> None:
    """Record config, input hashes, and version next to the outputs."""
    config = {
        k: (str(v) if isinstance(v, Path) else v)
        for k, v in sorted(vars(args).items())
        if k not in ("func", "config") and not k.startswith("_")
    }
    manifest = {
        "tool": "scale-bench",
        "version": __version__,
        "command": getattr(args, "_command", ""),
        "config": config,
        "inputs": {str(p): _sha256(p) for p in inputs if p.is_file()},
    }
    if target.is_dir():
        path = target / "manifest.json"
    else:
        path = target.with_name(target.name + ".manifest.json")
    atomic_write_text(path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _load_corpus_arg(spec: str, strict: bool = True) -> Corpus:
    if spec.startswith("synthetic:"):
        return noisesim.parse_synthetic_uri(spec)
    return load_corpus(spec, strict=strict)


def _scale_arg(args) -> scales.Scale:
    path = getattr(args, "scale", None)
    return scales.load_scale(path) if path else scales.RILE


# --------------------------------------------------------------------------
# Subcommands
# --------------------------------------------------------------------------


def cmd_ingest(args) -> int:
    src = Path(args.in_path)
    with open(src, encoding="utf-8", newline="" if args.format == "csv" else None) as fh:
        corpus = parse_corpus(fh, fmt=args.format, strict=args.strict, source_name=str(src))
    out = Path(args.out)
    buf = io.StringIO()
    write_corpus(corpus, buf)
    atomic_write_text(out, buf.getvalue())
    write_manifest(out, args, [src])
    stats = corpus_stats(corpus)
    print(
        f"ingested {stats.total_manifestos} manifestos / "
        f"{stats.total_statements} statements from {len(stats.by_country)} countries"
    )
    return EXIT_OK


def cmd_registry(args) -> int:
    scale = _scale_arg(args)
    text = scales.dump_registry(scale)
    if args.out:
        atomic_write_text(Path(args.out), text + "\n")
    else:
        print(text)
    return EXIT_OK


def _manifesto_scores(corpus: Corpus, pred_path: str | None,
                      scale: scales.Scale) -> dict[str, float]:
    """Per-manifesto scores from gold codes or a statement prediction file.

    With predictions, only manifestos whose statements are fully covered
    are scored.
    """
    if pred_path is None:
        return {m.id: scales.manifesto_rile(m, scale=scale) for m in corpus}
    pset = baseline.read_predictions(pred_path)
    labels = pset.labels
    out = {}
    for m in corpus:
        if all(s.id in labels for s in m.statements):
            out[m.id] = scales.manifesto_rile(m, labels, scale=scale)
    if not out:
        raise DataError(f"{pred_path}: predictions cover no manifesto completely")
    return out


def cmd_score(args) -> int:
    corpus = _load_corpus_arg(args.corpus)
    scale = _scale_arg(args)
    scored = _manifesto_scores(corpus, args.pred, scale)
    rows = []
    for mid in sorted(scored):
        m = corpus.manifestos[mid]
        score = scored[mid]
        rows.append([mid, m.country, m.year, repr(score), scales.stance_bin(score).value])
    if args.out:
        out = Path(args.out)
        atomic_write_text(out, _csv_text(["manifesto_id", "country", "year", "score", "stance"], rows))
        inputs = [Path(args.corpus)] if not args.corpus.startswith("synthetic:") else []
        if args.pred:
            inputs.append(Path(args.pred))
        write_manifest(out, args, inputs)
    else:
        for mid, _, _, score, stance in rows:
            print(f"{mid}\t{score}\t{stance}")
    return EXIT_OK


def cmd_chunk(args) -> int:
    corpus = _load_corpus_arg(args.corpus)
    token_counts = None
    if args.counter != "whitespace":
        if not args.counter.startswith("external:"):
            raise ValueError(f"unknown counter {args.counter!r}")
        counts_path = args.counter[len("external:"):]
        with open(counts_path, encoding="utf-8") as fh:
            token_counts = {str(k): int(v) for k, v in json.load(fh).items()}
    buf = io.StringIO()
    total = 0
    for m in sorted(corpus, key=lambda m: m.id):
        chunks = chunking.build_chunks(
            m,
            max_tokens=args.max_tokens,
            min_tokens=args.min_tokens,
            token_counts=token_counts,
        )
        chunking.write_chunks(chunks, buf)
        total += len(chunks)
    out = Path(args.out)
    atomic_write_text(out, buf.getvalue())
    inputs = [Path(args.corpus)] if not args.corpus.startswith("synthetic:") else []
    write_manifest(out, args, inputs)
    print(f"wrote {total} chunks for {len(corpus)} manifestos")
    return EXIT_OK


def cmd_split(args) -> int:
    corpus = _load_corpus_arg(args.corpus)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.mode == "xcountry":
        specs = splits.leave_one_country_out(corpus)
    else:
        specs = [splits.temporal_split(corpus, cutoff_year=args.cutoff_year,
                                       end_year=args.end_year)]
    written = []
    for spec in specs:
        if args.dev_fraction > 0:
            spec = splits.carve_dev(spec, corpus, fraction=args.dev_fraction,
                                    seed=args.seed)
        path = out_dir / f"{spec.name}.json"
        atomic_write_text(path, _json_text(spec.to_dict()))
        written.append(spec.name)
    inputs = [Path(args.corpus)] if not args.corpus.startswith("synthetic:") else []
    write_manifest(out_dir, args, inputs)
    print(f"wrote {len(written)} split(s): {', '.join(written)}")
    return EXIT_OK


def _subset_statements(corpus: Corpus, split_path: str | None, subset: str):
    if split_path is None:
        return [s for m in sorted(corpus, key=lambda m: m.id) for s in m.statements], ""
    spec = splits.read_split(split_path)
    ids = {"train": spec.train, "dev": spec.dev, "test": spec.test}[subset]
    missing = ids - set(corpus.manifestos)
    if missing:
        raise DataError(f"split references unknown manifestos: {sorted(missing)[:5]}")
    stmts = [s for mid in sorted(ids) for s in corpus.manifestos[mid].statements]
    return stmts, spec.name


def cmd_train(args) -> int:
    corpus = _load_corpus_arg(args.corpus)
    scale = _scale_arg(args)
    space = baseline.LabelSpace.for_mode(args.space)
    train_stmts, split_name = _subset_statements(corpus, args.split, "train")
    train = baseline.labeled_examples(train_stmts, space, scale)
    dev = []
    if args.split:
        dev_stmts, _ = _subset_statements(corpus, args.split, "dev")
        dev = baseline.labeled_examples(dev_stmts, space, scale)
    if args.algo == "majority":
        model = baseline.majority_label(train, space)
    else:
        config = baseline.TrainConfig(
            epochs=args.epochs,
            learning_rate=args.lr,
            hash_dim=args.hash_dim,
            batch_size=args.batch_size,
            seed=args.seed,
            dev_checkpoint=not args.no_dev_checkpoint,
        )
        model = baseline.train_linear(train, dev, space, config)
        for epoch, loss, dev_acc in model.history:
            extra = "" if dev_acc is None else f"  dev_acc={dev_acc:.4f}"
            print(f"epoch {epoch}  loss={loss:.6f}{extra}")
        if model.best_epoch is not None:
            print(f"checkpoint: epoch {model.best_epoch}")
    out = Path(args.model_out)
    baseline.save_model(model, out)
    inputs = [Path(args.corpus)] if not args.corpus.startswith("synthetic:") else []
    if args.split:
        inputs.append(Path(args.split))
    write_manifest(out, args, inputs)
    print(f"trained {args.algo} ({args.space}, split={split_name or 'all'}) -> {out}")
    return EXIT_OK


def cmd_predict(args) -> int:
    corpus = _load_corpus_arg(args.corpus)
    model = baseline.load_model(args.model)
    stmts, split_name = _subset_statements(corpus, args.split, args.subset)
    pset = baseline.predict(model, stmts, split=split_name)
    if args.name:
        pset.model = args.name
    out = Path(args.out)
    buf = io.StringIO()
    baseline.write_predictions(pset, buf)
    atomic_write_text(out, buf.getvalue())
    inputs = [Path(args.model)]
    if not args.corpus.startswith("synthetic:"):
        inputs.append(Path(args.corpus))
    if args.split:
        inputs.append(Path(args.split))
    write_manifest(out, args, inputs)
    print(f"wrote {len(pset)} predictions -> {out}")
    return EXIT_OK


def _detect_exchange_kind(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                row = json.loads(line)
                return "statement" if "statement_id" in row else "chunk"
    raise DataError(f"{path}: empty prediction file")


def _evaluate_statement(args, corpus, scale, out_dir) -> dict:
    pset = baseline.read_predictions(args.pred)
    by_id = {s.id: s for s in corpus.statements()}
    if args.split:
        stmts, _ = _subset_statements(corpus, args.split, args.subset)
        missing = [s.id for s in stmts if s.id not in pset.records]
        if missing:
            raise DataError(
                f"{args.pred}: missing predictions for {len(missing)} statements "
                f"of the {args.subset} subset (first: {missing[:5]})"
            )
    else:
        unknown = [sid for sid in pset.records if sid not in by_id]
        if unknown:
            raise DataError(f"{args.pred}: predictions for unknown statements {unknown[:5]}")
        stmts = [by_id[sid] for sid in sorted(pset.records)]
    space = baseline.LabelSpace.for_mode(args.space)
    gold = [baseline.statement_label(s.code, space, scale) for s in stmts]
    pred = [pset.records[s.id].label for s in stmts]
    metrics = evaluation.classification_metrics(gold, pred, space)
    cm = evaluation.confusion(gold, pred, space.labels)
    report = {
        "level": "statement",
        "model": pset.model,
        "split": pset.split,
        "space": args.space,
        **metrics.to_dict(),
    }
    atomic_write_text(out_dir / "metrics.json", _json_text(report))
    atomic_write_text(
        out_dir / "confusion.csv",
        _csv_text(["gold\\pred", *cm.labels],
                  [[lab, *cm.counts[i].tolist()] for i, lab in enumerate(cm.labels)]),
    )
    return report


def _evaluate_manifesto(args, corpus, scale, out_dir) -> dict:
    kind = _detect_exchange_kind(args.pred)
    gold_scores: list[float] = []
    pred_scores: list[float] = []
    rows = []
    if kind == "statement":
        pset = baseline.read_predictions(args.pred)
        scored = _manifesto_scores(corpus, args.pred, scale)
        model, split = pset.model, pset.split
        for mid in sorted(scored):
            gold = scales.manifesto_rile(corpus.manifestos[mid], scale=scale)
            gold_scores.append(gold)
            pred_scores.append(scored[mid])
            rows.append([mid, repr(gold), repr(scored[mid])])
    else:
        cset = baseline.read_chunk_predictions(args.pred)
        model, split = cset.model, cset.split
        by_manifesto = cset.by_manifesto()
        if any(p.score is None for preds in by_manifesto.values() for p in preds):
            return _evaluate_manifesto_stance(args, corpus, scale, out_dir, cset)
        for mid in sorted(by_manifesto):
            if mid not in corpus.manifestos:
                raise DataError(f"{args.pred}: predictions for unknown manifesto {mid!r}")
            gold = scales.manifesto_rile(corpus.manifestos[mid], scale=scale)
            pred = chunking.average_chunk_scores(
                [p.score for p in by_manifesto[mid]]
            )
            gold_scores.append(gold)
            pred_scores.append(pred)
            rows.append([mid, repr(gold), repr(pred)])
    err = evaluation.scale_error_report(gold_scores, pred_scores, dead_zone=args.dead_zone)
    report = {"level": "manifesto", "model": model, "split": split, **err.to_dict()}
    atomic_write_text(out_dir / "error_report.json", _json_text(report))
    atomic_write_text(out_dir / "scatter.csv",
                      _csv_text(["manifesto_id", "gold", "pred"], rows))
    return report


def _evaluate_manifesto_stance(args, corpus, scale, out_dir, cset) -> dict:
    """Five-way stance evaluation: majority chunk label vs binned gold score."""
    labels = [b.value for b in scales.StanceBin]
    gold, pred = [], []
    for mid, preds in sorted(cset.by_manifesto().items()):
        if mid not in corpus.manifestos:
            raise DataError(f"{args.pred}: predictions for unknown manifesto {mid!r}")
        bins = [
            scales.parse_stance(p.label) if p.label is not None
            else scales.stance_bin(p.score)
            for p in preds
        ]
        pred.append(chunking.majority_stance(bins).value)
        gold.append(
            scales.stance_bin(scales.manifesto_rile(corpus.manifestos[mid], scale=scale)).value
        )
    metrics = evaluation.classification_metrics(gold, pred, labels)
    cm = evaluation.confusion(gold, pred, labels)
    report = {
        "level": "manifesto-stance",
        "model": cset.model,
        "split": cset.split,
        **metrics.to_dict(),
    }
    atomic_write_text(out_dir / "metrics.json", _json_text(report))
    atomic_write_text(
        out_dir / "confusion.csv",
        _csv_text(["gold\\pred", *labels],
                  [[lab, *cm.counts[i].tolist()] for i, lab in enumerate(cm.labels)]),
    )
    return report


def _evaluate_chunk(args, corpus, scale, out_dir) -> dict:
    """Chunk-level eval against gold chunk scores from a chunk file."""
    if not args.chunks:
        raise ValueError("--level chunk requires --chunks")
    gold_chunks = {(c.manifesto_id, c.index): c for c in chunking.read_chunks(args.chunks)}
    cset = baseline.read_chunk_predictions(args.pred)
    missing = [k for k in cset.records if k not in gold_chunks]
    if missing:
        raise DataError(f"{args.pred}: predictions for unknown chunks {missing[:5]}")
    keys = sorted(cset.records)
    if all(cset.records[k].score is not None for k in keys):
        gold = [gold_chunks[k].gold_score for k in keys]
        pred = [cset.records[k].score for k in keys]
        err = evaluation.scale_error_report(gold, pred, dead_zone=args.dead_zone)
        report = {"level": "chunk", "model": cset.model, "split": cset.split,
                  **err.to_dict()}
        atomic_write_text(out_dir / "error_report.json", _json_text(report))
        atomic_write_text(
            out_dir / "scatter.csv",
            _csv_text(["manifesto_id", "chunk_index", "gold", "pred"],
                      [[k[0], k[1], repr(gold_chunks[k].gold_score),
                        repr(cset.records[k].score)] for k in keys]),
        )
        return report
    labels = [b.value for b in scales.StanceBin]
    gold = [scales.stance_bin(gold_chunks[k].gold_score).value for k in keys]
    pred = [
        scales.parse_stance(cset.records[k].label).value
        if cset.records[k].label is not None
        else scales.stance_bin(cset.records[k].score).value
        for k in keys
    ]
    metrics = evaluation.classification_metrics(gold, pred, labels)
    cm = evaluation.confusion(gold, pred, labels)
    report = {"level": "chunk-stance", "model": cset.model, "split": cset.split,
              **metrics.to_dict()}
    atomic_write_text(out_dir / "metrics.json", _json_text(report))
    atomic_write_text(
        out_dir / "confusion.csv",
        _csv_text(["gold\\pred", *labels],
                  [[lab, *cm.counts[i].tolist()] for i, lab in enumerate(cm.labels)]),
    )
    return report


def cmd_evaluate(args) -> int:
    corpus = _load_corpus_arg(args.corpus)
    scale = _scale_arg(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.level == "statement":
        report = _evaluate_statement(args, corpus, scale, out_dir)
    elif args.level == "manifesto":
        report = _evaluate_manifesto(args, corpus, scale, out_dir)
    else:
        report = _evaluate_chunk(args, corpus, scale, out_dir)
    inputs = [Path(args.pred)]
    if not args.corpus.startswith("synthetic:"):
        inputs.append(Path(args.corpus))
    if args.chunks:
        inputs.append(Path(args.chunks))
    if args.split:
        inputs.append(Path(args.split))
    write_manifest(out_dir, args, inputs)
    summary = {k: v for k, v in report.items()
               if k in ("accuracy", "weighted_f1", "spearman_r", "mae")}
    print(f"evaluated level={args.level}: " +
          "  ".join(f"{k}={v:.4f}" for k, v in summary.items()))
    return EXIT_OK


def cmd_simulate(args) -> int:
    corpus = _load_corpus_arg(args.corpus)
    spec = noisesim.load_noise_spec(args.confusion, seed=args.seed)
    report = noisesim.noise_sweep(corpus, [spec], replicates=args.replicates,
                                  dead_zone=args.dead_zone, jobs=args.jobs)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    row_dicts = [r.to_dict() for r in report.rows]
    header = ["spec", "replicate", "spearman_r", "mae", "mean_error",
              "dispersion_ratio", "error_skew", "ul_flips", "lr_flips", "n"]
    rows = [
        [d["spec"], d["replicate"], repr(d["spearman_r"]), repr(d["mae"]),
         repr(d["mean_error"]), repr(d["dispersion_ratio"]), repr(d["error_skew"]),
         d["sign_flips"]["UL"], d["sign_flips"]["LR"], d["n"]]
        for d in row_dicts
    ]
    atomic_write_text(out_dir / "sweep.csv", _csv_text(header, rows))
    atomic_write_text(
        out_dir / "aggregates.json",
        _json_text([a.to_dict() for a in report.aggregates]),
    )
    inputs = [Path(args.confusion)]
    if not args.corpus.startswith("synthetic:"):
        inputs.append(Path(args.corpus))
    write_manifest(out_dir, args, inputs)
    for agg in report.aggregates:
        print(f"{agg.spec}: mean_r={agg.mean_r:.4f} (std {agg.std_r:.4f}, "
              f"{agg.replicates} replicates)")
    return EXIT_OK


_REPORT_COLUMNS = ["path", "level", "model", "split", "accuracy", "weighted_f1",
                   "spearman_r", "mae", "mean_error", "dispersion_ratio", "n"]


def cmd_report(args) -> int:
    records = []
    for root in args.in_dirs:
        for path in sorted(Path(root).rglob("*.json")):
            if path.name not in ("metrics.json", "error_report.json"):
                continue
            data = json.loads(path.read_text(encoding="utf-8"))
            record = {"path": str(path)}
            for col in _REPORT_COLUMNS[1:]:
                value = data.get(col, "")
                record[col] = value
            records.append(record)
    if not records:
        raise DataError(f"no evaluation reports under {args.in_dirs}")
    rows = [[r[c] for c in _REPORT_COLUMNS] for r in records]
    means = ["mean", "", "", ""]
    for col in _REPORT_COLUMNS[4:]:
        values = [r[col] for r in records if isinstance(r[col], (int, float))]
        means.append(repr(sum(values) / len(values)) if values else "")
    rows.append(means)
    out = Path(args.out)
    atomic_write_text(out, _csv_text(_REPORT_COLUMNS, rows))
    write_manifest(out, args, [])
    print(f"composed {len(records)} reports -> {out}")
    return EXIT_OK


# --------------------------------------------------------------------------
# Parser
# --------------------------------------------------------------------------


def _default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("SCALE_BENCH_JOBS", "1")))
    except ValueError:
        return 1


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(
        prog="scale-bench",
        description="Left-right scaling workbench for annotated manifesto corpora",
    )
    parser.add_argument("--version", action="version", version=f"scale-bench {__version__}")
    parser.add_argument("--config", help="JSON file with per-subcommand flag defaults")
    sub = parser.add_subparsers(dest="_command", required=True)
    registry: dict[str, argparse.ArgumentParser] = {}

    def command(name, func, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(func=func, _command=name)
        registry[name] = p
        return p

    p = command("ingest", cmd_ingest, help="convert/validate a corpus export")
    p.add_argument("--format", choices=["jsonl", "csv"], default="jsonl")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--strict", action="store_true",
                   help="fail on the first malformed row instead of skipping")

    p = command("registry", cmd_registry, help="dump the category registry / scale")
    p.add_argument("--dump", action="store_true", help="print the registry (default)")
    p.add_argument("--scale", help="custom scale JSON to validate and dump")
    p.add_argument("--out")

    p = command("score", cmd_score, help="per-manifesto scale scores")
    p.add_argument("--corpus", required=True)
    p.add_argument("--pred", help="statement-level prediction file (default: gold labels)")
    p.add_argument("--scale")
    p.add_argument("--out")

    p = command("chunk", cmd_chunk, help="build token-budget chunk training data")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--max-tokens", type=int, default=chunking.DEFAULT_MAX_TOKENS)
    p.add_argument("--min-tokens", type=int, default=chunking.DEFAULT_MIN_TOKENS)
    p.add_argument("--counter", default="whitespace",
                   help="'whitespace' or 'external:PATH' (JSON id -> token count)")

    p = command("split", cmd_split, help="generate experiment partitions")
    p.add_argument("--mode", choices=["xcountry", "xtime"], required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--dev-fraction", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cutoff-year", type=int, default=2019)
    p.add_argument("--end-year", type=int, default=2021)

    p = command("train", cmd_train, help="train a statement classifier")
    p.add_argument("--corpus", required=True)
    p.add_argument("--split", help="split JSON; train/dev subsets are used")
    p.add_argument("--space", choices=["rile3", "cmp"], default="rile3")
    p.add_argument("--algo", choices=["linear", "majority"], default="linear")
    p.add_argument("--model-out", required=True)
    p.add_argument("--scale")
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--lr", type=float, default=0.1)
    p.add_argument("--hash-dim", type=int, default=2**18)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--no-dev-checkpoint", action="store_true")

    p = command("predict", cmd_predict, help="label statements with a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--split")
    p.add_argument("--subset", choices=["train", "dev", "test"], default="test")
    p.add_argument("--name", help="override model name recorded in the output")
    p.add_argument("--out", required=True)

    p = command("evaluate", cmd_evaluate, help="score predictions against gold")
    p.add_argument("--corpus", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--level", choices=["statement", "manifesto", "chunk"],
                   default="statement")
    p.add_argument("--space", choices=["rile3", "cmp"], default="rile3")
    p.add_argument("--chunks", help="gold chunk file (required for --level chunk)")
    p.add_argument("--split")
    p.add_argument("--subset", choices=["train", "dev", "test"], default="test")
    p.add_argument("--scale")
    p.add_argument("--dead-zone", type=float, default=0.01)
    p.add_argument("--out", required=True)

    p = command("simulate", cmd_simulate, help="label-noise robustness sweep")
    p.add_argument("--corpus", required=True,
                   help="corpus path or 'synthetic:key=value,...'")
    p.add_argument("--confusion", required=True, help="noise spec JSON")
    p.add_argument("--replicates", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dead-zone", type=float, default=0.01)
    p.add_argument("--jobs", type=int, default=_default_jobs())
    p.add_argument("--out", required=True)

    p = command("report", cmd_report, help="compose evaluation reports into one table")
    p.add_argument("--in", dest="in_dirs", nargs="+", required=True)
    p.add_argument("--out", required=True)

    return parser, registry


def _inject_config(argv: list[str], config: dict, commands) -> list[str]:
    """Insert config-derived flags right after the subcommand token.

    Explicit flags appear later in argv, so they win (argparse keeps the
    last occurrence), and required arguments are satisfiable from config.
    """
    for i, token in enumerate(argv):
        if token in commands:
            section = {**config.get("global", {}), **config.get(token, {})}
            extra: list[str] = []
            for key, value in sorted(section.items()):
                flag = "--" + key.replace("_", "-")
                if isinstance(value, bool):
                    if value:
                        extra.append(flag)
                else:
                    extra.extend([flag, str(value)])
            return argv[: i + 1] + extra + argv[i + 1 :]
    return argv


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)

    parser, registry = build_parser()
    if known.config:
        try:
            with open(known.config, encoding="utf-8") as fh:
                config = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            print(json.dumps({"error": "ConfigError", "message": str(exc)}),
                  file=sys.stderr)
            return EXIT_USAGE
        argv = _inject_config(argv, config, registry)

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        return args.func(args)
    except NumericError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return EXIT_NUMERIC
    except (ScaleBenchError, FileNotFoundError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(json.dumps({"error": "UsageError", "message": str(exc)}),
              file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
