"""Command-line interface: the whole pipeline as batch subcommands.

    nordial harvest   raw (id, text) stream + lexicon -> candidate corpus
    nordial split     labeled corpus -> train/dev/test assignment
    nordial stats     split x label count table
    nordial chi2      salient-trait ranking between two labels (TSV/report)
    nordial kappa     inter-annotator agreement from a records file
    nordial train     grid search + model file
    nordial eval      model + corpus split -> metrics report
    nordial classify  model + texts -> predictions
    nordial serve     start the annotation HTTP service

Exit codes: 0 success, 1 usage error, 2 data/I-O error. All randomness
flows from --seed; logs go to stderr, data outputs to --out or stdout.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from contextlib import contextmanager
from pathlib import Path

from . import models as model_lib
from .analytics import AgreementRecord, chi2_rank, cohen_kappa
from .annotations import agreement_records, read_label_log
from .corpus import (
    Label,
    Split,
    corpus_stats,
    dump_corpus,
    load_corpus,
    save_corpus,
    split_corpus,
)
from .errors import CorpusError, NordialError
from .evaluation import evaluate, per_label_metrics, render_report
from .features import vectorize
from .harvest import default_lexicon, filter_candidates, load_lexicon, tokenize
from .models import GridSpec, grid_search, load_model, save_model


class UsageError(Exception):
    """Bad flags or arguments; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); the contract is exit 1
        raise UsageError(message)


def _log(args, message: str) -> None:
    if not getattr(args, "quiet", False):
        print(message, file=sys.stderr)


@contextmanager
def _open_out(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8") as fh:
            yield fh


def _parse_ratios(text: str) -> tuple[float, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise UsageError(f"--ratios needs three comma-separated numbers, got {text!r}")
    try:
        a, b, c = (float(p) for p in parts)
    except ValueError:
        raise UsageError(f"--ratios must be numeric, got {text!r}") from None
    return (a, b, c)


def _parse_range(text: str) -> tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError(f"expected lo,hi range, got {text!r}")
    try:
        return (int(parts[0]), int(parts[1]))
    except ValueError:
        raise UsageError(f"range bounds must be integers, got {text!r}") from None


def _parse_label(text: str) -> Label:
    try:
        return Label.parse(text)
    except CorpusError as exc:
        raise UsageError(str(exc)) from None


def _read_stream(path: str):
    """(id, text, source) triples from a JSON Lines stream of candidates."""
    fh = sys.stdin if path == "-" else open(path, encoding="utf-8")
    try:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"stream line {lineno}: invalid JSON ({exc.msg})") from None
            unknown = set(record) - {"id", "text", "source"}
            if unknown:
                raise CorpusError(f"stream line {lineno}: unknown keys {sorted(unknown)}")
            try:
                yield (record["id"], record["text"], record.get("source"))
            except KeyError as exc:
                raise CorpusError(f"stream line {lineno}: missing key {exc}") from None
    finally:
        if fh is not sys.stdin:
            fh.close()


def _sha256_file(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(65536), b""):
            digest.update(block)
    return digest.hexdigest()


def _cmd_harvest(args) -> int:
    lexicon = default_lexicon() if args.lexicon is None else load_lexicon(args.lexicon)
    corpus = filter_candidates(_read_stream(args.input), lexicon, min_tokens=args.min_tokens)
    with _open_out(args.out) as fh:
        dump_corpus(corpus, fh)
    _log(args, f"harvested {len(corpus)} candidates")
    return 0


def _cmd_split(args) -> int:
    corpus = load_corpus(args.input)
    out = split_corpus(corpus, _parse_ratios(args.ratios), seed=args.seed,
                       stratified=args.stratified)
    save_corpus(out, args.out)
    counts = {s.value: sum(1 for t in out if t.split is s) for s in Split}
    _log(args, f"split {len(out)} tweets: {counts}")
    return 0


def _cmd_stats(args) -> int:
    stats = corpus_stats(load_corpus(args.input))
    with _open_out(args.out) as fh:
        if args.json:
            json.dump(stats.to_dict(), fh, ensure_ascii=False, indent=2)
            fh.write("\n")
        else:
            fh.write(stats.render_text() + "\n")
    return 0


def _cmd_chi2(args) -> int:
    corpus = load_corpus(args.input)
    pair = (_parse_label(args.pair[0]), _parse_label(args.pair[1]))
    ranking = chi2_rank(
        corpus, pair,
        ngram_range=_parse_range(args.ngram_range),
        p_threshold=args.p_threshold,
        top_k=args.top_k,
    )
    with _open_out(args.out) as fh:
        if args.format == "report":
            fh.write(f"{pair[0].value} vs {pair[1].value}\n")
            for entry in ranking:
                fh.write(f"{entry.feature}\t{entry.chi2:.1f}\n")
        else:
            fh.write("feature\tchi2\tp_value\n")
            for entry in ranking:
                fh.write(f"{entry.feature}\t{entry.chi2!r}\t{entry.p_value!r}\n")
    return 0


def _load_agreement_records(path: str) -> list[AgreementRecord]:
    """Accepts direct record files ({item_id, label_a, label_b}) and label
    logs ({tweet_id, label, annotator, ...}); detected from the first record."""
    with open(path, encoding="utf-8") as fh:
        first = ""
        for line in fh:
            if line.strip():
                first = line
                break
    if not first:
        return []
    keys = set(json.loads(first))
    if {"item_id", "label_a", "label_b"} <= keys:
        records = []
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                record = json.loads(line)
                try:
                    records.append(AgreementRecord(
                        record["item_id"],
                        Label.parse(record["label_a"]),
                        Label.parse(record["label_b"]),
                    ))
                except KeyError as exc:
                    raise CorpusError(f"line {lineno}: missing key {exc}") from None
        return records
    if {"tweet_id", "label", "annotator"} <= keys:
        return agreement_records(read_label_log(path))
    raise CorpusError(
        f"{path}: expected item_id/label_a/label_b records or a tweet_id/label/annotator log"
    )


def _cmd_kappa(args) -> int:
    records = _load_agreement_records(args.input)
    if not records:
        raise CorpusError(f"{args.input}: no doubly-annotated records found")
    kappa = cohen_kappa(records)
    _log(args, f"{len(records)} doubly-annotated items")
    with _open_out(args.out) as fh:
        fh.write(f"{kappa:.4f}\n")
    return 0


def _cmd_train(args) -> int:
    corpus = load_corpus(args.input)
    train = list(corpus.with_split(Split.TRAIN))
    dev = list(corpus.with_split(Split.DEV))
    if not train or not dev:
        raise CorpusError("corpus must carry train and dev split assignments (run `split` first)")
    if args.grid is not None:
        with open(args.grid, encoding="utf-8") as fh:
            try:
                spec = GridSpec.from_dict(json.load(fh))
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{args.grid}: invalid JSON ({exc.msg})") from None
    else:
        spec = GridSpec()
    result = grid_search(train, dev, spec, args.model, seed=args.seed, threads=args.threads)
    metadata = {
        "model_kind": args.model,
        "seed": args.seed,
        "corpus_sha256": _sha256_file(args.input),
        "grid": spec.to_dict(),
        "chosen_config": result.config,
        "grid_position": result.position,
        "grid_size": result.n_points,
        "dev_macro_f1": result.dev_report.macro_f1,
    }
    save_model(args.out, result.model, result.space, metadata)
    _log(args, f"grid searched {result.n_points} points; "
               f"dev macro-F1 {result.dev_report.macro_f1:.4f}; wrote {args.out}")
    return 0


def _cmd_eval(args) -> int:
    model, space, _ = load_model(args.model)
    corpus = load_corpus(args.input)
    subset = corpus.with_split(Split(args.split)) if args.split else corpus
    if len(subset) == 0:
        raise CorpusError(f"no tweets in split {args.split!r}")
    gold = []
    predicted = []
    for tweet in subset:
        if tweet.label is None:
            raise CorpusError(f"tweet {tweet.id!r} is unlabeled")
        gold.append(tweet.label)
        vec = vectorize((tokenize(tweet.text), tweet.text), space)
        predicted.append(model_lib.predict(model, vec)[0])
    report = evaluate(gold, predicted)
    with _open_out(args.out) as fh:
        if args.json:
            json.dump(report.to_dict(), fh, ensure_ascii=False, indent=2)
            fh.write("\n")
        elif args.label:
            label = _parse_label(args.label)
            p, r, f1 = per_label_metrics(report, label)
            fh.write(f"{label.value}\tprecision={p:.4f}\trecall={r:.4f}\tf1={f1:.4f}\n")
        else:
            fh.write(render_report(report) + "\n")
    return 0


def _cmd_classify(args) -> int:
    model, space, _ = load_model(args.model)
    if (args.text is None) == (args.input is None):
        raise UsageError("classify needs exactly one of --text or --in")
    with _open_out(args.out) as fh:
        if args.text is not None:
            label, scores = model_lib.predict(model, vectorize((tokenize(args.text), args.text), space))
            fh.write(json.dumps(
                {"label": label.value, "scores": {l.value: s for l, s in scores.items()}},
                ensure_ascii=False) + "\n")
        else:
            for tweet_id, text, _ in _read_stream(args.input):
                label, scores = model_lib.predict(model, vectorize((tokenize(text), text), space))
                fh.write(json.dumps(
                    {"id": tweet_id, "label": label.value,
                     "scores": {l.value: s for l, s in scores.items()}},
                    ensure_ascii=False) + "\n")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import build_app_from_paths

    app = build_app_from_paths(
        args.corpus, args.labels, model_path=args.model,
        overlap=args.overlap, ui_dir=args.ui_dir,
    )
    _log(args, f"serving on http://{args.host}:{args.port}")
    uvicorn.run(app, host=args.host, port=args.port,
                log_level="warning" if args.quiet else "info")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="nordial", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for all randomness")
    common.add_argument("--quiet", action="store_true", help="suppress stderr logs")
    common.add_argument("--config", default=None,
                        help="JSON file with per-subcommand flag defaults")
    common.add_argument("--out", default=None, help="output file (default stdout)")
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    p = sub.add_parser("harvest", parents=[common],
                       help="filter a raw stream into candidate tweets")
    p.add_argument("--in", dest="input", required=True, help="JSONL stream of {id, text}")
    p.add_argument("--lexicon", default=None, help="term lexicon file (default: bundled)")
    p.add_argument("--min-tokens", type=int, default=10, help="length filter (default 10)")
    p.set_defaults(func=_cmd_harvest)

    p = sub.add_parser("split", parents=[common], help="assign train/dev/test splits")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--ratios", default="0.8,0.1,0.1")
    p.add_argument("--stratified", action="store_true")
    p.set_defaults(func=_cmd_split)

    p = sub.add_parser("stats", parents=[common], help="split x label count table")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("chi2", parents=[common], help="chi-squared trait ranking")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--pair", nargs=2, required=True, metavar=("LABEL_A", "LABEL_B"))
    p.add_argument("--ngram-range", default="1,3")
    p.add_argument("--p-threshold", type=float, default=0.05)
    p.add_argument("--top-k", type=int, default=10)
    p.add_argument("--format", choices=("tsv", "report"), default="tsv")
    p.set_defaults(func=_cmd_chi2)

    p = sub.add_parser("kappa", parents=[common], help="Cohen's kappa from a records file")
    p.add_argument("--in", dest="input", required=True,
                   help="JSONL of {item_id, label_a, label_b} or a label log")
    p.set_defaults(func=_cmd_kappa)

    p = sub.add_parser("train", parents=[common], help="grid search and write a model file")
    p.add_argument("--in", dest="input", required=True, help="corpus with train/dev splits")
    p.add_argument("--model", choices=("mnb", "svm"), required=True)
    p.add_argument("--grid", default=None, help="grid.json with candidate lists")
    p.add_argument("--threads", type=int, default=1,
                   help="parallel grid evaluation (default 1, deterministic either way)")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("eval", parents=[common], help="evaluate a model on a corpus split")
    p.add_argument("--model", required=True, help="model file from `train`")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--split", choices=tuple(s.value for s in Split), default="test")
    p.add_argument("--label", default=None, help="report single-label P/R/F1 only")
    p.add_argument("--json", action="store_true", help="machine-readable report")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("classify", parents=[common], help="predict labels for texts")
    p.add_argument("--model", required=True)
    p.add_argument("--in", dest="input", default=None, help="JSONL stream of {id, text}")
    p.add_argument("--text", default=None, help="classify a single text")
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("serve", parents=[common], help="start the annotation service")
    p.add_argument("--corpus", required=True, help="candidate corpus file")
    p.add_argument("--labels", required=True, help="append-only label log path")
    p.add_argument("--model", default=None, help="model file for suggestions")
    p.add_argument("--overlap", type=float, default=0.1,
                   help="fraction of tweets routed to two annotators")
    p.add_argument("--ui-dir", default=None, help="static UI directory to serve at /")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=_cmd_serve)

    return parser


def _apply_config_defaults(parser: _Parser, argv: list[str]) -> None:
    """Pre-scan for --config and install its values as subcommand defaults."""
    path = None
    for i, arg in enumerate(argv):
        if arg == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif arg.startswith("--config="):
            path = arg.split("=", 1)[1]
    if path is None:
        return
    try:
        with open(path, encoding="utf-8") as fh:
            overrides = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    if not isinstance(overrides, dict):
        raise UsageError(f"config {path} must be a JSON object of subcommand sections")
    subparsers = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    for command, section in overrides.items():
        if command not in subparsers.choices:
            raise UsageError(f"config {path}: unknown subcommand {command!r}")
        if not isinstance(section, dict):
            raise UsageError(f"config {path}: section {command!r} must be an object")
        subparsers.choices[command].set_defaults(**section)


def run_cli(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config_defaults(parser, argv)
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except NordialError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
