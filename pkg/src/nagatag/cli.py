"""Command-line entry point for the tagging pipeline.

One binary, ten subcommands: train, tag, eval, stats, split, agreement,
transitions, features, syllables, gen. Data goes to stdout (or --output);
logs and diagnostics go to stderr. Exit status: 0 success, 1 usage error,
2 data error (unreadable file, malformed corpus, model mismatch).
"""

from __future__ import annotations

import argparse
import json
import sys

from nagatag.corpus import (
    CorpusError,
    TaggedCorpus,
    TagSet,
    agreement,
    read_corpus,
    read_raw_sentences,
    serialize_tagged,
    split_corpus,
    tag_frequencies,
    write_corpus,
)
from nagatag.crf import load_model, save_model, tag_sentence, train_model
from nagatag.datagen import SynthConfig, config_header, generate
from nagatag.evaluation import confusion, format_report_text, report, top_transitions
from nagatag.features import FeatureConfig, extract_token_features, format_feature_map
from nagatag.optim import OptimConfig, OptimError
from nagatag.phonotactics import analyze_word, from_ascii, to_skeleton


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; this CLI reserves 2 for data errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(1)


def _fraction(text: str) -> float:
    value = float(text)
    if not 0.0 < value <= 1.0:
        raise argparse.ArgumentTypeError(f"fraction must be in (0, 1]: {text}")
    return value


def _nonneg(text: str) -> float:
    value = float(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be nonnegative: {text}")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {text}")
    return value


def _load_tagset(args) -> TagSet:
    return TagSet.from_file(args.tagset) if args.tagset else TagSet()


def _emit(text: str, args):
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_text(doc) -> str:
    return json.dumps(doc, ensure_ascii=False, indent=2) + "\n"


def _cmd_train(args) -> int:
    tagset = _load_tagset(args)
    corpus = read_corpus(args.input, tagset)
    optim_config = OptimConfig(c1=args.c1, c2=args.c2, max_iterations=args.max_iter)

    def log(line: str):
        print(line, file=sys.stderr)

    model, trace = train_model(corpus, tagset, FeatureConfig(), optim_config, log=log)
    save_model(args.model, model, FeatureConfig())
    print(
        f"trained on {len(corpus)} sentences ({corpus.token_count} tokens): "
        f"{model.n_attributes} attributes, {model.n_tags} tags, "
        f"{trace.iterations} iterations, final objective {trace.final_objective:.6f}",
        file=sys.stderr,
    )
    return 0


def _cmd_tag(args) -> int:
    model, feature_config = load_model(args.model)
    sentences = read_raw_sentences(args.input)
    tagged = TaggedCorpus(
        tuple(tag_sentence(model, feature_config, words) for words in sentences if words)
    )
    _emit(serialize_tagged(tagged, model.tagset), args)
    return 0


def _cmd_eval(args) -> int:
    model, feature_config = load_model(args.model)
    gold = read_corpus(args.input, model.tagset)
    predicted = TaggedCorpus(
        tuple(
            tag_sentence(model, feature_config, sentence.words()) for sentence in gold
        )
    )
    cm = confusion(gold, predicted, model.tagset)
    rep = report(cm)
    if args.format == "json":
        doc = rep.as_dict()
        doc["confusion"] = {
            "tags": list(model.tagset.names),
            "counts": cm.counts.tolist(),
        }
        _emit(_json_text(doc), args)
    else:
        _emit(format_report_text(rep) + "\n" + cm.to_csv(), args)
    return 0


def _cmd_stats(args) -> int:
    tagset = _load_tagset(args)
    corpus = read_corpus(args.input, tagset)
    freqs = tag_frequencies(corpus, tagset)
    if args.format == "json":
        _emit(_json_text({"frequencies": freqs, "total": corpus.token_count}), args)
    else:
        width = max(5, *(len(n) for n in tagset.names)) + 2
        lines = [f"{'sl. no.':>7}  {'tag':<{width}}frequency"]
        for i, name in enumerate(tagset.names, start=1):
            lines.append(f"{i:>7}  {name:<{width}}{freqs[name]}")
        lines.append(f"{'':>7}  {'total':<{width}}{corpus.token_count}")
        _emit("\n".join(lines) + "\n", args)
    return 0


def _cmd_split(args) -> int:
    tagset = _load_tagset(args)
    corpus = read_corpus(args.input, tagset)
    train, test = split_corpus(corpus, args.fraction, args.seed)
    write_corpus(args.train_output, train, tagset)
    write_corpus(args.test_output, test, tagset)
    print(
        f"split {len(corpus)} sentences into {len(train)} train / {len(test)} test",
        file=sys.stderr,
    )
    return 0


def _cmd_agreement(args) -> int:
    tagset = _load_tagset(args)
    reference = read_corpus(args.reference, tagset)
    other = read_corpus(args.other, tagset)
    if args.exclude_tag not in tagset:
        raise ValueError(f"excluded tag {args.exclude_tag!r} not in tagset")
    rep = agreement(reference, other, tagset.index(args.exclude_tag))
    if args.format == "json":
        doc = {
            "total_tokens": rep.total_tokens,
            "disagreed": rep.disagreed,
            "disagreed_on_excluded_tag": rep.disagreed_on_excluded_tag,
            "rate": rep.rate,
            "rate_excluding": rep.rate_excluding,
            "excluded_tag": args.exclude_tag,
        }
        _emit(_json_text(doc), args)
    else:
        _emit(
            f"tokens {rep.total_tokens}\n"
            f"disagreed {rep.disagreed} ({rep.rate:.2%})\n"
            f"disagreed excluding {args.exclude_tag} "
            f"{rep.disagreed - rep.disagreed_on_excluded_tag} ({rep.rate_excluding:.2%})\n",
            args,
        )
    return 0


def _cmd_transitions(args) -> int:
    model, _ = load_model(args.model)
    ranking = top_transitions(model, args.top_n)
    if args.format == "json":
        doc = {
            "top": [list(e) for e in ranking.top],
            "bottom": [list(e) for e in ranking.bottom],
            "begin": [list(e) for e in ranking.begin],
            "end": [list(e) for e in ranking.end],
        }
        _emit(_json_text(doc), args)
    else:
        lines = ["top transitions"]
        lines += [f"  {a} -> {b}  {w:.6f}" for a, b, w in ranking.top]
        lines.append("bottom transitions")
        lines += [f"  {a} -> {b}  {w:.6f}" for a, b, w in ranking.bottom]
        lines.append("begin weights")
        lines += [f"  {t}  {w:.6f}" for t, w in ranking.begin]
        lines.append("end weights")
        lines += [f"  {t}  {w:.6f}" for t, w in ranking.end]
        _emit("\n".join(lines) + "\n", args)
    return 0


def _cmd_features(args) -> int:
    words = tuple(args.words)
    lines = [
        format_feature_map(extract_token_features(words, t, FeatureConfig()))
        for t in range(len(words))
    ]
    _emit("\n".join(lines) + "\n", args)
    return 0


def _cmd_syllables(args) -> int:
    phonemes = from_ascii(args.phonemes)
    skeleton = to_skeleton(phonemes)
    analysis = analyze_word(phonemes)
    if args.format == "json":
        doc = {
            "phonemes": list(phonemes),
            "skeleton": skeleton,
            "accepted": analysis.accepted,
            "matches": [
                {"template": t, "syllables": c} for t, c in analysis.matches
            ],
        }
        _emit(_json_text(doc), args)
    else:
        match_text = (
            ", ".join(f"{t} ({c} syllables)" for t, c in analysis.matches)
            if analysis.matches
            else "none"
        )
        _emit(
            f"phonemes: {' '.join(phonemes)}\n"
            f"skeleton: {skeleton}\n"
            f"accepted: {'yes' if analysis.accepted else 'no'}\n"
            f"matches: {match_text}\n",
            args,
        )
    return 0


def _cmd_gen(args) -> int:
    config = SynthConfig(
        seed=args.seed,
        n_sentences=args.count,
        min_len=args.min_len,
        max_len=args.max_len,
    )
    corpus = generate(config)
    header = f"# {config_header(config)}\n"
    _emit(header + serialize_tagged(corpus, config.tagset), args)
    return 0


def build_parser() -> _Parser:
    parser = _Parser(
        prog="nagatag",
        description="Linear-chain CRF part-of-speech tagging toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.set_defaults(func=func)
        return p

    p = add("train", _cmd_train, "train a model on an annotated corpus file")
    p.add_argument("input", help="annotated corpus file (word/TAG)")
    p.add_argument("--model", required=True, help="output model file (JSON)")
    p.add_argument("--tagset", help="tagset file, one tag per line")
    p.add_argument("--c1", type=_nonneg, default=0.1, help="L1 weight (default 0.1)")
    p.add_argument("--c2", type=_nonneg, default=0.1, help="L2 weight (default 0.1)")
    p.add_argument(
        "--max-iter", type=_positive, default=100,
        help="optimizer iteration cap (default 100)",
    )

    p = add("tag", _cmd_tag, "tag raw sentences (one per line) with a trained model")
    p.add_argument("input", help="raw text file, whitespace-tokenized")
    p.add_argument("--model", required=True)
    p.add_argument("--output")

    p = add("eval", _cmd_eval, "evaluate a model against a gold annotated file")
    p.add_argument("input", help="gold annotated corpus file")
    p.add_argument("--model", required=True)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--output")

    p = add("stats", _cmd_stats, "tag frequency table for an annotated file")
    p.add_argument("input")
    p.add_argument("--tagset")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--output")

    p = add("split", _cmd_split, "sentence-level train/test split")
    p.add_argument("input")
    p.add_argument("train_output")
    p.add_argument("test_output")
    p.add_argument("--tagset")
    p.add_argument("--fraction", type=_fraction, default=0.7, help="train share (default 0.7)")
    p.add_argument("--seed", type=int, default=0)

    p = add("agreement", _cmd_agreement, "token-level disagreement between two annotations")
    p.add_argument("reference", help="reference annotation")
    p.add_argument("other", help="second annotation of the same text")
    p.add_argument("--tagset")
    p.add_argument(
        "--exclude-tag", default="FW",
        help="tag whose reference-side disagreements the excluded rate drops (default FW)",
    )
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--output")

    p = add("transitions", _cmd_transitions, "ranked transition weights of a model")
    p.add_argument("--model", required=True)
    p.add_argument("--top-n", type=_positive, default=5)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--output")

    p = add("features", _cmd_features, "feature map dump for one sentence")
    p.add_argument("words", nargs="+", help="sentence words")
    p.add_argument("--output")

    p = add("syllables", _cmd_syllables, "syllable-structure analysis of a phoneme string")
    p.add_argument("phonemes", help="dot-separated phonemes, ASCII aliases allowed (g.o.r)")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--output")

    p = add("gen", _cmd_gen, "generate a synthetic annotated corpus")
    p.add_argument("count", type=_positive, help="number of sentences")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-len", type=_positive, default=5)
    p.add_argument("--max-len", type=_positive, default=20)
    p.add_argument("--output")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (CorpusError, OptimError, ArithmeticError, OSError, ValueError) as exc:
        print(f"nagatag: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
