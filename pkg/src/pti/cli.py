"""Command-line interface.

Subcommands cover the full pipeline: ``synth`` and ``split`` produce data,
``build`` writes a serialized index, ``query`` retrieves candidates,
``classify`` types query files, and ``eval`` / ``ceiling`` measure recall.
Results go to standard output (or ``-o``), diagnostics to standard error.

Exit codes: 0 success, 2 usage or out-of-range configuration, 3 missing
input file, 4 unparseable input file.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .corpus import (
    Corpus,
    CorpusParseError,
    build_eval_split,
    classify_query,
    generate_synthetic,
    load_corpus,
    load_queries,
    save_corpus,
    save_split,
)
from .estimators import PtiCandidateGenerator, WikiPriorsCandidateGenerator
from .evaluation import _report_config, ceiling_recall, evaluate, sweep
from .index import (
    DEFAULT_ALPHA_GRID,
    DEFAULT_LAMBDA_GRID,
    IndexFormatError,
    apply_threshold,
    build_index,
    count_cooccurrences,
    empty_count_table,
    deserialize_index,
    fuse_indexes,
    serialize_index,
    smooth_pivot_probabilities,
)
from .scorer import DEFAULT_K, normalize_scores, score_entities, top_k
from .tokenizer import TokenizerConfig

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_MISSING = 3
EXIT_PARSE = 4


def _default_threads() -> int:
    value = os.environ.get("PTI_THREADS", "1")
    try:
        return max(1, int(value))
    except ValueError:
        return 1


def _add_tokenizer_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--ngram-min", type=int, default=2, help="shortest n-gram length")
    parser.add_argument("--ngram-max", type=int, default=5, help="longest n-gram length")
    parser.add_argument(
        "--wildcard",
        action="store_true",
        help="index and query single-position wildcard token variants",
    )


def _add_corpus_args(parser: argparse.ArgumentParser, pivot_required: bool) -> None:
    parser.add_argument("--pivot", required=pivot_required, help="pivot-language corpus TSV")
    parser.add_argument("--target", help="target-language corpus TSV")
    parser.add_argument("--pivot-language", default="pl", help="label for the pivot corpus")
    parser.add_argument("--target-language", default="tl", help="label for the target corpus")


def _open_output(path: str | None):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline="\n"), True


def _load_corpora(args) -> tuple[Corpus, Corpus | None]:
    pivot = load_corpus(args.pivot, args.pivot_language)
    target = load_corpus(args.target, args.target_language) if args.target else None
    return pivot, target


def _cmd_synth(args) -> int:
    corpus = generate_synthetic(
        args.entities, args.pairs, args.alphabet, args.seed, args.language
    )
    save_corpus(corpus, args.output)
    print(
        f"wrote {len(corpus)} distinct pairs ({corpus.total_count} occurrences) "
        f"to {args.output}",
        file=sys.stderr,
    )
    return EXIT_OK


def _cmd_split(args) -> int:
    corpus = load_corpus(args.corpus, args.language)
    split = build_eval_split(corpus, args.max_per_type, args.seed)
    save_split(split, args.out_dir)
    print(
        f"train: {len(split.train)} pairs, validation: {len(split.validation)} queries, "
        f"test: {len(split.test)} queries",
        file=sys.stderr,
    )
    return EXIT_OK


def _cmd_classify(args) -> int:
    train = load_corpus(args.train, "und")
    queries = load_queries(args.queries)
    out, close = _open_output(args.output)
    try:
        for mention, entity, _ in queries:
            qtype = classify_query(mention, entity, train)
            out.write(f"{mention}\t{entity}\t1\t{qtype.value}\n")
    finally:
        if close:
            out.close()
    return EXIT_OK


def _cmd_build(args) -> int:
    config = TokenizerConfig(args.ngram_min, args.ngram_max, args.wildcard)
    pivot, target = _load_corpora(args)
    if args.gamma is not None and target is None:
        raise ValueError("--gamma needs --target (probability fusion mixes two indexes)")
    if args.gamma is not None and args.alpha is not None:
        raise ValueError("--alpha and --gamma are mutually exclusive blending schemes")
    if args.beta is not None and target is not None and args.gamma is None:
        raise ValueError(
            "--beta smooths the pivot index only; combine it with a target via --gamma"
        )

    pivot_counts = count_cooccurrences(pivot, config)
    if args.beta is not None:
        universe = set(pivot.entity_set)
        if target is not None:
            universe |= target.entity_set
        pivot_index = smooth_pivot_probabilities(pivot_counts, args.beta, universe)
    else:
        pivot_index = None

    if args.gamma is not None:
        target_counts = count_cooccurrences(target, config)
        target_index = build_index(target_counts, empty_count_table(config), 1.0)
        if pivot_index is None:
            pivot_index = build_index(empty_count_table(config), pivot_counts, 1.0)
        index = fuse_indexes(target_index, pivot_index, args.gamma)
    elif pivot_index is not None:
        index = pivot_index
    else:
        alpha = 1.0 if args.alpha is None else args.alpha
        if target is not None:
            target_counts = count_cooccurrences(target, config)
        else:
            target_counts = empty_count_table(config)
        index = build_index(target_counts, pivot_counts, alpha)

    if args.tau > 0:
        index = apply_threshold(index, args.tau)
    serialize_index(index, args.output)
    print(
        f"indexed {len(index.prior)} tokens / {len(index.posterior)} entities "
        f"({index.num_prior_entries} prior entries) to {args.output}",
        file=sys.stderr,
    )
    return EXIT_OK


def _read_mentions(path: str) -> list[str]:
    if path == "-":
        lines = sys.stdin.read().split("\n")
    else:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().split("\n")
    return [line for line in lines if line.strip()]


def _cmd_query(args) -> int:
    if args.method == "pti":
        if not args.index:
            raise ValueError("--method pti queries a serialized index; pass --index")
        index = deserialize_index(args.index)

        def generator(mention: str, k: int):
            scores = score_entities(index, mention, args.lam)
            if args.normalize and scores.scores:
                scores = normalize_scores(scores)
            return top_k(scores, k)

    else:
        if not args.pivot:
            raise ValueError("--method wikipriors builds from corpora; pass --pivot")
        if args.normalize:
            raise ValueError("--normalize applies to pti scores only")
        pivot, target = _load_corpora(args)
        baseline = WikiPriorsCandidateGenerator(k=args.k, zero_shot=args.zero_shot)
        baseline.fit(pivot, target)

        def generator(mention: str, k: int):
            return baseline.generate(mention, k)

    mentions = _read_mentions(args.mentions)
    out, close = _open_output(args.output)
    try:
        for mention in mentions:
            for rank, (entity, score) in enumerate(generator(mention, args.k), 1):
                if args.format == "tsv":
                    out.write(f"{mention}\t{rank}\t{entity}\t{score!r}\n")
                else:
                    record = {"mention": mention, "rank": rank, "entity": entity, "score": score}
                    out.write(json.dumps(record, ensure_ascii=False) + "\n")
    finally:
        if close:
            out.close()
    return EXIT_OK


def _typed_queries(args, target: Corpus | None, path: str):
    """Load queries, typing any untyped rows against the target train set."""
    raw = load_queries(path)
    train = target if target is not None else Corpus([], "und")
    return [
        (mention, entity, qtype if qtype is not None else classify_query(mention, entity, train))
        for mention, entity, qtype in raw
    ]


def _cmd_eval(args) -> int:
    pivot, target = _load_corpora(args)
    test = _typed_queries(args, target, args.test)
    spaces = {
        "PL": pivot.entity_set,
        "PL+TL": pivot.entity_set | (target.entity_set if target else frozenset()),
    }

    if args.method == "wikipriors":
        if args.sweep:
            raise ValueError("--sweep applies to pti (wikipriors has no parameter grid)")
        estimator = WikiPriorsCandidateGenerator(k=args.k, zero_shot=args.zero_shot)
        estimator.fit(pivot, target)
        report = evaluate(
            estimator, test, args.k, "wikipriors", _report_config(estimator),
            spaces, args.threads,
        )
    else:
        config = TokenizerConfig(args.ngram_min, args.ngram_max, args.wildcard)
        pivot_counts = count_cooccurrences(pivot, config)
        target_counts = count_cooccurrences(target, config) if target else None
        estimator = PtiCandidateGenerator(
            ngram_min=args.ngram_min,
            ngram_max=args.ngram_max,
            wildcard=args.wildcard,
            alpha=1.0 if args.alpha is None else args.alpha,
            lam=1.0 if args.lam is None else args.lam,
            tau=args.tau,
            k=args.k,
        )
        if args.sweep:
            if not args.valid:
                raise ValueError("--sweep needs --valid for model selection")
            validation = _typed_queries(args, target, args.valid)
            grid: dict[str, tuple] = {"lam": DEFAULT_LAMBDA_GRID}
            if target is not None:
                grid["alpha"] = DEFAULT_ALPHA_GRID
            result = sweep(
                estimator, grid, pivot_counts, target_counts, validation, test,
                args.k, "pti", spaces, args.threads,
            )
            print(
                f"best parameters {result.best_params} "
                f"(validation recall {result.validation_recall:.2f})",
                file=sys.stderr,
            )
            report = result.report
        else:
            estimator.fit(pivot_counts, target_counts)
            report = evaluate(
                estimator, test, args.k, "pti", _report_config(estimator),
                spaces, args.threads,
            )

    out, close = _open_output(args.output)
    try:
        out.write(report.to_json() + "\n")
    finally:
        if close:
            out.close()
    return EXIT_OK


def _cmd_ceiling(args) -> int:
    pivot, target = _load_corpora(args)
    test = _typed_queries(args, target, args.test)
    result = {
        "n": len(test),
        "PL": ceiling_recall(pivot.entity_set, test),
        "PL+TL": ceiling_recall(
            pivot.entity_set | (target.entity_set if target else frozenset()), test
        ),
    }
    out, close = _open_output(args.output)
    try:
        out.write(json.dumps(result, ensure_ascii=False, indent=2) + "\n")
    finally:
        if close:
            out.close()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pti", description="Candidate generation for cross-lingual entity linking."
    )
    parser.add_argument(
        "--threads",
        type=int,
        default=_default_threads(),
        help="worker threads for evaluation (default: PTI_THREADS or 1)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a deterministic synthetic corpus")
    p.add_argument("--entities", type=int, required=True)
    p.add_argument("--pairs", type=int, required=True)
    p.add_argument("--alphabet", default="abcdefghijklmnopqrstuvwxyz")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--language", default="syn")
    p.add_argument("--output", "-o", required=True)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("split", help="hold out typed validation/test queries")
    p.add_argument("--corpus", required=True)
    p.add_argument("--language", default="und")
    p.add_argument("--max-per-type", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_split)

    p = sub.add_parser("classify", help="annotate queries with their difficulty type")
    p.add_argument("--train", required=True, help="target-language training corpus TSV")
    p.add_argument("--queries", required=True)
    p.add_argument("--output", "-o")
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("build", help="build and serialize a probability index")
    _add_corpus_args(p, pivot_required=True)
    _add_tokenizer_args(p)
    p.add_argument("--alpha", type=float, help="pivot count weight (default 1)")
    p.add_argument("--tau", type=float, default=0.0, help="probability pruning threshold")
    p.add_argument("--beta", type=float, help="additive smoothing for a pivot-only index")
    p.add_argument("--gamma", type=float, help="probability-level fusion weight")
    p.add_argument("--output", "-o", required=True)
    p.set_defaults(func=_cmd_build)

    p = sub.add_parser("query", help="retrieve top-K candidates for mentions")
    p.add_argument("--method", choices=("pti", "wikipriors"), default="pti")
    p.add_argument("--index", help="serialized index (pti method)")
    _add_corpus_args(p, pivot_required=False)
    p.add_argument("--zero-shot", action="store_true", help="ignore target tables (wikipriors)")
    p.add_argument("--mentions", default="-", help="file of mentions, one per line ('-' = stdin)")
    p.add_argument("--k", type=int, default=DEFAULT_K)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0,
                   help="posterior term weight (pti)")
    p.add_argument("--normalize", action="store_true",
                   help="rescale scores to sum to one before ranking output")
    p.add_argument("--format", choices=("tsv", "jsonl"), default="tsv")
    p.add_argument("--output", "-o")
    p.set_defaults(func=_cmd_query)

    p = sub.add_parser("eval", help="recall report for a generator on typed queries")
    p.add_argument("--method", choices=("pti", "wikipriors"), required=True)
    _add_corpus_args(p, pivot_required=True)
    _add_tokenizer_args(p)
    p.add_argument("--test", required=True, help="test query TSV")
    p.add_argument("--valid", help="validation query TSV (needed for --sweep)")
    p.add_argument("--sweep", action="store_true",
                   help="grid-search blending/scoring weights on validation recall")
    p.add_argument("--k", type=int, default=DEFAULT_K)
    p.add_argument("--lambda", dest="lam", type=float, help="posterior term weight")
    p.add_argument("--alpha", type=float, help="pivot count weight")
    p.add_argument("--tau", type=float, default=0.0)
    p.add_argument("--zero-shot", action="store_true")
    p.add_argument("--output", "-o")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("ceiling", help="best reachable recall given corpus entity coverage")
    _add_corpus_args(p, pivot_required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--output", "-o")
    p.set_defaults(func=_cmd_ceiling)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except (CorpusParseError, IndexFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except FileNotFoundError as exc:
        print(f"error: no such file: {exc.filename}", file=sys.stderr)
        return EXIT_MISSING
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
