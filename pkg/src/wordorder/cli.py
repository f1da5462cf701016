"""Command-line entry point: ``wordorder extract|evaluate|density``.

Exit codes: 0 success, 1 usage or configuration error, 2 data error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .conllu import read_treebank
from .dataset import (
    DatasetError,
    aggregate,
    density,
    read_csv,
    read_reference,
    select_one_treebank_per_language,
    write_csv,
    write_density,
)
from .extraction import BUILTIN_FEATURES, CountOptions, extract_treebank, load_feature_config, merge_records
from .regress import REPORT_HEADER, LogisticParams, RegressionError, SplitConfig, evaluate_feature
from .vectors import VectorError, join, load_aliases, read_vectors

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def header_comment(seed: int) -> str:
    return f"wordorder {__version__} seed={seed}"


def treebank_names(path: Path) -> tuple[str, str]:
    """``en_ewt-ud-train.conllu`` -> treebank ``en_ewt``, language ``en``."""
    treebank = path.name.split(".", 1)[0].split("-", 1)[0]
    language = treebank.split("_", 1)[0]
    return treebank, language


def _extract_file(args):
    path, treebank, language, features, options = args
    try:
        return extract_treebank(read_treebank(path), treebank, language, features, options), None
    except (OSError, UnicodeDecodeError, ValueError) as exc:
        return None, f"{path}: {exc}"


def cmd_extract(args) -> int:
    tb_dir = Path(args.treebank_dir)
    if not tb_dir.is_dir():
        raise UsageError(f"{tb_dir} is not a directory")
    files = sorted(p for p in tb_dir.rglob("*.conllu") if p.is_file())
    if not files:
        print(f"no .conllu files found under {tb_dir}", file=sys.stderr)
        return EXIT_DATA
    try:
        aliases = load_aliases(args.alias) if args.alias else {}
        features = list(BUILTIN_FEATURES)
        if args.features:
            features += load_feature_config(args.features)
    except ValueError as exc:
        raise UsageError(exc) from None
    options = CountOptions(strict_deprel=args.strict_deprel, follow_conj=args.follow_conj)

    jobs = []
    for path in files:
        treebank, language = treebank_names(path)
        language = aliases.get(treebank, aliases.get(language, language))
        jobs.append((path, treebank, language, features, options))

    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_extract_file, jobs))
    else:
        results = [_extract_file(job) for job in jobs]

    failed = [msg for _, msg in results if msg]
    for msg in failed:
        print(f"error: {msg}", file=sys.stderr)
    # train/dev/test files of one treebank are summed; a partly unreadable treebank is dropped
    broken = {job[1] for job, (_, msg) in zip(jobs, results) if msg}
    by_treebank: dict[str, list] = {}
    for job, (rec, _) in zip(jobs, results):
        if job[1] not in broken:
            by_treebank.setdefault(job[1], []).append(rec)
    records = [merge_records(by_treebank[tb]) for tb in sorted(by_treebank)]
    table = aggregate(records)
    with open(args.output, "w", encoding="utf-8", newline="\n") as out:
        write_csv(table, out, comment=header_comment(args.seed))
    print(f"treebanks: {len(records)}  languages: {len({r.language_code for r in records})}  "
          f"sentences: {sum(r.sentence_count for r in records)}  failed files: {len(failed)}")
    if failed and args.strict:
        return EXIT_DATA
    return EXIT_OK


def cmd_evaluate(args) -> int:
    table = read_csv(args.dataset)
    try:
        aliases = load_aliases(args.alias) if args.alias else {}
    except ValueError as exc:
        raise UsageError(exc) from None
    sources = []
    for path in args.vectors:
        path = Path(path)
        sources.append((path.stem, read_vectors(path)))
    logistic = LogisticParams(lam=args.logistic_lambda, max_iter=args.max_iter, tol=args.tol)
    split_config = SplitConfig(train_fraction=args.train_fraction, seed=args.seed)
    selected = select_one_treebank_per_language(table, args.seed)

    lines = []
    for feature in selected.features():
        for label, vectors in sources:
            data = join(selected, vectors, feature, aliases=aliases, source=label)
            reports = evaluate_feature(data, split_config, logistic, ridge=args.ridge,
                                       standardize_columns=args.standardize,
                                       score_discrete=args.score_discrete)
            lines.extend(r.tsv_line() for r in reports)
    with open(args.output, "w", encoding="utf-8", newline="\n") as out:
        out.write(f"# {header_comment(args.seed)}\n")
        out.write(REPORT_HEADER + "\n")
        for line in lines:
            out.write(line + "\n")
    print(f"wrote {len(lines)} report rows to {args.output}")
    return EXIT_OK


def cmd_density(args) -> int:
    table = read_csv(args.dataset)
    series = [density(table, f) for f in table.features()]
    if args.reference:
        series += read_reference(args.reference)
    with open(args.output, "w", encoding="utf-8", newline="\n") as out:
        write_density(series, out, comment=header_comment(args.seed))
    print(f"wrote {len(series)} series to {args.output}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wordorder", description="Gradient word-order typology from UD treebanks.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("extract", help="count word-order constructions per treebank")
    p.add_argument("treebank_dir")
    p.add_argument("-o", "--output", required=True, help="dataset CSV to write")
    p.add_argument("--alias", help="two-column file mapping treebank or language names to codes")
    p.add_argument("--features", help="key=value file with extra head-dependent features")
    p.add_argument("--strict-deprel", action="store_true", help="match full deprel labels, subtypes included")
    p.add_argument("--follow-conj", action="store_true", help="let conjuncts inherit the first conjunct's relation")
    p.add_argument("--strict", action="store_true", help="exit nonzero if any file fails")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("evaluate", help="train and score linear vs logistic predictors")
    p.add_argument("dataset")
    p.add_argument("--vectors", action="append", required=True,
                   help="language-vector file; repeat for several sources (label = file stem)")
    p.add_argument("-o", "--output", required=True, help="report TSV to write")
    p.add_argument("--alias", help="two-column file mapping dataset language codes to vector codes")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--train-fraction", type=float, default=0.8)
    p.add_argument("--standardize", action="store_true", help="standardise vector columns on the training split")
    p.add_argument("--ridge", type=float, default=0.0, help="L2 penalty for the linear model")
    p.add_argument("--logistic-lambda", type=float, default=1.0)
    p.add_argument("--max-iter", type=int, default=10_000)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--score-discrete", action="store_true",
                   help="also score logistic predictions against discretized test labels")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("density", help="histogram proportions per feature")
    p.add_argument("dataset")
    p.add_argument("-o", "--output", required=True, help="density TSV to write")
    p.add_argument("--reference", help="categorical reference CSV (language,feature,value)")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_density)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DatasetError, VectorError, RegressionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
