"""Command-line entry point.

Exit codes: 0 success, 1 validation error, 2 backend failure, 3 I/O error.
Errors are printed to stderr as one-line JSON diagnostics.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import aggregate as agg
from . import corpus as corpus_mod
from . import generation as gen
from . import report as report_mod
from . import scoring
from .identities import ApplicationKind, Language, PromptMethod
from .lexicon import (
    LexiconError,
    TableSimilarityOracle,
    TableSynonymProvider,
    expand_lexicon,
    load_lexicon,
    save_lexicon,
    seed_lexicon_path,
    validate_lexicon,
)
from .pipeline import ConfigError, StageError, load_config, pipeline_run
from .preprocess import load_stopwords
from .prompts import (
    PromptError,
    prompt_record,
    render_debias_prompt,
    iter_prompt_matrix,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_BACKEND = 2
EXIT_IO = 3


def _diagnostic(error: Exception) -> None:
    print(
        json.dumps(
            {"error": type(error).__name__, "message": str(error)},
            ensure_ascii=False,
        ),
        file=sys.stderr,
    )


def _parse_language(name: str) -> Language:
    try:
        return Language(name.lower())
    except ValueError:
        raise ValueError(
            f"unknown language {name!r}; expected one of "
            f"{', '.join(l.value for l in Language)}"
        ) from None


def _parse_methods(raw: str) -> list[PromptMethod]:
    methods = []
    for token in raw.split(","):
        token = token.strip().lower()
        if not token:
            continue
        try:
            methods.append(PromptMethod(token))
        except ValueError:
            raise ValueError(f"unknown method {token!r}") from None
    if not methods:
        raise ValueError("no methods given")
    return methods


def cmd_prompts_emit(args: argparse.Namespace) -> int:
    language = _parse_language(args.language)
    methods = _parse_methods(args.methods)
    debias_methods = [m for m in methods if m.is_debias]
    originals = {}
    if debias_methods:
        if not args.source_records:
            raise ValueError(
                "debias prompts wrap an original output; pass --source-records"
            )
        for record in corpus_mod.read_records(args.source_records):
            if record.method is PromptMethod.ORIGINAL and record.language is language:
                originals[(record.identity, record.application)] = record.raw_output

    count = 0
    with open(args.out, "w", encoding="utf-8") as handle:
        for identity, app, prompt in iter_prompt_matrix(language):
            for method in methods:
                if method is PromptMethod.ORIGINAL:
                    text = prompt
                else:
                    source = originals.get((identity, app))
                    if source is None:
                        raise ValueError(
                            f"no original output for {identity} / {app.kind.value}"
                        )
                    text = render_debias_prompt(method, source)
                record = prompt_record(identity, app, language, method, text)
                handle.write(json.dumps(record, ensure_ascii=False) + "\n")
                count += 1
    if not args.quiet:
        print(f"wrote {count} prompts to {args.out}")
    return EXIT_OK


def cmd_lexicon_validate(args: argparse.Namespace) -> int:
    lexicon = load_lexicon(args.path)
    violations = validate_lexicon(lexicon)
    if violations:
        for violation in violations:
            print(f"{violation.lemma}: {violation.message}", file=sys.stderr)
        raise ValueError(f"lexicon has {len(violations)} violations")
    if not args.quiet:
        print(f"ok: {len(lexicon)} entries")
    return EXIT_OK


def cmd_lexicon_expand(args: argparse.Namespace) -> int:
    lexicon = load_lexicon(args.path)
    provider = TableSynonymProvider.from_csv(args.synonyms)
    oracle = TableSimilarityOracle.from_csv(args.similarity)
    if not 0.0 <= args.threshold <= 1.0:
        raise ValueError(f"threshold must be in [0, 1], got {args.threshold}")
    expanded = expand_lexicon(lexicon, provider, oracle, args.threshold)
    save_lexicon(expanded, args.out)
    if not args.quiet:
        print(f"expanded {len(lexicon)} -> {len(expanded)} entries at {args.out}")
    return EXIT_OK


def _resolve_config_path(args: argparse.Namespace) -> str:
    path = getattr(args, "config_override", None) or args.config
    if not path:
        raise ValueError("a configuration file is required; pass --config <path>")
    return path


def cmd_generate_run(args: argparse.Namespace) -> int:
    config = load_config(_resolve_config_path(args))
    if args.languages:
        config.languages = [_parse_language(l) for l in args.languages.split(",")]
    if args.methods:
        config.methods = _parse_methods(args.methods)
    if args.seed is not None:
        config.seed = args.seed
        if config.backend.get("kind", "stub") == "stub":
            config.backend = {**config.backend, "seed": args.seed}
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    sink = gen.RecordSink(out_dir / "records.jsonl")
    summary = gen.run_matrix(
        languages=config.languages,
        methods=config.methods,
        backend=config.make_backend(),
        sink=sink,
        gen_config=config.generation,
        trans_config=config.translation,
        concurrency=config.concurrency,
    )
    (out_dir / "run_summary.json").write_text(
        json.dumps(summary.to_json_dict(), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    if not args.quiet:
        print(json.dumps(summary.to_json_dict()["counts"], indent=2, sort_keys=True))
    totals = summary.to_json_dict()["counts"].values()
    generated = sum(c["generated"] for c in totals)
    failed = sum(c["failed"] for c in totals)
    if generated == 0 and failed > 0:
        # partial failures are tolerated and resumable; producing nothing
        # at all means the backend never worked
        raise gen.BackendUnavailableError(
            f"all {failed} attempted generations failed"
        )
    return EXIT_OK


def cmd_ingest(args: argparse.Namespace) -> int:
    records = corpus_mod.read_records(args.infile)
    detector = corpus_mod.stub_english_detector if args.detector == "stub" else None
    cleaned, summary = corpus_mod.clean_records(records, detector)
    stopwords = load_stopwords(args.stopwords)
    corpora = corpus_mod.build_corpus(cleaned, stopwords=stopwords)
    corpus_mod.write_corpus_dir(corpora, args.out, summary)
    if not args.quiet:
        print(
            f"kept {summary.kept}/{summary.input_records} records; "
            f"{len(corpora)} corpora at {args.out}"
        )
    return EXIT_OK


def cmd_score(args: argparse.Namespace) -> int:
    corpora = corpus_mod.read_corpus_dir(args.corpus)
    if not corpora:
        raise FileNotFoundError(f"no corpus_*.jsonl files in {args.corpus}")
    lexicon = load_lexicon(args.lexicon)
    scope = scoring.Scope(args.scope)
    cells: list[scoring.ScoreCell] = []
    overall_rows = []
    for (language, method) in sorted(
        corpora,
        key=lambda lm: (
            corpus_mod.LANGUAGE_ORDER[lm[0]],
            corpus_mod.METHOD_ORDER[lm[1]],
        ),
    ):
        corpus = corpora[(language, method)]
        cells.extend(scoring.score_corpus(corpus, lexicon, scope))
        overall_rows.extend(scoring.overall_top_terms(corpus))
    scoring.write_scores(cells, args.out)
    if args.overall_out:
        scoring.write_overall_terms(overall_rows, args.overall_out)
    if not args.quiet:
        print(f"scored {len(cells)} documents to {args.out}")
    return EXIT_OK


def cmd_aggregate(args: argparse.Namespace) -> int:
    cells = scoring.read_scores(args.scores)
    axis = agg.SeriesAxis(args.axis)
    application = ApplicationKind(args.application) if args.application else None
    results = agg.series(cells, axis, application)
    count = agg.write_averages_csv(results, args.out)
    if not args.quiet:
        print(f"wrote {count} averages to {args.out}")
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    if not args.scores and not args.overall:
        raise ValueError("report requires --scores and/or --overall")
    cells = scoring.read_scores(args.scores) if args.scores else None
    overall = scoring.read_overall_terms(args.overall) if args.overall else None
    table = report_mod.build_report(
        cells,
        overall,
        _parse_language(args.language),
        ApplicationKind(args.application),
        PromptMethod(args.method),
    )
    rendered = report_mod.render_table(table, report_mod.ReportFormat(args.format))
    Path(args.out).write_text(rendered, encoding="utf-8")
    if not args.quiet:
        print(f"wrote report to {args.out}")
    return EXIT_OK


def cmd_pipeline(args: argparse.Namespace) -> int:
    config = load_config(_resolve_config_path(args))
    summary = pipeline_run(config, seed_override=args.seed)
    if not args.quiet:
        print(f"pipeline complete; artifacts under {summary['out_dir']}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="biaslex",
        description="Lexicon-based intersectional bias evaluation pipeline",
    )
    parser.add_argument("--quiet", action="store_true", help="suppress progress output")
    parser.add_argument("--seed", type=int, default=None, help="stub backend seed")
    parser.add_argument(
        "--config", default=None, help="run configuration (generate run, pipeline)"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    prompts = sub.add_parser("prompts", help="render prompt matrices")
    prompts_sub = prompts.add_subparsers(dest="subcommand", required=True)
    emit = prompts_sub.add_parser("emit", help="write one JSONL record per prompt")
    emit.add_argument("--language", required=True)
    emit.add_argument(
        "--methods",
        default="original",
        help="comma-separated: original,simple,complex",
    )
    emit.add_argument(
        "--source-records",
        default=None,
        help="originals JSONL (required for debias methods)",
    )
    emit.add_argument("--out", required=True)
    emit.set_defaults(func=cmd_prompts_emit)

    lexicon = sub.add_parser("lexicon", help="validate or expand a lexicon file")
    lexicon_sub = lexicon.add_subparsers(dest="subcommand", required=True)
    validate = lexicon_sub.add_parser("validate")
    validate.add_argument("path")
    validate.set_defaults(func=cmd_lexicon_validate)
    expand = lexicon_sub.add_parser("expand")
    expand.add_argument("path")
    expand.add_argument("--threshold", type=float, default=0.5)
    expand.add_argument("--synonyms", required=True, help="lemma,synonyms CSV")
    expand.add_argument("--similarity", required=True, help="a,b,score CSV")
    expand.add_argument("--out", required=True)
    expand.set_defaults(func=cmd_lexicon_expand)

    generate = sub.add_parser("generate", help="run generation against a backend")
    generate_sub = generate.add_subparsers(dest="subcommand", required=True)
    run = generate_sub.add_parser("run")
    run.add_argument("--config", dest="config_override", default=None)
    run.add_argument("--languages", default=None, help="comma-separated names")
    run.add_argument("--methods", default=None)
    run.add_argument("--out", required=True)
    run.set_defaults(func=cmd_generate_run)

    ingest = sub.add_parser("ingest", help="clean records and build corpora")
    ingest.add_argument("--in", dest="infile", required=True)
    ingest.add_argument("--out", required=True)
    ingest.add_argument("--stopwords", default=None)
    ingest.add_argument("--detector", choices=["stub", "none"], default="stub")
    ingest.set_defaults(func=cmd_ingest)

    score = sub.add_parser("score", help="compute bias scores over corpora")
    score.add_argument("--corpus", required=True, help="corpus directory")
    score.add_argument("--lexicon", default=str(seed_lexicon_path()))
    score.add_argument("--scope", choices=["identity", "all"], default="identity")
    score.add_argument("--out", required=True)
    score.add_argument("--overall-out", default=None)
    score.set_defaults(func=cmd_score)

    aggregate = sub.add_parser("aggregate", help="average scores along an axis")
    aggregate.add_argument("--scores", required=True)
    aggregate.add_argument(
        "--axis", required=True, choices=[a.value for a in agg.SeriesAxis]
    )
    aggregate.add_argument(
        "--application",
        default=None,
        choices=[k.value for k in ApplicationKind],
    )
    aggregate.add_argument("--out", required=True)
    aggregate.set_defaults(func=cmd_aggregate)

    report = sub.add_parser("report", help="render a per-identity table")
    report.add_argument("--scores", default=None)
    report.add_argument("--overall", default=None)
    report.add_argument("--language", required=True)
    report.add_argument(
        "--application", required=True, choices=[k.value for k in ApplicationKind]
    )
    report.add_argument(
        "--method", required=True, choices=[m.value for m in PromptMethod]
    )
    report.add_argument("--format", required=True, choices=["csv", "md", "html"])
    report.add_argument("--out", required=True)
    report.set_defaults(func=cmd_report)

    pipeline = sub.add_parser("pipeline", help="run generate/ingest/score/aggregate/report")
    pipeline.add_argument("--config", dest="config_override", default=None)
    pipeline.set_defaults(func=cmd_pipeline)

    return parser


def dispatch(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage; map onto the validation code
        return EXIT_VALIDATION if exc.code else EXIT_OK
    try:
        return args.func(args)
    except StageError as exc:
        _diagnostic(exc)
        cause = exc.cause
        if isinstance(cause, gen.BackendError):
            return EXIT_BACKEND
        if isinstance(cause, OSError):
            return EXIT_IO
        return EXIT_VALIDATION
    except gen.BackendError as exc:
        _diagnostic(exc)
        return EXIT_BACKEND
    except OSError as exc:
        _diagnostic(exc)
        return EXIT_IO
    except (
        ConfigError,
        LexiconError,
        PromptError,
        agg.NoMatchingCellsError,
        report_mod.ReportError,
        scoring.EmptyCorpusError,
        gen.PrerequisiteMissingError,
        ValueError,
        KeyError,
    ) as exc:
        _diagnostic(exc)
        return EXIT_VALIDATION


def main(argv: list[str] | None = None) -> int:
    return dispatch(argv)


if __name__ == "__main__":
    raise SystemExit(main())
