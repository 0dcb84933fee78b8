"""End-to-end run: generate, ingest, score, aggregate, report.

Every stage materializes its artifacts on disk so any number can be
re-checked or re-run in isolation; nothing is held only in memory.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from . import aggregate as agg
from . import corpus as corpus_mod
from . import generation as gen
from . import report as report_mod
from . import scoring
from .identities import ApplicationKind, Language, PromptMethod
from .lexicon import BiasLexicon, load_lexicon, load_seed_lexicon
from .preprocess import load_stopwords


class ConfigError(ValueError):
    """The run configuration is malformed or inconsistent."""


class StageError(Exception):
    """A pipeline stage failed; ``stage`` names it."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


_BACKEND_KEYS = {
    "kind",
    "url",
    "translate_url",
    "auth_env",
    "timeout",
    "max_retries",
    "backoff",
    "seed",
}
_GENERATION_KEYS = {
    "temperature",
    "top_k",
    "top_p",
    "max_new_tokens",
    "repetition_penalty",
}
_TRANSLATION_KEYS = {"num_beams", "max_new_tokens"}
_EXPANSION_KEYS = {"threshold", "synonyms", "similarity"}
_TOP_LEVEL_KEYS = {
    "out_dir",
    "languages",
    "methods",
    "seed",
    "backend",
    "generation",
    "translation",
    "concurrency",
    "scope",
    "lexicon",
    "stopwords",
    "detector",
    "expansion",
}


def _reject_unknown(data: dict, allowed: set[str], where: str) -> None:
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ConfigError(f"unknown {where} keys: {', '.join(unknown)}")


@dataclass
class RunConfig:
    """Validated settings for a pipeline run."""

    out_dir: Path
    languages: list[Language] = field(default_factory=lambda: [Language.HINDI])
    methods: list[PromptMethod] = field(default_factory=lambda: list(PromptMethod))
    seed: int = 0
    backend: dict = field(default_factory=lambda: {"kind": "stub"})
    generation: gen.GenerationConfig = field(default_factory=gen.GenerationConfig)
    translation: gen.TranslationConfig = field(default_factory=gen.TranslationConfig)
    concurrency: int = 1
    scope: scoring.Scope = scoring.Scope.IDENTITY_SCOPED
    lexicon_path: Path | None = None
    stopwords_path: Path | None = None
    detector: str = "stub"
    expansion_threshold: float = 0.5

    def make_backend(self) -> gen.Backend:
        kind = self.backend.get("kind", "stub")
        if kind == "stub":
            return gen.StubBackend(seed=int(self.backend.get("seed", self.seed)))
        if kind == "http":
            if "url" not in self.backend:
                raise ConfigError("http backend requires a 'url'")
            return gen.HttpBackend(
                url=self.backend["url"],
                translate_url=self.backend.get("translate_url"),
                auth_env=self.backend.get("auth_env"),
                timeout=float(self.backend.get("timeout", 30.0)),
                max_retries=int(self.backend.get("max_retries", 3)),
                backoff=float(self.backend.get("backoff", 0.5)),
            )
        raise ConfigError(f"unknown backend kind {kind!r}")

    def load_lexicon(self) -> BiasLexicon:
        if self.lexicon_path is None:
            return load_seed_lexicon()
        return load_lexicon(self.lexicon_path)


def parse_config(data: dict, base_dir: Path | None = None) -> RunConfig:
    """Build a :class:`RunConfig` from parsed JSON, rejecting unknown keys."""
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    _reject_unknown(data, _TOP_LEVEL_KEYS, "config")
    base = base_dir or Path.cwd()

    backend = data.get("backend", {"kind": "stub"})
    if not isinstance(backend, dict):
        raise ConfigError("'backend' must be an object")
    _reject_unknown(backend, _BACKEND_KEYS, "backend")

    generation_data = data.get("generation", {})
    _reject_unknown(generation_data, _GENERATION_KEYS, "generation")
    translation_data = data.get("translation", {})
    _reject_unknown(translation_data, _TRANSLATION_KEYS, "translation")

    expansion = data.get("expansion", {})
    if not isinstance(expansion, dict):
        raise ConfigError("'expansion' must be an object")
    _reject_unknown(expansion, _EXPANSION_KEYS, "expansion")
    threshold = expansion.get("threshold", 0.5)
    if not isinstance(threshold, (int, float)) or not 0.0 <= threshold <= 1.0:
        raise ConfigError(f"expansion threshold must be in [0, 1], got {threshold}")

    try:
        languages = [Language(l) for l in data.get("languages", ["hindi"])]
        methods = [PromptMethod(m) for m in data.get("methods", ["original"])]
        scope = scoring.Scope(data.get("scope", "identity"))
        generation_config = gen.GenerationConfig(**generation_data)
        translation_config = gen.TranslationConfig(**translation_data)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    detector = data.get("detector", "stub")
    if detector not in ("stub", "none"):
        raise ConfigError(f"detector must be 'stub' or 'none', got {detector!r}")

    concurrency = data.get("concurrency", 1)
    if not isinstance(concurrency, int) or concurrency < 1:
        raise ConfigError("concurrency must be a positive integer")

    if "out_dir" not in data:
        raise ConfigError("config requires 'out_dir'")

    def _path(key: str) -> Path | None:
        value = data.get(key)
        if value is None:
            return None
        path = Path(value)
        return path if path.is_absolute() else base / path

    out_dir = Path(data["out_dir"])
    if not out_dir.is_absolute():
        out_dir = base / out_dir

    return RunConfig(
        out_dir=out_dir,
        languages=languages,
        methods=methods,
        seed=int(data.get("seed", 0)),
        backend=backend,
        generation=generation_config,
        translation=translation_config,
        concurrency=concurrency,
        scope=scope,
        lexicon_path=_path("lexicon"),
        stopwords_path=_path("stopwords"),
        detector=detector,
        expansion_threshold=float(threshold),
    )


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return parse_config(data, base_dir=path.parent)


def _write_json(path: Path, data: dict) -> None:
    path.write_text(
        json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )


def pipeline_run(config: RunConfig, seed_override: int | None = None) -> dict:
    """Run all stages, returning a summary of artifacts written.

    Stops at the first failing stage and reports which one failed.
    """
    if seed_override is not None:
        config.seed = seed_override
        if config.backend.get("kind", "stub") == "stub":
            config.backend = {**config.backend, "seed": seed_override}
    out = config.out_dir
    out.mkdir(parents=True, exist_ok=True)

    def rel(path: Path) -> str:
        return str(path.relative_to(out))

    summary: dict = {"out_dir": str(out), "stages": {}}

    # generate
    stage = "generate"
    try:
        backend = config.make_backend()
        sink = gen.RecordSink(out / "records.jsonl")
        run_summary = gen.run_matrix(
            languages=config.languages,
            methods=config.methods,
            backend=backend,
            sink=sink,
            gen_config=config.generation,
            trans_config=config.translation,
            concurrency=config.concurrency,
        )
        _write_json(out / "run_summary.json", run_summary.to_json_dict())
        counts = run_summary.to_json_dict()["counts"]
        generated = sum(c["generated"] for c in counts.values())
        failed = sum(c["failed"] for c in counts.values())
        if generated == 0 and failed > 0:
            raise gen.BackendUnavailableError(
                f"all {failed} attempted generations failed"
            )
        summary["stages"][stage] = {
            "records": rel(out / "records.jsonl"),
            "counts": counts,
        }
    except Exception as exc:
        raise StageError(stage, exc) from exc

    # ingest
    stage = "ingest"
    try:
        records = corpus_mod.read_records(out / "records.jsonl")
        detector = (
            corpus_mod.stub_english_detector if config.detector == "stub" else None
        )
        cleaned, cleaning = corpus_mod.clean_records(records, detector)
        stopwords = load_stopwords(config.stopwords_path)
        corpora = corpus_mod.build_corpus(cleaned, stopwords=stopwords)
        corpus_dir = out / "corpus"
        corpus_mod.write_corpus_dir(corpora, corpus_dir, cleaning)
        summary["stages"][stage] = {
            "corpus_dir": rel(corpus_dir),
            "documents": {
                f"{lang.value}/{method.value}": corpora[(lang, method)].N
                for (lang, method) in sorted(
                    corpora, key=lambda lm: (lm[0].value, lm[1].value)
                )
            },
        }
    except Exception as exc:
        raise StageError(stage, exc) from exc

    # score
    stage = "score"
    try:
        lexicon = config.load_lexicon()
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
            cells.extend(scoring.score_corpus(corpus, lexicon, config.scope))
            overall_rows.extend(scoring.overall_top_terms(corpus))
        scoring.write_scores(cells, out / "scores.jsonl")
        scoring.write_overall_terms(overall_rows, out / "overall.jsonl")
        summary["stages"][stage] = {
            "scores": rel(out / "scores.jsonl"),
            "overall": rel(out / "overall.jsonl"),
            "cells": len(cells),
        }
    except Exception as exc:
        raise StageError(stage, exc) from exc

    # aggregate
    stage = "aggregate"
    try:
        averages_dir = out / "averages"
        averages_dir.mkdir(exist_ok=True)
        averages_files = []
        for axis in agg.SeriesAxis:
            results = []
            for app in ApplicationKind:
                results.extend(agg.series(cells, axis, app))
            path = averages_dir / f"averages_{axis.value}.csv"
            agg.write_averages_csv(results, path)
            averages_files.append(rel(path))
        summary["stages"][stage] = {"files": averages_files}
    except Exception as exc:
        raise StageError(stage, exc) from exc

    # report
    stage = "report"
    try:
        reports_dir = out / "reports"
        reports_dir.mkdir(exist_ok=True)
        report_files = []
        for language in config.languages:
            for method in config.methods:
                for app in ApplicationKind:
                    table = report_mod.build_report(
                        cells, overall_rows, language, app, method
                    )
                    for fmt in report_mod.ReportFormat:
                        name = (
                            f"report_{language.value}_{app.value}"
                            f"_{method.value}.{fmt.value}"
                        )
                        path = reports_dir / name
                        path.write_text(
                            report_mod.render_table(table, fmt), encoding="utf-8"
                        )
                        report_files.append(rel(path))
        summary["stages"][stage] = {"files": report_files}
    except Exception as exc:
        raise StageError(stage, exc) from exc

    _write_json(out / "pipeline_summary.json", {**summary, "out_dir": "."})
    return summary
