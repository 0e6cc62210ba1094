"""Configurable end-to-end pipeline with ordered, fault-isolated batching.

Rule packs and the concept index are built once at pipeline construction
and shared read-only across workers. Documents stream through in batches;
output order always matches input order, and a failing document is
reported and skipped without aborting the rest of the batch.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import islice
from pathlib import Path
from typing import Iterable, Iterator

from . import context, normalizer, sectionizer, sentencizer, target_matcher, tokenizer
from .docmodel import Document
from .errors import ConfigError, NoteMillError
from .normalizer import NormalizerParams
from .resources import default_rule_path

STAGES = (
    "tokenizer",
    "sentencizer",
    "sectionizer",
    "target_matcher",
    "context",
    "normalizer",
    "section_attributes",
)

# Stages that read a rule file (section_attributes reuses the sectionizer's).
_RULE_STAGES = (
    "tokenizer",
    "sentencizer",
    "sectionizer",
    "target_matcher",
    "context",
    "normalizer",
)


@dataclass(frozen=True)
class PipelineConfig:
    stages: tuple[str, ...]
    rule_paths: dict[str, str] = field(default_factory=dict)
    normalizer_params: NormalizerParams = NormalizerParams()
    ngram_n: int = 3
    batch_size: int = 32
    parallelism: int = 1
    io_defaults: dict[str, str] = field(default_factory=dict)


def _check_order(stages: tuple[str, ...]) -> None:
    position = {name: i for i, name in enumerate(stages)}
    if not stages or stages[0] != "tokenizer":
        raise ConfigError("stage 'tokenizer' must be present and come first")
    if len(position) != len(stages):
        raise ConfigError("duplicate stages in pipeline configuration")
    for name in stages:
        if name not in STAGES:
            raise ConfigError(f"unknown stage {name!r}")
    for late in ("sectionizer", "context", "normalizer"):
        if late in position:
            if "sentencizer" not in position:
                raise ConfigError(f"stage '{late}' requires stage 'sentencizer'")
            if position["sentencizer"] > position[late]:
                raise ConfigError(
                    f"stage 'sentencizer' must come before stage '{late}'"
                )
    if "section_attributes" in position:
        if "sectionizer" not in position:
            raise ConfigError("stage 'section_attributes' requires stage 'sectionizer'")
        if position["sectionizer"] > position["section_attributes"]:
            raise ConfigError(
                "stage 'sectionizer' must come before stage 'section_attributes'"
            )
        if "context" in position and position["context"] > position["section_attributes"]:
            raise ConfigError(
                "stage 'context' must come before stage 'section_attributes'"
            )


def load_config(path: str | Path | None = None) -> PipelineConfig:
    """Load and validate a pipeline configuration file.

    With no path, the packaged default configuration (full 7-stage
    pipeline over the bundled rule packs) is used.
    """
    if path is None:
        from .resources import default_config_path

        path = default_config_path()
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path} must hold a JSON object")

    stages = tuple(raw.get("stages", STAGES))
    _check_order(stages)

    rule_paths: dict[str, str] = {}
    base = Path(path).parent
    for stage, rule_path in dict(raw.get("rules", {})).items():
        if stage not in _RULE_STAGES:
            raise ConfigError(f"rules given for unknown stage {stage!r}")
        resolved = Path(rule_path)
        if not resolved.is_absolute():
            resolved = base / resolved
        if not resolved.exists():
            raise ConfigError(f"rule file for stage '{stage}' not found: {resolved}")
        rule_paths[stage] = str(resolved)

    norm_raw = dict(raw.get("normalizer", {}))
    ngram_n = int(norm_raw.pop("n", 3))
    try:
        params = NormalizerParams(**norm_raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad normalizer parameters: {exc}") from exc

    io_defaults = {
        key: str(raw[key])
        for key in ("input", "output", "format", "viz_dir")
        if raw.get(key) is not None
    }

    config = PipelineConfig(
        stages=stages,
        rule_paths=rule_paths,
        normalizer_params=params,
        ngram_n=ngram_n,
        batch_size=int(raw.get("batch_size", 32)),
        parallelism=int(raw.get("parallelism", 1)),
        io_defaults=io_defaults,
    )
    if config.ngram_n < 2:
        raise ConfigError("normalizer n must be >= 2")
    if config.batch_size < 1:
        raise ConfigError("batch_size must be >= 1")
    if config.parallelism < 1:
        raise ConfigError("parallelism must be >= 1")
    return config


@dataclass
class DocResult:
    doc_id: str
    doc: Document | None = None
    error: str | None = None


class Pipeline:
    """All rule packs compiled and ready; processes one document at a time."""

    def __init__(self, config: PipelineConfig):
        self.config = config
        paths = {
            stage: config.rule_paths.get(stage, str(default_rule_path(stage)))
            for stage in _RULE_STAGES
        }
        self.tokenizer_rules = tokenizer.load_tokenizer_rules(paths["tokenizer"])
        self.boundary_rules = sentencizer.load_boundary_rules(paths["sentencizer"])
        self.section_rules = sectionizer.load_section_rules(paths["sectionizer"])
        self.target = target_matcher.compile_rules(
            target_matcher.load_target_rules(paths["target_matcher"]),
            self.tokenizer_rules,
        )
        self.context = context.compile_context_rules(
            context.load_context_rules(paths["context"]), self.tokenizer_rules
        )
        self.index = None
        if "normalizer" in config.stages:
            dict_path = Path(paths["normalizer"])
            if dict_path.suffix in (".idx", ".bin", ".cache"):
                self.index = normalizer.load_index(dict_path)
            else:
                self.index = normalizer.build_index(
                    normalizer.load_dictionary(dict_path), config.ngram_n
                )

    def process(self, text: str) -> Document:
        doc: Document | None = None
        for stage in self.config.stages:
            if stage == "tokenizer":
                doc = tokenizer.tokenize(text, self.tokenizer_rules)
            elif stage == "sentencizer":
                doc = sentencizer.segment(doc, self.boundary_rules)
            elif stage == "sectionizer":
                doc = sectionizer.detect_sections(doc, self.section_rules)
            elif stage == "target_matcher":
                doc = target_matcher.match(doc, self.target)
            elif stage == "context":
                doc = context.apply_context(doc, self.context)
            elif stage == "normalizer":
                doc = normalizer.map_concepts(doc, self.index, self.config.normalizer_params)
            elif stage == "section_attributes":
                doc = sectionizer.apply_section_attributes(doc)
        return doc


def _batched(iterable, size: int):
    it = iter(iterable)
    while True:
        batch = list(islice(it, size))
        if not batch:
            return
        yield batch


def run_pipeline(
    pipeline_or_config: Pipeline | PipelineConfig,
    docs: Iterable[tuple[str, str]],
) -> Iterator[DocResult]:
    """Process (doc_id, text) pairs, yielding results in input order.

    Worker count and batch size come from the configuration; outputs are
    identical for any worker count.
    """
    pipeline = (
        pipeline_or_config
        if isinstance(pipeline_or_config, Pipeline)
        else Pipeline(pipeline_or_config)
    )
    workers = pipeline.config.parallelism

    def one(item: tuple[str, str]) -> DocResult:
        doc_id, text = item
        try:
            return DocResult(doc_id=doc_id, doc=pipeline.process(text))
        except NoteMillError as exc:
            return DocResult(doc_id=doc_id, error=str(exc))
        except Exception as exc:  # noqa: BLE001 - fault isolation boundary
            return DocResult(doc_id=doc_id, error=f"{type(exc).__name__}: {exc}")

    if workers <= 1:
        for batch in _batched(docs, pipeline.config.batch_size):
            yield from map(one, batch)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for batch in _batched(docs, pipeline.config.batch_size):
            yield from pool.map(one, batch)
