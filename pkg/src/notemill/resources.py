"""Access to packaged default rule files, dictionaries, and sample data."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

_DEFAULT_RULE_FILES = {
    "tokenizer": "tokenizer_rules.json",
    "sentencizer": "boundary_rules.tsv",
    "sectionizer": "section_rules.json",
    "target_matcher": "target_rules.json",
    "context": "context_rules.json",
    "normalizer": "toy_dictionary.tsv",
}


def data_dir() -> Path:
    return Path(str(resources.files("notemill").joinpath("data")))


def default_rule_path(stage: str) -> Path:
    try:
        name = _DEFAULT_RULE_FILES[stage]
    except KeyError:
        raise KeyError(f"no default rule file for stage {stage!r}") from None
    return data_dir() / name


def default_config_path() -> Path:
    return data_dir() / "default_config.json"


def sample_corpus_dir() -> Path:
    return data_dir() / "corpus"


def screening_template_path() -> Path:
    return data_dir() / "templates" / "screening_template.txt"
