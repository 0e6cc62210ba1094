"""notemill: rule-based clinical text processing.

Non-destructive tokenization, clinical sentence segmentation, section
trees, rule-based concept extraction, contextual assertion, approximate
dictionary normalization, tabular export, and static visualization.
"""

from .context import ContextRule, apply_context, compile_context_rules, scope_of
from .docmodel import (
    Document,
    Entity,
    Modifier,
    Section,
    Span,
    Token,
    char_span,
    span_text,
)
from .normalizer import (
    DictEntry,
    NgramIndex,
    NormalizerParams,
    build_index,
    map_concepts,
    search,
)
from .pipeline import Pipeline, PipelineConfig, load_config, run_pipeline
from .sectionizer import (
    SectionRule,
    apply_section_attributes,
    detect_sections,
    rules_from_template,
)
from .sentencizer import BoundaryRule, BoundaryRuleSet, load_boundary_rules, segment
from .tabular import ExtractionRow, read_corpus, to_rows, write_rows
from .target_matcher import TargetMatcher, TargetRule, compile_rules, match
from .tokenizer import TokenizerRules, load_tokenizer_rules, reconstruct, tokenize
from .visualizer import render_highlight, render_links

__version__ = "0.1.0"

__all__ = [
    "BoundaryRule",
    "BoundaryRuleSet",
    "ContextRule",
    "DictEntry",
    "Document",
    "Entity",
    "ExtractionRow",
    "Modifier",
    "NgramIndex",
    "NormalizerParams",
    "Pipeline",
    "PipelineConfig",
    "Section",
    "SectionRule",
    "Span",
    "TargetMatcher",
    "TargetRule",
    "Token",
    "TokenizerRules",
    "apply_context",
    "apply_section_attributes",
    "build_index",
    "char_span",
    "compile_context_rules",
    "compile_rules",
    "detect_sections",
    "load_boundary_rules",
    "load_config",
    "load_tokenizer_rules",
    "map_concepts",
    "match",
    "read_corpus",
    "reconstruct",
    "render_highlight",
    "render_links",
    "rules_from_template",
    "run_pipeline",
    "scope_of",
    "search",
    "segment",
    "span_text",
    "to_rows",
    "tokenize",
    "write_rows",
]
