"""Rule-based concept extraction with overlap resolution.

A target rule carries a semantic category, exactly one match form
(literal phrase, token pattern, or multi-token regex), and optional
metadata copied onto matched entities. Overlapping candidates are
resolved longest-span-first; ties go to the earlier start, then to the
earlier rule.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .docmodel import (
    ASSERTION_ATTRS,
    Document,
    Entity,
    Span,
    span_char_range,
    span_text,
    spans_overlap,
)
from .errors import RuleLoadError
from .matching import MatchEngine, match_form_of


@dataclass(frozen=True)
class TargetRule:
    id: str
    category: str
    literal: str | None = None
    pattern: tuple | list | None = None
    regex: str | None = None
    metadata: dict = field(default_factory=dict)


class TargetMatcher:
    """Compiled, immutable target rule set."""

    def __init__(self, rules: list[TargetRule], engine: MatchEngine):
        self.rules = tuple(rules)
        self._engine = engine

    def find_candidates(self, doc: Document):
        return self._engine.find_matches(doc)


def load_target_rules(path: str | Path) -> list[TargetRule]:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise RuleLoadError(f"cannot load target rules from {path}: {exc}") from exc
    if not isinstance(raw, list):
        raise RuleLoadError(f"target rule file {path} must hold a JSON array")
    rules = []
    for i, obj in enumerate(raw):
        if not isinstance(obj, dict) or "id" not in obj or "category" not in obj:
            raise RuleLoadError(f"{path}: entry {i} needs id and category")
        rules.append(
            TargetRule(
                id=str(obj["id"]),
                category=str(obj["category"]),
                literal=obj.get("literal"),
                pattern=obj.get("pattern"),
                regex=obj.get("regex"),
                metadata=dict(obj.get("metadata", {})),
            )
        )
    return rules


def compile_rules(rules: list[TargetRule], tokenizer_rules=None) -> TargetMatcher:
    """Validate and compile rules; diagnostics name the offending rule id."""
    seen: set[str] = set()
    engine = MatchEngine(tokenizer_rules)
    for index, rule in enumerate(rules):
        if rule.id in seen:
            raise RuleLoadError(f"duplicate target rule id: {rule.id!r}")
        seen.add(rule.id)
        form = match_form_of(rule.id, {
            "literal": rule.literal, "pattern": rule.pattern, "regex": rule.regex,
        })
        if form == "literal":
            engine.add_literal(index, rule.id, rule.literal)
        elif form == "pattern":
            engine.add_pattern(index, rule.id, list(rule.pattern))
        else:
            engine.add_regex(index, rule.id, rule.regex)
    return TargetMatcher(rules, engine)


def _apply_metadata(entity: Entity, metadata: dict) -> None:
    for key, value in metadata.items():
        if key == "cui":
            entity.cui = str(value)
            # A rule-asserted concept code counts as an exact match.
            entity.similarity = 1.0
        elif key in ASSERTION_ATTRS:
            if bool(value):
                setattr(entity, key, True)
        else:
            entity.span.attrs[key] = value


def match(doc: Document, matcher: TargetMatcher) -> Document:
    """Add one entity per surviving rule match to the document."""
    candidates = []
    for raw in matcher.find_candidates(doc):
        start_char, end_char = span_char_range(
            doc, Span(raw.start_token, raw.end_token)
        )
        candidates.append((raw, end_char - start_char, start_char))
    # Longest span wins; ties to earlier start, then earlier rule.
    candidates.sort(key=lambda c: (-c[1], c[2], c[0].rule_index))
    kept: list = []
    for raw, _, _ in candidates:
        span = Span(raw.start_token, raw.end_token)
        if any(spans_overlap(span, k.span) for k in kept):
            continue
        rule = matcher.rules[raw.rule_index]
        entity = Entity(
            span=Span(raw.start_token, raw.end_token, label=rule.category),
            category=rule.category,
        )
        _apply_metadata(entity, rule.metadata)
        kept.append(entity)
    doc.entities.extend(kept)
    doc.entities.sort(key=lambda e: (e.span.start_token, e.span.end_token))
    return doc


def revalidate(doc: Document, matcher: TargetMatcher) -> None:
    """Check that every entity's surface still satisfies some rule.

    Literal rules must equal the entity text case-insensitively modulo
    whitespace runs; pattern and regex rules are re-run and must cover the
    entity's span. Raises AssertionError on any mismatch.
    """
    raw_spans = {
        (m.start_token, m.end_token) for m in matcher.find_candidates(doc)
    }
    by_category = {r.category for r in matcher.rules}
    for entity in doc.entities:
        if entity.category not in by_category:
            continue  # produced by another component
        key = (entity.span.start_token, entity.span.end_token)
        assert key in raw_spans, (
            f"entity {span_text(doc, entity.span)!r} at {key} no longer matches "
            "any target rule"
        )


_DEFAULT_RULES: list[TargetRule] | None = None


def default_rules() -> list[TargetRule]:
    global _DEFAULT_RULES
    if _DEFAULT_RULES is None:
        from .resources import default_rule_path

        _DEFAULT_RULES = load_target_rules(default_rule_path("target_matcher"))
    return _DEFAULT_RULES
