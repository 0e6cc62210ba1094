"""Contextual assertion: link trigger phrases to entities within a sentence.

Each context rule matches a trigger phrase and carries a direction:

  * FORWARD / BACKWARD / BIDIRECTIONAL triggers become modifiers whose
    scope runs from the trigger to the sentence edge on the stated side,
    truncated at the nearest TERMINATE match and at ``max_scope`` tokens;
  * TERMINATE matches only truncate scopes;
  * PSEUDO matches suppress any modifier they fully cover ("no increase"
    swallowing "no") and assert nothing themselves.

Every entity whose span intersects a modifier's scope (and does not touch
the modifier itself) is linked to it, and the modifier's asserted
attribute is set true on the entity. The five canonical categories map to
the pre-registered assertion attributes; user categories must name the
attribute they assert.
"""

from __future__ import annotations

import json
from bisect import bisect_right
from dataclasses import dataclass
from pathlib import Path

from .docmodel import ASSERTION_ATTRS, Document, Modifier, Span, spans_overlap
from .errors import RuleLoadError
from .matching import MatchEngine, match_form_of

FORWARD = "FORWARD"
BACKWARD = "BACKWARD"
BIDIRECTIONAL = "BIDIRECTIONAL"
TERMINATE = "TERMINATE"
PSEUDO = "PSEUDO"

DIRECTIONS = (FORWARD, BACKWARD, BIDIRECTIONAL, TERMINATE, PSEUDO)

CANONICAL_ASSERTS = {
    "NEGATED_EXISTENCE": "is_negated",
    "HISTORICAL": "is_historical",
    "HYPOTHETICAL": "is_hypothetical",
    "UNCERTAIN": "is_uncertain",
    "FAMILY": "is_family",
}


@dataclass(frozen=True)
class ContextRule:
    id: str
    category: str
    direction: str
    literal: str | None = None
    pattern: tuple | list | None = None
    regex: str | None = None
    max_scope: int | None = None
    asserts: str | None = None

    def asserted_attribute(self) -> str | None:
        if self.direction in (TERMINATE, PSEUDO):
            return None
        if self.asserts:
            return self.asserts
        return CANONICAL_ASSERTS.get(self.category)


def validate_rule(rule: ContextRule) -> None:
    if rule.direction not in DIRECTIONS:
        raise RuleLoadError(f"rule {rule.id!r}: unknown direction {rule.direction!r}")
    if rule.direction in (TERMINATE, PSEUDO):
        if rule.asserts:
            raise RuleLoadError(
                f"rule {rule.id!r}: {rule.direction} rules must not assert attributes"
            )
    elif rule.asserted_attribute() is None:
        raise RuleLoadError(
            f"rule {rule.id!r}: category {rule.category!r} is not canonical; "
            "set 'asserts' explicitly"
        )
    if rule.max_scope is not None and rule.max_scope <= 0:
        raise RuleLoadError(f"rule {rule.id!r}: max_scope must be positive")


def load_context_rules(path: str | Path) -> list[ContextRule]:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise RuleLoadError(f"cannot load context rules from {path}: {exc}") from exc
    if not isinstance(raw, list):
        raise RuleLoadError(f"context rule file {path} must hold a JSON array")
    rules = []
    for i, obj in enumerate(raw):
        if not isinstance(obj, dict) or "id" not in obj or "category" not in obj:
            raise RuleLoadError(f"{path}: entry {i} needs id and category")
        rules.append(
            ContextRule(
                id=str(obj["id"]),
                category=str(obj["category"]),
                direction=str(obj.get("direction", FORWARD)),
                literal=obj.get("literal"),
                pattern=obj.get("pattern"),
                regex=obj.get("regex"),
                max_scope=obj.get("max_scope"),
                asserts=obj.get("asserts"),
            )
        )
    return rules


class ContextMatcher:
    """Compiled, immutable context rule set."""

    def __init__(self, rules: list[ContextRule], engine: MatchEngine):
        self.rules = tuple(rules)
        self._engine = engine

    def find_candidates(self, doc: Document):
        return self._engine.find_matches(doc)


def compile_context_rules(
    rules: list[ContextRule], tokenizer_rules=None
) -> ContextMatcher:
    seen: set[str] = set()
    engine = MatchEngine(tokenizer_rules)
    for index, rule in enumerate(rules):
        if rule.id in seen:
            raise RuleLoadError(f"duplicate context rule id: {rule.id!r}")
        seen.add(rule.id)
        validate_rule(rule)
        form = match_form_of(rule.id, {
            "literal": rule.literal, "pattern": rule.pattern, "regex": rule.regex,
        })
        if form == "literal":
            engine.add_literal(index, rule.id, rule.literal)
        elif form == "pattern":
            engine.add_pattern(index, rule.id, list(rule.pattern))
        else:
            engine.add_regex(index, rule.id, rule.regex)
    return ContextMatcher(rules, engine)


def scope_of(
    modifier: Modifier,
    sentence: Span,
    terminators: list[Span],
    rule: ContextRule,
) -> tuple[int, int]:
    """Token range a modifier governs inside its sentence.

    Forward scopes run from the modifier's end to the sentence end,
    backward scopes from the sentence start to the modifier's start;
    bidirectional scopes bracket the modifier (whose own tokens are never
    in scope). Each side is truncated at the nearest terminator fully on
    that side and clipped to ``max_scope`` tokens when set.
    """
    mod = modifier.span
    lo, hi = mod.start_token, mod.end_token

    if rule.direction in (FORWARD, BIDIRECTIONAL):
        hi = sentence.end_token
        for term in terminators:
            if term.start_token >= mod.end_token:
                hi = min(hi, term.start_token)
        if rule.max_scope is not None:
            hi = min(hi, mod.end_token + rule.max_scope)
        hi = max(hi, mod.end_token)
    if rule.direction in (BACKWARD, BIDIRECTIONAL):
        lo = sentence.start_token
        for term in terminators:
            if term.end_token <= mod.start_token:
                lo = max(lo, term.end_token)
        if rule.max_scope is not None:
            lo = max(lo, mod.start_token - rule.max_scope)
        lo = min(lo, mod.start_token)

    if rule.direction == FORWARD:
        return (mod.end_token, hi)
    if rule.direction == BACKWARD:
        return (lo, mod.start_token)
    return (lo, hi)


def apply_context(doc: Document, rules_or_matcher=None) -> Document:
    """Populate doc.modifiers and doc.links and assert entity attributes.

    Idempotent: the modifier and link layers are rebuilt from scratch, and
    attributes are only ever raised to true.
    """
    matcher = _as_matcher(rules_or_matcher)
    doc.modifiers = []
    doc.links = []
    if not doc.sentences:
        return doc

    raw = matcher.find_candidates(doc)
    per_sentence: list[list] = [[] for _ in doc.sentences]
    starts = [s.start_token for s in doc.sentences]
    for m in raw:
        si = bisect_right(starts, m.start_token) - 1
        if si < 0:
            continue
        sent = doc.sentences[si]
        if m.start_token >= sent.start_token and m.end_token <= sent.end_token:
            per_sentence[si].append(m)

    modifiers: list[tuple[Modifier, ContextRule]] = []
    for si, matches in enumerate(per_sentence):
        sentence = doc.sentences[si]
        pseudo = [m for m in matches if matcher.rules[m.rule_index].direction == PSEUDO]
        terminators = [
            Span(m.start_token, m.end_token)
            for m in matches
            if matcher.rules[m.rule_index].direction == TERMINATE
        ]
        # Matches arrive sorted by (start, end, rule order); the sentence
        # buckets preserve that, so doc.modifiers ends up in document order.
        for m in matches:
            rule = matcher.rules[m.rule_index]
            if rule.direction in (TERMINATE, PSEUDO):
                continue
            if any(
                p.start_token <= m.start_token and m.end_token <= p.end_token
                for p in pseudo
            ):
                continue
            modifier = Modifier(
                span=Span(m.start_token, m.end_token, label=rule.category),
                category=rule.category,
                direction=rule.direction,
                scope=(0, 0),
            )
            modifier.scope = scope_of(modifier, sentence, terminators, rule)
            modifiers.append((modifier, rule))

    doc.modifiers = [m for m, _ in modifiers]

    for mi, (modifier, rule) in enumerate(modifiers):
        attr = rule.asserted_attribute()
        scope_span = (
            Span(*modifier.scope) if modifier.scope[0] < modifier.scope[1] else None
        )
        if scope_span is None:
            continue
        for ei, entity in enumerate(doc.entities):
            if not spans_overlap(entity.span, scope_span):
                continue
            if spans_overlap(entity.span, modifier.span):
                continue  # a phrase cannot modify itself
            doc.links.append((mi, ei))
            if attr in ASSERTION_ATTRS:
                setattr(entity, attr, True)
            elif attr:
                entity.span.attrs[attr] = True
    return doc


def _as_matcher(rules_or_matcher) -> ContextMatcher:
    if rules_or_matcher is None:
        return default_matcher()
    if isinstance(rules_or_matcher, ContextMatcher):
        return rules_or_matcher
    return compile_context_rules(list(rules_or_matcher))


_DEFAULT_MATCHER: ContextMatcher | None = None


def default_matcher() -> ContextMatcher:
    global _DEFAULT_MATCHER
    if _DEFAULT_MATCHER is None:
        from .resources import default_rule_path

        _DEFAULT_MATCHER = compile_context_rules(
            load_context_rules(default_rule_path("context"))
        )
    return _DEFAULT_MATCHER
