"""Shared match engine for literal phrases, token patterns, and raw-text regexes.

Target and context rules share three match forms:

  * literal  - a phrase matched token-by-token, case-insensitively;
  * pattern  - a sequence of per-token constraints (exact text, lowercase
    text, regex on the token surface, or wildcard);
  * regex    - a document-level regular expression applied to the raw
    text with leftmost-longest (POSIX) semantics, then aligned outward to
    token boundaries.

Exactly one form must be set per rule.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Any

import regex as posix_regex

from .docmodel import Document, char_span
from .errors import RuleLoadError


@dataclass(frozen=True)
class RawMatch:
    """One rule hit, token-aligned."""

    start_token: int
    end_token: int
    rule_index: int


@dataclass(frozen=True)
class TokenConstraint:
    kind: str  # "text" | "lower" | "regex" | "wildcard"
    value: str = ""
    compiled: Any = None


def parse_constraints(rule_id: str, raw: list) -> tuple[TokenConstraint, ...]:
    """Parse the JSON form of a token pattern, naming the rule on errors."""
    if not isinstance(raw, list) or not raw:
        raise RuleLoadError(f"rule {rule_id!r}: pattern must be a non-empty array")
    constraints: list[TokenConstraint] = []
    for item in raw:
        if not isinstance(item, dict) or len(item) != 1:
            raise RuleLoadError(
                f"rule {rule_id!r}: each pattern item must set exactly one of "
                "text/lower/regex/wildcard"
            )
        key, value = next(iter(item.items()))
        if key == "text":
            constraints.append(TokenConstraint("text", str(value)))
        elif key == "lower":
            constraints.append(TokenConstraint("lower", str(value).lower()))
        elif key == "regex":
            try:
                compiled = re.compile(str(value))
            except re.error as exc:
                raise RuleLoadError(
                    f"rule {rule_id!r}: bad token regex {value!r}: {exc}"
                ) from exc
            constraints.append(TokenConstraint("regex", str(value), compiled))
        elif key == "wildcard":
            if value is not True:
                raise RuleLoadError(f"rule {rule_id!r}: wildcard must be true")
            constraints.append(TokenConstraint("wildcard"))
        else:
            raise RuleLoadError(f"rule {rule_id!r}: unknown pattern key {key!r}")
    return tuple(constraints)


def match_form_of(rule_id: str, obj: dict) -> str:
    """Which of literal/pattern/regex a rule uses; errors name the rule."""
    forms = [k for k in ("literal", "pattern", "regex") if obj.get(k) is not None]
    if len(forms) != 1:
        raise RuleLoadError(
            f"rule {rule_id!r}: exactly one of literal/pattern/regex must be set"
        )
    return forms[0]


class MatchEngine:
    """Compiled matcher over an ordered rule list."""

    def __init__(self, tokenizer_rules=None):
        from .tokenizer import default_rules

        self._tokenizer_rules = tokenizer_rules or default_rules()
        # first lowercased word -> [(rule_index, full word tuple), ...]
        self._literals: dict[str, list[tuple[int, tuple[str, ...]]]] = {}
        self._patterns: list[tuple[int, tuple[TokenConstraint, ...]]] = []
        self._regexes: list[tuple[int, Any]] = []
        self.size = 0

    def add_literal(self, rule_index: int, rule_id: str, literal: str) -> None:
        from .tokenizer import tokenize

        words_doc = tokenize(literal, self._tokenizer_rules)
        words = tuple(words_doc.token_text(i).lower() for i in range(len(words_doc.tokens)))
        if not words:
            raise RuleLoadError(f"rule {rule_id!r}: literal has no tokens")
        self._literals.setdefault(words[0], []).append((rule_index, words))
        self.size += 1

    def add_pattern(self, rule_index: int, rule_id: str, raw: list) -> None:
        self._patterns.append((rule_index, parse_constraints(rule_id, raw)))
        self.size += 1

    def add_regex(self, rule_index: int, rule_id: str, pattern: str) -> None:
        try:
            compiled = posix_regex.compile(pattern, flags=posix_regex.POSIX)
        except posix_regex.error as exc:
            raise RuleLoadError(f"rule {rule_id!r}: bad regex {pattern!r}: {exc}") from exc
        self._regexes.append((rule_index, compiled))
        self.size += 1

    def _constraint_ok(self, constraint: TokenConstraint, token_text: str) -> bool:
        if constraint.kind == "text":
            return token_text == constraint.value
        if constraint.kind == "lower":
            return token_text.lower() == constraint.value
        if constraint.kind == "regex":
            return constraint.compiled.search(token_text) is not None
        return True  # wildcard

    def find_matches(self, doc: Document) -> list[RawMatch]:
        """All rule hits, sorted by (start, end, rule order), deduplicated."""
        n = len(doc.tokens)
        lowers = [doc.token_text(i).lower() for i in range(n)]
        hits: set[tuple[int, int, int]] = set()

        for i, first in enumerate(lowers):
            for rule_index, words in self._literals.get(first, ()):
                end = i + len(words)
                if end <= n and tuple(lowers[i:end]) == words:
                    hits.add((i, end, rule_index))

        for rule_index, constraints in self._patterns:
            k = len(constraints)
            for i in range(n - k + 1):
                if all(
                    self._constraint_ok(constraints[j], doc.token_text(i + j))
                    for j in range(k)
                ):
                    hits.add((i, i + k, rule_index))

        for rule_index, compiled in self._regexes:
            for m in compiled.finditer(doc.text):
                if m.start() == m.end():
                    continue
                span = char_span(doc, m.start(), m.end(), mode="expand")
                if span is not None:
                    hits.add((span.start_token, span.end_token, rule_index))

        return [RawMatch(*h) for h in sorted(hits)]
