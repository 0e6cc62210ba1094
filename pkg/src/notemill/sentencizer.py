"""Rule-based clinical sentence segmentation with first-character dispatch.

Boundary rules are short character-class patterns (literals plus the
classes digit/upper/lower/whitespace/newline/any) with an anchor marking
the break position. Rules are bucketed by their first pattern element so
that at each text position only the rules whose bucket matches the current
character are tried; results are identical to trying every rule at every
position.

Break semantics at a boundary position:
  * an end event alone, or outranking all begin events, breaks;
  * a begin event alone breaks (a new sentence starts, e.g. list bullets);
  * a begin event that ties or outranks an end event at the same anchor
    suppresses the break (protects abbreviations like "Dr." from a
    competing period rule).
Blank lines always break, independent of the rule file.
"""

from __future__ import annotations

import re
from bisect import bisect_left
from dataclasses import dataclass
from pathlib import Path

from .docmodel import Document, Span
from .errors import RuleLoadError

LIT = "LIT"
DIGIT = "DIGIT"
UPPER = "UPPER"
LOWER = "LOWER"
WS = "WS"
NL = "NL"
ANY = "ANY"

_CLASS_ESCAPES = {"d": DIGIT, "u": UPPER, "l": LOWER, "s": WS, "n": NL, "a": ANY}

# Whitespace-only stretch containing a blank line (two newlines separated
# only by horizontal whitespace); unconditional break.
_BLANK_LINE_RE = re.compile(r"\n[^\S\n]*\n\s*")

PatternElement = tuple[str, str]


@dataclass(frozen=True)
class BoundaryRule:
    id: str
    kind: str  # "begin" | "end"
    pattern: tuple[PatternElement, ...]
    anchor_offset: int
    priority: int


@dataclass(frozen=True)
class BoundaryRuleSet:
    rules: tuple[BoundaryRule, ...]
    literal_dispatch: dict[str, tuple[int, ...]]
    class_dispatch: dict[str, tuple[int, ...]]


def parse_pattern(raw: str) -> tuple[PatternElement, ...]:
    """Parse a pattern string with \\d \\u \\l \\s \\n \\a classes."""
    elements: list[PatternElement] = []
    i = 0
    while i < len(raw):
        ch = raw[i]
        if ch == "\\":
            if i + 1 >= len(raw):
                raise RuleLoadError("pattern ends with a dangling backslash")
            nxt = raw[i + 1]
            if nxt in _CLASS_ESCAPES:
                elements.append((_CLASS_ESCAPES[nxt], ""))
            elif nxt == "\\":
                elements.append((LIT, "\\"))
            else:
                raise RuleLoadError(f"unknown escape \\{nxt} in pattern")
            i += 2
        else:
            elements.append((LIT, ch))
            i += 1
    return tuple(elements)


def _element_matches(element: PatternElement, ch: str) -> bool:
    kind, lit = element
    if kind == LIT:
        return ch == lit
    if kind == DIGIT:
        return ch.isdigit()
    if kind == UPPER:
        return ch.isupper()
    if kind == LOWER:
        return ch.islower()
    if kind == WS:
        return ch.isspace()
    if kind == NL:
        return ch == "\n"
    return True  # ANY


def match_at(text: str, pos: int, pattern: tuple[PatternElement, ...]) -> bool:
    if pos + len(pattern) > len(text):
        return False
    return all(
        _element_matches(pattern[k], text[pos + k]) for k in range(len(pattern))
    )


def compile_rules(rules: list[BoundaryRule] | tuple[BoundaryRule, ...]) -> BoundaryRuleSet:
    """Validate rules and build the first-element dispatch table."""
    seen: set[str] = set()
    literal: dict[str, list[int]] = {}
    by_class: dict[str, list[int]] = {}
    for idx, rule in enumerate(rules):
        if rule.id in seen:
            raise RuleLoadError(f"duplicate boundary rule id: {rule.id!r}")
        seen.add(rule.id)
        if not rule.pattern:
            raise RuleLoadError(f"rule {rule.id!r}: empty pattern")
        if not (0 <= rule.anchor_offset < len(rule.pattern)):
            raise RuleLoadError(
                f"rule {rule.id!r}: anchor_offset {rule.anchor_offset} outside pattern"
            )
        if rule.kind not in ("begin", "end"):
            raise RuleLoadError(f"rule {rule.id!r}: kind must be begin or end")
        kind, lit = rule.pattern[0]
        if kind == LIT:
            literal.setdefault(lit, []).append(idx)
        else:
            by_class.setdefault(kind, []).append(idx)
    return BoundaryRuleSet(
        rules=tuple(rules),
        literal_dispatch={k: tuple(v) for k, v in literal.items()},
        class_dispatch={k: tuple(v) for k, v in by_class.items()},
    )


def load_boundary_rules(path: str | Path) -> BoundaryRuleSet:
    """Load a tab-separated rule file: id, kind, pattern, anchor, priority."""
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise RuleLoadError(f"cannot read boundary rules from {path}: {exc}") from exc
    rules: list[BoundaryRule] = []
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 5:
            raise RuleLoadError(
                f"{path}:{lineno}: expected 5 tab-separated fields, got {len(fields)}"
            )
        rule_id, kind, raw_pattern, raw_anchor, raw_priority = (f.strip() for f in fields)
        try:
            pattern = parse_pattern(raw_pattern)
            anchor = int(raw_anchor)
            priority = int(raw_priority)
        except (RuleLoadError, ValueError) as exc:
            raise RuleLoadError(f"{path}:{lineno}: rule {rule_id!r}: {exc}") from exc
        rules.append(BoundaryRule(rule_id, kind, pattern, anchor, priority))
    try:
        return compile_rules(rules)
    except RuleLoadError as exc:
        raise RuleLoadError(f"{path}: {exc}") from exc


def _candidate_rules(ruleset: BoundaryRuleSet, ch: str):
    yield from ruleset.literal_dispatch.get(ch, ())
    for cls, indices in ruleset.class_dispatch.items():
        if _element_matches((cls, ""), ch):
            yield from indices


def char_breaks(text: str, ruleset: BoundaryRuleSet) -> set[int]:
    """Character positions where one sentence ends and the next starts."""
    begin_prio: dict[int, int] = {}
    end_prio: dict[int, int] = {}
    for pos in range(len(text)):
        for idx in _candidate_rules(ruleset, text[pos]):
            rule = ruleset.rules[idx]
            if match_at(text, pos, rule.pattern):
                anchor = pos + rule.anchor_offset
                table = begin_prio if rule.kind == "begin" else end_prio
                prev = table.get(anchor)
                if prev is None or rule.priority > prev:
                    table[anchor] = rule.priority
    breaks: set[int] = set()
    for anchor, prio in end_prio.items():
        if anchor not in begin_prio or prio > begin_prio[anchor]:
            breaks.add(anchor)
    for anchor in begin_prio:
        if anchor not in end_prio:
            breaks.add(anchor)
    for m in _BLANK_LINE_RE.finditer(text):
        breaks.add(m.end())
    return breaks


def segment(doc: Document, ruleset: BoundaryRuleSet | None = None) -> Document:
    """Partition the document's tokens into sentences.

    Every token lands in exactly one sentence; with no rule matches the
    whole document is a single sentence (or none, for an empty document).
    Breaks landing inside a token snap outward so the token stays with the
    earlier sentence.
    """
    if ruleset is None:
        ruleset = default_rules()
    doc.sentences = []
    if not doc.tokens:
        return doc
    starts, _ = doc.token_bounds()
    token_breaks = sorted(
        {
            i
            for i in (bisect_left(starts, b) for b in char_breaks(doc.text, ruleset))
            if 0 < i < len(doc.tokens)
        }
    )
    edges = [0, *token_breaks, len(doc.tokens)]
    doc.sentences = [
        Span(lo, hi, label="sentence") for lo, hi in zip(edges, edges[1:])
    ]
    return doc


_DEFAULT_RULESET: BoundaryRuleSet | None = None


def default_rules() -> BoundaryRuleSet:
    """Packaged default clinical boundary rules."""
    global _DEFAULT_RULESET
    if _DEFAULT_RULESET is None:
        from .resources import default_rule_path

        _DEFAULT_RULESET = load_boundary_rules(default_rule_path("sentencizer"))
    return _DEFAULT_RULESET
