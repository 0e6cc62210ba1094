"""Section detection: title matching, section trees, and attribute overrides.

Titles are matched at line starts (after optional indentation) and must be
followed by a colon or the end of the line. A matched title opens a
section that runs to the next title or the end of the document; text
before the first title becomes an implicit section with a null category.
Subsections attach to the nearest preceding section (walking its ancestor
chain) whose category appears in their rule's ``parents``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from .docmodel import (
    ASSERTION_ATTRS,
    Document,
    Section,
    Span,
    char_span,
    section_index_of,
)
from .errors import RuleLoadError


@dataclass(frozen=True)
class SectionRule:
    category: str
    literals: tuple[str, ...]
    parents: tuple[str, ...] = ()
    attr_overrides: dict[str, bool | str] = field(default_factory=dict)


def load_section_rules(path: str | Path) -> list[SectionRule]:
    """Load a JSON array of {category, literals, parents?, attr_overrides?}."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise RuleLoadError(f"cannot load section rules from {path}: {exc}") from exc
    if not isinstance(raw, list):
        raise RuleLoadError(f"section rule file {path} must hold a JSON array")
    rules = []
    for i, obj in enumerate(raw):
        if not isinstance(obj, dict) or "category" not in obj or "literals" not in obj:
            raise RuleLoadError(f"{path}: entry {i} needs category and literals")
        rules.append(
            SectionRule(
                category=str(obj["category"]),
                literals=tuple(str(x) for x in obj["literals"]),
                parents=tuple(str(x) for x in obj.get("parents", ())),
                attr_overrides=dict(obj.get("attr_overrides", {})),
            )
        )
    validate_section_rules(rules)
    return rules


def save_section_rules(rules: list[SectionRule], path: str | Path) -> None:
    payload = []
    for rule in rules:
        obj: dict = {"category": rule.category, "literals": list(rule.literals)}
        if rule.parents:
            obj["parents"] = list(rule.parents)
        if rule.attr_overrides:
            obj["attr_overrides"] = rule.attr_overrides
        payload.append(obj)
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def validate_section_rules(rules: list[SectionRule]) -> None:
    categories = {r.category for r in rules}
    for rule in rules:
        if not rule.literals:
            raise RuleLoadError(f"section rule {rule.category!r}: literals is empty")
        for parent in rule.parents:
            if parent not in categories:
                raise RuleLoadError(
                    f"section rule {rule.category!r}: unknown parent {parent!r}"
                )


_LINE_RE = re.compile(r"^[ \t]*", re.MULTILINE)


def _title_matches(text: str, rules: list[SectionRule]):
    """Yield (char_start, char_end_incl_colon, rule_index) per matched title.

    char_end covers the title text plus the trailing colon when present.
    Longest literal wins at a given position; earlier rule breaks ties.
    """
    lowered_cache: dict[str, str] = {}
    line_positions = [m.end() for m in _LINE_RE.finditer(text)]
    for pos in line_positions:
        best: tuple[int, int, int] | None = None  # (-len, rule_index, end)
        for rule_index, rule in enumerate(rules):
            for literal in rule.literals:
                lit_lower = lowered_cache.get(literal)
                if lit_lower is None:
                    lit_lower = literal.lower()
                    lowered_cache[literal] = lit_lower
                end = pos + len(literal)
                if text[pos:end].lower() != lit_lower:
                    continue
                # Skip horizontal whitespace, then require ":" or end of line.
                after = end
                while after < len(text) and text[after] in " \t":
                    after += 1
                if after < len(text) and text[after] == ":":
                    title_end = after + 1
                elif after >= len(text) or text[after] == "\n":
                    title_end = end
                else:
                    continue
                key = (-len(literal), rule_index, title_end)
                if best is None or key < best:
                    best = key
        if best is not None:
            yield pos, best[2], best[1]


def detect_sections(doc: Document, rules: list[SectionRule] | None = None) -> Document:
    """Build the section list and tree for a tokenized document.

    Section extents (title plus body) cover every token exactly once; a
    section whose body would be empty gets ``body_span`` None.
    """
    if rules is None:
        rules = default_rules()
    doc.sections = []
    n_tokens = len(doc.tokens)
    if n_tokens == 0:
        return doc

    # Title char ranges -> token-aligned title boundaries.
    titles: list[tuple[int, int, int]] = []  # (start_token, end_token, rule_index)
    for char_start, char_end, rule_index in _title_matches(doc.text, rules):
        span = char_span(doc, char_start, char_end, mode="expand")
        if span is None:
            continue
        if titles and span.start_token < titles[-1][1]:
            continue  # swallowed by the previous title
        titles.append((span.start_token, span.end_token, rule_index))

    sections: list[Section] = []
    if not titles or titles[0][0] > 0:
        lead_end = titles[0][0] if titles else n_tokens
        sections.append(
            Section(category=None, title_span=None, body_span=Span(0, lead_end, label="body"))
        )
    for k, (t_start, t_end, rule_index) in enumerate(titles):
        next_start = titles[k + 1][0] if k + 1 < len(titles) else n_tokens
        body = Span(t_end, next_start, label="body") if next_start > t_end else None
        sections.append(
            Section(
                category=rules[rule_index].category,
                title_span=Span(t_start, t_end, label="title"),
                body_span=body,
            )
        )

    # Attach subsections: walk the previous section's ancestor chain and
    # stop at the first legal parent category.
    rule_by_category = {r.category: r for r in rules}
    for idx, section in enumerate(sections):
        if section.category is None or idx == 0:
            continue
        parents = rule_by_category[section.category].parents
        if not parents:
            continue
        ancestor = idx - 1
        while ancestor is not None:
            if sections[ancestor].category in parents:
                section.parent = ancestor
                sections[ancestor].children.append(idx)
                break
            ancestor = sections[ancestor].parent

    doc.sections = sections
    # Remember which rules produced these sections so that
    # apply_section_attributes can find each section's overrides.
    doc._section_rules = rules
    return doc


def apply_section_attributes(doc: Document) -> Document:
    """Stamp entities with their section's category and attribute overrides.

    Boolean overrides only ever raise an attribute to true; an attribute
    already asserted by a ConText modifier is left alone.
    """
    rules_by_category = {r.category: r for r in _rules_in_effect(doc)}
    for entity in doc.entities:
        idx = section_index_of(doc, entity.span.start_token)
        if idx is None:
            raise RuntimeError(
                f"entity at token {entity.span.start_token} is not enclosed by "
                "any section; run detect_sections first"
            )
        section = doc.sections[idx]
        entity.section_category = section.category
        if section.category is None:
            continue
        rule = rules_by_category.get(section.category)
        if rule is None:
            continue
        for key, value in rule.attr_overrides.items():
            if isinstance(value, bool):
                if not value:
                    continue  # never lowers an attribute evidence has raised
                if key in ASSERTION_ATTRS:
                    setattr(entity, key, True)
                else:
                    entity.span.attrs[key] = True
            else:
                entity.span.attrs[key] = value
    return doc


def _rules_in_effect(doc: Document) -> list[SectionRule]:
    rules = getattr(doc, "_section_rules", None)
    return rules if rules is not None else default_rules()


_SLUG_RE = re.compile(r"[^0-9a-z]+")


def _slugify(title: str) -> str:
    return _SLUG_RE.sub("_", title.lower()).strip("_")


def rules_from_template(template_text: str, category_prefix: str) -> list[SectionRule]:
    """Generate one rule per template line ending with ":".

    The literal is the trimmed line without its trailing colon (the title
    matcher supplies the colon requirement); the category is the prefix
    plus a slug of the line. Duplicate lines are collapsed, order kept.
    """
    rules: list[SectionRule] = []
    seen: set[str] = set()
    for line in template_text.splitlines():
        trimmed = line.strip()
        if not trimmed.endswith(":"):
            continue
        literal = trimmed[:-1].rstrip()
        if not literal:
            continue
        category = category_prefix + _slugify(literal)
        if category in seen:
            continue
        seen.add(category)
        rules.append(SectionRule(category=category, literals=(literal,)))
    return rules


_DEFAULT_RULES: list[SectionRule] | None = None


def default_rules() -> list[SectionRule]:
    global _DEFAULT_RULES
    if _DEFAULT_RULES is None:
        from .resources import default_rule_path

        _DEFAULT_RULES = load_section_rules(default_rule_path("sectionizer"))
    return _DEFAULT_RULES
