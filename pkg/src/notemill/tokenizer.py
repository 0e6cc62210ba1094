"""Non-destructive tokenizer with clinical punctuation rules.

Splitting never discards a character: each token records the exact
whitespace that follows it, and whitespace before the first token is kept
on the document, so the source text is always reconstructible byte for
byte. Clinical shorthand like "c/o" survives as a single token via the
abbreviation list, which is consulted before any split rule.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

from .docmodel import Document, Token
from .errors import RuleLoadError

_CHUNK_RE = re.compile(r"\S+")


@dataclass(frozen=True)
class TokenizerRules:
    """Immutable tokenizer rule pack.

    abbreviations: chunks equal to one of these (case-insensitively) are
        never split.
    split_chars: characters that always become standalone tokens.
    preserve_infix: punctuation sequences kept inside a token when flanked
        by single alphanumeric characters on both sides (the "n/v/d"
        idiom), shielding them from split_chars. Applied longest first;
        ties keep file order.
    """

    abbreviations: frozenset[str]
    split_chars: frozenset[str]
    preserve_infix: tuple[str, ...]

    def __post_init__(self):
        for abbr in self.abbreviations:
            if any(ch.isspace() for ch in abbr):
                raise RuleLoadError(f"abbreviation contains whitespace: {abbr!r}")
        for ch in self.split_chars:
            if len(ch) != 1:
                raise RuleLoadError(f"split_chars entry is not a single character: {ch!r}")
            if ch.isalnum():
                raise RuleLoadError(f"split_chars entry is alphanumeric: {ch!r}")


def make_rules(
    abbreviations: list[str] | tuple[str, ...] = (),
    split_chars: list[str] | tuple[str, ...] = (),
    preserve_infix: list[str] | tuple[str, ...] = (),
) -> TokenizerRules:
    infix = tuple(sorted(preserve_infix, key=lambda s: -len(s)))
    return TokenizerRules(
        abbreviations=frozenset(a.lower() for a in abbreviations),
        split_chars=frozenset(split_chars),
        preserve_infix=infix,
    )


def load_tokenizer_rules(path: str | Path) -> TokenizerRules:
    """Load a JSON rule file with keys abbreviations/split_chars/preserve_infix."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise RuleLoadError(f"cannot load tokenizer rules from {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise RuleLoadError(f"tokenizer rule file {path} must hold a JSON object")
    for key in raw:
        if key not in ("abbreviations", "split_chars", "preserve_infix"):
            raise RuleLoadError(f"unknown key in tokenizer rule file {path}: {key!r}")
    return make_rules(
        abbreviations=raw.get("abbreviations", ()),
        split_chars=raw.get("split_chars", ()),
        preserve_infix=raw.get("preserve_infix", ()),
    )


def _protected_positions(chunk: str, rules: TokenizerRules) -> set[int]:
    """Character indexes inside ``chunk`` shielded by preserve_infix rules."""
    protected: set[int] = set()
    for seq in rules.preserve_infix:
        start = 0
        while True:
            i = chunk.find(seq, start)
            if i < 0:
                break
            start = i + 1
            end = i + len(seq)
            if i == 0 or end >= len(chunk):
                continue
            left_ok = chunk[i - 1].isalnum() and (i - 2 < 0 or not chunk[i - 2].isalnum())
            right_ok = chunk[end].isalnum() and (
                end + 1 >= len(chunk) or not chunk[end + 1].isalnum()
            )
            if left_ok and right_ok:
                protected.update(range(i, end))
    return protected


def _split_chunk(chunk: str, rules: TokenizerRules) -> list[tuple[int, int]]:
    """Token ranges (relative to the chunk) for one whitespace-free chunk."""
    if chunk.lower() in rules.abbreviations:
        return [(0, len(chunk))]
    protected = _protected_positions(chunk, rules) if rules.preserve_infix else ()

    segments: list[tuple[int, int]] = []
    seg_start = None
    for i, ch in enumerate(chunk):
        if ch in rules.split_chars and i not in protected:
            if seg_start is not None:
                segments.append((seg_start, i))
                seg_start = None
            segments.append((i, i + 1))
        elif seg_start is None:
            seg_start = i
    if seg_start is not None:
        segments.append((seg_start, len(chunk)))

    # A chunk-final "." gets its own token so sentence rules can key on it.
    pieces: list[tuple[int, int]] = []
    for start, end in segments:
        dots = 0
        while end - dots - 1 > start and chunk[end - dots - 1] == ".":
            dots += 1
        pieces.append((start, end - dots))
        for k in range(dots):
            pieces.append((end - dots + k, end - dots + k + 1))
    return pieces


def tokenize(text: str, rules: TokenizerRules | None = None) -> Document:
    """Split ``text`` into a whitespace-preserving token sequence.

    Total function: any string, including the empty one, yields a valid
    document that reconstructs exactly.
    """
    if rules is None:
        rules = default_rules()
    tokens: list[Token] = []
    leading_ws = text
    prev_end = 0
    chunks = list(_CHUNK_RE.finditer(text))
    for n, m in enumerate(chunks):
        if n == 0:
            leading_ws = text[: m.start()]
        else:
            # Whitespace between chunks belongs to the previous chunk's
            # last token.
            last = tokens[-1]
            tokens[-1] = Token(last.start_char, last.end_char, text[prev_end : m.start()])
        chunk = m.group()
        for rel_start, rel_end in _split_chunk(chunk, rules):
            tokens.append(Token(m.start() + rel_start, m.start() + rel_end, ""))
        prev_end = m.end()
    if chunks:
        last = tokens[-1]
        tokens[-1] = Token(last.start_char, last.end_char, text[prev_end:])
    return Document(text=text, tokens=tuple(tokens), leading_ws=leading_ws)


def reconstruct(doc: Document) -> str:
    """Rebuild the source text from tokens and stored whitespace."""
    parts = [doc.leading_ws]
    for tok in doc.tokens:
        parts.append(doc.text[tok.start_char : tok.end_char])
        parts.append(tok.trailing_ws)
    return "".join(parts)


_DEFAULT_RULES: TokenizerRules | None = None


def default_rules() -> TokenizerRules:
    """Packaged default rule pack (see data/tokenizer_rules.json)."""
    global _DEFAULT_RULES
    if _DEFAULT_RULES is None:
        from .resources import default_rule_path

        _DEFAULT_RULES = load_tokenizer_rules(default_rule_path("tokenizer"))
    return _DEFAULT_RULES
