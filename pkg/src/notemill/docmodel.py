"""Document model: source text plus layered, token-aligned annotations.

A document owns its unmodified source text and a sequence of
whitespace-free tokens; every other layer (sentences, sections, entities,
modifiers, modifier->entity links) points back into the token sequence by
index. Character offsets count Unicode code points and all ranges are
end-exclusive.

Documents are treated as immutable between pipeline stages: a stage owns
the document exclusively while it runs and only appends annotation layers.
The source text and token sequence are never changed after tokenization.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field

# Assertion attributes pre-registered on every entity. Custom attributes
# live in the open ``attrs`` map of the entity's span.
ASSERTION_ATTRS = (
    "is_negated",
    "is_historical",
    "is_hypothetical",
    "is_uncertain",
    "is_family",
)


@dataclass(frozen=True)
class Token:
    """A whitespace-free slice of the source text.

    ``trailing_ws`` holds the exact whitespace between this token and the
    next one (or the end of the document), so that the source text can be
    reconstructed byte for byte.
    """

    start_char: int
    end_char: int
    trailing_ws: str = ""


@dataclass
class Span:
    """Half-open token range with a label and an open attribute record."""

    start_token: int
    end_token: int
    label: str = ""
    attrs: dict[str, bool | str] = field(default_factory=dict)


@dataclass
class Entity:
    """An extracted concept mention with assertion and normalization state."""

    span: Span
    category: str
    cui: str | None = None
    similarity: float | None = None
    is_negated: bool = False
    is_historical: bool = False
    is_hypothetical: bool = False
    is_uncertain: bool = False
    is_family: bool = False
    section_category: str | None = None


@dataclass
class Modifier:
    """A matched contextual trigger phrase and its scope.

    ``scope`` is a half-open token range inside the enclosing sentence.
    For bidirectional modifiers the range brackets the modifier itself;
    by convention the modifier's own tokens are never part of its scope.
    """

    span: Span
    category: str
    direction: str
    scope: tuple[int, int]


@dataclass
class Section:
    """A titled (or implicit leading) region of the document.

    ``body_span`` is None when a title is immediately followed by the next
    title, i.e. the section has no body tokens of its own. ``parent`` and
    ``children`` are indices into the owning document's section list and
    form a forest in document order.
    """

    category: str | None
    title_span: Span | None
    body_span: Span | None
    parent: int | None = None
    children: list[int] = field(default_factory=list)


@dataclass
class Document:
    """Source text, tokens, and all annotation layers."""

    text: str
    tokens: tuple[Token, ...] = ()
    leading_ws: str = ""
    sentences: list[Span] = field(default_factory=list)
    sections: list[Section] = field(default_factory=list)
    entities: list[Entity] = field(default_factory=list)
    modifiers: list[Modifier] = field(default_factory=list)
    links: list[tuple[int, int]] = field(default_factory=list)
    _bounds: tuple[list[int], list[int]] | None = field(
        default=None, repr=False, compare=False
    )

    def token_bounds(self) -> tuple[list[int], list[int]]:
        """Start and end character offsets of all tokens, cached."""
        if self._bounds is None:
            self._bounds = (
                [t.start_char for t in self.tokens],
                [t.end_char for t in self.tokens],
            )
        return self._bounds

    def token_text(self, index: int) -> str:
        tok = self.tokens[index]
        return self.text[tok.start_char : tok.end_char]


def validate_span(doc: Document, span: Span) -> None:
    """Raise IndexError unless ``span`` is a valid token range for ``doc``."""
    if not (0 <= span.start_token < span.end_token <= len(doc.tokens)):
        raise IndexError(
            f"span ({span.start_token}, {span.end_token}) invalid for "
            f"document with {len(doc.tokens)} tokens"
        )


def span_text(doc: Document, span: Span) -> str:
    """Exact source substring covered by ``span``.

    Interior whitespace is preserved; the trailing whitespace of the last
    token is excluded.
    """
    validate_span(doc, span)
    start = doc.tokens[span.start_token].start_char
    end = doc.tokens[span.end_token - 1].end_char
    return doc.text[start:end]


def span_char_range(doc: Document, span: Span) -> tuple[int, int]:
    """Character offsets (start, end) of the text covered by ``span``."""
    validate_span(doc, span)
    return (
        doc.tokens[span.start_token].start_char,
        doc.tokens[span.end_token - 1].end_char,
    )


def char_span(
    doc: Document, start_char: int, end_char: int, mode: str = "expand"
) -> Span | None:
    """Align a character range to token boundaries.

    ``expand`` returns the smallest token-aligned span whose character
    extent covers [start_char, end_char); ``contract`` returns the largest
    token-aligned span lying entirely inside the range. Returns None when
    no such span exists (e.g. the range reaches into leading or trailing
    whitespace that no token can cover, or no whole token fits inside).

    Raises IndexError for offsets outside [0, len(text)] and ValueError
    for an unknown mode.
    """
    if mode not in ("expand", "contract"):
        raise ValueError(f"unknown alignment mode: {mode!r}")
    if not (0 <= start_char <= end_char <= len(doc.text)):
        raise IndexError(
            f"character range ({start_char}, {end_char}) out of bounds for "
            f"text of length {len(doc.text)}"
        )
    if not doc.tokens:
        return None
    starts, ends = doc.token_bounds()
    if mode == "expand":
        first = bisect_right(starts, start_char) - 1
        if first < 0:
            return None
        last = bisect_left(ends, end_char)
        if last >= len(doc.tokens):
            return None
        if last < first:
            # Degenerate range at a shared token boundary: every token in
            # [last, first] covers it alone; the earliest is the minimal.
            return Span(last, last + 1)
        return Span(first, last + 1)
    first = bisect_left(starts, start_char)
    last = bisect_right(ends, end_char) - 1
    if first >= len(doc.tokens) or last < first:
        return None
    return Span(first, last + 1)


def spans_overlap(a: Span, b: Span) -> bool:
    return a.start_token < b.end_token and b.start_token < a.end_token


def sentence_index_of(doc: Document, token_index: int) -> int | None:
    """Index of the sentence containing ``token_index``, if any."""
    sentences = doc.sentences
    if not sentences:
        return None
    starts = [s.start_token for s in sentences]
    i = bisect_right(starts, token_index) - 1
    if i >= 0 and sentences[i].start_token <= token_index < sentences[i].end_token:
        return i
    return None


def section_extent(doc: Document, section: Section) -> tuple[int, int]:
    """Token range spanned by a section's title plus its own body."""
    spans = [s for s in (section.title_span, section.body_span) if s is not None]
    if not spans:
        raise ValueError("section has neither title nor body")
    return (min(s.start_token for s in spans), max(s.end_token for s in spans))


def section_index_of(doc: Document, token_index: int) -> int | None:
    """Index of the section whose extent contains ``token_index``, if any."""
    for i, section in enumerate(doc.sections):
        lo, hi = section_extent(doc, section)
        if lo <= token_index < hi:
            return i
    return None
