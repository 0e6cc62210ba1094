"""Static HTML views of processed documents.

``render_highlight`` shows the full source text with entities, contextual
modifiers, and section titles wrapped in <mark> elements; all labels live
in attributes so that stripping markup recovers the source text exactly.
``render_links`` draws the token row with one SVG arrow per
modifier->entity link. Both renderers are deterministic and emit
self-contained documents styled inline.
"""

from __future__ import annotations

import html
import zlib

from .docmodel import Document, span_char_range

_PALETTE = (
    "#ffe08a",
    "#b3e5c5",
    "#bcd7f7",
    "#f6c6dc",
    "#d9ccf2",
    "#ffd1b0",
    "#c9e8ec",
    "#e4e8b0",
    "#f2c5bd",
    "#cfd8dc",
)

_MOD_COLOR = "#ffb3b3"
_SEC_COLOR = "#d0d8ff"


def category_color(category: str) -> str:
    """Stable palette slot for a category name."""
    return _PALETTE[zlib.crc32(category.encode("utf-8")) % len(_PALETTE)]


def _annotations(doc: Document):
    """(start_char, end_char, css, attr_pairs) for everything highlighted."""
    out = []
    for entity in doc.entities:
        start, end = span_char_range(doc, entity.span)
        flags = ",".join(
            name[3:]
            for name in (
                "is_negated",
                "is_historical",
                "is_hypothetical",
                "is_uncertain",
                "is_family",
            )
            if getattr(entity, name)
        )
        attrs = [("data-entity", entity.category)]
        if flags:
            attrs.append(("data-asserted", flags))
        if entity.cui:
            attrs.append(("data-cui", entity.cui))
        out.append((start, end, f"background:{category_color(entity.category)}", attrs))
    for modifier in doc.modifiers:
        start, end = span_char_range(doc, modifier.span)
        out.append(
            (
                start,
                end,
                f"background:{_MOD_COLOR};text-decoration:underline",
                [("data-modifier", modifier.category)],
            )
        )
    for section in doc.sections:
        if section.title_span is None:
            continue
        start, end = span_char_range(doc, section.title_span)
        out.append(
            (
                start,
                end,
                f"background:{_SEC_COLOR};font-weight:bold",
                [("data-section", section.category or "")],
            )
        )
    return out


def render_highlight(doc: Document) -> str:
    """Source text with annotation marks; markup-free text equals the source."""
    annotations = _annotations(doc)
    boundaries = {0, len(doc.text)}
    for start, end, _, _ in annotations:
        boundaries.add(start)
        boundaries.add(end)
    edges = sorted(boundaries)

    parts = [
        "<!DOCTYPE html>",
        '<html><head><meta charset="utf-8"/></head>',
        '<body style="margin:1em;font-family:monospace">',
        '<pre style="white-space:pre-wrap;line-height:1.7">',
    ]
    for lo, hi in zip(edges, edges[1:]):
        segment = html.escape(doc.text[lo:hi])
        covering = [a for a in annotations if a[0] <= lo and hi <= a[1]]
        if not covering:
            parts.append(segment)
            continue
        styles = ";".join(a[2] for a in covering)
        attr_pairs = [pair for a in covering for pair in a[3]]
        attr_text = "".join(
            f' {name}="{html.escape(value, quote=True)}"' for name, value in attr_pairs
        )
        title = html.escape(
            " | ".join(f"{name[5:]}:{value}" for name, value in attr_pairs), quote=True
        )
        parts.append(
            f'<mark style="{styles};border-radius:3px"{attr_text} title="{title}">'
            f"{segment}</mark>"
        )
    parts.append("</pre></body></html>")
    return "".join(parts)


_CHAR_W = 9
_TOKEN_Y = 170


def render_links(doc: Document) -> str:
    """Token row with one directed arrow per modifier->entity link."""
    width = max(len(doc.text), 1) * _CHAR_W + 2 * _CHAR_W
    height = _TOKEN_Y + 40

    parts = [
        "<!DOCTYPE html>",
        '<html><head><meta charset="utf-8"/></head>',
        '<body style="margin:1em">',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'font-family="monospace" font-size="14">',
        "<defs>",
        '<marker id="head" markerWidth="8" markerHeight="8" refX="6" refY="3" '
        'orient="auto"><path d="M0,0 L6,3 L0,6 z" fill="#333"/></marker>',
        "</defs>",
    ]

    def center_x(span) -> float:
        start, end = span_char_range(doc, span)
        return _CHAR_W + (start + end) / 2 * _CHAR_W

    for i, token in enumerate(doc.tokens):
        x = _CHAR_W + token.start_char * _CHAR_W
        text = html.escape(doc.token_text(i))
        parts.append(f'<text x="{x}" y="{_TOKEN_Y}">{text}</text>')

    for arc, (mi, ei) in enumerate(doc.links):
        modifier = doc.modifiers[mi]
        entity = doc.entities[ei]
        x1 = center_x(modifier.span)
        x2 = center_x(entity.span)
        rise = 30 + (arc % 6) * 18
        y = _TOKEN_Y - 16
        xm = (x1 + x2) / 2
        parts.append(
            f'<path class="arrow" d="M{x1:.1f},{y} Q{xm:.1f},{y - rise} {x2:.1f},{y}" '
            'fill="none" stroke="#333" stroke-width="1.2" marker-end="url(#head)"/>'
        )
        parts.append(
            f'<text class="arrow-label" x="{xm:.1f}" y="{y - rise / 2 - 4:.1f}" '
            f'text-anchor="middle" font-size="11" fill="#a33">'
            f"{html.escape(modifier.category)}</text>"
        )

    parts.append("</svg></body></html>")
    return "".join(parts)
