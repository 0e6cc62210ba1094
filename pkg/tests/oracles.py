"""Independent reference implementations used to check the real components.

Everything here is written the straightforward, slow way: direct
definitions, exhaustive enumeration, no dispatch tables, no inverted
indexes, no pruning. Tests compare the production code against these.
"""

from __future__ import annotations

import math


# ---------------------------------------------------------------------------
# docmodel: token alignment by exhaustive span enumeration


def minimal_cover_span(doc, start_char, end_char):
    """Smallest token span covering a char range, by trying every span."""
    best = None
    n = len(doc.tokens)
    for i in range(n):
        for j in range(i + 1, n + 1):
            lo = doc.tokens[i].start_char
            hi = doc.tokens[j - 1].end_char
            if lo <= start_char and end_char <= hi:
                if best is None or (j - i, i) < (best[1] - best[0], best[0]):
                    best = (i, j)
    return best


def maximal_inner_span(doc, start_char, end_char):
    """Largest token span inside a char range, by trying every span."""
    best = None
    n = len(doc.tokens)
    for i in range(n):
        for j in range(i + 1, n + 1):
            lo = doc.tokens[i].start_char
            hi = doc.tokens[j - 1].end_char
            if start_char <= lo and hi <= end_char:
                if best is None or (j - i, -i) > (best[1] - best[0], -best[0]):
                    best = (i, j)
    return best


# ---------------------------------------------------------------------------
# sentencizer: every rule at every position, no dispatch


def _element_ok(element, ch):
    kind, lit = element
    if kind == "LIT":
        return ch == lit
    if kind == "DIGIT":
        return ch.isdigit()
    if kind == "UPPER":
        return ch.isupper()
    if kind == "LOWER":
        return ch.islower()
    if kind == "WS":
        return ch.isspace()
    if kind == "NL":
        return ch == "\n"
    if kind == "ANY":
        return True
    raise AssertionError(f"unknown pattern element {kind}")


def naive_char_breaks(text, ruleset):
    """Break positions via brute force over (rule, position) pairs."""
    begins: dict[int, int] = {}
    ends: dict[int, int] = {}
    for rule in ruleset.rules:
        span = len(rule.pattern)
        for pos in range(len(text) - span + 1):
            if all(_element_ok(rule.pattern[k], text[pos + k]) for k in range(span)):
                anchor = pos + rule.anchor_offset
                table = begins if rule.kind == "begin" else ends
                if anchor not in table or rule.priority > table[anchor]:
                    table[anchor] = rule.priority
    breaks = set()
    for anchor, prio in ends.items():
        if anchor not in begins or prio > begins[anchor]:
            breaks.add(anchor)
    for anchor in begins:
        if anchor not in ends:
            breaks.add(anchor)
    # Blank lines always break: scan whitespace runs by hand. A run counts
    # as a blank line iff it contains two newlines separated only by
    # horizontal whitespace.
    i = 0
    while i < len(text):
        if not text[i].isspace():
            i += 1
            continue
        j = i
        while j < len(text) and text[j].isspace():
            j += 1
        run = text[i:j]
        newlines = [k for k, ch in enumerate(run) if ch == "\n"]
        for a, b in zip(newlines, newlines[1:]):
            if all(ch != "\n" for ch in run[a + 1 : b]):
                breaks.add(j)
                break
        i = j
    return breaks


def naive_sentences(doc, ruleset):
    """Token-range sentences derived from naive_char_breaks."""
    if not doc.tokens:
        return []
    starts = [t.start_char for t in doc.tokens]
    token_breaks = set()
    for b in naive_char_breaks(doc.text, ruleset):
        idx = 0
        while idx < len(starts) and starts[idx] < b:
            idx += 1
        if 0 < idx < len(doc.tokens):
            token_breaks.add(idx)
    edges = [0, *sorted(token_breaks), len(doc.tokens)]
    return [(lo, hi) for lo, hi in zip(edges, edges[1:])]


# ---------------------------------------------------------------------------
# context: scope walked token by token, links by set intersection


def _literal_matches(doc, words):
    n = len(doc.tokens)
    hits = []
    for i in range(n - len(words) + 1):
        if all(doc.token_text(i + k).lower() == words[k] for k in range(len(words))):
            hits.append((i, i + len(words)))
    return hits


def reference_context(doc, rules):
    """Brute-force ConText over literal rules.

    Returns (modifiers, links, asserted) where modifiers is a list of
    (start, end, rule_index, scope_lo, scope_hi), links a list of
    (modifier_pos, entity_index), and asserted a per-entity set of
    attribute names.
    """
    all_matches = []
    for ri, rule in enumerate(rules):
        words = rule.literal.lower().split()
        for start, end in _literal_matches(doc, words):
            all_matches.append((start, end, ri))
    all_matches.sort()

    modifiers = []
    for si, sentence in enumerate(doc.sentences):
        in_sentence = [
            m
            for m in all_matches
            if m[0] >= sentence.start_token and m[1] <= sentence.end_token
        ]
        pseudo = [m for m in in_sentence if rules[m[2]].direction == "PSEUDO"]
        terms = [m for m in in_sentence if rules[m[2]].direction == "TERMINATE"]
        for start, end, ri in in_sentence:
            rule = rules[ri]
            if rule.direction in ("TERMINATE", "PSEUDO"):
                continue
            if any(p[0] <= start and end <= p[1] for p in pseudo):
                continue
            scope_tokens = set()
            if rule.direction in ("FORWARD", "BIDIRECTIONAL"):
                limit = sentence.end_token
                if rule.max_scope is not None:
                    limit = min(limit, end + rule.max_scope)
                pos = end
                while pos < limit:
                    if any(t[0] == pos and t[0] >= end for t in terms):
                        break
                    scope_tokens.add(pos)
                    pos += 1
            if rule.direction in ("BACKWARD", "BIDIRECTIONAL"):
                floor = sentence.start_token
                if rule.max_scope is not None:
                    floor = max(floor, start - rule.max_scope)
                pos = start - 1
                while pos >= floor:
                    if any(t[1] == pos + 1 and t[1] <= start for t in terms):
                        break
                    scope_tokens.add(pos)
                    pos -= 1
            modifiers.append((start, end, ri, scope_tokens))

    links = []
    asserted = {ei: set() for ei in range(len(doc.entities))}
    for mi, (start, end, ri, scope_tokens) in enumerate(modifiers):
        mod_tokens = set(range(start, end))
        for ei, entity in enumerate(doc.entities):
            ent_tokens = set(range(entity.span.start_token, entity.span.end_token))
            if not ent_tokens & scope_tokens:
                continue
            if ent_tokens & mod_tokens:
                continue
            links.append((mi, ei))
            attr = rules[ri].asserted_attribute()
            if attr:
                asserted[ei].add(attr)
    return modifiers, links, asserted


# ---------------------------------------------------------------------------
# normalizer: full scan over every dictionary entry

PAD = "\x00"


def char_ngrams(text, n):
    padded = PAD * (n - 1) + text + PAD * (n - 1)
    return frozenset(padded[i : i + n] for i in range(len(padded) - n + 1))


def normalize(text):
    return " ".join(text.lower().split())


def naive_similarity(measure, x_feats, y_feats):
    c = len(x_feats & y_feats)
    x, y = len(x_feats), len(y_feats)
    if measure == "COSINE":
        return c / math.sqrt(x * y)
    if measure == "JACCARD":
        return c / (x + y - c)
    if measure == "DICE":
        return 2 * c / (x + y)
    if measure == "OVERLAP":
        return c / min(x, y)
    raise AssertionError(f"unknown measure {measure}")


def naive_search(entries, n, query, measure, threshold):
    """Full scan: {entry_index: similarity} of entries reaching threshold."""
    x_feats = char_ngrams(normalize(query), n)
    out = {}
    for idx, entry in enumerate(entries):
        y_feats = char_ngrams(normalize(entry.term), n)
        sim = naive_similarity(measure, x_feats, y_feats)
        if sim >= threshold:
            out[idx] = sim
    return out
