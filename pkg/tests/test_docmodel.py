from __future__ import annotations

import random

import pytest

from notemill.docmodel import Span, char_span, span_text
from notemill.tokenizer import tokenize

from .oracles import maximal_inner_span, minimal_cover_span


def test_char_span_exact_token_boundaries():
    doc = tokenize("no cp")
    span = char_span(doc, 3, 5, mode="expand")
    assert (span.start_token, span.end_token) == (1, 2)
    assert span_text(doc, span) == "cp"


def test_char_span_expand_covers_both_tokens():
    doc = tokenize("no cp")
    # Frozen from the enumeration oracle: minimal cover of chars (1, 4).
    assert minimal_cover_span(doc, 1, 4) == (0, 2)
    span = char_span(doc, 1, 4, mode="expand")
    assert (span.start_token, span.end_token) == (0, 2)


def test_char_span_contract_without_whole_token():
    doc = tokenize("no cp")
    assert char_span(doc, 1, 2, mode="contract") is None


def test_char_span_out_of_range():
    doc = tokenize("no cp")
    with pytest.raises(IndexError):
        char_span(doc, 0, 99)
    with pytest.raises(IndexError):
        char_span(doc, -1, 2)


def test_char_span_rejects_unknown_mode():
    doc = tokenize("no cp")
    with pytest.raises(ValueError):
        char_span(doc, 0, 2, mode="snap")


def test_char_span_empty_document():
    doc = tokenize("")
    assert char_span(doc, 0, 0, mode="expand") is None


def test_char_span_matches_enumeration_oracle():
    rng = random.Random(4242)
    alphabet = "ab c.x+, \n\t"
    for _ in range(300):
        text = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 30)))
        doc = tokenize(text)
        for _ in range(20):
            a = rng.randint(0, len(text))
            b = rng.randint(a, len(text))
            got = char_span(doc, a, b, mode="expand")
            want = minimal_cover_span(doc, a, b)
            got_pair = (got.start_token, got.end_token) if got else None
            assert got_pair == want, (text, a, b)
            got = char_span(doc, a, b, mode="contract")
            want = maximal_inner_span(doc, a, b)
            got_pair = (got.start_token, got.end_token) if got else None
            assert got_pair == want, (text, a, b)


def test_span_text_preserves_interior_whitespace():
    doc = tokenize("chest  pain")
    assert span_text(doc, Span(0, 2)) == "chest  pain"


def test_span_text_single_token():
    doc = tokenize("chest  pain")
    assert span_text(doc, Span(0, 1)) == "chest"


def test_span_text_full_document():
    doc = tokenize("a b")
    assert span_text(doc, Span(0, 2)) == "a b"


def test_span_text_excludes_trailing_whitespace():
    doc = tokenize("a b  ")
    assert span_text(doc, Span(0, 2)) == "a b"


def test_span_text_invalid_indices():
    doc = tokenize("a b")
    with pytest.raises(IndexError):
        span_text(doc, Span(0, 3))
    with pytest.raises(IndexError):
        span_text(doc, Span(1, 1))


def test_returned_spans_satisfy_invariants():
    rng = random.Random(99)
    alphabet = "word + . x\n "
    for _ in range(200):
        text = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 40)))
        doc = tokenize(text)
        a = rng.randint(0, len(text))
        b = rng.randint(a, len(text))
        for mode in ("expand", "contract"):
            span = char_span(doc, a, b, mode=mode)
            if span is not None:
                assert 0 <= span.start_token < span.end_token <= len(doc.tokens)
