from __future__ import annotations

import random

import pytest

from notemill.errors import RuleLoadError
from notemill.tokenizer import (
    load_tokenizer_rules,
    make_rules,
    reconstruct,
    tokenize,
)


def surfaces(doc):
    return [doc.token_text(i) for i in range(len(doc.tokens))]


def test_chief_complaint_shorthand(tok_rules):
    # Hand application of the default rule table: "c/o" is an
    # abbreviation, "+" is a split character.
    doc = tokenize("c/o cp+sob", tok_rules)
    assert surfaces(doc) == ["c/o", "cp", "+", "sob"]


def test_empty_text(tok_rules):
    doc = tokenize("", tok_rules)
    assert doc.tokens == ()
    assert reconstruct(doc) == ""


def test_mixed_whitespace_round_trip(tok_rules):
    doc = tokenize("Pt  seen\ttoday", tok_rules)
    assert surfaces(doc) == ["Pt", "seen", "today"]
    assert [t.trailing_ws for t in doc.tokens] == ["  ", "\t", ""]
    assert reconstruct(doc) == "Pt  seen\ttoday"


def test_leading_and_trailing_whitespace(tok_rules):
    doc = tokenize("  a b \n", tok_rules)
    assert reconstruct(doc) == "  a b \n"
    assert doc.leading_ws == "  "


def test_whitespace_only(tok_rules):
    doc = tokenize(" \n\t ", tok_rules)
    assert doc.tokens == ()
    assert reconstruct(doc) == " \n\t "


def test_slash_shorthand_kept_whole(tok_rules):
    doc = tokenize("n/v/d", tok_rules)
    assert surfaces(doc) == ["n/v/d"]


def test_trailing_period_is_own_token(tok_rules):
    doc = tokenize("Denies CP. Also r/o. mi...", tok_rules)
    assert "CP" in surfaces(doc)
    assert surfaces(doc).count(".") == 5
    assert "r/o" in surfaces(doc)


def test_split_chars_become_tokens(tok_rules):
    doc = tokenize("bp(sitting)=120, hr<99", tok_rules)
    assert surfaces(doc) == [
        "bp", "(", "sitting", ")", "=", "120", ",", "hr", "<", "99",
    ]


def test_interior_period_not_split(tok_rules):
    assert surfaces(tokenize("dose 1.5 mg", tok_rules)) == ["dose", "1.5", "mg"]


def test_abbreviations_checked_before_split_rules():
    rules = make_rules(abbreviations=["a+b"], split_chars=["+"])
    assert surfaces(tokenize("a+b c+d", rules)) == ["a+b", "c", "+", "d"]


def test_preserve_infix_shields_single_letter_patterns():
    rules = make_rules(split_chars=["/"], preserve_infix=["/"])
    assert surfaces(tokenize("n/v/d", rules)) == ["n/v/d"]
    # Multi-letter neighbours are not the single-letter idiom: still split.
    assert surfaces(tokenize("chest/abd", rules)) == ["chest", "/", "abd"]


def test_no_token_contains_whitespace(tok_rules):
    rng = random.Random(11)
    alphabet = "abcXYZ0123 ,.+;:()[]<>=/\t\n"
    for _ in range(200):
        text = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 60)))
        doc = tokenize(text, tok_rules)
        for i in range(len(doc.tokens)):
            assert not any(ch.isspace() for ch in doc.token_text(i))


def test_round_trip_fuzz(tok_rules):
    rng = random.Random(7)
    alphabet = (
        "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789"
        " \t\n\r.,;:+()[]<>=/-?!*&#'\"éß–"
    )
    for _ in range(2000):
        text = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 80)))
        doc = tokenize(text, tok_rules)
        assert reconstruct(doc) == text


def test_every_char_in_exactly_one_range(tok_rules):
    text = "Pt c/o cp+sob;  r/o MI.\n\nmeds: asa"
    doc = tokenize(text, tok_rules)
    seen = [0] * len(text)
    for i, ch in enumerate(doc.leading_ws):
        seen[i] += 1
    for tok in doc.tokens:
        for i in range(tok.start_char, tok.end_char):
            seen[i] += 1
        base = tok.end_char
        for k in range(len(tok.trailing_ws)):
            seen[base + k] += 1
    assert all(count == 1 for count in seen)


def test_rule_file_round_trip(tmp_path):
    path = tmp_path / "rules.json"
    path.write_text(
        '{"abbreviations": ["q.d."], "split_chars": ["%"], "preserve_infix": []}',
        encoding="utf-8",
    )
    rules = load_tokenizer_rules(path)
    assert surfaces(tokenize("q.d. 50%", rules)) == ["q.d.", "50", "%"]


def test_rule_file_rejects_bad_entries(tmp_path):
    path = tmp_path / "rules.json"
    path.write_text('{"split_chars": ["ab"]}', encoding="utf-8")
    with pytest.raises(RuleLoadError):
        load_tokenizer_rules(path)
    path.write_text('{"abbreviations": ["a b"]}', encoding="utf-8")
    with pytest.raises(RuleLoadError):
        load_tokenizer_rules(path)
    path.write_text('{"split_chars": ["x"]}', encoding="utf-8")
    with pytest.raises(RuleLoadError):
        load_tokenizer_rules(path)
    path.write_text('{"nonsense": []}', encoding="utf-8")
    with pytest.raises(RuleLoadError):
        load_tokenizer_rules(path)
