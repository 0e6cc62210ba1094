from __future__ import annotations

import random

import pytest

from notemill.docmodel import span_text
from notemill.errors import RuleLoadError
from notemill.sentencizer import (
    BoundaryRule,
    compile_rules,
    load_boundary_rules,
    parse_pattern,
    segment,
)
from notemill.tokenizer import tokenize

from .oracles import naive_sentences


def sentences_of(text, ruleset=None):
    doc = segment(tokenize(text), ruleset)
    return [span_text(doc, s) for s in doc.sentences]


def test_period_space_upper_splits(boundary_rules):
    assert sentences_of("Pt denies CP. SOB noted.") == [
        "Pt denies CP.",
        "SOB noted.",
    ]


def test_empty_document(boundary_rules):
    doc = segment(tokenize(""), boundary_rules)
    assert doc.sentences == []


def test_newline_list_markers(boundary_rules):
    assert sentences_of("meds:\n- aspirin\n- lisinopril") == [
        "meds:",
        "- aspirin",
        "- lisinopril",
    ]


def test_no_matches_yield_single_sentence(boundary_rules):
    assert sentences_of("pt stable and resting") == ["pt stable and resting"]


def test_blank_line_always_terminates():
    # Even with an empty rule set the blank line forces a break.
    empty = compile_rules([])
    doc = segment(tokenize("first part\n\nsecond part"), empty)
    assert [span_text(doc, s) for s in doc.sentences] == ["first part", "second part"]


def test_begin_rule_suppresses_end_at_same_anchor():
    rules = compile_rules([
        BoundaryRule("end_period", "end", parse_pattern(".\\s\\u"), 2, 10),
        BoundaryRule("keep_dr", "begin", parse_pattern("Dr.\\s\\u"), 4, 10),
    ])
    doc = segment(tokenize("Dr. Smith agrees. Next step."), rules)
    assert [span_text(doc, s) for s in doc.sentences] == [
        "Dr. Smith agrees.",
        "Next step.",
    ]


def test_higher_priority_end_beats_begin():
    rules = compile_rules([
        BoundaryRule("end_period", "end", parse_pattern(".\\s\\u"), 2, 20),
        BoundaryRule("keep_dr", "begin", parse_pattern("Dr.\\s\\u"), 4, 10),
    ])
    doc = segment(tokenize("Dr. Smith agrees."), rules)
    assert [span_text(doc, s) for s in doc.sentences] == ["Dr.", "Smith agrees."]


def test_partition_properties(boundary_rules):
    rng = random.Random(23)
    alphabet = "abcDEF. \n\n:-?xyz\t123"
    for _ in range(300):
        text = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 120)))
        doc = segment(tokenize(text), boundary_rules)
        covered = []
        for sent in doc.sentences:
            assert sent.start_token < sent.end_token
            covered.extend(range(sent.start_token, sent.end_token))
        assert covered == list(range(len(doc.tokens)))


def test_determinism(boundary_rules):
    text = "Pt denies CP. SOB noted.\n\n- f/u in 2 weeks"
    runs = {tuple((s.start_token, s.end_token) for s in
                  segment(tokenize(text), boundary_rules).sentences)
            for _ in range(5)}
    assert len(runs) == 1


def test_dispatch_equals_naive_scan(boundary_rules):
    rng = random.Random(5150)
    alphabet = "abc XYZ.\n-:?\t12*"
    for _ in range(200):
        text = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 100)))
        doc = segment(tokenize(text), boundary_rules)
        got = [(s.start_token, s.end_token) for s in doc.sentences]
        assert got == naive_sentences(doc, boundary_rules), repr(text)


def test_load_default_rule_file(boundary_rules):
    # At least one end rule dispatches on a literal period.
    period_rules = boundary_rules.literal_dispatch.get(".", ())
    assert any(boundary_rules.rules[i].kind == "end" for i in period_rules)


def test_load_rejects_empty_pattern(tmp_path):
    path = tmp_path / "rules.tsv"
    path.write_text("r1\tend\t\t0\t1\n", encoding="utf-8")
    with pytest.raises(RuleLoadError, match="r1"):
        load_boundary_rules(path)


def test_load_rejects_duplicate_ids(tmp_path):
    path = tmp_path / "rules.tsv"
    path.write_text("r1\tend\t.\\s\t1\t1\nr1\tend\t.\\n\t1\t1\n", encoding="utf-8")
    with pytest.raises(RuleLoadError, match="duplicate"):
        load_boundary_rules(path)


def test_load_reports_line_numbers(tmp_path):
    path = tmp_path / "rules.tsv"
    path.write_text("# comment\nr1\tend\t.\\q\t0\t1\n", encoding="utf-8")
    with pytest.raises(RuleLoadError, match=":2"):
        load_boundary_rules(path)


def test_load_rejects_bad_anchor(tmp_path):
    path = tmp_path / "rules.tsv"
    path.write_text("r1\tend\t.\\s\t5\t1\n", encoding="utf-8")
    with pytest.raises(RuleLoadError, match="anchor"):
        load_boundary_rules(path)


def test_snap_outward_keeps_straddled_token_left():
    # The break lands inside "x.y" (no whitespace); the token stays whole
    # and joins the earlier sentence.
    rules = compile_rules([
        BoundaryRule("dot", "end", parse_pattern("."), 0, 1),
    ])
    doc = segment(tokenize("ab x.y cd"), rules)
    texts = [span_text(doc, s) for s in doc.sentences]
    assert texts == ["ab x.y", "cd"]
