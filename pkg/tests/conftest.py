from __future__ import annotations

import pytest

from notemill import normalizer, sentencizer, target_matcher, tokenizer


@pytest.fixture(scope="session")
def tok_rules():
    return tokenizer.default_rules()


@pytest.fixture(scope="session")
def boundary_rules():
    return sentencizer.default_rules()


@pytest.fixture(scope="session")
def target():
    return target_matcher.compile_rules(target_matcher.default_rules())


@pytest.fixture(scope="session")
def toy_entries():
    from notemill.resources import default_rule_path

    return normalizer.load_dictionary(default_rule_path("normalizer"))


@pytest.fixture(scope="session")
def toy_index(toy_entries):
    return normalizer.build_index(toy_entries, 3)
