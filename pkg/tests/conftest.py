import json
import random
from pathlib import Path

import pytest

from dialogsim import data_path, load_goal_db, load_kb, load_schema
from dialogsim.nlg import load_templates

TESTS = Path(__file__).parent
TEST_DATA = TESTS / "data"


@pytest.fixture(scope="session")
def schema():
    return load_schema(data_path("schema.json"))


@pytest.fixture(scope="session")
def kb(schema):
    return load_kb(data_path("movie_kb.json"), schema)


@pytest.fixture(scope="session")
def goal_db(schema):
    return load_goal_db(data_path("user_goals.json"), schema)


@pytest.fixture(scope="session")
def templates(schema, kb):
    tset = load_templates(data_path("templates.json"), schema)
    tset.attach_lexicon(kb)
    return tset


@pytest.fixture(scope="session")
def tiny_schema():
    return load_schema(TEST_DATA / "tiny_schema.json")


@pytest.fixture(scope="session")
def tiny_kb(tiny_schema):
    return load_kb(TEST_DATA / "tiny_kb.json", tiny_schema)


@pytest.fixture(scope="session")
def tiny_goal_db(tiny_schema):
    return load_goal_db(TEST_DATA / "tiny_goals.json", tiny_schema)


@pytest.fixture(scope="session")
def tiny_templates(tiny_schema, tiny_kb):
    tset = load_templates(data_path("templates.json"), tiny_schema)
    tset.attach_lexicon(tiny_kb)
    return tset


@pytest.fixture()
def rng():
    return random.Random(7)


def load_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
