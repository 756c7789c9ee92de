import random

import pytest

from dialogsim.core import (
    DialogAct,
    DomainSchema,
    SchemaError,
    UserGoal,
    derive_rng,
    format_act_string,
    parse_act_string,
    validate_act,
    validate_goal,
)
from dialogsim.dst import state_vector_length


def test_default_schema_counts(schema):
    assert len(schema.intents) == 11
    assert len(schema.slots) == 29
    assert schema.default_request_slot == "ticket"
    assert set(schema.required_slots) <= set(schema.informable_slots)
    assert schema.max_turn == 40


def test_required_slot_must_be_informable(schema):
    data = schema.to_dict()
    for entry in data["slots"]:
        if entry["name"] == "numberofpeople":
            entry["informable"] = False
    with pytest.raises(SchemaError):
        DomainSchema.from_dict(data)


def test_duplicate_names_rejected(schema):
    data = schema.to_dict()
    data["intents"] = list(data["intents"]) + ["inform"]
    with pytest.raises(SchemaError):
        DomainSchema.from_dict(data)


def test_default_request_slot_must_be_requestable(schema):
    data = schema.to_dict()
    for entry in data["slots"]:
        if entry["name"] == "ticket":
            entry["requestable"] = False
    with pytest.raises(SchemaError):
        DomainSchema.from_dict(data)


def test_minimal_schema_changes_featurizer_dim():
    data = {
        "intents": ["request", "inform"],
        "slots": [
            {"name": "moviename", "informable": True, "requestable": True},
            {"name": "numberofpeople", "informable": True, "requestable": False},
            {"name": "ticket", "informable": False, "requestable": True},
        ],
        "required_slots": ["moviename"],
        "default_request_slot": "ticket",
        "max_turn": 10,
    }
    small = DomainSchema.from_dict(data)
    # 2 intents and 3 slots: 2*2 + 7*3 + 3
    assert state_vector_length(small) == 28


def test_validate_act_examples(schema):
    act = DialogAct(
        "user", "request",
        {"moviename": "deadpool", "city": "seattle"}, {"ticket": "UNK"}, turn=0,
    )
    assert validate_act(schema, act) == []

    thanks = DialogAct("user", "thanks", {}, {}, turn=2)
    assert validate_act(schema, thanks) == []

    both_sides = DialogAct(
        "user", "inform", {"starttime": "4 pm"}, {"starttime": "UNK"}, turn=0
    )
    assert any("disjointness" in v for v in validate_act(schema, both_sides))


def test_validate_act_turn_parity(schema):
    odd_user = DialogAct("user", "thanks", {}, {}, turn=3)
    assert any("odd turn" in v for v in validate_act(schema, odd_user))
    even_agent = DialogAct("agent", "thanks", {}, {}, turn=2)
    assert any("even turn" in v for v in validate_act(schema, even_agent))


def _random_act(schema, rng):
    speaker = rng.choice(["user", "agent"])
    informable = list(schema.informable_slots)
    requestable = list(schema.requestable_slots)
    informs = {
        s: rng.choice(["deadpool", "seattle", "4 pm", "2", "anything"])
        for s in rng.sample(informable, rng.randint(0, 3))
    }
    requests = {
        s: "UNK"
        for s in rng.sample(requestable, rng.randint(0, 2))
        if s not in informs
    }
    turn = rng.randrange(0, 40, 2) + (0 if speaker == "user" else 1)
    return DialogAct(speaker, rng.choice(schema.intents), informs, requests, turn)


def test_act_serialization_round_trip(schema):
    rng = random.Random(13)
    for _ in range(300):
        act = _random_act(schema, rng)
        back = DialogAct.from_dict(act.to_dict())
        assert back.to_dict() == act.to_dict()


def test_act_string_round_trip(schema):
    rng = random.Random(5)
    for _ in range(200):
        act = _random_act(schema, rng)
        if not validate_act(schema, act):
            text = format_act_string(act)
            back = parse_act_string(text, schema, act.speaker, act.turn)
            assert back.intent == act.intent
            assert back.inform_slots == act.inform_slots
            assert set(back.request_slots) == set(act.request_slots)


def test_act_string_taskcomplete_placeholder(schema):
    act = parse_act_string("inform(taskcomplete)", schema, "agent", 1)
    assert act.inform_slots == {"taskcomplete": "taskcomplete"}
    assert act.request_slots == {}


def test_goal_validation(schema):
    good = UserGoal(
        {"moviename": "deadpool", "theater": "x", "starttime": "4 pm",
         "date": "today", "numberofpeople": "2"},
        {"ticket": "UNK"},
    )
    assert validate_goal(schema, good) == []

    no_ticket = UserGoal(dict(good.inform_slots), {})
    assert any("ticket" in v for v in validate_goal(schema, no_ticket))

    missing_required = UserGoal({"moviename": "deadpool"}, {"ticket": "UNK"})
    assert any("required" in v for v in validate_goal(schema, missing_required))

    requests_unrequestable = UserGoal(
        dict(good.inform_slots), {"ticket": "UNK", "numberofpeople": "UNK"}
    )
    assert validate_goal(schema, requests_unrequestable)


def test_derive_rng_reproducible_and_independent():
    a1 = [derive_rng(3, 1).random() for _ in range(5)]
    a2 = [derive_rng(3, 1).random() for _ in range(5)]
    b = [derive_rng(3, 2).random() for _ in range(5)]
    assert a1 == a2
    assert a1 != b
