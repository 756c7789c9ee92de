import random

import pytest

from dialogsim.core import DialogAct, validate_act
from dialogsim.noise import (
    MODE_DELETE,
    MODE_SLOT,
    MODE_VALUE,
    ErrorModelConfig,
    NoiseError,
    corrupt,
)


def make_act(informs=None, requests=None):
    return DialogAct("user", "inform", informs or {"city": "seattle"},
                     requests or {}, turn=2)


def test_zero_probs_identity(schema, kb):
    cfg = ErrorModelConfig(intent_err_prob=0.0, slot_err_prob=0.0)
    rng = random.Random(1)
    act = make_act({"city": "seattle", "starttime": "9:00 pm"}, {"ticket": "UNK"})
    out = corrupt(act, cfg, schema, kb, rng)
    assert out is act  # bit-identical passthrough


def test_disabled_config_identity(schema, kb):
    cfg = ErrorModelConfig(intent_err_prob=1.0, slot_err_prob=1.0, enabled=False)
    act = make_act()
    assert corrupt(act, cfg, schema, kb, random.Random(0)) is act


def test_forced_delete_empties_informs(schema, kb):
    cfg = ErrorModelConfig(slot_err_prob=1.0, slot_err_mode=MODE_DELETE)
    act = make_act({"city": "seattle", "date": "today"})
    out = corrupt(act, cfg, schema, kb, random.Random(3))
    assert out.inform_slots == {}
    assert act.inform_slots == {"city": "seattle", "date": "today"}  # untouched


def test_forced_intent_substitution(schema, kb):
    cfg = ErrorModelConfig(intent_err_prob=1.0)
    act = make_act()
    out = corrupt(act, cfg, schema, kb, random.Random(4))
    assert out.intent != act.intent
    assert out.intent in schema.intents


def test_value_mode_keeps_key_set(schema, kb):
    cfg = ErrorModelConfig(slot_err_prob=1.0, slot_err_mode=MODE_VALUE)
    rng = random.Random(5)
    for _ in range(50):
        act = make_act({"city": "seattle", "moviename": "deadpool"})
        out = corrupt(act, cfg, schema, kb, rng)
        assert set(out.inform_slots) == {"city", "moviename"}
        assert out.inform_slots["city"] != "seattle"


def test_slot_mode_moves_to_informable_slot(schema, kb):
    cfg = ErrorModelConfig(slot_err_prob=1.0, slot_err_mode=MODE_SLOT)
    rng = random.Random(6)
    for _ in range(50):
        act = make_act({"city": "seattle"}, {"ticket": "UNK"})
        out = corrupt(act, cfg, schema, kb, rng)
        assert len(out.inform_slots) == 1
        slot = next(iter(out.inform_slots))
        assert slot != "city"
        assert schema.is_informable(slot) and slot != "taskcomplete"
        assert slot not in out.request_slots


def test_outputs_validate(schema, kb):
    rng = random.Random(8)
    cfg = ErrorModelConfig(intent_err_prob=0.3, slot_err_prob=0.5)
    for _ in range(300):
        act = make_act({"city": "seattle", "starttime": "9:00 pm"}, {"ticket": "UNK"})
        out = corrupt(act, cfg, schema, kb, rng)
        assert validate_act(schema, out) == []
        assert out.request_slots == act.request_slots


def test_replaying_rng_reproduces_output(schema, kb):
    cfg = ErrorModelConfig(intent_err_prob=0.4, slot_err_prob=0.6)
    act = make_act({"city": "seattle", "date": "today", "moviename": "deadpool"})
    outs = [
        corrupt(act, cfg, schema, kb, random.Random(99)).to_dict() for _ in range(5)
    ]
    assert all(o == outs[0] for o in outs)


def test_value_mode_with_empty_kb_errors(schema):
    from dialogsim.kb import MovieKB

    empty = MovieKB([], schema)
    cfg = ErrorModelConfig(slot_err_prob=1.0, slot_err_mode=MODE_VALUE)
    with pytest.raises(NoiseError):
        corrupt(make_act(), cfg, schema, empty, random.Random(0))


def test_rejects_agent_acts(schema, kb):
    cfg = ErrorModelConfig()
    agent_act = DialogAct("agent", "request", {}, {"city": "UNK"}, turn=1)
    with pytest.raises(NoiseError):
        corrupt(agent_act, cfg, schema, kb, random.Random(0))


def test_bad_probabilities_rejected():
    with pytest.raises(NoiseError):
        ErrorModelConfig(intent_err_prob=1.5)
    with pytest.raises(NoiseError):
        ErrorModelConfig(slot_err_mode="nope")
