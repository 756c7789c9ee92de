import random

import pytest

from dialogsim.core import DialogAct, validate_act
from dialogsim.nlg import NLGError, TemplateEntry, TemplateSet, parse_nl, render


def test_render_paper_lines(templates):
    act = DialogAct("user", "inform", {"starttime": "9:00 pm"}, {}, 2)
    assert render(act, templates) == "I want to watch at 9:00 pm."

    thanks = DialogAct("agent", "thanks", {}, {}, 13)
    assert render(thanks, templates) == "thanks"

    user_thanks = DialogAct("user", "thanks", {}, {}, 12)
    assert render(user_thanks, templates) == "Thank you."

    booked = DialogAct("agent", "inform", {"taskcomplete": "taskcomplete"}, {}, 11)
    assert render(booked, templates) == "Okay, your tickets were booked."

    no_ticket = DialogAct("agent", "inform", {"taskcomplete": "no ticket available"}, {}, 11)
    assert render(no_ticket, templates) == "Sorry, no tickets are available for that showing."


def test_render_wildcard_value(templates):
    act = DialogAct("user", "inform", {"city": "anything"}, {}, 2)
    assert render(act, templates) == "I do not care about the city."


def test_fallback_contains_every_slot_and_value(schema, templates):
    rng = random.Random(3)
    for _ in range(100):
        informs = {
            s: rng.choice(["deadpool", "seattle", "today"])
            for s in rng.sample(schema.informable_regular_slots, 3)
        }
        requests = {
            s: "UNK" for s in rng.sample(schema.requestable_slots, 2)
            if s not in informs
        }
        act = DialogAct("user", "request", informs, requests, 0)
        text = render(act, templates)
        clauses = text.split(": ", 1)[1].rstrip(".").split("; ")
        for slot, value in informs.items():
            assert clauses.count(f"{slot} is {value}") == 1
        for slot in requests:
            assert clauses.count(f"requesting {slot}") == 1


def test_render_never_leaks_placeholders(schema, templates, goal_db):
    rng = random.Random(4)
    for goal in goal_db.goals:
        for slot, value in goal.inform_slots.items():
            act = DialogAct("user", "inform", {slot: value}, {}, 2)
            assert "$" not in render(act, templates)


def test_parse_paper_line(schema, templates):
    act = parse_nl("Which city do you want to buy the ticket?", templates, schema)
    assert act is not None
    assert act.speaker == "agent"
    assert act.intent == "request"
    assert act.request_slots == {"city": "UNK"}


def test_parse_empty_is_no_parse(schema, templates):
    assert parse_nl("", templates, schema) is None
    assert parse_nl("   ", templates, schema) is None
    assert parse_nl("zzz unintelligible zzz", templates, schema) is None


def test_parse_disambiguates_by_lexicon(schema, templates):
    # city, theater and starttime share the same surface pattern; the KB
    # vocabulary decides which slot the captured value belongs to.
    act = parse_nl("I want to watch at seattle.", templates, schema, speaker="user")
    assert act.inform_slots == {"city": "seattle"}
    act = parse_nl("I want to watch at 9:00 pm.", templates, schema, speaker="user")
    assert act.inform_slots == {"starttime": "9:00 pm"}
    act = parse_nl("I want to watch at carmike summit 16.", templates, schema,
                   speaker="user")
    assert act.inform_slots == {"theater": "carmike summit 16"}


def test_round_trip_identity_over_all_templated_keys(schema, kb, templates):
    """Every templated key survives render -> parse with vocabulary values."""
    fallback_values = {
        "numberofpeople": "2", "numberofkids": "1", "zip": "98101",
        "distanceconstraints": "downtown", "description": "new release",
        "other": "imax seats", "price": "$10.50", "seating": "recliner",
        "language": "english", "subtitles": "english", "duration": "95 minutes",
        "movie_series": "marvel", "audience_rating": "4.5", "video_format": "imax",
        "critic_rating": "8.1", "actor": "ryan reynolds", "director": "tim miller",
        "genre": "comedy", "release_year": "2016", "mpaa_rating": "r",
        "theater_chain": "amc", "state": "wa",
    }

    def value_for(slot):
        vocab = kb.vocabulary(slot)
        return vocab[0] if vocab else fallback_values[slot]

    checked = 0
    for entry in templates.entries:
        informs = {}
        for slot in entry.inform_slots:
            if slot in entry.values:
                informs[slot] = entry.values[slot]
            else:
                informs[slot] = value_for(slot)
        act = DialogAct(
            entry.speaker, entry.intent, informs,
            {s: "UNK" for s in entry.request_slots},
            0 if entry.speaker == "user" else 1,
        )
        text = render(act, templates)
        back = parse_nl(text, templates, schema, speaker=entry.speaker)
        assert back is not None, (entry.template, text)
        assert back.intent == act.intent, (entry.template, text)
        assert back.inform_slots == act.inform_slots, (entry.template, text)
        assert set(back.request_slots) == set(act.request_slots), entry.template
        checked += 1
    assert checked == len(templates.entries)


def test_fallback_round_trip_small_acts(schema, templates):
    rng = random.Random(9)
    for _ in range(100):
        informs = {
            s: rng.choice(["deadpool", "imax", "98101"])
            for s in rng.sample(["zip", "video_format", "description"], rng.randint(0, 2))
        }
        requests = {} if informs and rng.random() < 0.5 else {"price": "UNK"}
        act = DialogAct("user", "confirm_question", informs, requests, 0)
        text = render(act, templates)
        back = parse_nl(text, templates, schema, speaker="user")
        assert back is not None
        assert back.intent == act.intent
        assert back.inform_slots == act.inform_slots


def test_fallback_parse_caps_informs_at_two():
    # The clause parser deliberately extracts at most two inform clauses; a
    # crowded composite utterance loses the rest, which is the utterance
    # channel's main source of noise.
    from dialogsim.core import DomainSchema

    schema = DomainSchema.from_dict({
        "intents": ["request", "inform"],
        "slots": [
            {"name": "moviename"}, {"name": "city"}, {"name": "date"},
            {"name": "starttime"},
            {"name": "ticket", "informable": False, "requestable": True},
        ],
        "required_slots": ["moviename"],
        "default_request_slot": "ticket",
        "max_turn": 10,
    })
    templates = TemplateSet([])
    act = DialogAct(
        "user", "request",
        {"moviename": "deadpool", "city": "seattle", "date": "today",
         "starttime": "4 pm"},
        {"ticket": "UNK"}, 0,
    )
    text = render(act, templates)
    back = parse_nl(text, templates, schema, speaker="user")
    assert back is not None
    assert len(back.inform_slots) == 2
    assert back.inform_slots == {"moviename": "deadpool", "city": "seattle"}
    assert set(back.request_slots) == {"ticket"}


def test_template_placeholder_validation():
    with pytest.raises(NLGError):
        TemplateEntry("user", "inform", ("city",), (), "no placeholder here")
    with pytest.raises(NLGError):
        TemplateEntry("user", "inform", (), (), "stray $city$ placeholder")


def test_render_unkeyed_combo_uses_fallback(schema, templates):
    act = DialogAct(
        "user", "inform",
        {"genre": "comedy", "mpaa_rating": "r", "release_year": "2016"}, {}, 2,
    )
    text = render(act, templates)
    assert text.startswith("Let me tell you: ")
    assert "genre is comedy" in text
