#!/usr/bin/env python3
"""Regenerates the packaged data files and the test fixtures.

Everything is seeded; committed outputs are stable across runs. Run from the
repository root:

    python scripts/gen_data.py
"""

import json
import random
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from dialogsim.core import (  # noqa: E402
    SPEAKER_AGENT,
    SPEAKER_USER,
    TASKCOMPLETE,
    UNK,
    VALUE_BOOKED,
    DialogAct,
    DomainSchema,
)
from dialogsim.corpus import (  # noqa: E402
    extract_goals_aggregate,
    extract_goals_first_turn,
    finalize_goal_db,
    load_corpus,
    save_goal_db,
    GoalDatabase,
)
from dialogsim.kb import MovieKB  # noqa: E402
from dialogsim.nlg import TemplateSet, load_templates, render  # noqa: E402
from dialogsim.core import UserGoal  # noqa: E402

DATA = ROOT / "src" / "dialogsim" / "data"
TEST_DATA = ROOT / "tests" / "data"

# ---------------------------------------------------------------------------
# schema
# ---------------------------------------------------------------------------

INTENTS = [
    "request", "inform", "confirm_question", "confirm_answer", "deny",
    "thanks", "closing", "multiple_choice", "greeting", "not_sure", "welcome",
]

SLOTS = [
    # (name, informable, requestable)
    ("moviename", True, True),
    ("starttime", True, True),
    ("date", True, True),
    ("city", True, True),
    ("state", True, True),
    ("zip", True, True),
    ("theater", True, True),
    ("theater_chain", True, True),
    ("genre", True, True),
    ("actor", True, True),
    ("director", True, True),
    ("mpaa_rating", True, True),
    ("critic_rating", True, True),
    ("release_year", True, True),
    ("video_format", True, True),
    ("language", True, True),
    ("seating", True, True),
    ("price", True, True),
    ("duration", True, True),
    ("description", True, True),
    ("distanceconstraints", True, True),
    ("movie_series", True, True),
    ("subtitles", True, True),
    ("audience_rating", True, True),
    ("other", True, True),
    ("numberofpeople", True, False),
    ("numberofkids", True, False),
    ("ticket", False, True),
    ("taskcomplete", True, False),
]

REQUIRED = ["moviename", "theater", "starttime", "date", "numberofpeople"]


def schema_dict() -> dict:
    return {
        "intents": INTENTS,
        "slots": [
            {"name": n, "informable": i, "requestable": r} for n, i, r in SLOTS
        ],
        "required_slots": REQUIRED,
        "default_request_slot": "ticket",
        "max_turn": 40,
    }


# ---------------------------------------------------------------------------
# knowledge base
# ---------------------------------------------------------------------------

MOVIES = {
    "deadpool": {"genre": "action comedy", "mpaa_rating": "r", "release_year": "2016",
                 "actor": "ryan reynolds", "director": "tim miller"},
    "zoolander 2": {"genre": "comedy", "mpaa_rating": "pg-13", "release_year": "2016",
                    "actor": "ben stiller", "director": "ben stiller"},
    "10 cloverfield lane": {"genre": "thriller", "mpaa_rating": "pg-13",
                            "release_year": "2016", "actor": "mary elizabeth winstead",
                            "director": "dan trachtenberg"},
    "race": {"genre": "biography", "mpaa_rating": "pg-13", "release_year": "2016",
             "actor": "stephan james", "director": "stephen hopkins"},
    "the witch": {"genre": "horror", "mpaa_rating": "r", "release_year": "2016",
                  "actor": "anya taylor-joy", "director": "robert eggers"},
    "eddie the eagle": {"genre": "biography", "mpaa_rating": "pg-13",
                        "release_year": "2016", "actor": "taron egerton",
                        "director": "dexter fletcher"},
    "london has fallen": {"genre": "action", "mpaa_rating": "r", "release_year": "2016",
                          "actor": "gerard butler", "director": "babak najafi"},
    "gods of egypt": {"genre": "fantasy", "mpaa_rating": "pg-13", "release_year": "2016",
                      "actor": "brenton thwaites", "director": "alex proyas"},
    "triple 9": {"genre": "crime", "mpaa_rating": "r", "release_year": "2016",
                 "actor": "casey affleck", "director": "john hillcoat"},
    "spotlight": {"genre": "drama", "mpaa_rating": "r", "release_year": "2015",
                  "actor": "mark ruffalo", "director": "tom mccarthy"},
    "the big short": {"genre": "drama", "mpaa_rating": "r", "release_year": "2015",
                      "actor": "christian bale", "director": "adam mckay"},
    "whiskey tango foxtrot": {"genre": "comedy", "mpaa_rating": "r",
                              "release_year": "2016", "actor": "tina fey",
                              "director": "glenn ficarra"},
}

THEATERS = [
    ("regal meridian 16", "seattle", "wa", "98101", "regal"),
    ("amc pacific place 11 theater", "seattle", "wa", "98101", "amc"),
    ("carmike summit 16", "birmingham", "al", "35243", "carmike"),
    ("regal la live stadium 14", "los angeles", "ca", "90015", "regal"),
    ("amc river east 21", "chicago", "il", "60611", "amc"),
    ("century eastport 16", "portland", "or", "97266", "century"),
    ("cinemark lincoln square cinemas", "bellevue", "wa", "98004", "cinemark"),
    ("amc southcenter 16", "tukwila", "wa", "98188", "amc"),
]

STARTTIMES = ["9:00 am", "11:45am", "1:30 pm", "4 pm", "5:10 pm", "6:30 pm",
              "7:15 pm", "8:45 pm", "9:00 pm", "9:25 pm", "10:30 pm"]
DATES = ["today", "tomorrow", "friday", "saturday", "sunday", "march 12th"]

ANCHORED_RECORDS = [
    {"moviename": "deadpool", "theater": "carmike summit 16", "city": "birmingham",
     "state": "al", "zip": "35243", "theater_chain": "carmike", "starttime": "4 pm",
     "date": "today", "genre": "action comedy", "mpaa_rating": "r",
     "release_year": "2016"},
    {"moviename": "deadpool", "theater": "amc pacific place 11 theater",
     "city": "seattle", "state": "wa", "zip": "98101", "theater_chain": "amc",
     "starttime": "9:00 pm", "date": "tomorrow", "genre": "action comedy",
     "mpaa_rating": "r", "release_year": "2016"},
    {"moviename": "zoolander 2", "theater": "regal meridian 16", "city": "seattle",
     "state": "wa", "zip": "98101", "theater_chain": "regal", "starttime": "9:25 pm",
     "date": "tomorrow", "genre": "comedy", "mpaa_rating": "pg-13",
     "release_year": "2016"},
    {"moviename": "10 cloverfield lane", "theater": "regal la live stadium 14",
     "city": "los angeles", "state": "ca", "zip": "90015", "theater_chain": "regal",
     "starttime": "11:45am", "date": "tomorrow", "genre": "thriller",
     "mpaa_rating": "pg-13", "release_year": "2016"},
]


def gen_kb(rng: random.Random) -> list[dict]:
    records = list(ANCHORED_RECORDS)
    seen = {
        (r["moviename"], r["theater"], r["date"], r["starttime"]) for r in records
    }
    movie_names = list(MOVIES)
    while len(records) < 120:
        name = rng.choice(movie_names)
        theater, city, state, zip_code, chain = rng.choice(THEATERS)
        date = rng.choice(DATES)
        starttime = rng.choice(STARTTIMES)
        key = (name, theater, date, starttime)
        if key in seen:
            continue
        # Keep the birmingham/deadpool/today/4 pm suggestion unambiguous.
        if (name, city, date, starttime) == ("deadpool", "birmingham", "today", "4 pm"):
            continue
        seen.add(key)
        record = {
            "moviename": name, "theater": theater, "city": city, "state": state,
            "starttime": starttime, "date": date,
        }
        meta = MOVIES[name]
        if rng.random() < 0.8:
            record["genre"] = meta["genre"]
        if rng.random() < 0.7:
            record["mpaa_rating"] = meta["mpaa_rating"]
        if rng.random() < 0.7:
            record["release_year"] = meta["release_year"]
        if rng.random() < 0.4:
            record["actor"] = meta["actor"]
        if rng.random() < 0.35:
            record["director"] = meta["director"]
        if rng.random() < 0.6:
            record["zip"] = zip_code
        if rng.random() < 0.6:
            record["theater_chain"] = chain
        if rng.random() < 0.4:
            record["critic_rating"] = rng.choice(["6.5", "7.2", "7.8", "8.1", "8.4", "9.0"])
        if rng.random() < 0.3:
            record["audience_rating"] = rng.choice(["3.5", "4.0", "4.5"])
        if rng.random() < 0.35:
            record["price"] = rng.choice(["$8", "$9", "$10.50", "$12", "$14"])
        if rng.random() < 0.3:
            record["video_format"] = rng.choice(["standard", "3d", "imax"])
        if rng.random() < 0.25:
            record["language"] = "english"
        if rng.random() < 0.2:
            record["seating"] = rng.choice(["standard", "recliner"])
        if rng.random() < 0.25:
            record["duration"] = rng.choice(["95 minutes", "108 minutes", "120 minutes"])
        if rng.random() < 0.15:
            record["subtitles"] = rng.choice(["none", "english"])
        records.append(record)
    return records


# ---------------------------------------------------------------------------
# templates
# ---------------------------------------------------------------------------


def gen_templates(schema: DomainSchema) -> list[dict]:
    entries: list[dict] = []

    def add(speaker, intent, informs=(), requests=(), template="", values=None):
        entry = {
            "speaker": speaker,
            "intent": intent,
            "inform_slots": sorted(informs),
            "request_slots": sorted(requests),
            "template": template,
        }
        if values:
            entry["values"] = values
        entries.append(entry)

    informable = list(schema.informable_regular_slots)
    requestable = list(schema.requestable_slots)

    # User side, seeded from the sample transcripts.
    add("user", "request", ["moviename", "city"], ["ticket"],
        "Can I buy tickets for $moviename$ at $city$?")
    add("user", "request", ["moviename"], ["ticket"],
        "Can I get some tickets for $moviename$?")
    add("user", "request", ["moviename", "starttime"], ["theater"],
        "Which theater will play the $moviename$ at $starttime$?")
    add("user", "request", ["moviename"], ["starttime"],
        "What is the start time for $moviename$?")
    add("user", "request", [], ["theater"], "Which theater is available?")
    add("user", "request", [], ["starttime"], "What start time is available?")
    add("user", "request", [], ["ticket"], "Could you help me to book the tickets?")
    for slot in requestable:
        if slot in ("theater", "starttime", "ticket"):
            continue
        add("user", "request", [], [slot], f"Can you tell me the {slot}?")
    add("user", "inform", ["city"], [], "I want to watch at $city$.")
    add("user", "inform", ["theater"], [], "I want to watch at $theater$.")
    add("user", "inform", ["starttime"], [], "I want to watch at $starttime$.")
    add("user", "inform", ["date"], [], "I want to set it up $date$.")
    add("user", "inform", ["moviename"], [], "I want to watch $moviename$.")
    if schema.has_slot("numberofpeople"):
        add("user", "inform", ["numberofpeople"], [], "I want $numberofpeople$ tickets please!")
    if schema.has_slot("state"):
        add("user", "inform", ["state"], [], "I need tickets at $state$.")
    covered = {"city", "theater", "starttime", "date", "moviename", "numberofpeople", "state"}
    for slot in informable:
        if slot not in covered:
            add("user", "inform", [slot], [], f"The {slot} should be ${slot}$.")
    for slot in informable:
        add("user", "inform", [slot], [], f"I do not care about the {slot}.",
            values={slot: "anything"})
    add("user", "thanks", template="Thank you.")
    add("user", "closing", template="Bye.")
    add("user", "greeting", template="Hello.")
    add("user", "deny", [], ["ticket"], "That is wrong, please do not book those tickets.")

    # Agent side.
    add("agent", "request", [], ["city"], "Which city do you want to buy the ticket?")
    add("agent", "request", [], ["theater"], "Which theater do you want?")
    add("agent", "request", [], ["date"], "What date would you like?")
    add("agent", "request", [], ["starttime"], "And what start time do you like?")
    if schema.has_slot("numberofpeople"):
        add("agent", "request", [], ["numberofpeople"], "How many tickets do you need?")
    add("agent", "request", [], ["moviename"], "What movie are you interested in?")
    agent_covered = {"city", "theater", "date", "starttime", "numberofpeople", "moviename"}
    for slot in requestable:
        if slot not in agent_covered:
            add("agent", "request", [], [slot], f"Which {slot} do you prefer?")
    for slot in informable:
        add("agent", "inform", [slot], [], f"The {slot} is ${slot}$.")
    add("agent", "inform", [TASKCOMPLETE], [], "Okay, your tickets were booked.",
        values={TASKCOMPLETE: VALUE_BOOKED})
    add("agent", "inform", [TASKCOMPLETE], [],
        "Sorry, no tickets are available for that showing.",
        values={TASKCOMPLETE: "no ticket available"})
    add("agent", "thanks", template="thanks")
    add("agent", "closing", template="Goodbye.")
    add("agent", "welcome", template="Welcome! What can I do for you?")
    add("agent", "greeting", template="Hello! How can I help?")
    add("agent", "confirm_answer", template="Got it.")
    return entries


# ---------------------------------------------------------------------------
# synthetic corpus
# ---------------------------------------------------------------------------

FAKE_MOVIES = ["the phantom reel", "midnight carousel", "paper lanterns"]


def _turn(templates, schema, speaker, intent, informs=None, requests=None):
    act = DialogAct(speaker, intent, informs or {}, requests or {}, turn=0)
    return {
        "speaker": speaker,
        "intent": intent,
        "inform_slots": dict(informs or {}),
        "request_slots": {k: UNK for k in (requests or {})},
        "utterance": render(act, templates),
    }


def gen_corpus(kb: MovieKB, templates: TemplateSet, schema, rng: random.Random):
    showable = [r for r in kb.records]
    dialogues = []

    def base_constraints(rec, people):
        return {
            "moviename": rec["moviename"], "city": rec["city"],
            "theater": rec["theater"], "starttime": rec["starttime"],
            "date": rec["date"], "numberofpeople": people,
        }

    def plain(rec, people, moviename=None):
        constraints = base_constraints(rec, people)
        if moviename:
            constraints["moviename"] = moviename
        t = _turn
        return [
            t(templates, schema, "user", "request", constraints, {"ticket": UNK}),
            t(templates, schema, "agent", "inform", {TASKCOMPLETE: VALUE_BOOKED}),
            t(templates, schema, "user", "thanks"),
            t(templates, schema, "agent", "thanks"),
        ]

    def with_greeting(rec, people):
        t = _turn
        return [
            t(templates, schema, "user", "greeting"),
            t(templates, schema, "agent", "welcome"),
        ] + plain(rec, people)

    def late_informs(rec, people):
        t = _turn
        first = {"moviename": rec["moviename"], "numberofpeople": people}
        if rng.random() < 0.5:
            first["city"] = rec["city"]
        return [
            t(templates, schema, "user", "request", first, {"ticket": UNK}),
            t(templates, schema, "agent", "request", requests={"theater": UNK}),
            t(templates, schema, "user", "inform", {"theater": rec["theater"]}),
            t(templates, schema, "agent", "request", requests={"starttime": UNK}),
            t(templates, schema, "user", "inform", {"starttime": rec["starttime"]}),
            t(templates, schema, "agent", "request", requests={"date": UNK}),
            t(templates, schema, "user", "inform", {"date": rec["date"]}),
            t(templates, schema, "agent", "inform", {TASKCOMPLETE: VALUE_BOOKED}),
            t(templates, schema, "user", "thanks"),
            t(templates, schema, "agent", "thanks"),
        ]

    def needs_repair(rec, people):
        # Requests theater without the default ticket slot.
        t = _turn
        first = {
            "moviename": rec["moviename"], "city": rec["city"],
            "starttime": rec["starttime"], "date": rec["date"],
            "numberofpeople": people,
        }
        return [
            t(templates, schema, "user", "request", first, {"theater": UNK}),
            t(templates, schema, "agent", "inform", {"theater": rec["theater"]}),
            t(templates, schema, "user", "thanks"),
            t(templates, schema, "agent", "thanks"),
        ]

    picks = rng.sample(range(len(showable)), 48)
    cursor = 0

    for _ in range(22):
        rec = showable[picks[cursor]]; cursor += 1
        dialogues.append(plain(rec, str(rng.randint(1, 6))))
    for _ in range(8):
        rec = showable[picks[cursor]]; cursor += 1
        dialogues.append(with_greeting(rec, str(rng.randint(1, 6))))
    for _ in range(12):
        rec = showable[picks[cursor]]; cursor += 1
        dialogues.append(late_informs(rec, str(rng.randint(1, 6))))
    for _ in range(6):
        rec = showable[picks[cursor]]; cursor += 1
        dialogues.append(needs_repair(rec, str(rng.randint(1, 6))))
    for fake in FAKE_MOVIES * 2:
        rec = showable[rng.randrange(len(showable))]
        dialogues.append(plain(rec, str(rng.randint(1, 6)), moviename=fake))
    rng.shuffle(dialogues)
    return dialogues


# ---------------------------------------------------------------------------
# hand-traced corpus fixture (counts asserted in tests/test_corpus.py)
# ---------------------------------------------------------------------------


def gen_fixture(kb: MovieKB, templates: TemplateSet, schema) -> list:
    recs = kb.records
    t = _turn

    def full_first(rec, people):
        return {
            "moviename": rec["moviename"], "city": rec["city"],
            "theater": rec["theater"], "starttime": rec["starttime"],
            "date": rec["date"], "numberofpeople": people,
        }

    dialogues = []
    # Type 1: six clean dialogues; d0 and d1 share one goal (dedup case).
    type1_recs = [recs[0], recs[0], recs[1], recs[2], recs[3], recs[4]]
    type1_people = ["2", "2", "3", "4", "2", "5"]
    for rec, people in zip(type1_recs, type1_people):
        dialogues.append([
            t(templates, schema, "user", "request", full_first(rec, people), {"ticket": UNK}),
            t(templates, schema, "agent", "inform", {TASKCOMPLETE: VALUE_BOOKED}),
            t(templates, schema, "user", "thanks"),
            t(templates, schema, "agent", "thanks"),
        ])
    # Type 2: four greeting-first dialogues.
    for rec, people in zip(recs[5:9], ["2", "3", "4", "2"]):
        dialogues.append([
            t(templates, schema, "user", "greeting"),
            t(templates, schema, "agent", "welcome"),
            t(templates, schema, "user", "request", full_first(rec, people), {"ticket": UNK}),
            t(templates, schema, "agent", "inform", {TASKCOMPLETE: VALUE_BOOKED}),
            t(templates, schema, "user", "thanks"),
            t(templates, schema, "agent", "thanks"),
        ])
    # Type 3: four dialogues whose first turn misses required slots (first-turn
    # extraction discards them; aggregation keeps the full goal).
    for rec, people in zip(recs[9:13], ["2", "3", "2", "4"]):
        dialogues.append([
            t(templates, schema, "user", "request",
              {"moviename": rec["moviename"], "numberofpeople": people}, {"ticket": UNK}),
            t(templates, schema, "agent", "request", requests={"theater": UNK}),
            t(templates, schema, "user", "inform", {"theater": rec["theater"]}),
            t(templates, schema, "agent", "request", requests={"starttime": UNK}),
            t(templates, schema, "user", "inform", {"starttime": rec["starttime"]}),
            t(templates, schema, "agent", "request", requests={"date": UNK}),
            t(templates, schema, "user", "inform", {"date": rec["date"]}),
            t(templates, schema, "agent", "inform", {TASKCOMPLETE: VALUE_BOOKED}),
            t(templates, schema, "user", "thanks"),
            t(templates, schema, "agent", "thanks"),
        ])
    # Type 4: three dialogues requesting starttime without the ticket slot
    # (repaired by adding ticket).
    for rec, people in zip(recs[13:16], ["2", "3", "5"]):
        first = {
            "moviename": rec["moviename"], "theater": rec["theater"],
            "date": rec["date"], "numberofpeople": people,
        }
        dialogues.append([
            t(templates, schema, "user", "request", first, {"starttime": UNK}),
            t(templates, schema, "agent", "inform", {"starttime": rec["starttime"]}),
            t(templates, schema, "user", "thanks"),
            t(templates, schema, "agent", "thanks"),
        ])
    # Type 5: three dialogues about movies absent from the KB (extracted but
    # dropped by the satisfiability filter).
    for fake, rec, people in zip(FAKE_MOVIES, recs[16:19], ["2", "2", "3"]):
        first = full_first(rec, people)
        first["moviename"] = fake
        dialogues.append([
            t(templates, schema, "user", "request", first, {"ticket": UNK}),
            t(templates, schema, "agent", "inform", {TASKCOMPLETE: VALUE_BOOKED}),
            t(templates, schema, "user", "thanks"),
            t(templates, schema, "agent", "thanks"),
        ])
    return dialogues


# ---------------------------------------------------------------------------
# curated goal sets (rule-agent oracle and failure oracle)
# ---------------------------------------------------------------------------


def gen_curated_goals(kb: MovieKB, rng: random.Random):
    basics, extra = [], []
    picks = rng.sample(range(len(kb.records)), 60)
    for idx in picks[:30]:
        rec = kb.records[idx]
        constraints = {
            "moviename": rec["moviename"], "starttime": rec["starttime"],
            "date": rec["date"], "theater": rec["theater"],
            "numberofpeople": str(rng.randint(1, 6)),
        }
        if rng.random() < 0.5:
            constraints["city"] = rec["city"]
        basics.append({"inform_slots": constraints, "request_slots": {"ticket": UNK}})
    for i, idx in enumerate(picks[30:]):
        rec = kb.records[idx]
        people = str(rng.randint(1, 6))
        if i % 2 == 0:
            goal = {
                "inform_slots": {
                    "moviename": rec["moviename"], "starttime": rec["starttime"],
                    "date": rec["date"], "numberofpeople": people, "city": rec["city"],
                },
                "request_slots": {"ticket": UNK, "theater": UNK},
            }
        else:
            goal = {
                "inform_slots": {
                    "moviename": rec["moviename"], "theater": rec["theater"],
                    "date": rec["date"], "numberofpeople": people,
                },
                "request_slots": {"ticket": UNK, "starttime": UNK},
            }
        extra.append(goal)
    return basics, extra


# ---------------------------------------------------------------------------
# tiny training domain (end-to-end learning checks)
# ---------------------------------------------------------------------------

TINY_INTENTS = ["request", "inform", "deny", "thanks", "closing"]
TINY_SLOTS = [
    ("moviename", True, True),
    ("starttime", True, True),
    ("date", True, True),
    ("city", True, True),
    ("theater", True, True),
    ("numberofpeople", True, False),
    ("ticket", False, True),
    ("taskcomplete", True, False),
]
TINY_MOVIES = ["deadpool", "zoolander 2", "chicago", "race", "the witch",
               "eddie the eagle", "london has fallen", "gods of egypt",
               "triple 9", "spotlight"]
# Two theaters literally named after cities elsewhere: "la mirada" and
# "whittier" show up in both the theater and city vocabularies, which the
# utterance channel can and does confuse.
TINY_THEATERS = [
    ("regal meridian 16", "seattle"),
    ("carmike summit 16", "birmingham"),
    ("amc river east 21", "chicago"),
    ("century eastport 16", "portland"),
    ("whittier village cinemas", "la mirada"),
    ("la mirada", "whittier"),
    ("whittier", "portland"),
]
TINY_TIMES = ["9:00 am", "11:45am", "1:30 pm", "4 pm", "6:15 pm", "7:50 pm",
              "9:25 pm", "10:30 pm"]
TINY_DATES = ["today", "tomorrow", "friday", "saturday", "sunday"]


def tiny_schema_dict() -> dict:
    return {
        "intents": TINY_INTENTS,
        "slots": [
            {"name": n, "informable": i, "requestable": r} for n, i, r in TINY_SLOTS
        ],
        "required_slots": REQUIRED,
        "default_request_slot": "ticket",
        "max_turn": 24,
    }


def gen_tiny_kb(rng: random.Random) -> list[dict]:
    records, seen = [], set()
    while len(records) < 100:
        name = rng.choice(TINY_MOVIES)
        theater, city = rng.choice(TINY_THEATERS)
        date = rng.choice(TINY_DATES)
        starttime = rng.choice(TINY_TIMES)
        key = (name, theater, date, starttime)
        if key in seen:
            continue
        seen.add(key)
        records.append({
            "moviename": name, "theater": theater, "city": city,
            "starttime": starttime, "date": date,
        })
    return records


def gen_tiny_goals(records: list[dict], rng: random.Random) -> list[dict]:
    goals = []
    ambiguous_theaters = ("la mirada", "whittier")
    collision = [r for r in records if r["theater"] in ambiguous_theaters]
    regular = [r for r in records if r["theater"] not in ambiguous_theaters]
    ticket_only_recs = rng.sample(regular, 32) + collision[:4]
    for rec in ticket_only_recs:
        constraints = {
            "moviename": rec["moviename"], "starttime": rec["starttime"],
            "date": rec["date"], "theater": rec["theater"],
            "numberofpeople": str(rng.randint(1, 6)),
        }
        if rng.random() < 0.5 or rec["theater"] in ambiguous_theaters:
            constraints["city"] = rec["city"]
        goals.append({"inform_slots": constraints, "request_slots": {"ticket": UNK}})
    extra_recs = rng.sample(regular, 28)
    for i, rec in enumerate(extra_recs):
        people = str(rng.randint(1, 6))
        if i % 2 == 0:
            goals.append({
                "inform_slots": {
                    "moviename": rec["moviename"], "starttime": rec["starttime"],
                    "date": rec["date"], "numberofpeople": people, "city": rec["city"],
                },
                "request_slots": {"ticket": UNK, "theater": UNK},
            })
        else:
            goals.append({
                "inform_slots": {
                    "moviename": rec["moviename"], "theater": rec["theater"],
                    "date": rec["date"], "numberofpeople": people,
                },
                "request_slots": {"ticket": UNK, "starttime": UNK},
            })
    rng.shuffle(goals)
    return goals


# ---------------------------------------------------------------------------


def dump(path: Path, payload):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")
    print(f"wrote {path}")


def main():
    rng = random.Random(20160229)

    schema_data = schema_dict()
    dump(DATA / "schema.json", schema_data)
    schema = DomainSchema.from_dict(schema_data)

    kb_records = gen_kb(rng)
    dump(DATA / "movie_kb.json", kb_records)
    kb = MovieKB(kb_records, schema)

    template_entries = gen_templates(schema)
    dump(DATA / "templates.json", template_entries)
    templates = load_templates(DATA / "templates.json", schema)

    corpus_data = gen_corpus(kb, templates, schema, rng)
    dump(DATA / "corpus.json", corpus_data)
    corpus = load_corpus(DATA / "corpus.json", schema)

    first, first_report = extract_goals_first_turn(corpus, schema)
    agg, agg_report = extract_goals_aggregate(corpus, schema)
    print(f"first-turn: {first_report}")
    print(f"aggregate:  {agg_report}")
    goals = first + agg
    provenance = ["first_turn"] * len(first) + ["aggregate"] * len(agg)
    db = finalize_goal_db(goals, kb, filter_satisfiable=True, provenance=provenance)
    save_goal_db(db, DATA / "user_goals.json")
    print(f"wrote {DATA / 'user_goals.json'} ({len(db.goals)} goals)")

    fixture = gen_fixture(kb, templates, schema)
    dump(TEST_DATA / "corpus_fixture.json", fixture)

    basics, extra = gen_curated_goals(kb, rng)
    dump(TEST_DATA / "curated_basics_goals.json", basics)
    dump(TEST_DATA / "extra_request_goals.json", extra)

    tiny_schema_data = tiny_schema_dict()
    dump(TEST_DATA / "tiny_schema.json", tiny_schema_data)
    tiny_records = gen_tiny_kb(rng)
    dump(TEST_DATA / "tiny_kb.json", tiny_records)
    tiny_goals = gen_tiny_goals(tiny_records, rng)
    dump(TEST_DATA / "tiny_goals.json", tiny_goals)

    # Consistency checks on everything just written.
    tiny_schema = DomainSchema.from_dict(tiny_schema_data)
    tiny_kb = MovieKB(tiny_records, tiny_schema)
    for raw in tiny_goals:
        goal = UserGoal.from_dict(raw)
        assert tiny_kb.satisfiable(goal), f"unsatisfiable tiny goal {raw}"
    for raw in basics:
        goal = UserGoal.from_dict(raw)
        assert kb.satisfiable(goal), f"unsatisfiable curated goal {raw}"
    print("all generated goals satisfiable where required")


if __name__ == "__main__":
    main()
