"""Annotated-dialogue ingestion and user-goal database construction.

Goals are extracted either from the first non-greeting user turn of each
dialogue or by aggregating the slots over all user turns. Candidates missing
the default ticket request are repaired; candidates missing required slots
are discarded.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .core import (
    SPEAKER_USER,
    TASKCOMPLETE,
    UNK,
    DialogAct,
    DialogsimError,
    DomainSchema,
    UserGoal,
    validate_act,
    validate_goal,
)
from .kb import MovieKB


class CorpusError(DialogsimError):
    pass


MECHANISM_FIRST_TURN = "first_turn"
MECHANISM_AGGREGATE = "aggregate"


@dataclass
class AnnotatedDialogue:
    """One labeled dialogue: alternating (speaker, act, utterance) turns."""

    turns: list[tuple[str, DialogAct, str]]


@dataclass
class ExtractionReport:
    extracted: int = 0
    repaired: int = 0
    discarded: int = 0


@dataclass
class GoalDatabase:
    goals: list[UserGoal] = field(default_factory=list)
    provenance: list[str] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.goals)


def load_corpus(path: str | Path, schema: DomainSchema) -> list[AnnotatedDialogue]:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"cannot parse corpus file {path}: {exc}") from exc
    if not isinstance(data, list):
        raise CorpusError("corpus file must be a JSON list of dialogues")
    dialogues = []
    for d_idx, raw_turns in enumerate(data):
        turns = []
        for t_idx, raw in enumerate(raw_turns):
            act = DialogAct(
                speaker=raw["speaker"],
                intent=raw["intent"],
                inform_slots=raw.get("inform_slots", {}),
                request_slots=raw.get("request_slots", {}),
                turn=t_idx,
            )
            expected = SPEAKER_USER if t_idx % 2 == 0 else "agent"
            if act.speaker != expected:
                raise CorpusError(
                    f"dialogue {d_idx}: speaker {act.speaker!r} at turn {t_idx}, "
                    f"expected {expected!r} (turns must alternate starting with user)"
                )
            violations = validate_act(schema, act)
            if violations:
                raise CorpusError(f"dialogue {d_idx} turn {t_idx}: {'; '.join(violations)}")
            turns.append((act.speaker, act, raw.get("utterance", "")))
        if not turns:
            raise CorpusError(f"dialogue {d_idx} has no turns")
        dialogues.append(AnnotatedDialogue(turns))
    return dialogues


def _goal_slots_only(slots: dict, schema: DomainSchema) -> dict:
    """Drops reserved or non-goal-able slots from extracted candidates."""
    return {s: v for s, v in slots.items() if schema.has_slot(s) and s != TASKCOMPLETE}


def _finish_candidate(
    inform_slots: dict,
    request_slots: dict,
    schema: DomainSchema,
    report: ExtractionReport,
) -> UserGoal | None:
    goal = UserGoal(inform_slots=inform_slots, request_slots=request_slots)
    if schema.default_request_slot not in goal.request_slots:
        goal.request_slots[schema.default_request_slot] = UNK
        report.repaired += 1
    if validate_goal(schema, goal):
        report.discarded += 1
        return None
    report.extracted += 1
    return goal


def extract_goals_first_turn(
    corpus: list[AnnotatedDialogue], schema: DomainSchema
) -> tuple[list[UserGoal], ExtractionReport]:
    """One candidate goal per dialogue from the first non-greeting user turn."""
    if not corpus:
        raise CorpusError("corpus is empty")
    goals, report = [], ExtractionReport()
    for dialogue in corpus:
        first = None
        for speaker, act, _ in dialogue.turns:
            if speaker == SPEAKER_USER and act.intent != "greeting":
                first = act
                break
        if first is None:
            raise CorpusError("dialogue has no non-greeting user turn")
        goal = _finish_candidate(
            _goal_slots_only(first.inform_slots, schema),
            _goal_slots_only(first.request_slots, schema),
            schema,
            report,
        )
        if goal is not None:
            goals.append(goal)
    return goals, report


def extract_goals_aggregate(
    corpus: list[AnnotatedDialogue], schema: DomainSchema
) -> tuple[list[UserGoal], ExtractionReport]:
    """Per dialogue, the union of slots over all user turns; a slot goes to
    whichever side it was first seen on, with its first value."""
    if not corpus:
        raise CorpusError("corpus is empty")
    goals, report = [], ExtractionReport()
    for dialogue in corpus:
        inform_slots: dict = {}
        request_slots: dict = {}
        for speaker, act, _ in dialogue.turns:
            if speaker != SPEAKER_USER:
                continue
            for slot, value in _goal_slots_only(act.inform_slots, schema).items():
                if slot not in inform_slots and slot not in request_slots:
                    inform_slots[slot] = value
            for slot in _goal_slots_only(act.request_slots, schema):
                if slot not in inform_slots and slot not in request_slots:
                    request_slots[slot] = UNK
        goal = _finish_candidate(inform_slots, request_slots, schema, report)
        if goal is not None:
            goals.append(goal)
    return goals, report


def finalize_goal_db(
    goals: list[UserGoal],
    kb: MovieKB,
    filter_satisfiable: bool,
    provenance: list[str] | None = None,
) -> GoalDatabase:
    """Deduplicates (by canonical serialization) and optionally drops goals
    unsatisfiable against the KB."""
    provenance = provenance or ["unknown"] * len(goals)
    if len(provenance) != len(goals):
        raise CorpusError("provenance list must parallel the goal list")
    db = GoalDatabase()
    seen: set[str] = set()
    for goal, source in zip(goals, provenance):
        key = goal.canonical()
        if key in seen:
            continue
        seen.add(key)
        if filter_satisfiable and not kb.satisfiable(goal):
            continue
        db.goals.append(goal.copy())
        db.provenance.append(source)
    if not db.goals:
        raise CorpusError("no goals survived deduplication/filtering")
    return db


def save_goal_db(db: GoalDatabase, path: str | Path):
    entries = []
    for goal, source in zip(db.goals, db.provenance):
        entry = goal.to_dict()
        entry["source"] = source
        entries.append(entry)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(entries, fh, indent=2)
        fh.write("\n")


def load_goal_db(path: str | Path, schema: DomainSchema) -> GoalDatabase:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"cannot parse goal file {path}: {exc}") from exc
    db = GoalDatabase()
    for idx, entry in enumerate(data):
        goal = UserGoal.from_dict(entry)
        violations = validate_goal(schema, goal)
        if violations:
            raise CorpusError(f"goal {idx} invalid: {'; '.join(violations)}")
        db.goals.append(goal)
        db.provenance.append(entry.get("source", "unknown"))
    if not db.goals:
        raise CorpusError(f"goal file {path} is empty")
    return db
