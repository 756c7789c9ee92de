"""Domain schema, dialog-act and user-goal types shared by every other module."""

from __future__ import annotations

import hashlib
import json
import random
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

SPEAKER_USER = "user"
SPEAKER_AGENT = "agent"

# Placeholder value carried by every request slot.
UNK = "UNK"
# "I do not care" wildcard; matches any knowledge-base value.
WILDCARD = "anything"

# Reserved slot names. `ticket` is the default request slot of every user
# goal; `taskcomplete` is the pseudo-slot the agent informs when it is ready
# to book (it never appears in goals or KB records).
TICKET = "ticket"
TASKCOMPLETE = "taskcomplete"

# Sentinel values used on the wire.
VALUE_BOOKED = "taskcomplete"            # inform(taskcomplete=...) on success
VALUE_NO_TICKET = "no ticket available"  # agent gives up booking (failure)
VALUE_NO_MATCH = "no match available"    # agent has no KB value for a slot

# Slots that users state but that never constrain a KB search: party size is
# about the purchase, not the showing, and the two reserved slots are not
# record columns at all.
NON_QUERY_SLOTS = frozenset({"numberofpeople", "numberofkids", TICKET, TASKCOMPLETE})


class DialogsimError(Exception):
    """Base class for errors raised by this package."""


class SchemaError(DialogsimError):
    pass


class ActParseError(DialogsimError):
    pass


def normalize_value(value: str) -> str:
    """Canonical form used for all value comparisons."""
    return str(value).strip().lower()


def derive_rng(seed: int, index: int) -> random.Random:
    """Independent random stream for one episode, reproducibly derived from a
    root seed; lets episodes run in parallel without sharing generator state."""
    digest = hashlib.sha256(f"{seed}:{index}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


class DialogueStatus(Enum):
    NO_OUTCOME_YET = "no_outcome_yet"
    SUCCESS = "success"
    FAILURE = "failure"

    @property
    def terminal(self) -> bool:
        return self is not DialogueStatus.NO_OUTCOME_YET


@dataclass(frozen=True)
class SlotSpec:
    name: str
    informable: bool = True
    requestable: bool = True


@dataclass(frozen=True)
class DomainSchema:
    """Fixed registry of intents and slots; featurizer dimensions depend on it."""

    intents: tuple[str, ...]
    slots: tuple[SlotSpec, ...]
    required_slots: tuple[str, ...]
    default_request_slot: str
    max_turn: int

    def __post_init__(self):
        names = [s.name for s in self.slots]
        for name in list(self.intents) + names:
            if not name or name != name.lower().strip():
                raise SchemaError(f"names must be lowercase and non-empty: {name!r}")
        if len(set(self.intents)) != len(self.intents):
            raise SchemaError("duplicate intent names")
        if len(set(names)) != len(names):
            raise SchemaError("duplicate slot names")
        by_name = {s.name: s for s in self.slots}
        for req in self.required_slots:
            if req not in by_name or not by_name[req].informable:
                raise SchemaError(f"required slot {req!r} must be an informable slot")
        default = by_name.get(self.default_request_slot)
        if default is None or not default.requestable:
            raise SchemaError(
                f"default request slot {self.default_request_slot!r} must be requestable"
            )
        if self.max_turn <= 0 or self.max_turn % 2 != 0:
            raise SchemaError("max_turn must be a positive even integer")
        object.__setattr__(self, "_slot_by_name", by_name)
        object.__setattr__(self, "_intent_index", {n: i for i, n in enumerate(self.intents)})
        object.__setattr__(self, "_slot_index", {n: i for i, n in enumerate(names)})

    @property
    def slot_names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.slots)

    @property
    def informable_slots(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.slots if s.informable)

    @property
    def requestable_slots(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.slots if s.requestable)

    @property
    def informable_regular_slots(self) -> tuple[str, ...]:
        """Informable slots excluding the reserved taskcomplete pseudo-slot."""
        return tuple(s.name for s in self.slots if s.informable and s.name != TASKCOMPLETE)

    def has_intent(self, intent: str) -> bool:
        return intent in self._intent_index

    def has_slot(self, slot: str) -> bool:
        return slot in self._slot_index

    def is_informable(self, slot: str) -> bool:
        spec = self._slot_by_name.get(slot)
        return spec is not None and spec.informable

    def is_requestable(self, slot: str) -> bool:
        spec = self._slot_by_name.get(slot)
        return spec is not None and spec.requestable

    def intent_index(self, intent: str) -> int:
        return self._intent_index[intent]

    def slot_index(self, slot: str) -> int:
        return self._slot_index[slot]

    def to_dict(self) -> dict:
        return {
            "intents": list(self.intents),
            "slots": [
                {"name": s.name, "informable": s.informable, "requestable": s.requestable}
                for s in self.slots
            ],
            "required_slots": list(self.required_slots),
            "default_request_slot": self.default_request_slot,
            "max_turn": self.max_turn,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DomainSchema":
        try:
            slots = tuple(
                SlotSpec(
                    name=str(entry["name"]),
                    informable=bool(entry.get("informable", True)),
                    requestable=bool(entry.get("requestable", True)),
                )
                for entry in data["slots"]
            )
            return cls(
                intents=tuple(data["intents"]),
                slots=slots,
                required_slots=tuple(data["required_slots"]),
                default_request_slot=str(data["default_request_slot"]),
                max_turn=int(data["max_turn"]),
            )
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"malformed schema file: {exc}") from exc


def load_schema(path: str | Path) -> DomainSchema:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"cannot parse schema file {path}: {exc}") from exc
    return DomainSchema.from_dict(data)


@dataclass
class DialogAct:
    """Semantic frame for one turn: intent plus inform and request slots."""

    speaker: str
    intent: str
    inform_slots: dict = field(default_factory=dict)
    request_slots: dict = field(default_factory=dict)
    turn: int = 0
    nl: str | None = None

    def __post_init__(self):
        self.inform_slots = {str(k): str(v) for k, v in self.inform_slots.items()}
        self.request_slots = {str(k): UNK for k in self.request_slots}

    def copy(self) -> "DialogAct":
        return DialogAct(
            speaker=self.speaker,
            intent=self.intent,
            inform_slots=dict(self.inform_slots),
            request_slots=dict(self.request_slots),
            turn=self.turn,
            nl=self.nl,
        )

    def with_turn(self, turn: int) -> "DialogAct":
        act = self.copy()
        act.turn = turn
        return act

    def same_frame(self, other: "DialogAct") -> bool:
        """Equality ignoring turn stamp and surface string."""
        return (
            self.speaker == other.speaker
            and self.intent == other.intent
            and self.inform_slots == other.inform_slots
            and set(self.request_slots) == set(other.request_slots)
        )

    def to_dict(self) -> dict:
        data = {
            "speaker": self.speaker,
            "intent": self.intent,
            "inform_slots": dict(self.inform_slots),
            "request_slots": dict(self.request_slots),
            "turn": self.turn,
        }
        if self.nl is not None:
            data["nl"] = self.nl
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "DialogAct":
        return cls(
            speaker=data["speaker"],
            intent=data["intent"],
            inform_slots=dict(data.get("inform_slots", {})),
            request_slots=dict(data.get("request_slots", {})),
            turn=int(data.get("turn", 0)),
            nl=data.get("nl"),
        )


def validate_act(schema: DomainSchema, act: DialogAct) -> list[str]:
    """Returns a list of invariant violations; empty means the act is valid."""
    violations = []
    if act.speaker not in (SPEAKER_USER, SPEAKER_AGENT):
        violations.append(f"unknown speaker {act.speaker!r}")
    if not schema.has_intent(act.intent):
        violations.append(f"unknown intent {act.intent!r}")
    for slot in list(act.inform_slots) + list(act.request_slots):
        if not schema.has_slot(slot):
            violations.append(f"unknown slot {slot!r}")
    overlap = set(act.inform_slots) & set(act.request_slots)
    if overlap:
        violations.append(f"disjointness: {sorted(overlap)} informed and requested")
    for slot, value in act.inform_slots.items():
        if not str(value).strip():
            violations.append(f"empty value for inform slot {slot!r}")
    if act.turn < 0:
        violations.append(f"negative turn {act.turn}")
    elif act.speaker == SPEAKER_USER and act.turn % 2 != 0:
        violations.append(f"user act with odd turn {act.turn}")
    elif act.speaker == SPEAKER_AGENT and act.turn % 2 != 1:
        violations.append(f"agent act with even turn {act.turn}")
    return violations


_ACT_STRING_RE = re.compile(r"^\s*([a-z_]+)\s*\((.*)\)\s*$", re.DOTALL)


def format_act_string(act: DialogAct) -> str:
    """Compact form, e.g. inform(theater=carmike summit 16) or request(city)."""
    parts = [f"{slot}={value}" for slot, value in act.inform_slots.items()]
    parts += list(act.request_slots)
    return f"{act.intent}({', '.join(parts)})"


def parse_act_string(
    text: str, schema: DomainSchema, speaker: str, turn: int = 0
) -> DialogAct:
    """Parses the compact act form. Bare names are request slots, name=value
    pairs are informs; inform(taskcomplete) is accepted as a placeholder
    booking claim. Values may not contain commas."""
    match = _ACT_STRING_RE.match(text)
    if not match:
        raise ActParseError(f"not an act string: {text!r}")
    intent, body = match.group(1), match.group(2).strip()
    inform_slots: dict = {}
    request_slots: dict = {}
    if body:
        for part in body.split(","):
            part = part.strip()
            if not part:
                raise ActParseError(f"empty slot entry in {text!r}")
            if "=" in part:
                slot, value = part.split("=", 1)
                inform_slots[slot.strip()] = value.strip()
            elif intent == "inform" and part == TASKCOMPLETE:
                inform_slots[TASKCOMPLETE] = VALUE_BOOKED
            else:
                request_slots[part] = UNK
    act = DialogAct(
        speaker=speaker,
        intent=intent,
        inform_slots=inform_slots,
        request_slots=request_slots,
        turn=turn,
    )
    violations = validate_act(schema, act)
    if violations:
        raise ActParseError(f"invalid act {text!r}: {'; '.join(violations)}")
    return act


@dataclass
class UserGoal:
    """Hidden objective of the simulated user: constraints plus requests."""

    inform_slots: dict = field(default_factory=dict)
    request_slots: dict = field(default_factory=dict)

    def __post_init__(self):
        self.inform_slots = {str(k): str(v) for k, v in self.inform_slots.items()}
        self.request_slots = {str(k): UNK for k in self.request_slots}

    def copy(self) -> "UserGoal":
        return UserGoal(dict(self.inform_slots), dict(self.request_slots))

    def canonical(self) -> str:
        """Stable serialization used for deduplication."""
        return json.dumps(
            {
                "inform_slots": dict(sorted(self.inform_slots.items())),
                "request_slots": sorted(self.request_slots),
            },
            sort_keys=True,
        )

    def to_dict(self) -> dict:
        return {
            "inform_slots": dict(self.inform_slots),
            "request_slots": dict(self.request_slots),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "UserGoal":
        return cls(
            inform_slots=dict(data.get("inform_slots", {})),
            request_slots=dict(data.get("request_slots", {})),
        )


def validate_goal(schema: DomainSchema, goal: UserGoal) -> list[str]:
    violations = []
    for slot in goal.inform_slots:
        if not schema.is_informable(slot):
            violations.append(f"constraint slot {slot!r} is not informable")
        if slot == TASKCOMPLETE:
            violations.append("taskcomplete is reserved and cannot appear in goals")
    for slot in goal.request_slots:
        if not schema.is_requestable(slot):
            violations.append(f"request slot {slot!r} is not requestable")
    overlap = set(goal.inform_slots) & set(goal.request_slots)
    if overlap:
        violations.append(f"disjointness: {sorted(overlap)}")
    if schema.default_request_slot not in goal.request_slots:
        violations.append(f"missing default request slot {schema.default_request_slot!r}")
    covered = set(goal.inform_slots) | set(goal.request_slots)
    missing = [s for s in schema.required_slots if s not in covered]
    if missing:
        violations.append(f"required slots not covered: {missing}")
    return violations
