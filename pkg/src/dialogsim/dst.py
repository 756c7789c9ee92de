"""Agent-side dialogue state tracker.

Accumulates both parties' acts, corrects agent inform values onto the
KB-suggested list for the current constraints, materializes abstract action
indices into concrete acts, and produces the numeric state vector consumed by
the Q-network.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (
    SPEAKER_AGENT,
    SPEAKER_USER,
    TASKCOMPLETE,
    UNK,
    VALUE_BOOKED,
    VALUE_NO_MATCH,
    VALUE_NO_TICKET,
    DialogAct,
    DialogsimError,
    DomainSchema,
    normalize_value,
)
from .kb import MovieKB, QueryResult


class TrackerError(DialogsimError):
    pass


@dataclass
class DialogState:
    """Snapshot handed to agents; never mutated by them."""

    turn: int
    last_user_act: DialogAct | None
    last_agent_act: DialogAct | None
    user_constraints: dict
    user_requests_seen: set
    agent_informed: dict
    kb_result: QueryResult
    kb_total: int
    slot_first_value: dict
    history: list = field(default_factory=list)

    @property
    def available_slots(self) -> set:
        return set(self.slot_first_value)


def build_action_space(schema: DomainSchema) -> list[tuple[str, str | None]]:
    """Fixed discrete action space: one request per requestable slot, one
    inform per informable non-pseudo slot, then taskcomplete/thanks/closing."""
    actions: list[tuple[str, str | None]] = []
    actions += [("request", slot) for slot in schema.requestable_slots]
    actions += [("inform", slot) for slot in schema.informable_regular_slots]
    actions += [("taskcomplete", None), ("thanks", None), ("closing", None)]
    return actions


def state_vector_length(schema: DomainSchema) -> int:
    return 2 * len(schema.intents) + 7 * len(schema.slots) + 3


def layout_descriptor(schema: DomainSchema) -> dict:
    """Serialized with trained models so saved policies stay portable."""
    n_i, n_s = len(schema.intents), len(schema.slots)
    return {
        "intents": list(schema.intents),
        "slots": list(schema.slot_names),
        "length": state_vector_length(schema),
        "sections": [
            ["last_user_intent", n_i],
            ["last_user_informs", n_s],
            ["last_user_requests", n_s],
            ["last_agent_intent", n_i],
            ["last_agent_informs", n_s],
            ["last_agent_requests", n_s],
            ["all_user_constraints", n_s],
            ["all_user_requests", n_s],
            ["kb_slot_availability", n_s],
            ["scalars", 3],
        ],
        "action_space": [list(a) for a in build_action_space(schema)],
    }


def featurize_state(view, schema: DomainSchema) -> np.ndarray:
    """Numeric state representation; `view` is a StateTracker or DialogState.

    Layout: one-hot last user intent, binary last-user inform/request slots,
    the same three sections for the last agent act, binary all-time user
    constraints and requests, binary per-slot KB availability, then three
    scalars (turn fraction, match fraction, any-match flag).
    """
    n_i, n_s = len(schema.intents), len(schema.slots)
    vec = np.zeros(state_vector_length(schema), dtype=np.float64)

    def mark_act(act: DialogAct | None, base: int) -> int:
        if act is not None:
            vec[base + schema.intent_index(act.intent)] = 1.0
            for slot in act.inform_slots:
                vec[base + n_i + schema.slot_index(slot)] = 1.0
            for slot in act.request_slots:
                vec[base + n_i + n_s + schema.slot_index(slot)] = 1.0
        return base + n_i + 2 * n_s

    offset = mark_act(view.last_user_act, 0)
    offset = mark_act(view.last_agent_act, offset)
    for slot in view.user_constraints:
        vec[offset + schema.slot_index(slot)] = 1.0
    offset += n_s
    for slot in view.user_requests_seen:
        vec[offset + schema.slot_index(slot)] = 1.0
    offset += n_s
    for slot in view.available_slots:
        vec[offset + schema.slot_index(slot)] = 1.0
    offset += n_s
    vec[offset] = min(1.0, max(0, view.turn) / schema.max_turn)
    total = max(1, view.kb_total)
    vec[offset + 1] = min(1.0, len(view.kb_result.matches) / total)
    vec[offset + 2] = 1.0 if view.kb_result.matches else 0.0
    return vec


def materialize_action(view, schema: DomainSchema, index: int) -> DialogAct:
    """Concrete act for an abstract action index against the current state."""
    actions = build_action_space(schema)
    if not 0 <= index < len(actions):
        raise TrackerError(f"action index {index} out of range")
    kind, slot = actions[index]
    turn = view.turn + 1 if view.turn % 2 == 0 else view.turn + 2
    if kind == "request":
        return DialogAct(SPEAKER_AGENT, "request", {}, {slot: UNK}, turn)
    if kind == "inform":
        value = view.slot_first_value.get(slot, VALUE_NO_MATCH)
        return DialogAct(SPEAKER_AGENT, "inform", {slot: value}, {}, turn)
    if kind == "taskcomplete":
        value = VALUE_BOOKED if view.kb_result.matches else VALUE_NO_TICKET
        return DialogAct(SPEAKER_AGENT, "inform", {TASKCOMPLETE: value}, {}, turn)
    return DialogAct(SPEAKER_AGENT, kind, {}, {}, turn)


class StateTracker:
    """One tracker per episode; reset() before each dialogue."""

    def __init__(self, schema: DomainSchema, kb: MovieKB):
        self.schema = schema
        self.kb = kb
        self.action_space = build_action_space(schema)
        self.reset()

    @property
    def available_slots(self) -> set:
        return self._available_slots

    @property
    def kb_total(self) -> int:
        return len(self.kb)

    def reset(self):
        self.turn = -1
        self.last_user_act: DialogAct | None = None
        self.last_agent_act: DialogAct | None = None
        self.user_constraints: dict = {}
        self.user_requests_seen: set = set()
        self.agent_informed: dict = {}
        self.history: list[DialogAct] = []
        self._refresh_kb_view()

    # ----- updates --------------------------------------------------------

    def update(self, act: DialogAct) -> DialogAct:
        """Folds one act into the state. Agent informs are corrected onto the
        suggested-value list; the (possibly corrected) act is returned and is
        what must be forwarded to the other party."""
        expected = SPEAKER_USER if (self.turn + 1) % 2 == 0 else SPEAKER_AGENT
        if act.speaker != expected:
            raise TrackerError(
                f"turn parity violation: expected {expected} act after turn {self.turn}"
            )
        if act.speaker == SPEAKER_USER:
            self.turn = act.turn if act.turn > self.turn else self.turn + 1
            self.last_user_act = act.copy()
            for slot, value in act.inform_slots.items():
                self.user_constraints[slot] = value
            self.user_requests_seen.update(act.request_slots)
            self._refresh_kb_view()
            self.history.append(self.last_user_act)
            return self.last_user_act

        corrected = act.copy()
        corrected.turn = act.turn if act.turn > self.turn else self.turn + 1
        for slot, value in list(corrected.inform_slots.items()):
            if slot == TASKCOMPLETE:
                # Booking claims are grounded in the KB: a success claim (or a
                # placeholder) becomes "no ticket available" when nothing
                # matches; an explicit no-ticket stands as the agent's choice.
                if normalize_value(value) != normalize_value(VALUE_NO_TICKET):
                    corrected.inform_slots[slot] = (
                        VALUE_BOOKED if self.kb_result.matches else VALUE_NO_TICKET
                    )
                continue
            if not self.schema.is_informable(slot):
                continue
            if normalize_value(value) in (VALUE_NO_MATCH, VALUE_NO_TICKET):
                continue
            if not self._value_available(slot, value):
                corrected.inform_slots[slot] = self.slot_first_value.get(
                    slot, VALUE_NO_MATCH
                )
        self.turn = corrected.turn
        self.last_agent_act = corrected
        for slot, value in corrected.inform_slots.items():
            self.agent_informed[slot] = value
        self.history.append(corrected)
        return corrected.copy()

    def _refresh_kb_view(self):
        constraints = self.kb.queryable_constraints(self.user_constraints)
        self.kb_result = self.kb.query(constraints)
        # First KB value per slot over the current matches, in match order.
        self.slot_first_value = {}
        self._available_slots = set()
        for rid in self.kb_result.matches:
            for slot, value in self.kb.records[rid].items():
                if slot not in self.slot_first_value:
                    self.slot_first_value[slot] = value
                self._available_slots.add(slot)

    def _value_available(self, slot: str, value: str) -> bool:
        if slot not in self._available_slots:
            return False
        norm = normalize_value(value)
        return any(
            normalize_value(self.kb.records[rid].get(slot, "")) == norm
            for rid in self.kb_result.matches
        )

    def suggestions_for(self, slots) -> dict:
        """Distinct current values per slot, for display next to requests."""
        out = {}
        for slot in slots:
            if not self.schema.is_informable(slot):
                continue
            seen, values = set(), []
            for rid in self.kb_result.matches:
                value = self.kb.records[rid].get(slot)
                if value is None:
                    continue
                norm = normalize_value(value)
                if norm not in seen:
                    seen.add(norm)
                    values.append(value)
            out[slot] = values
        return out

    # ----- views ----------------------------------------------------------

    def dialog_state(self) -> DialogState:
        return DialogState(
            turn=self.turn,
            last_user_act=self.last_user_act,
            last_agent_act=self.last_agent_act,
            user_constraints=dict(self.user_constraints),
            user_requests_seen=set(self.user_requests_seen),
            agent_informed=dict(self.agent_informed),
            kb_result=self.kb_result,
            kb_total=len(self.kb),
            slot_first_value=dict(self.slot_first_value),
            history=list(self.history),
        )

    def featurize(self) -> np.ndarray:
        return featurize_state(self, self.schema)

    # ----- abstract actions ------------------------------------------------

    @property
    def action_count(self) -> int:
        return len(self.action_space)

    def action_index(self, kind: str, slot: str | None = None) -> int:
        return self.action_space.index((kind, slot))

    def materialize_agent_action(self, index: int) -> DialogAct:
        return materialize_action(self, self.schema, index)
