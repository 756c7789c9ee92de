"""Agenda-based user simulator.

The user state is factored into a sampled goal (constraints + requests) and an
agenda: the ordered remainder of constraint slots not yet conveyed and request
slots not yet answered. Responses to agent actions are deterministic dispatch
on the agent intent; randomness enters only through goal sampling, the first
act's constraint subset, and multiple-choice picks.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .core import (
    SPEAKER_USER,
    TASKCOMPLETE,
    UNK,
    VALUE_NO_MATCH,
    VALUE_NO_TICKET,
    WILDCARD,
    DialogAct,
    DialogsimError,
    DialogueStatus,
    DomainSchema,
    UserGoal,
    normalize_value,
)
from .corpus import GoalDatabase
from .kb import MovieKB
from .noise import ErrorModelConfig, corrupt

AGENDA_INFORM = "inform"
AGENDA_REQUEST = "request"


class UserSimError(DialogsimError):
    pass


@dataclass
class UserState:
    """Per-episode simulator state; one instance per running dialogue."""

    goal: UserGoal
    agenda: list = field(default_factory=list)
    history_slots: dict = field(default_factory=dict)
    agent_offered: dict = field(default_factory=dict)
    frame_intent: str = "request"
    frame_informs: dict = field(default_factory=dict)
    frame_requests: dict = field(default_factory=dict)
    turn: int = 0
    episode_over: bool = False
    status: DialogueStatus = DialogueStatus.NO_OUTCOME_YET
    constraint_check: bool | None = None
    taskcomplete_value: str | None = None


@dataclass
class EpisodeOutcome:
    """Result of one completed dialogue."""

    status: DialogueStatus
    total_turns: int
    transcript: list = field(default_factory=list)


def step_reward(status: DialogueStatus, max_turn: int) -> float:
    """Per-exchange reward: -1 while running, +-margin at termination."""
    if status is DialogueStatus.SUCCESS:
        return 2.0 * max_turn
    if status is DialogueStatus.FAILURE:
        return -1.0 * max_turn
    return -1.0


class RuleUserSimulator:
    """Stateless rule engine; episode state is carried in UserState objects so
    independent episodes can run concurrently against one simulator."""

    def __init__(
        self,
        schema: DomainSchema,
        kb: MovieKB,
        goal_db: GoalDatabase,
        noise_cfg: ErrorModelConfig | None = None,
    ):
        self.schema = schema
        self.kb = kb
        self.goal_db = goal_db
        self.noise_cfg = noise_cfg

    # ----- episode start -------------------------------------------------

    def initialize_episode(self, rng: random.Random) -> tuple[UserState, DialogAct]:
        if not self.goal_db.goals:
            raise UserSimError("goal database is empty")
        goal = rng.choice(self.goal_db.goals).copy()
        state = UserState(goal=goal)

        informs = {}
        constraints = goal.inform_slots
        if "moviename" in constraints:
            informs["moviename"] = constraints["moviename"]
        for slot, value in constraints.items():
            if slot == "moviename":
                continue
            if rng.random() < 0.5:
                informs[slot] = value
        if not informs:
            slot = rng.choice(sorted(constraints))
            informs[slot] = constraints[slot]

        non_ticket = [s for s in goal.request_slots if s != self.schema.default_request_slot]
        if non_ticket:
            first_request = rng.choice(non_ticket)
        else:
            first_request = self.schema.default_request_slot

        state.history_slots = dict(informs)
        state.agenda = [
            (AGENDA_INFORM, slot) for slot in constraints if slot not in informs
        ]
        state.agenda += [(AGENDA_REQUEST, slot) for slot in non_ticket]
        state.agenda.append((AGENDA_REQUEST, self.schema.default_request_slot))

        state.frame_intent = "request"
        state.frame_informs = dict(informs)
        state.frame_requests = {first_request: UNK}
        return state, self._emit(state)

    # ----- per-turn transition -------------------------------------------

    def next(
        self, state: UserState, system_action: DialogAct, rng: random.Random
    ) -> tuple[DialogAct, bool, DialogueStatus]:
        """Generates the next user action from the last agent action."""
        if state.episode_over:
            raise UserSimError("episode is already over")
        if not self.schema.has_intent(system_action.intent):
            raise UserSimError(f"unknown agent intent {system_action.intent!r}")

        state.turn += 2
        state.frame_informs = {}
        state.frame_requests = {}

        if state.turn > self.schema.max_turn:
            state.frame_intent = "closing"
            state.episode_over = True
            state.status = DialogueStatus.FAILURE
        else:
            intent = system_action.intent
            if intent == "request":
                self._respond_to_request(state, system_action)
            elif intent == "inform":
                self._respond_to_inform(state, system_action)
            elif intent == "multiple_choice":
                self._respond_to_multiple_choice(state, system_action, rng)
            elif intent == "thanks":
                state.episode_over = True
                state.status = self._final_status(state)
                state.frame_intent = "closing"
            elif intent == "closing":
                state.frame_intent = "thanks"
                state.episode_over = True
                state.status = self._final_status(state)
            else:
                # confirm_answer and the remaining conversational intents all
                # hand the floor back: proceed with the next agenda item.
                self._continue_agenda(state)

        act = self._emit(state)
        if self.noise_cfg is not None and self.noise_cfg.enabled and not state.episode_over:
            act = corrupt(act, self.noise_cfg, self.schema, self.kb, rng)
        return act, state.episode_over, state.status

    def evaluate_final_status(self, state: UserState) -> DialogueStatus:
        """Success/failure per the booking rules; only valid at episode end."""
        if not state.episode_over:
            raise UserSimError("evaluate_final_status called before termination")
        return self._final_status(state)

    # ----- handlers -------------------------------------------------------

    def _respond_to_request(self, state: UserState, sys_act: DialogAct):
        if not sys_act.request_slots:
            self._continue_agenda(state)
            return
        slot = next(iter(sys_act.request_slots))
        constraints = state.goal.inform_slots
        if slot in constraints:
            self._inform(state, slot, constraints[slot])
        elif slot in state.goal.request_slots and slot not in state.history_slots:
            state.frame_intent = "request"
            state.frame_requests = {slot: UNK}
        elif slot in state.history_slots:
            self._inform(state, slot, state.history_slots[slot])
        else:
            self._inform(state, slot, WILDCARD)

    def _respond_to_inform(self, state: UserState, sys_act: DialogAct):
        informs = sys_act.inform_slots
        for slot, value in informs.items():
            state.agent_offered[slot] = value
        if TASKCOMPLETE in informs:
            self._respond_to_taskcomplete(state, informs[TASKCOMPLETE])
            return

        constraints = state.goal.inform_slots
        contradiction = None
        for slot, value in informs.items():
            if slot in constraints and normalize_value(value) != normalize_value(
                constraints[slot]
            ):
                contradiction = slot
                # The user's restatement supersedes the wrong offer.
                state.agent_offered.pop(slot, None)
                self._settle(state, slot, constraints[slot])
            elif normalize_value(value) != normalize_value(VALUE_NO_MATCH):
                self._settle(state, slot, value)

        if contradiction is not None:
            state.frame_intent = "inform"
            state.frame_informs = {contradiction: constraints[contradiction]}
            return
        for slot, value in informs.items():
            if (
                normalize_value(value) == normalize_value(VALUE_NO_MATCH)
                and slot in state.goal.request_slots
                and slot not in state.history_slots
            ):
                # A "no match available" answer does not count; keep asking.
                state.frame_intent = "request"
                state.frame_requests = {slot: UNK}
                return
        self._continue_agenda(state)

    def _respond_to_taskcomplete(self, state: UserState, value: str):
        state.taskcomplete_value = value
        ticket = self.schema.default_request_slot
        if normalize_value(value) == normalize_value(VALUE_NO_TICKET):
            state.constraint_check = False
            state.episode_over = True
            state.status = DialogueStatus.FAILURE
            state.frame_intent = "closing"
            return

        constraints = state.goal.inform_slots
        pending_informs = any(kind == AGENDA_INFORM for kind, _ in state.agenda)
        consistent = all(
            normalize_value(state.agent_offered[s]) == normalize_value(v)
            for s, v in constraints.items()
            if s in state.agent_offered
        )
        feasible = bool(
            self.kb.query(self.kb.queryable_constraints(constraints)).matches
        )
        passed = not pending_informs and consistent and feasible
        state.constraint_check = passed
        if passed:
            self._settle(state, ticket, value)
            for kind, slot in state.agenda:
                if kind == AGENDA_REQUEST:
                    state.frame_intent = "request"
                    state.frame_requests = {slot: UNK}
                    return
            state.frame_intent = "thanks"
        else:
            state.frame_intent = "deny"
            state.frame_requests = {ticket: UNK}

    def _respond_to_multiple_choice(
        self, state: UserState, sys_act: DialogAct, rng: random.Random
    ):
        if not sys_act.inform_slots:
            self._continue_agenda(state)
            return
        slot, encoded = next(iter(sys_act.inform_slots.items()))
        candidates = [c.strip() for c in encoded.split("#") if c.strip()]
        if not candidates:
            self._continue_agenda(state)
            return
        constraints = state.goal.inform_slots
        choice = None
        if slot in constraints:
            wanted = normalize_value(constraints[slot])
            for candidate in candidates:
                if normalize_value(candidate) == wanted:
                    choice = candidate
                    break
        if choice is None:
            choice = rng.choice(candidates)
        self._inform(state, slot, choice)

    def _continue_agenda(self, state: UserState):
        if state.agenda:
            kind, slot = state.agenda[0]
            if kind == AGENDA_INFORM:
                self._inform(state, slot, state.goal.inform_slots[slot])
            else:
                state.frame_intent = "request"
                state.frame_requests = {slot: UNK}
            return
        state.frame_intent = "thanks"

    # ----- helpers --------------------------------------------------------

    def _inform(self, state: UserState, slot: str, value: str):
        state.frame_intent = "inform"
        state.frame_informs = {slot: value}
        self._settle(state, slot, value)

    def _settle(self, state: UserState, slot: str, value: str):
        """Marks a slot conveyed/answered: into history, out of the agenda."""
        state.history_slots[slot] = value
        state.agenda = [(k, s) for k, s in state.agenda if s != slot]

    def _emit(self, state: UserState) -> DialogAct:
        return DialogAct(
            speaker=SPEAKER_USER,
            intent=state.frame_intent,
            inform_slots=dict(state.frame_informs),
            request_slots=dict(state.frame_requests),
            turn=state.turn,
        )

    def _final_status(self, state: UserState) -> DialogueStatus:
        answered = all(s in state.history_slots for s in state.goal.request_slots)
        if (
            state.constraint_check is True
            and answered
            and state.turn <= self.schema.max_turn
        ):
            return DialogueStatus.SUCCESS
        return DialogueStatus.FAILURE
