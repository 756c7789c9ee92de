"""Agent interface, the five rule-based baselines, and the console adapter.

Every agent implements exactly two methods: initialize_episode() and
state_to_action(state) -> AgentResponse. Rule agents carry no cross-episode
state; learned agents keep only their parameters between episodes.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .core import (
    SPEAKER_AGENT,
    TASKCOMPLETE,
    UNK,
    VALUE_BOOKED,
    VALUE_NO_MATCH,
    VALUE_NO_TICKET,
    DialogAct,
    DialogsimError,
    DomainSchema,
)
from .dst import DialogState


class AgentError(DialogsimError):
    pass


@dataclass
class AgentResponse:
    act_slot_response: DialogAct
    act_slot_value_response: DialogAct | None = None


class Agent:
    """Base class: per-episode turn bookkeeping and the two-method contract."""

    def __init__(self, schema: DomainSchema):
        self.schema = schema
        self._turn = -1
        self._ready = False

    def initialize_episode(self):
        self._turn = -1
        self._ready = True

    def state_to_action(self, state: DialogState) -> AgentResponse:
        raise NotImplementedError

    def _require_ready(self):
        if not self._ready:
            raise AgentError("state_to_action called before initialize_episode")

    def _next_turn(self) -> int:
        self._require_ready()
        self._turn += 2
        return self._turn

    def _respond(self, intent: str, inform_slots=None, request_slots=None) -> AgentResponse:
        act = DialogAct(
            speaker=SPEAKER_AGENT,
            intent=intent,
            inform_slots=inform_slots or {},
            request_slots=request_slots or {},
            turn=self._next_turn(),
        )
        return AgentResponse(act_slot_response=act)


class InformAgent(Agent):
    """Informs all informable slots one by one; never requests."""

    def initialize_episode(self):
        super().initialize_episode()
        self.slot_id = 0

    def state_to_action(self, state: DialogState) -> AgentResponse:
        self._require_ready()
        slots = self.schema.informable_slots
        slot = slots[self.slot_id % len(slots)]
        self.slot_id += 1
        if slot == TASKCOMPLETE:
            value = VALUE_BOOKED if state.kb_result.matches else VALUE_NO_TICKET
        else:
            value = state.slot_first_value.get(slot, VALUE_NO_MATCH)
        return self._respond("inform", inform_slots={slot: value})


class RequestAllAgent(Agent):
    """Requests all requestable slots one by one; never informs."""

    def initialize_episode(self):
        super().initialize_episode()
        self.slot_id = 0

    def state_to_action(self, state: DialogState) -> AgentResponse:
        self._require_ready()
        slots = self.schema.requestable_slots
        slot = slots[self.slot_id % len(slots)]
        self.slot_id += 1
        return self._respond("request", request_slots={slot: UNK})


class RandomRequestAgent(Agent):
    """Requests a uniformly random requestable slot every turn."""

    def __init__(self, schema: DomainSchema, rng: random.Random | None = None):
        super().__init__(schema)
        self.rng = rng or random.Random()

    def state_to_action(self, state: DialogState) -> AgentResponse:
        slot = self.rng.choice(self.schema.requestable_slots)
        return self._respond("request", request_slots={slot: UNK})


class EchoAgent(Agent):
    """Informs whatever slot the last user act requested, else thanks."""

    def state_to_action(self, state: DialogState) -> AgentResponse:
        last = state.last_user_act
        if last is not None and last.request_slots:
            slot = next(iter(last.request_slots))
            value = state.slot_first_value.get(slot, VALUE_NO_MATCH)
            return self._respond("inform", inform_slots={slot: value})
        return self._respond("thanks")


class RequestBasicsAgent(Agent):
    """Requests the basic slot subset one by one, then inform(taskcomplete),
    then thanks()."""

    REQUEST_SET = ["moviename", "starttime", "city", "date", "theater", "numberofpeople"]

    def initialize_episode(self):
        super().initialize_episode()
        self.current_slot_id = 0
        self.request_set = [s for s in self.REQUEST_SET if self.schema.has_slot(s)]
        self.phase = 0

    def state_to_action(self, state: DialogState) -> AgentResponse:
        self._require_ready()
        if self.current_slot_id < len(self.request_set):
            slot = self.request_set[self.current_slot_id]
            self.current_slot_id += 1
            return self._respond("request", request_slots={slot: UNK})
        if self.phase == 0:
            self.phase = 1
            value = VALUE_BOOKED if state.kb_result.matches else VALUE_NO_TICKET
            return self._respond("inform", inform_slots={TASKCOMPLETE: value})
        if self.phase == 1:
            self.phase = 2
            return self._respond("thanks")
        raise AgentError("request-basics agent called after its closing turn")


class CommandLineAgent(Agent):
    """Human plays the agent: reads acts (or natural language) from a prompt.

    input_mode 0 parses natural language through the template-inverse parser;
    input_mode 1 parses the compact act form, e.g. inform(theater=x).
    """

    def __init__(
        self,
        schema: DomainSchema,
        input_mode: int = 1,
        templates=None,
        input_fn=None,
        output_fn=print,
    ):
        super().__init__(schema)
        self.input_mode = input_mode
        self.templates = templates
        self.input_fn = input_fn
        self.output_fn = output_fn

    def _read(self, prompt: str) -> str:
        if self.input_fn is not None:
            return self.input_fn(prompt)
        return input(prompt)

    def state_to_action(self, state: DialogState) -> AgentResponse:
        from .core import parse_act_string
        from .nlg import parse_nl

        turn = self._next_turn()
        while True:
            raw = self._read("agent> ").strip()
            if not raw:
                self.output_fn("(empty input; try again)")
                continue
            if self.input_mode == 0 and self.templates is not None:
                act = parse_nl(raw, self.templates, self.schema)
                if act is not None and act.speaker == SPEAKER_AGENT:
                    act.turn = turn
                    act.nl = raw
                    return AgentResponse(act_slot_response=act)
                self.output_fn("(could not parse; falling back to act form)")
            try:
                act = parse_act_string(raw, self.schema, SPEAKER_AGENT, turn)
                return AgentResponse(act_slot_response=act)
            except DialogsimError as exc:
                self.output_fn(f"(invalid act: {exc})")


RULE_AGENT_KINDS = {
    "inform_all": InformAgent,
    "request_all": RequestAllAgent,
    "random_request": RandomRequestAgent,
    "echo": EchoAgent,
    "request_basics": RequestBasicsAgent,
}

# --agt flag values: 0 human console, 1..5 rule agents, 9 DQN.
AGT_FLAG_KINDS = {
    1: "inform_all",
    2: "request_all",
    3: "random_request",
    4: "echo",
    5: "request_basics",
}


def make_rule_agent(kind: str, schema: DomainSchema, rng: random.Random | None = None) -> Agent:
    if kind not in RULE_AGENT_KINDS:
        raise AgentError(f"unknown rule agent kind {kind!r}")
    cls = RULE_AGENT_KINDS[kind]
    if cls is RandomRequestAgent:
        return cls(schema, rng=rng)
    return cls(schema)
