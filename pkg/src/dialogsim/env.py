"""Turn-based dialogue environment wiring simulator, tracker, noise, and NLG.

reset() starts an episode and returns the first user act; step() consumes an
abstract action index (DQN path) and step_act() a concrete agent act (rule and
human paths). At act level 1 every act crosses the utterance channel: it is
rendered to text and re-parsed, so whatever the parser gets wrong is exactly
the noise the policy has to live with (the act-level error model is bypassed).
"""

from __future__ import annotations

import random

from .core import (
    SPEAKER_USER,
    DialogAct,
    DialogsimError,
    DialogueStatus,
    DomainSchema,
    validate_act,
)
from .corpus import GoalDatabase
from .dst import StateTracker
from .kb import MovieKB
from .nlg import TemplateSet, parse_nl, render
from .noise import ErrorModelConfig
from .usersim import EpisodeOutcome, RuleUserSimulator, step_reward


class EnvError(DialogsimError):
    pass


ACT_LEVEL_ACTS = 0
ACT_LEVEL_UTTERANCE = 1


class DialogueEnv:
    def __init__(
        self,
        schema: DomainSchema,
        kb: MovieKB,
        goal_db: GoalDatabase,
        noise_cfg: ErrorModelConfig | None = None,
        act_level: int = ACT_LEVEL_ACTS,
        templates: TemplateSet | None = None,
    ):
        if act_level == ACT_LEVEL_UTTERANCE and templates is None:
            raise EnvError("utterance-level runs need a template set")
        self.schema = schema
        self.kb = kb
        self.act_level = act_level
        self.templates = templates
        # The NLU channel already injects noise at utterance level.
        effective_noise = noise_cfg if act_level == ACT_LEVEL_ACTS else None
        self.sim = RuleUserSimulator(schema, kb, goal_db, effective_noise)
        self.tracker = StateTracker(schema, kb)
        self.done = True
        self.status = DialogueStatus.NO_OUTCOME_YET
        self.transcript: list[DialogAct] = []
        self.user_state = None
        self.rng = random.Random()

    # ----- episode control --------------------------------------------------

    def reset(self, rng: random.Random) -> DialogAct:
        self.rng = rng
        self.tracker.reset()
        self.user_state, first_act = self.sim.initialize_episode(rng)
        first_act = self._through_channel(first_act, SPEAKER_USER)
        self.tracker.update(first_act)
        self.transcript = [first_act]
        self.done = False
        self.status = DialogueStatus.NO_OUTCOME_YET
        return first_act

    def step_act(self, agent_act: DialogAct):
        """Advances one exchange. Returns (user_act | None, reward, done,
        status); the user act is None when the agent's thanks merely closes an
        already-decided episode."""
        if self.done:
            raise EnvError("episode is over; call reset()")
        violations = validate_act(self.schema, agent_act)
        if violations:
            raise EnvError(f"invalid agent act: {'; '.join(violations)}")
        corrected = self.tracker.update(agent_act)
        self.transcript.append(corrected)
        wire_act = self._through_channel(corrected, corrected.speaker)

        user_act, over, status = self.sim.next(self.user_state, wire_act, self.rng)
        reward = step_reward(status, self.schema.max_turn)
        self.done = over
        self.status = status

        if over and wire_act.intent == "thanks":
            # Formality reply; the transcript ends on the agent's thanks.
            return None, reward, over, status
        user_act = self._through_channel(user_act, SPEAKER_USER)
        self.tracker.update(user_act)
        self.transcript.append(user_act)
        return user_act, reward, over, status

    def step(self, action_index: int):
        """Abstract-action step for vector-policy agents."""
        agent_act = self.tracker.materialize_agent_action(action_index)
        user_act, reward, done, status = self.step_act(agent_act)
        info = {"status": status, "user_act": user_act}
        return self.state_vector(), reward, done, info

    # ----- views --------------------------------------------------------------

    def state_vector(self):
        return self.tracker.featurize()

    def dialog_state(self):
        return self.tracker.dialog_state()

    def outcome(self) -> EpisodeOutcome:
        if not self.done:
            raise EnvError("episode still running")
        return EpisodeOutcome(
            status=self.status,
            total_turns=self.user_state.turn + 2,
            transcript=list(self.transcript),
        )

    # ----- utterance channel ---------------------------------------------------

    def _through_channel(self, act: DialogAct, speaker: str) -> DialogAct:
        if self.templates is not None and act.nl is None:
            act.nl = render(act, self.templates)
        if self.act_level != ACT_LEVEL_UTTERANCE:
            return act
        parsed = parse_nl(act.nl, self.templates, self.schema, speaker=speaker)
        if parsed is None:
            return act
        parsed.turn = act.turn
        parsed.nl = act.nl
        return parsed


def run_episode(env: DialogueEnv, agent, rng: random.Random):
    """Plays one full episode; returns (EpisodeOutcome, total_reward)."""
    agent.initialize_episode()
    env.reset(rng)
    total_reward = 0.0
    while not env.done:
        if hasattr(agent, "act_index"):
            action = agent.act_index(env.state_vector(), rng)
            _, reward, _, _ = env.step(action)
        else:
            response = agent.state_to_action(env.dialog_state())
            _, reward, _, _ = env.step_act(response.act_slot_response)
        total_reward += reward
    return env.outcome(), total_reward
