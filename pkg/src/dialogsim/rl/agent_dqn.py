"""DQN agent: epsilon-greedy policy over the abstract action space with a
warm-start phase that delegates to a basics-requesting rule walk until the
replay pool first fills."""

from __future__ import annotations

import random

import numpy as np

from ..agents import Agent, AgentResponse, RequestBasicsAgent
from ..core import DialogsimError, DomainSchema
from ..dst import (
    DialogState,
    build_action_space,
    featurize_state,
    layout_descriptor,
    materialize_action,
    state_vector_length,
)
from .qnet import QNetwork
from .replay import Experience, ReplayBuffer, batch_arrays

WARM_START_RUNNING = 1
WARM_START_DONE = 2


class DQNAgent(Agent):
    def __init__(self, schema: DomainSchema, config, seed: int = 0):
        super().__init__(schema)
        self.config = config
        self.action_space = build_action_space(schema)
        self.num_actions = len(self.action_space)
        self.input_dim = state_vector_length(schema)
        self.qnet = QNetwork(self.input_dim, config.hidden_width, self.num_actions, seed)
        self.target = self.qnet.clone()
        self.buffer = ReplayBuffer(config.buffer_capacity)
        self.epsilon = config.epsilon
        self.warm_start = (
            WARM_START_RUNNING if config.warm_start == "rule-fill" else WARM_START_DONE
        )
        self._rng = random.Random(seed)
        # request_basics projected onto the action space; slots that are not
        # requestable there (numberofpeople) simply drop out of the walk.
        actions = set(self.action_space)
        self._rule_walk = [
            self.action_space.index(("request", slot))
            for slot in RequestBasicsAgent.REQUEST_SET
            if ("request", slot) in actions
        ]
        self._rule_walk.append(self.action_space.index(("taskcomplete", None)))
        self._rule_walk.append(self.action_space.index(("thanks", None)))
        self._rule_step = 0

    # ----- policy ----------------------------------------------------------

    def initialize_episode(self):
        super().initialize_episode()
        self._rule_step = 0

    def rule_policy(self) -> int:
        step = min(self._rule_step, len(self._rule_walk) - 1)
        self._rule_step += 1
        return self._rule_walk[step]

    def run_policy(self, state_vec: np.ndarray, rng: random.Random) -> int:
        """Epsilon-greedy; during warm start the rule walk answers instead of
        the network, until the pool first fills."""
        if rng.random() < self.epsilon:
            return rng.randrange(self.num_actions)
        if self.warm_start == WARM_START_RUNNING:
            if self.buffer.full:
                self.warm_start = WARM_START_DONE
            return self.rule_policy()
        return int(np.argmax(self.qnet.predict(state_vec)))

    # Vector-policy hook used by env.run_episode and the trainer.
    def act_index(self, state_vec: np.ndarray, rng: random.Random) -> int:
        return self.run_policy(state_vec, rng)

    def state_to_action(self, state: DialogState) -> AgentResponse:
        vec = featurize_state(state, self.schema)
        index = self.run_policy(vec, self._rng)
        act = materialize_action(state, self.schema, index)
        return AgentResponse(act_slot_response=act)

    # ----- learning -----------------------------------------------------------

    def remember(self, s, a, r, s_next, done):
        self.buffer.append(Experience(s, a, r, s_next, done))

    def train(self, rng: random.Random) -> float:
        """One training pass per the replay recipe: num_batches rounds of
        pool-size/batch-size sampled updates against the frozen target."""
        cfg = self.config
        total, updates = 0.0, 0
        for _ in range(cfg.num_batches):
            for _ in range(len(self.buffer) // cfg.batch_size):
                batch = self.buffer.sample(cfg.batch_size, rng)
                total += self.qnet.train_batch(
                    *batch_arrays(batch),
                    target_net=self.target,
                    gamma=cfg.gamma,
                    lr=cfg.learning_rate,
                    clip=cfg.grad_clip,
                )
                updates += 1
        return total / updates if updates else 0.0

    def update_target(self):
        self.target.copy_from(self.qnet)

    # ----- persistence -----------------------------------------------------------

    def save(self, path):
        from dataclasses import asdict

        self.qnet.save(
            path,
            layout=layout_descriptor(self.schema),
            config=asdict(self.config),
        )

    def load_params(self, path):
        net, meta = QNetwork.load(path)
        expected = layout_descriptor(self.schema)
        saved = meta.get("layout") or {}
        if saved and saved.get("length") != expected["length"]:
            raise DialogsimError(
                f"checkpoint layout length {saved.get('length')} does not match "
                f"schema layout length {expected['length']}"
            )
        self.qnet.copy_from(net)
        self.target.copy_from(net)
        return meta
