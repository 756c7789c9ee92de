"""Training loop with the dynamic replay-flush strategy, plus evaluation and
the reachable-goal upper bound.

Per simulation epoch: simulate N dialogues into the pool, run the batched
training pass, swap the target network once, evaluate the greedy policy, and
decide whether to flush. The pool only accumulates until the evaluated success
rate first reaches the threshold; that crossing and every strict improvement
over the best rate since flush the pool and re-fill it from the current agent.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from ..core import DialogsimError, DialogueStatus, derive_rng
from ..corpus import GoalDatabase
from ..env import DialogueEnv, run_episode
from ..kb import MovieKB
from .agent_dqn import WARM_START_DONE, DQNAgent
from .replay import Experience

CURVE_HEADER = "epoch,success_rate,avg_reward,avg_turns,buffer_size,flushed"


class TrainerError(DialogsimError):
    pass


@dataclass
class TrainerConfig:
    gamma: float = 0.9
    epsilon: float = 0.1
    batch_size: int = 16
    num_batches: int = 100
    simulation_epoch_size: int = 16
    epochs: int = 100
    success_rate_threshold: float = 0.30
    buffer_capacity: int = 5000
    learning_rate: float = 0.01
    hidden_width: int = 80
    warm_start: str = "rule-fill"
    grad_clip: float = 1.0
    eval_episodes: int = 50

    def __post_init__(self):
        if not 0.0 <= self.gamma < 1.0:
            raise TrainerError("gamma must be in [0, 1)")
        if not 0.0 <= self.epsilon <= 1.0:
            raise TrainerError("epsilon must be in [0, 1]")
        for name in (
            "batch_size",
            "num_batches",
            "buffer_capacity",
            "hidden_width",
            "eval_episodes",
        ):
            if getattr(self, name) <= 0:
                raise TrainerError(f"{name} must be positive")
        if self.simulation_epoch_size < 0 or self.epochs < 0:
            raise TrainerError("simulation_epoch_size and epochs must be >= 0")
        if self.learning_rate <= 0:
            raise TrainerError("learning_rate must be positive")
        if self.warm_start not in ("off", "rule-fill"):
            raise TrainerError("warm_start must be 'off' or 'rule-fill'")


@dataclass
class EvalMetrics:
    success_rate: float
    avg_reward: float
    avg_turns: float


@dataclass
class EpochMetrics:
    epoch: int
    success_rate: float
    avg_reward: float
    avg_turns: float
    buffer_size: int
    flushed: bool
    loss: float = 0.0

    def csv_row(self) -> str:
        return (
            f"{self.epoch},{self.success_rate:.6f},{self.avg_reward:.6f},"
            f"{self.avg_turns:.6f},{self.buffer_size},{int(self.flushed)}"
        )


def evaluate(
    agent, env: DialogueEnv, episodes: int, greedy: bool = True,
    rng: random.Random | None = None,
) -> EvalMetrics:
    """Runs evaluation episodes (epsilon forced to 0 when greedy); never
    records experiences."""
    if episodes < 1:
        raise TrainerError("evaluate needs at least one episode")
    rng = rng or random.Random(0)
    saved_eps = getattr(agent, "epsilon", None)
    if greedy and saved_eps is not None:
        agent.epsilon = 0.0
    try:
        successes, rewards, turns = 0, 0.0, 0
        for _ in range(episodes):
            outcome, total_reward = run_episode(env, agent, rng)
            if outcome.status is DialogueStatus.SUCCESS:
                successes += 1
            rewards += total_reward
            turns += outcome.total_turns
        return EvalMetrics(
            success_rate=successes / episodes,
            avg_reward=rewards / episodes,
            avg_turns=turns / episodes,
        )
    finally:
        if saved_eps is not None:
            agent.epsilon = saved_eps


def compute_upper_bound(goal_db: GoalDatabase, kb: MovieKB) -> float:
    """Fraction of goals in the database reachable against the KB; the ceiling
    on any agent's success rate."""
    if not goal_db.goals:
        raise TrainerError("goal database is empty")
    reachable = sum(1 for goal in goal_db.goals if kb.satisfiable(goal))
    return reachable / len(goal_db.goals)


class Trainer:
    def __init__(self, env: DialogueEnv, agent: DQNAgent, config: TrainerConfig,
                 seed: int = 0):
        self.env = env
        self.agent = agent
        self.config = config
        self.seed = seed
        self._stream = 0
        self.crossed_threshold = False
        self.best_rate = 0.0
        self.metrics: list[EpochMetrics] = []

    def _next_rng(self) -> random.Random:
        rng = derive_rng(self.seed, self._stream)
        self._stream += 1
        return rng

    # ----- simulation -------------------------------------------------------

    def _simulate_episode(self, collect: bool = True):
        rng = self._next_rng()
        self.agent.initialize_episode()
        self.env.reset(rng)
        state = self.env.state_vector()
        while not self.env.done:
            action = self.agent.run_policy(state, rng)
            next_state, reward, done, _ = self.env.step(action)
            if collect:
                self.agent.buffer.append(Experience(state, action, reward, next_state, done))
            state = next_state

    def warm_start_fill(self, max_episodes: int | None = None) -> int:
        """Pre-fills the pool with rule-walk experiences before training."""
        if self.config.warm_start != "rule-fill":
            return 0
        limit = max_episodes or self.config.buffer_capacity
        episodes = 0
        while not self.agent.buffer.full and episodes < limit:
            self._simulate_episode(collect=True)
            episodes += 1
        if self.agent.buffer.full:
            self.agent.warm_start = WARM_START_DONE
        return episodes

    def _refill(self):
        """Re-seeds the flushed pool with one epoch's worth of fresh dialogues
        from the current agent; subsequent epochs keep growing it."""
        for _ in range(max(1, self.config.simulation_epoch_size)):
            self._simulate_episode(collect=True)

    # ----- epochs ----------------------------------------------------------

    def evaluate_policy(self) -> EvalMetrics:
        """Greedy evaluation used for the flush decision (and the curve)."""
        return evaluate(
            self.agent, self.env, self.config.eval_episodes,
            greedy=True, rng=self._next_rng(),
        )

    def run_training_epoch(self) -> EpochMetrics:
        cfg = self.config
        for _ in range(cfg.simulation_epoch_size):
            self._simulate_episode(collect=True)
        if len(self.agent.buffer) == 0:
            raise TrainerError(
                "empty replay pool at training time (warm start off and N=0?)"
            )
        loss = self.agent.train(self._next_rng())
        self.agent.update_target()

        stats = self.evaluate_policy()
        flushed = False
        rate = stats.success_rate
        if not self.crossed_threshold:
            if rate >= cfg.success_rate_threshold:
                self.crossed_threshold = True
                self.best_rate = rate
                self.agent.buffer.flush()
                self._refill()
                flushed = True
        elif rate > self.best_rate:
            self.best_rate = rate
            self.agent.buffer.flush()
            self._refill()
            flushed = True

        entry = EpochMetrics(
            epoch=len(self.metrics) + 1,
            success_rate=rate,
            avg_reward=stats.avg_reward,
            avg_turns=stats.avg_turns,
            buffer_size=len(self.agent.buffer),
            flushed=flushed,
            loss=loss,
        )
        self.metrics.append(entry)
        return entry

    def train(self, epochs: int | None = None, curve_path=None, stop_fn=None):
        """Runs warm start plus training epochs, streaming the learning curve
        CSV when a path is given. stop_fn(metrics_list) may end training early."""
        epochs = self.config.epochs if epochs is None else epochs
        writer = open(curve_path, "w", encoding="utf-8") if curve_path else None
        try:
            if writer:
                writer.write(CURVE_HEADER + "\n")
                writer.flush()
            self.warm_start_fill()
            for _ in range(epochs):
                entry = self.run_training_epoch()
                if writer:
                    writer.write(entry.csv_row() + "\n")
                    writer.flush()
                if stop_fn is not None and stop_fn(self.metrics):
                    break
        finally:
            if writer:
                writer.close()
        return self.metrics
