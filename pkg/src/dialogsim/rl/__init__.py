"""Q-learning: network kernels, experience replay, DQN agent, training loop."""

from .backend import BACKEND
from .qnet import QNetwork
from .replay import Experience, ReplayBuffer
from .agent_dqn import DQNAgent
from .trainer import (
    EpochMetrics,
    EvalMetrics,
    Trainer,
    TrainerConfig,
    compute_upper_bound,
    evaluate,
)

__all__ = [
    "BACKEND",
    "QNetwork",
    "Experience",
    "ReplayBuffer",
    "DQNAgent",
    "Trainer",
    "TrainerConfig",
    "EpochMetrics",
    "EvalMetrics",
    "compute_upper_bound",
    "evaluate",
]
