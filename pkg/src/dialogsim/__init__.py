"""Movie-booking dialogue simulation framework.

An agenda-based user simulator with a configurable NLU-noise error model, a
knowledge-base-backed state tracker, rule-based and DQN agents, a training and
evaluation harness, and an HTTP session service for playing the agent side by
hand.
"""

from importlib import resources

from .core import (
    DialogAct,
    DialogueStatus,
    DomainSchema,
    UserGoal,
    load_schema,
    validate_act,
    validate_goal,
)
from .kb import MovieKB, QueryResult, load_kb
from .corpus import GoalDatabase, load_corpus, load_goal_db
from .usersim import RuleUserSimulator, UserState, EpisodeOutcome
from .noise import ErrorModelConfig, corrupt
from .dst import StateTracker, DialogState
from .env import DialogueEnv, run_episode

__version__ = "0.1.0"


def data_path(name: str):
    """Path to one of the packaged data files (schema, KB, goals, templates,
    corpus)."""
    return resources.files("dialogsim").joinpath("data", name)


__all__ = [
    "DialogAct",
    "DialogueStatus",
    "DomainSchema",
    "UserGoal",
    "load_schema",
    "validate_act",
    "validate_goal",
    "MovieKB",
    "QueryResult",
    "load_kb",
    "GoalDatabase",
    "load_corpus",
    "load_goal_db",
    "RuleUserSimulator",
    "UserState",
    "EpisodeOutcome",
    "ErrorModelConfig",
    "corrupt",
    "StateTracker",
    "DialogState",
    "DialogueEnv",
    "run_episode",
    "data_path",
]
