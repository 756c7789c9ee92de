"""Command-line runner: wires simulator, agents, noise, NLG, and the trainer.

Flag surface follows the run.py convention: --agt selects the agent (0 human,
1..5 rule agents, 9 DQN), --usr 1 is the rule simulator, error probabilities
and file paths ride on long-form flags. Repeated flags keep the last value.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import data_path
from .agents import AGT_FLAG_KINDS, CommandLineAgent, make_rule_agent
from .core import (
    SPEAKER_USER,
    DialogAct,
    DialogsimError,
    DialogueStatus,
    derive_rng,
    format_act_string,
    load_schema,
)
from .corpus import load_goal_db
from .env import DialogueEnv, run_episode
from .kb import load_kb
from .nlg import load_templates, render
from .noise import MODE_MIXED, SLOT_ERR_MODES, ErrorModelConfig
from .rl import DQNAgent, Trainer, TrainerConfig, compute_upper_bound, evaluate

RUN_MODE_NL = 0
RUN_MODE_ACTS = 1
RUN_MODE_QUIET = 2


@dataclass
class RunConfig:
    agt: int = 5
    usr: int = 1
    max_turn: int = 0  # 0 keeps the schema's value
    episodes: int = 100
    epochs: int = 50
    schema_path: str = ""
    movie_kb_path: str = ""
    goal_file_path: str = ""
    template_path: str = ""
    slot_err_prob: float = 0.0
    intent_err_prob: float = 0.0
    slot_err_mode: str = MODE_MIXED
    act_level: int = 0
    run_mode: int = RUN_MODE_NL
    cmd_input_mode: int | None = None
    gamma: float = 0.9
    epsilon: float = 0.1
    batch_size: int = 16
    num_batches: int = 100
    simulation_epoch_size: int = 16
    success_rate_threshold: float = 0.30
    buffer_capacity: int = 5000
    learning_rate: float = 0.01
    hidden_width: int = 80
    warm_start: int = 1
    eval_episodes: int = 50
    seed: int = 0
    curve_csv_path: str = ""
    checkpoint_path: str = ""
    transcript_log_path: str = ""

    def validate(self):
        if self.agt not in (0, 9) and self.agt not in AGT_FLAG_KINDS:
            raise DialogsimError(f"unknown --agt value {self.agt}")
        if self.usr != 1:
            raise DialogsimError("only --usr 1 (rule simulator) is supported")
        if self.cmd_input_mode is not None and self.agt != 0:
            raise DialogsimError("--cmd_input_mode only applies to --agt 0")
        if self.act_level not in (0, 1):
            raise DialogsimError("--act_level must be 0 or 1")
        if self.run_mode not in (RUN_MODE_NL, RUN_MODE_ACTS, RUN_MODE_QUIET):
            raise DialogsimError("--run_mode must be 0, 1 or 2")
        if self.slot_err_mode not in SLOT_ERR_MODES:
            raise DialogsimError(f"--slot_err_mode must be one of {SLOT_ERR_MODES}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dialogsim",
        description="Movie-booking dialogue simulation: run agents against the "
        "user simulator or train the DQN agent.",
    )
    add = parser.add_argument
    add("--agt", type=int, default=5, help="0 human, 1..5 rule agents, 9 DQN")
    add("--usr", type=int, default=1, help="user selector (1 = rule simulator)")
    add("--max_turn", type=int, default=0, help="override the schema's turn limit")
    add("--episodes", type=int, default=100,
        help="dialogue count for rule/human runs and the final DQN evaluation; 0 disables the run")
    add("--epochs", type=int, default=50, help="training epochs for --agt 9")
    add("--schema_path", default=str(data_path("schema.json")))
    add("--movie_kb_path", default=str(data_path("movie_kb.json")))
    add("--goal_file_path", default=str(data_path("user_goals.json")))
    add("--template_path", default=str(data_path("templates.json")))
    add("--slot_err_prob", type=float, default=0.0)
    add("--intent_err_prob", type=float, default=0.0)
    add("--slot_err_mode", default=MODE_MIXED, choices=SLOT_ERR_MODES)
    add("--act_level", type=int, default=0, help="0 dialog acts, 1 utterance channel")
    add("--run_mode", type=int, default=0, help="0 print NL, 1 print acts, 2 quiet")
    add("--cmd_input_mode", type=int, default=None, help="0 NL input, 1 act input (agt 0)")
    add("--gamma", type=float, default=0.9)
    add("--epsilon", type=float, default=0.1)
    add("--batch_size", type=int, default=16)
    add("--num_batches", type=int, default=100)
    add("--simulation_epoch_size", type=int, default=16)
    add("--success_rate_threshold", type=float, default=0.30)
    add("--buffer_capacity", type=int, default=5000)
    add("--learning_rate", type=float, default=0.01)
    add("--hidden_width", type=int, default=80)
    add("--warm_start", type=int, default=1, help="0 off, 1 rule-fill")
    add("--eval_episodes", type=int, default=50, help="greedy episodes per epoch")
    add("--seed", type=int, default=0)
    add("--curve_csv_path", default="", help="learning-curve CSV output")
    add("--checkpoint_path", default="", help="trained-model output")
    add("--transcript_log_path", default="", help="line-delimited JSON act log")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(**{f.name: getattr(args, f.name) for f in dataclasses.fields(RunConfig)})


def _load_assets(config: RunConfig):
    schema = load_schema(config.schema_path)
    if config.max_turn:
        schema = dataclasses.replace(schema, max_turn=config.max_turn)
    kb = load_kb(config.movie_kb_path, schema)
    goal_db = load_goal_db(config.goal_file_path, schema)
    templates = load_templates(config.template_path, schema)
    templates.attach_lexicon(kb)
    return schema, kb, goal_db, templates


def _make_env(config: RunConfig, schema, kb, goal_db, templates) -> DialogueEnv:
    noise = ErrorModelConfig(
        intent_err_prob=config.intent_err_prob,
        slot_err_prob=config.slot_err_prob,
        slot_err_mode=config.slot_err_mode,
    )
    return DialogueEnv(
        schema, kb, goal_db,
        noise_cfg=noise,
        act_level=config.act_level,
        templates=templates,
    )


class _TranscriptLog:
    def __init__(self, path: str):
        self._fh = open(path, "w", encoding="utf-8") if path else None

    def write(self, episode: int, act: DialogAct):
        if self._fh:
            self._fh.write(json.dumps({"episode": episode, **act.to_dict()}) + "\n")

    def close(self):
        if self._fh:
            self._fh.close()


def _print_turn(act: DialogAct, run_mode: int, templates):
    if run_mode == RUN_MODE_QUIET:
        return
    who = "usr" if act.speaker == SPEAKER_USER else "sys"
    if run_mode == RUN_MODE_NL:
        surface = act.nl if act.nl is not None else render(act, templates)
        print(f"Turn {act.turn} {who}: {surface}")
    else:
        print(f"Turn {act.turn} {who}: {format_act_string(act)}")


def _goal_dump(goal) -> str:
    shaped = {
        "request_slots": dict(goal.request_slots),
        "diaact": "request",
        "inform_slots": dict(goal.inform_slots),
    }
    return json.dumps(shaped, indent=2)


def _run_rule_episodes(config: RunConfig, env: DialogueEnv, templates) -> int:
    agent = make_rule_agent(
        AGT_FLAG_KINDS[config.agt], env.schema, rng=derive_rng(config.seed, 999_983)
    )
    log = _TranscriptLog(config.transcript_log_path)
    successes, total_reward, total_turns = 0, 0.0, 0
    try:
        for episode in range(config.episodes):
            outcome, reward = run_episode(env, agent, derive_rng(config.seed, episode))
            for act in outcome.transcript:
                _print_turn(act, config.run_mode, templates)
                log.write(episode, act)
            if outcome.status is DialogueStatus.SUCCESS:
                successes += 1
                if config.run_mode != RUN_MODE_QUIET:
                    print("Successful Dialog!")
            elif config.run_mode != RUN_MODE_QUIET:
                print("Failed Dialog!")
            total_reward += reward
            total_turns += outcome.total_turns
    finally:
        log.close()
    episodes = max(1, config.episodes)
    print(
        f"episodes {config.episodes} success_rate {successes / episodes:.4f} "
        f"avg_reward {total_reward / episodes:.4f} avg_turns {total_turns / episodes:.4f}"
    )
    return 0


def _run_interactive(config: RunConfig, env: DialogueEnv, templates) -> int:
    input_mode = 1 if config.cmd_input_mode is None else config.cmd_input_mode
    agent = CommandLineAgent(env.schema, input_mode=input_mode, templates=templates)
    for episode in range(config.episodes):
        agent.initialize_episode()
        first = env.reset(derive_rng(config.seed, episode))
        print("New episode, user goal:")
        print(_goal_dump(env.user_state.goal))
        _print_turn(first, config.run_mode, templates)
        _print_suggestions(env, first)
        while not env.done:
            response = agent.state_to_action(env.dialog_state())
            try:
                user_act, _, done, status = env.step_act(response.act_slot_response)
            except DialogsimError as exc:
                print(f"(rejected: {exc})")
                continue
            _print_turn(env.tracker.last_agent_act, config.run_mode, templates)
            if user_act is not None:
                _print_turn(user_act, config.run_mode, templates)
                _print_suggestions(env, user_act)
            if done:
                print(
                    "Successful Dialog!"
                    if status is DialogueStatus.SUCCESS
                    else "Failed Dialog!"
                )
    return 0


def _print_suggestions(env: DialogueEnv, user_act: DialogAct):
    if not user_act.request_slots:
        return
    suggestions = env.tracker.suggestions_for(user_act.request_slots)
    if any(suggestions.values()):
        print(f"(Suggested Values: {suggestions})")


def _run_training(config: RunConfig, env: DialogueEnv) -> int:
    trainer_cfg = TrainerConfig(
        gamma=config.gamma,
        epsilon=config.epsilon,
        batch_size=config.batch_size,
        num_batches=config.num_batches,
        simulation_epoch_size=config.simulation_epoch_size,
        epochs=config.epochs,
        success_rate_threshold=config.success_rate_threshold,
        buffer_capacity=config.buffer_capacity,
        learning_rate=config.learning_rate,
        hidden_width=config.hidden_width,
        warm_start="rule-fill" if config.warm_start else "off",
        eval_episodes=config.eval_episodes,
    )
    agent = DQNAgent(env.schema, trainer_cfg, seed=config.seed)
    trainer = Trainer(env, agent, trainer_cfg, seed=config.seed)
    epochs = 0 if config.episodes == 0 else config.epochs
    curve_path = config.curve_csv_path or None

    def report(metrics):
        if config.run_mode != RUN_MODE_QUIET:
            m = metrics[-1]
            print(
                f"epoch {m.epoch} success_rate {m.success_rate:.4f} "
                f"avg_reward {m.avg_reward:.2f} avg_turns {m.avg_turns:.2f} "
                f"buffer {m.buffer_size} flushed {int(m.flushed)}"
            )
        return False

    trainer.train(epochs=epochs, curve_path=curve_path, stop_fn=report)
    upper = compute_upper_bound(env.sim.goal_db, env.kb)
    print(f"upper_bound {upper:.4f}")
    if config.episodes > 0 and epochs > 0:
        final = evaluate(
            agent, env, config.episodes, greedy=True,
            rng=derive_rng(config.seed, 10_000_019),
        )
        print(
            f"final success_rate {final.success_rate:.4f} "
            f"avg_reward {final.avg_reward:.4f} avg_turns {final.avg_turns:.4f}"
        )
    if config.checkpoint_path:
        agent.save(config.checkpoint_path)
    return 0


def run(config: RunConfig) -> int:
    config.validate()
    schema, kb, goal_db, templates = _load_assets(config)
    env = _make_env(config, schema, kb, goal_db, templates)
    if config.agt == 0:
        return _run_interactive(config, env, templates)
    if config.agt == 9:
        return _run_training(config, env)
    return _run_rule_episodes(config, env, templates)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run(config_from_args(args))
    except DialogsimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
