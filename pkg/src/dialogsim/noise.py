"""Error model simulating NLU noise on user acts.

Two independent channels: intent substitution, and per-inform-slot corruption
in one of three modes (wrong value, wrong slot+value, deletion). Request slots
are never touched. corrupt() is pure: the input act is never mutated and the
output is fully determined by the rng state.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .core import (
    TASKCOMPLETE,
    DialogAct,
    DialogsimError,
    DomainSchema,
    SPEAKER_USER,
    normalize_value,
)
from .kb import MovieKB

MODE_VALUE = "value"
MODE_SLOT = "slot"
MODE_DELETE = "delete"
MODE_MIXED = "mixed"
SLOT_ERR_MODES = (MODE_VALUE, MODE_SLOT, MODE_DELETE, MODE_MIXED)


class NoiseError(DialogsimError):
    pass


@dataclass
class ErrorModelConfig:
    intent_err_prob: float = 0.0
    slot_err_prob: float = 0.0
    slot_err_mode: str = MODE_MIXED
    enabled: bool = True

    def __post_init__(self):
        for name in ("intent_err_prob", "slot_err_prob"):
            prob = getattr(self, name)
            if not 0.0 <= prob <= 1.0:
                raise NoiseError(f"{name} must be in [0, 1], got {prob}")
        if self.slot_err_mode not in SLOT_ERR_MODES:
            raise NoiseError(f"unknown slot_err_mode {self.slot_err_mode!r}")


def _other_value(kb: MovieKB, slot: str, value: str, rng: random.Random) -> str | None:
    choices = [v for v in kb.vocabulary(slot) if normalize_value(v) != normalize_value(value)]
    return rng.choice(choices) if choices else None


def corrupt(
    act: DialogAct,
    cfg: ErrorModelConfig,
    schema: DomainSchema,
    kb: MovieKB,
    rng: random.Random,
) -> DialogAct:
    """Returns a possibly corrupted copy of a user act (the input act when no
    channel fires)."""
    if act.speaker != SPEAKER_USER:
        raise NoiseError("only user acts pass through the error model")
    if not cfg.enabled:
        return act

    intent = act.intent
    if cfg.intent_err_prob > 0 and rng.random() < cfg.intent_err_prob:
        others = [i for i in schema.intents if i != act.intent]
        intent = rng.choice(others)

    inform_slots = dict(act.inform_slots)
    if cfg.slot_err_prob > 0:
        for slot in list(act.inform_slots):
            if rng.random() >= cfg.slot_err_prob:
                continue
            mode = cfg.slot_err_mode
            if mode == MODE_MIXED:
                mode = rng.choice((MODE_VALUE, MODE_SLOT, MODE_DELETE))
            if mode == MODE_VALUE:
                if kb.vocabulary_size() == 0:
                    raise NoiseError("value-mode noise needs a non-empty KB vocabulary")
                replacement = _other_value(kb, slot, inform_slots[slot], rng)
                if replacement is not None:
                    inform_slots[slot] = replacement
            elif mode == MODE_SLOT:
                candidates = [
                    s
                    for s in schema.informable_regular_slots
                    if s != slot and s not in inform_slots and s not in act.request_slots
                ]
                if candidates:
                    new_slot = rng.choice(candidates)
                    vocab = kb.vocabulary(new_slot)
                    new_value = rng.choice(vocab) if vocab else inform_slots[slot]
                    del inform_slots[slot]
                    inform_slots[new_slot] = new_value
            else:
                del inform_slots[slot]

    if intent == act.intent and inform_slots == act.inform_slots:
        return act
    return DialogAct(
        speaker=act.speaker,
        intent=intent,
        inform_slots=inform_slots,
        request_slots=dict(act.request_slots),
        turn=act.turn,
        nl=act.nl,
    )
