"""Template-based natural language generation and its inverse parser.

Templates are keyed by (speaker, intent, inform slot names, request slot
names); placeholders look like $slot$. Entries may additionally pin exact
values (e.g. the "I do not care" wildcard phrasings), which lets one key carry
value-conditional surface forms. Acts without a template fall back to a
deterministic clause composition that the parser also understands, so the
utterance channel is available for every act the system can emit.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from .core import (
    SPEAKER_AGENT,
    SPEAKER_USER,
    UNK,
    DialogAct,
    DialogsimError,
    DomainSchema,
    normalize_value,
    validate_act,
)
from .kb import MovieKB


class NLGError(DialogsimError):
    pass


_PLACEHOLDER_RE = re.compile(r"\$([a-z_]+)\$")

# Verb phrases for the fallback composition, one per intent.
_INTENT_PHRASES = {
    "request": "May I ask",
    "inform": "Let me tell you",
    "confirm_question": "Just to confirm",
    "confirm_answer": "Yes, that is right",
    "deny": "No, that is wrong",
    "thanks": "Thank you kindly",
    "closing": "That will be all",
    "multiple_choice": "Here are some options",
    "greeting": "Hello there",
    "not_sure": "I am not sure",
    "welcome": "You are welcome",
}


def _intent_phrase(intent: str) -> str:
    return _INTENT_PHRASES.get(intent, intent.replace("_", " "))


@dataclass
class TemplateEntry:
    speaker: str
    intent: str
    inform_slots: tuple[str, ...]
    request_slots: tuple[str, ...]
    template: str
    values: dict = field(default_factory=dict)

    @property
    def key(self) -> tuple:
        return (self.speaker, self.intent, self.inform_slots, self.request_slots)

    def __post_init__(self):
        placeholders = set(_PLACEHOLDER_RE.findall(self.template))
        free = set(self.inform_slots) - set(self.values)
        if placeholders != free:
            raise NLGError(
                f"template {self.template!r} placeholders {sorted(placeholders)} "
                f"must cover exactly the non-fixed inform slots {sorted(free)}"
            )
        pattern = ""
        pos = 0
        for match in _PLACEHOLDER_RE.finditer(self.template):
            pattern += re.escape(self.template[pos : match.start()])
            pattern += f"(?P<{match.group(1)}>.+?)"
            pos = match.end()
        pattern += re.escape(self.template[pos:])
        self._regex = re.compile(pattern)
        self._skeleton_len = len(_PLACEHOLDER_RE.sub("", self.template))
        self._exact = not placeholders

    def try_parse(self, text: str) -> dict | None:
        match = self._regex.fullmatch(text)
        if match is None:
            return None
        captured = {k: v.strip() for k, v in match.groupdict().items()}
        if any(not v for v in captured.values()):
            return None
        captured.update(self.values)
        return captured


class TemplateSet:
    def __init__(self, entries: list[TemplateEntry]):
        self.entries = entries
        self._by_key: dict[tuple, list[TemplateEntry]] = {}
        for entry in entries:
            self._by_key.setdefault(entry.key, []).append(entry)
        # Value-conditional entries take priority within a key.
        for group in self._by_key.values():
            group.sort(key=lambda e: not e.values)
        self.lexicon: dict[str, set] = {}

    def attach_lexicon(self, kb: MovieKB):
        """Known slot values used to disambiguate colliding surface forms."""
        self.lexicon = {
            slot: {normalize_value(v) for v in kb.vocabulary(slot)}
            for slot in kb.schema.informable_slots
        }

    def entries_for(self, key: tuple) -> list[TemplateEntry]:
        return self._by_key.get(key, [])


def load_templates(path: str | Path, schema: DomainSchema) -> TemplateSet:
    """Loads entries, silently skipping ones that reference intents or slots
    the schema does not define (one template file can serve subset domains)."""
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise NLGError(f"cannot parse template file {path}: {exc}") from exc
    entries = []
    for raw in data:
        intent = raw["intent"]
        informs = tuple(sorted(raw.get("inform_slots", [])))
        requests = tuple(sorted(raw.get("request_slots", [])))
        if not schema.has_intent(intent):
            continue
        if any(not schema.has_slot(s) for s in informs + requests):
            continue
        entries.append(
            TemplateEntry(
                speaker=raw["speaker"],
                intent=intent,
                inform_slots=informs,
                request_slots=requests,
                template=raw["template"],
                values=dict(raw.get("values", {})),
            )
        )
    return TemplateSet(entries)


def _act_key(act: DialogAct) -> tuple:
    return (
        act.speaker,
        act.intent,
        tuple(sorted(act.inform_slots)),
        tuple(sorted(act.request_slots)),
    )


def render(act: DialogAct, templates: TemplateSet) -> str:
    """Surface form of an act: exact template when the key is known, the
    deterministic fallback composition otherwise."""
    for entry in templates.entries_for(_act_key(act)):
        if entry.values and not all(
            normalize_value(act.inform_slots.get(s, "")) == normalize_value(v)
            for s, v in entry.values.items()
        ):
            continue
        text = entry.template
        for slot, value in act.inform_slots.items():
            text = text.replace(f"${slot}$", str(value))
        if _PLACEHOLDER_RE.search(text):
            raise NLGError(f"unfilled placeholder rendering {act.intent}: {text!r}")
        return text
    return _fallback_render(act)


def _fallback_render(act: DialogAct) -> str:
    clauses = [f"{slot} is {value}" for slot, value in act.inform_slots.items()]
    clauses += [f"requesting {slot}" for slot in act.request_slots]
    phrase = _intent_phrase(act.intent)
    if not clauses:
        return f"{phrase}."
    return f"{phrase}: " + "; ".join(clauses) + "."


_FALLBACK_RE = re.compile(r"^(?P<phrase>[^:.]+)(?::\s(?P<body>.+))?\.$")


# Slot-filling over composite clauses is where an NLU degrades first: the
# clause parser keeps at most this many inform pairs per utterance, so crowded
# fallback surfaces lose information on the way back to acts.
_FALLBACK_INFORM_CAP = 2


def _fallback_parse(text: str, schema: DomainSchema, speaker: str) -> DialogAct | None:
    match = _FALLBACK_RE.fullmatch(text.strip())
    if match is None:
        return None
    phrase_to_intent = {_intent_phrase(i): i for i in schema.intents}
    intent = phrase_to_intent.get(match.group("phrase").strip())
    if intent is None:
        return None
    inform_slots: dict = {}
    request_slots: dict = {}
    body = match.group("body")
    if body:
        for clause in body.split("; "):
            if clause.startswith("requesting "):
                request_slots[clause[len("requesting ") :].strip()] = UNK
            elif " is " in clause:
                if len(inform_slots) >= _FALLBACK_INFORM_CAP:
                    continue
                slot, value = clause.split(" is ", 1)
                inform_slots[slot.strip()] = value.strip()
            else:
                return None
    act = DialogAct(
        speaker, intent, inform_slots, request_slots,
        turn=0 if speaker == SPEAKER_USER else 1,
    )
    if validate_act(schema, act):
        return None
    return act


def parse_nl(
    utterance: str,
    templates: TemplateSet,
    schema: DomainSchema,
    speaker: str | None = None,
) -> DialogAct | None:
    """Reconstructs an act from a surface string, or None when nothing matches.

    Candidates are ranked by: exact (placeholder-free) entries first, then how
    many captured values are known lexicon members for their slot, then the
    longest literal skeleton, then declaration order. Passing a speaker
    restricts matching to that side's templates; the provisional turn stamp
    (0 user, 1 agent) is the caller's to overwrite.
    """
    text = utterance.strip()
    if not text:
        return None
    best = None
    best_rank = None
    for decl_index, entry in enumerate(templates.entries):
        if speaker is not None and entry.speaker != speaker:
            continue
        captured = entry.try_parse(text)
        if captured is None:
            continue
        score = 0
        for slot, value in captured.items():
            known = templates.lexicon.get(slot)
            if known and normalize_value(value) in known:
                score += 1
        rank = (1 if entry._exact else 0, score, entry._skeleton_len, -decl_index)
        if best_rank is None or rank > best_rank:
            act = DialogAct(
                speaker=entry.speaker,
                intent=entry.intent,
                inform_slots=captured,
                request_slots={s: UNK for s in entry.request_slots},
                turn=0 if entry.speaker == SPEAKER_USER else 1,
            )
            if validate_act(schema, act):
                continue
            best, best_rank = act, rank
    if best is not None:
        return best
    for side in (SPEAKER_USER, SPEAKER_AGENT) if speaker is None else (speaker,):
        act = _fallback_parse(text, schema, side)
        if act is not None:
            return act
    return None
