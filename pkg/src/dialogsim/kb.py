"""Movie knowledge base: constraint queries, suggested values, goal satisfiability."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .core import (
    NON_QUERY_SLOTS,
    TASKCOMPLETE,
    WILDCARD,
    DialogsimError,
    DomainSchema,
    UserGoal,
    normalize_value,
)


class KBError(DialogsimError):
    pass


@dataclass
class QueryResult:
    """Matching record ids plus, per constrained slot, the match count when
    that slot's constraint is dropped."""

    matches: list[int]
    per_slot_counts: dict[str, int]


class MovieKB:
    """Immutable store of showing records; values compared case-insensitively
    after whitespace trimming. Records missing a constrained slot do not match;
    the wildcard value matches everything."""

    def __init__(self, records: list[dict], schema: DomainSchema):
        self.schema = schema
        self.records: list[dict] = []
        for rid, raw in enumerate(records):
            if not isinstance(raw, dict):
                raise KBError(f"record {rid} is not an object")
            record = {}
            for slot, value in raw.items():
                if slot == TASKCOMPLETE:
                    raise KBError(f"record {rid} uses reserved slot {slot!r}")
                if not schema.is_informable(slot):
                    raise KBError(f"record {rid} has non-informable slot {slot!r}")
                value = str(value)
                if not value.strip():
                    raise KBError(f"record {rid} has empty value for {slot!r}")
                record[slot] = value
            self.records.append(record)
        # slot -> normalized value -> set of record ids
        self._index: dict[str, dict[str, set[int]]] = {}
        # slot -> distinct original-case values in first-seen order
        self._vocab: dict[str, list[str]] = {}
        for rid, record in enumerate(self.records):
            for slot, value in record.items():
                norm = normalize_value(value)
                self._index.setdefault(slot, {}).setdefault(norm, set()).add(rid)
                vocab = self._vocab.setdefault(slot, [])
                if norm not in {normalize_value(v) for v in vocab}:
                    vocab.append(value)
        self._all_ids = set(range(len(self.records)))

    def __len__(self) -> int:
        return len(self.records)

    def vocabulary(self, slot: str) -> list[str]:
        """Distinct values of a slot across all records, first-seen order."""
        return list(self._vocab.get(slot, []))

    def vocabulary_size(self) -> int:
        return sum(len(v) for v in self._vocab.values())

    def _check_slot(self, slot: str):
        if not self.schema.has_slot(slot):
            raise KBError(f"unknown slot {slot!r}")
        if not self.schema.is_informable(slot):
            raise KBError(f"slot {slot!r} is not informable")

    def _ids_for(self, slot: str, value: str) -> set[int]:
        return self._index.get(slot, {}).get(normalize_value(value), set())

    def query(self, constraints: dict) -> QueryResult:
        active = {}
        for slot, value in constraints.items():
            self._check_slot(slot)
            if normalize_value(value) != WILDCARD:
                active[slot] = value
        matched = set(self._all_ids)
        for slot, value in active.items():
            matched &= self._ids_for(slot, value)
        counts = {}
        for slot in constraints:
            if slot not in active:
                counts[slot] = len(matched)
                continue
            dropped = set(self._all_ids)
            for other, value in active.items():
                if other != slot:
                    dropped &= self._ids_for(other, value)
            counts[slot] = len(dropped)
        return QueryResult(matches=sorted(matched), per_slot_counts=counts)

    def suggest_values(self, slot: str, constraints: dict) -> list[str]:
        """Distinct values of `slot` over matching records, first-seen order."""
        self._check_slot(slot)
        values: list[str] = []
        seen: set[str] = set()
        for rid in self.query(constraints).matches:
            value = self.records[rid].get(slot)
            if value is None:
                continue
            norm = normalize_value(value)
            if norm not in seen:
                seen.add(norm)
                values.append(value)
        return values

    def queryable_constraints(self, constraints: dict) -> dict:
        """Drops slots that never constrain a search (party size, reserved)."""
        return {s: v for s, v in constraints.items() if s not in NON_QUERY_SLOTS}

    def satisfiable(self, goal: UserGoal) -> bool:
        """True when some record meets the goal constraints and every
        requested slot other than the ticket is defined on a matching record."""
        result = self.query(self.queryable_constraints(goal.inform_slots))
        if not result.matches:
            return False
        for slot in goal.request_slots:
            if slot in NON_QUERY_SLOTS:
                continue
            if not any(slot in self.records[rid] for rid in result.matches):
                return False
        return True


def load_kb(path: str | Path, schema: DomainSchema) -> MovieKB:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise KBError(f"cannot parse KB file {path}: {exc}") from exc
    if not isinstance(data, list):
        raise KBError("KB file must be a JSON array of records")
    return MovieKB(data, schema)
