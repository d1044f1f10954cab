"""Append-only log of pairwise transaction ratings.

The event list is the source of truth. ``index`` keeps running totals per
(rater, ratee) pair so current aggregates are O(1); time-bounded queries
fall back to scanning the log.
"""

from __future__ import annotations

import json
from collections.abc import Iterable
from dataclasses import dataclass, field
from pathlib import Path

from trustnet.core import RatingVector
from trustnet.errors import LedgerError, LedgerFormatError

SUCCESS = "S"
FAILURE = "U"
_FIELDS = ("rater", "ratee", "outcome", "t")


@dataclass(frozen=True)
class RatingEvent:
    rater: str
    ratee: str
    outcome: str
    t: int = 0

    def __post_init__(self) -> None:
        if self.rater == self.ratee:
            raise LedgerError(f"agent {self.rater!r} cannot rate itself")
        if self.outcome not in (SUCCESS, FAILURE):
            raise LedgerError(f"outcome must be 'S' or 'U', got {self.outcome!r}")
        if isinstance(self.t, bool) or not isinstance(self.t, int) or self.t < 0:
            raise LedgerError(f"timestamp must be a non-negative integer, got {self.t!r}")

    @property
    def successful(self) -> bool:
        return self.outcome == SUCCESS

    def as_vector(self) -> RatingVector:
        return RatingVector(1, 0) if self.successful else RatingVector(0, 1)


@dataclass
class Ledger:
    events: list[RatingEvent] = field(default_factory=list)
    index: dict[tuple[str, str], RatingVector] = field(default_factory=dict)
    _last_tick: dict[tuple[str, str], int] = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def from_events(cls, events: Iterable[RatingEvent]) -> Ledger:
        ledger = cls()
        for event in events:
            ledger.record(event)
        return ledger

    def record(self, event: RatingEvent) -> Ledger:
        """Append ``event`` and bump the pair's running total.

        Raises:
            LedgerError: if the event's timestamp precedes the last one
                recorded for the same (rater, ratee) pair.
        """
        pair = (event.rater, event.ratee)
        last = self._last_tick.get(pair)
        if last is not None and event.t < last:
            raise LedgerError(
                f"timestamp regression for {pair}: {event.t} after {last}"
            )
        self.events.append(event)
        self._last_tick[pair] = event.t
        self.index[pair] = self.index.get(pair, RatingVector()) + event.as_vector()
        return self

    def record_outcome(self, rater: str, ratee: str, successful: bool, t: int) -> Ledger:
        return self.record(RatingEvent(rater, ratee, SUCCESS if successful else FAILURE, t))

    def aggregate(self, rater: str, ratee: str, up_to_tick: int | None = None) -> RatingVector:
        """Sum of ``rater``'s ratings of ``ratee`` at ticks ``<= up_to_tick``."""
        if up_to_tick is None:
            return self.index.get((rater, ratee), RatingVector())
        s = u = 0
        for event in self.events:
            if event.rater == rater and event.ratee == ratee and event.t <= up_to_tick:
                if event.successful:
                    s += 1
                else:
                    u += 1
        return RatingVector(s, u)

    def has_history(self, rater: str, ratee: str) -> bool:
        return (rater, ratee) in self.index

    def raters_of(self, ratee: str) -> set[str]:
        return {rater for rater, r in self.index if r == ratee}

    def save(self, destination: str | Path) -> None:
        save(self, destination)


def aggregate(
    ledger: Ledger, rater: str, ratee: str, up_to_tick: int | None = None
) -> RatingVector:
    return ledger.aggregate(rater, ratee, up_to_tick)


def pooled_aggregate(vectors: Iterable[RatingVector]) -> RatingVector:
    total = RatingVector()
    for v in vectors:
        total = total + v
    return total


def dumps_event(event: RatingEvent) -> str:
    record = {"rater": event.rater, "ratee": event.ratee, "outcome": event.outcome, "t": event.t}
    return json.dumps(record, ensure_ascii=False)


def save(ledger: Ledger, destination: str | Path) -> None:
    """Write the ledger as JSON Lines, one event per line."""
    with open(destination, "w", encoding="utf-8", newline="\n") as fh:
        for event in ledger.events:
            fh.write(dumps_event(event))
            fh.write("\n")


def load(source: str | Path) -> Ledger:
    ledger = Ledger()
    with open(source, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise LedgerFormatError(f"invalid JSON ({exc.msg})", lineno) from None
            if not isinstance(record, dict):
                raise LedgerFormatError("expected a JSON object", lineno)
            missing = [k for k in _FIELDS if k not in record]
            if missing:
                raise LedgerFormatError(f"missing field(s) {', '.join(missing)}", lineno)
            extra = sorted(set(record) - set(_FIELDS))
            if extra:
                raise LedgerFormatError(f"unexpected field(s) {', '.join(extra)}", lineno)
            if not isinstance(record["rater"], str) or not isinstance(record["ratee"], str):
                raise LedgerFormatError("rater and ratee must be strings", lineno)
            try:
                ledger.record(
                    RatingEvent(record["rater"], record["ratee"], record["outcome"], record["t"])
                )
            except LedgerError as exc:
                raise LedgerFormatError(str(exc), lineno) from None
    return ledger
