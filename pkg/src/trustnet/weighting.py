"""Witness credibility weights and their multiplicative update.

A witness starts at weight 1.0. After each check of its advice against what
the requester actually observed, the weight is multiplied by a factor
``theta = 1 - |claimed - observed| / 2``. Weights only ever shrink, and never
drop below ``EPSILON``.
"""

from __future__ import annotations

from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field, replace

from trustnet.core import RatingVector, reputation_score
from trustnet.errors import DomainError

EPSILON = 0.01
INITIAL_WEIGHT = 1.0


@dataclass(frozen=True)
class WitnessWeight:
    witness: str
    weight: float = INITIAL_WEIGHT

    def __post_init__(self) -> None:
        if not 0.0 < self.weight <= 1.0:
            raise DomainError(f"weight must lie in (0, 1], got {self.weight}")


@dataclass(frozen=True)
class WitnessReport:
    witness: str
    about: str
    rating: RatingVector
    weight_at_query: float = INITIAL_WEIGHT


def theta(prob_true: float, observed_r: float, *, signed: bool = False) -> float:
    """Credibility multiplier for one piece of advice.

    With ``signed=True`` the raw difference ``prob_true - observed_r`` is used,
    so advice that undersold the target goes unpunished; the result is still
    clamped to ``[EPSILON, 1]``.
    """
    for name, value in (("prob_true", prob_true), ("observed_r", observed_r)):
        if not 0.0 <= value <= 1.0:
            raise DomainError(f"{name} must lie in [0, 1], got {value}")
    diff = prob_true - observed_r if signed else abs(prob_true - observed_r)
    return min(max(1.0 - diff / 2.0, EPSILON), 1.0)


def update_weight(w: WitnessWeight, theta_value: float) -> WitnessWeight:
    if not 0.0 < theta_value <= 1.0:
        raise DomainError(f"theta must lie in (0, 1], got {theta_value}")
    return replace(w, weight=max(theta_value * w.weight, EPSILON))


def weighted_score(theta_value: float, v: RatingVector) -> float:
    if not 0.0 < theta_value <= 1.0:
        raise DomainError(f"theta must lie in (0, 1], got {theta_value}")
    return theta_value * reputation_score(v)


@dataclass
class WeightTable(Mapping[str, float]):
    """One requester's credibility table. Unknown witnesses read as 1.0."""

    weights: dict[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for witness, value in self.weights.items():
            WitnessWeight(witness, value)

    def __getitem__(self, witness: str) -> float:
        return self.weights[witness]

    def __iter__(self) -> Iterator[str]:
        return iter(self.weights)

    def __len__(self) -> int:
        return len(self.weights)

    def weight_of(self, witness: str) -> float:
        return self.weights.get(witness, INITIAL_WEIGHT)

    def entry(self, witness: str) -> WitnessWeight:
        return WitnessWeight(witness, self.weight_of(witness))

    def apply(self, witness: str, theta_value: float) -> float:
        """Multiply ``witness``'s weight by ``theta_value`` and return the new weight."""
        updated = update_weight(self.entry(witness), theta_value)
        self.weights[witness] = updated.weight
        return updated.weight
