"""Scoring math: beta density and expectation, rating point estimates, and the
composite trust formula that blends an agent's self-report with witness
ratings.

Everything here is a pure function over immutable values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from trustnet.errors import DomainError, WeightValidationError

WEIGHT_SUM_TOLERANCE = 1e-9
DEFAULT_DEVIATION_THRESHOLD = 0.25


def _check_count(name: str, value: object) -> None:
    if isinstance(value, bool) or not isinstance(value, int):
        raise DomainError(f"{name} must be an integer count, got {value!r}")
    if value < 0:
        raise DomainError(f"{name} must be non-negative, got {value}")


@dataclass(frozen=True)
class RatingVector:
    """Counts of successful and unsuccessful transactions, ``[S, U]``."""

    successful: int = 0
    unsuccessful: int = 0

    def __post_init__(self) -> None:
        _check_count("successful", self.successful)
        _check_count("unsuccessful", self.unsuccessful)

    def __add__(self, other: RatingVector) -> RatingVector:
        if not isinstance(other, RatingVector):
            return NotImplemented
        return RatingVector(
            self.successful + other.successful,
            self.unsuccessful + other.unsuccessful,
        )

    @property
    def total(self) -> int:
        return self.successful + self.unsuccessful

    def swapped(self) -> RatingVector:
        return RatingVector(self.unsuccessful, self.successful)

    def as_list(self) -> list[int]:
        return [self.successful, self.unsuccessful]


@dataclass(frozen=True)
class AgentRecord:
    """An agent's own account of itself.

    ``total_reputation`` counts positively rated transactions, ``total_transactions``
    counts all rated ones, and ``community_guarantee`` is 1 when an established
    community vouches for the agent.
    """

    agent_id: str
    total_reputation: int
    total_transactions: int
    community_guarantee: int = 0

    def __post_init__(self) -> None:
        _check_count("total_reputation", self.total_reputation)
        _check_count("total_transactions", self.total_transactions)
        if self.total_reputation > self.total_transactions:
            raise DomainError(
                f"total_reputation ({self.total_reputation}) exceeds "
                f"total_transactions ({self.total_transactions}) for {self.agent_id!r}"
            )
        if isinstance(self.community_guarantee, bool) or self.community_guarantee not in (0, 1):
            raise DomainError(
                f"community_guarantee must be 0 or 1, got {self.community_guarantee!r}"
            )


@dataclass(frozen=True)
class TrustWeights:
    wg_a: float = 0.5
    wg_b: float = 0.5

    def __post_init__(self) -> None:
        for name in ("wg_a", "wg_b"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise WeightValidationError(f"{name} must lie in [0, 1], got {value}")
        if abs(self.wg_a + self.wg_b - 1.0) > WEIGHT_SUM_TOLERANCE:
            raise WeightValidationError(
                f"wg_a + wg_b must equal 1, got {self.wg_a} + {self.wg_b} = "
                f"{self.wg_a + self.wg_b}"
            )


@dataclass(frozen=True)
class WitnessScore:
    """One witness's contribution to a trust query."""

    witness: str
    rating: RatingVector
    raw_score: float
    theta: float
    weighted_score: float


@dataclass(frozen=True)
class TrustReport:
    trust: float
    own_component: float
    witness_component: float
    agr: float
    deviation: float
    per_witness: tuple[WitnessScore, ...] = field(default_factory=tuple)
    target: str | None = None

    def flagged(self, threshold: float = DEFAULT_DEVIATION_THRESHOLD) -> bool:
        """True when self-report and witness view disagree by more than ``threshold``."""
        return self.deviation > threshold

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "trust": self.trust,
            "own_component": self.own_component,
            "witness_component": self.witness_component,
            "agr": self.agr,
            "deviation": self.deviation,
            "per_witness": [
                {
                    "witness": w.witness,
                    "successful": w.rating.successful,
                    "unsuccessful": w.rating.unsuccessful,
                    "raw_score": w.raw_score,
                    "theta": w.theta,
                    "weighted_score": w.weighted_score,
                }
                for w in self.per_witness
            ],
        }


def beta_pdf(p: float, alpha: float, beta: float) -> float:
    """Density of Beta(alpha, beta) at ``p``.

    The normalising constant is evaluated through ``math.lgamma`` so large
    integer counts do not overflow.

    Raises:
        DomainError: if ``p`` is outside [0, 1], a shape parameter is not
            positive, or ``p`` sits on an endpoint where the density is unbounded.
    """
    if not (alpha > 0 and beta > 0):
        raise DomainError(f"alpha and beta must be positive, got {alpha}, {beta}")
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p must lie in [0, 1], got {p}")
    if p == 0.0 and alpha < 1:
        raise DomainError("density is unbounded at p=0 when alpha < 1")
    if p == 1.0 and beta < 1:
        raise DomainError("density is unbounded at p=1 when beta < 1")

    log_norm = math.lgamma(alpha + beta) - math.lgamma(alpha) - math.lgamma(beta)
    # 0**0 is 1 here; a zero base with positive exponent kills the density
    if (p == 0.0 and alpha > 1) or (p == 1.0 and beta > 1):
        return 0.0
    log_body = 0.0
    if alpha != 1:
        log_body += (alpha - 1) * math.log(p)
    if beta != 1:
        log_body += (beta - 1) * math.log1p(-p)
    return math.exp(log_norm + log_body)


def beta_expectation(alpha: float, beta: float) -> float:
    if not (alpha > 0 and beta > 0):
        raise DomainError(f"alpha and beta must be positive, got {alpha}, {beta}")
    return alpha / (alpha + beta)


def reputation_score(v: RatingVector) -> float:
    """Point estimate ``(S + 1) / (S + U + 2)`` of a rating vector."""
    return beta_expectation(v.successful + 1, v.unsuccessful + 1)


def own_reputation_component(rec: AgentRecord) -> float:
    """Guarantee-gated average reputation from the agent's self-report.

    A newcomer with no transactions contributes 0 rather than raising.
    """
    if rec.total_transactions == 0:
        return 0.0
    return rec.community_guarantee * (rec.total_reputation / rec.total_transactions)


def deviation_check(own_avg: float, agr: float) -> float:
    for name, value in (("own_avg", own_avg), ("agr", agr)):
        if not 0.0 <= value <= 1.0:
            raise DomainError(f"{name} must lie in [0, 1], got {value}")
    return abs(own_avg - agr)


def compute_trust(
    rec: AgentRecord,
    agr: float,
    w: TrustWeights,
    per_witness: tuple[WitnessScore, ...] | list[WitnessScore] = (),
) -> TrustReport:
    """Blend the self-reported average with the witness aggregate.

    ``trust = wg_a * own + wg_b * agr``. The deviation diagnostic compares the
    raw self-reported average (guarantee ignored) with ``agr`` so it also
    covers agents without a community guarantee.
    """
    # Re-check here: a caller may hand in an unvalidated duck-typed object.
    if abs(w.wg_a + w.wg_b - 1.0) > WEIGHT_SUM_TOLERANCE:
        raise WeightValidationError(f"wg_a + wg_b must equal 1, got {w.wg_a + w.wg_b}")
    if not 0.0 <= agr <= 1.0:
        raise DomainError(f"agr must lie in [0, 1], got {agr}")

    own = own_reputation_component(rec)
    own_part = w.wg_a * own
    witness_part = w.wg_b * agr
    trust = own_part + witness_part

    ungated = AgentRecord(rec.agent_id, rec.total_reputation, rec.total_transactions, 1)
    deviation = deviation_check(own_reputation_component(ungated), agr)

    return TrustReport(
        trust=trust,
        own_component=own_part,
        witness_component=witness_part,
        agr=agr,
        deviation=deviation,
        per_witness=tuple(per_witness),
        target=rec.agent_id,
    )
