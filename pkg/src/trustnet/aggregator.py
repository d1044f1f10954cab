"""Combining witness reports into an aggregate rating, and full trust queries.

Two readings of "average of the scores weighted by theta" are offered:

* ``pooled``: sum all reported vectors, score the sum, scale by the mean weight.
* ``mean_weighted``: mean over witnesses of ``weight * score(vector)``.

They coincide for a single report and diverge otherwise.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from enum import Enum

from trustnet.core import (
    AgentRecord,
    TrustReport,
    TrustWeights,
    WitnessScore,
    compute_trust,
    reputation_score,
)
from trustnet.errors import UnknownAgentError
from trustnet.ledger import Ledger, pooled_aggregate
from trustnet.referral import ReferralGraph, Reporter, WitnessQuery, collect_reports
from trustnet.weighting import WitnessReport, weighted_score


class AgrStrategy(str, Enum):
    POOLED = "pooled"
    MEAN_WEIGHTED = "mean_weighted"

    @classmethod
    def parse(cls, value: str | AgrStrategy) -> AgrStrategy:
        if isinstance(value, cls):
            return value
        try:
            return cls(value.replace("-", "_"))
        except ValueError:
            names = ", ".join(s.value for s in cls)
            raise ValueError(f"unknown AGR strategy {value!r} (expected one of {names})") from None


def agr_pooled(reports: Sequence[WitnessReport]) -> float:
    # no witnesses means no evidence, not a 0.5 prior
    if not reports:
        return 0.0
    mean_weight = sum(r.weight_at_query for r in reports) / len(reports)
    return mean_weight * reputation_score(pooled_aggregate(r.rating for r in reports))


def agr_mean_weighted(reports: Sequence[WitnessReport]) -> float:
    if not reports:
        return 0.0
    return sum(weighted_score(r.weight_at_query, r.rating) for r in reports) / len(reports)


def compute_agr(reports: Sequence[WitnessReport], strategy: AgrStrategy | str) -> float:
    if AgrStrategy.parse(strategy) is AgrStrategy.POOLED:
        return agr_pooled(reports)
    return agr_mean_weighted(reports)


def score_reports(reports: Sequence[WitnessReport]) -> tuple[WitnessScore, ...]:
    return tuple(
        WitnessScore(
            witness=r.witness,
            rating=r.rating,
            raw_score=reputation_score(r.rating),
            theta=r.weight_at_query,
            weighted_score=weighted_score(r.weight_at_query, r.rating),
        )
        for r in reports
    )


def trust_query(
    graph: ReferralGraph,
    ledger: Ledger,
    weights: Mapping[str, float] | None,
    records: Mapping[str, AgentRecord],
    q: WitnessQuery,
    w: TrustWeights,
    s: AgrStrategy | str = AgrStrategy.POOLED,
    *,
    reporter: Reporter | None = None,
) -> TrustReport:
    """Discover witnesses for ``q``, aggregate their reports and score the target.

    ``weights`` is the requester's own credibility table.
    """
    if q.target not in records:
        raise UnknownAgentError(f"no agent record for target {q.target!r}")
    if q.target not in graph.agents:
        raise UnknownAgentError(f"unknown target {q.target!r}")
    reports = collect_reports(graph, q, ledger, weights, reporter)
    agr = compute_agr(reports, s)
    return compute_trust(records[q.target], agr, w, score_reports(reports))
