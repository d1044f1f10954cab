"""Composite trust metrics for multi-agent societies.

Self-reported reputation is blended with witness ratings that are discounted
by per-witness credibility weights; a seeded simulator exercises the weight
dynamics against honest, lying and noisy witnesses.
"""

from trustnet.aggregator import AgrStrategy, agr_mean_weighted, agr_pooled, trust_query
from trustnet.core import (
    AgentRecord,
    RatingVector,
    TrustReport,
    TrustWeights,
    WitnessScore,
    beta_expectation,
    beta_pdf,
    compute_trust,
    deviation_check,
    own_reputation_component,
    reputation_score,
)
from trustnet.errors import (
    DomainError,
    LedgerError,
    LedgerFormatError,
    ScenarioError,
    UnknownAgentError,
    WeightValidationError,
)
from trustnet.ledger import Ledger, RatingEvent, aggregate, load, pooled_aggregate, save
from trustnet.referral import ReferralGraph, WitnessQuery, collect_reports, discover_witnesses
from trustnet.sim import (
    AgentSpec,
    BehaviorProfile,
    ScenarioConfig,
    SimResult,
    export_figures,
    replay_table_scenario,
    run_scenario,
)
from trustnet.weighting import (
    EPSILON,
    WeightTable,
    WitnessReport,
    WitnessWeight,
    theta,
    update_weight,
    weighted_score,
)

__version__ = "0.1.0"
