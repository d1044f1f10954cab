"""Seeded agent-society simulator.

Each round:

1. every configured (rater, ratee) pair transacts ``transactions_per_round``
   times; each transaction succeeds with the ratee's reliability and is rated;
2. every configured (requester, target) query is answered through the
   referral network, with witnesses reporting according to their behaviour;
3. each consulted witness's weight in that requester's table is multiplied by
   ``theta(score of its report, requester's observed success rate)``.

Randomness comes from a single ``numpy.random.Generator`` over PCG64, consumed
in a fixed order (transactions by sorted pair, then noisy reports in query and
discovery order), so a seed pins the whole run.
"""

from __future__ import annotations

import csv
import json
import logging
from collections import defaultdict
from collections.abc import Mapping
from dataclasses import dataclass, field
from pathlib import Path
from statistics import fmean

import numpy as np

from trustnet.aggregator import AgrStrategy, trust_query
from trustnet.core import (
    DEFAULT_DEVIATION_THRESHOLD,
    AgentRecord,
    RatingVector,
    TrustReport,
    TrustWeights,
)
from trustnet.errors import ScenarioError
from trustnet.ledger import Ledger
from trustnet.referral import ReferralGraph, WitnessQuery
from trustnet.weighting import INITIAL_WEIGHT, WeightTable, theta

log = logging.getLogger(__name__)

RNG_ALGORITHM = "numpy.random.PCG64"
RESULT_FORMAT = "trustnet.simresult.v1"
BEHAVIORS = ("honest", "liar", "noisy")


@dataclass(frozen=True)
class BehaviorProfile:
    kind: str = "honest"
    noise_level: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in BEHAVIORS:
            raise ScenarioError(f"unknown behavior {self.kind!r}", "behavior")
        if not 0.0 <= self.noise_level <= 1.0:
            raise ScenarioError(f"must lie in [0, 1], got {self.noise_level}", "noise_level")

    def report(self, truth: RatingVector, rng: np.random.Generator) -> RatingVector:
        if self.kind == "liar":
            return truth.swapped()
        if self.kind == "noisy" and self.noise_level > 0:
            s_flipped = int(rng.binomial(truth.successful, self.noise_level))
            u_flipped = int(rng.binomial(truth.unsuccessful, self.noise_level))
            return RatingVector(
                truth.successful - s_flipped + u_flipped,
                truth.unsuccessful - u_flipped + s_flipped,
            )
        return truth


@dataclass(frozen=True)
class AgentSpec:
    """A simulated agent: true reliability, witness behaviour, and base self-report."""

    id: str
    reliability: float = 0.5
    behavior: BehaviorProfile = field(default_factory=BehaviorProfile)
    record: AgentRecord | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.reliability <= 1.0:
            raise ScenarioError(f"must lie in [0, 1], got {self.reliability}", f"agents[{self.id}].reliability")
        if self.record is None:
            object.__setattr__(self, "record", AgentRecord(self.id, 0, 0, 0))


@dataclass
class ScenarioConfig:
    agents: dict[str, AgentSpec]
    graph: ReferralGraph
    queries: list[tuple[str, str]]
    rounds: int = 30
    transactions_per_round: int = 10
    seed: int = 0
    depth_limit: int = 2
    weights: TrustWeights = field(default_factory=TrustWeights)
    strategy: AgrStrategy = AgrStrategy.POOLED
    interactions: list[tuple[str, str]] | None = None
    initial_ledger: Ledger | None = None
    initial_weights: dict[str, dict[str, float]] = field(default_factory=dict)
    update_every: int = 1
    theta_mode: str = "absolute"
    deviation_threshold: float = DEFAULT_DEVIATION_THRESHOLD
    name: str = ""

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        def need_agent(agent: str, where: str) -> None:
            if agent not in self.agents:
                raise ScenarioError(f"undeclared agent {agent!r}", where)

        if isinstance(self.rounds, bool) or not isinstance(self.rounds, int) or self.rounds < 1:
            raise ScenarioError(f"must be a positive integer, got {self.rounds!r}", "simulation.rounds")
        if self.transactions_per_round < 1:
            raise ScenarioError("must be at least 1", "simulation.transactions_per_round")
        if not 0 <= self.seed < 2**64:
            raise ScenarioError("must be a 64-bit unsigned integer", "simulation.seed")
        if self.depth_limit < 0:
            raise ScenarioError("must be non-negative", "query.depth_limit")
        if self.update_every < 1:
            raise ScenarioError("must be at least 1", "simulation.update_every")
        if self.theta_mode not in ("absolute", "signed"):
            raise ScenarioError(f"unknown mode {self.theta_mode!r}", "simulation.theta_mode")
        if not 0.0 <= self.deviation_threshold <= 1.0:
            raise ScenarioError("must lie in [0, 1]", "simulation.deviation_threshold")
        self.strategy = AgrStrategy.parse(self.strategy)
        if not self.queries:
            raise ScenarioError("at least one query is required", "simulation.queries")
        for i, (req, tgt) in enumerate(self.queries):
            need_agent(req, f"simulation.queries[{i}]")
            need_agent(tgt, f"simulation.queries[{i}]")
            if req == tgt:
                raise ScenarioError("requester and target must differ", f"simulation.queries[{i}]")
        for i, (rater, ratee) in enumerate(self.interactions or []):
            need_agent(rater, f"simulation.interactions[{i}]")
            need_agent(ratee, f"simulation.interactions[{i}]")
            if rater == ratee:
                raise ScenarioError("an agent cannot transact with itself", f"simulation.interactions[{i}]")
        for agent in self.graph.agents:
            need_agent(agent, "edges")
        for requester, table in self.initial_weights.items():
            need_agent(requester, "witness_weights")
            WeightTable(dict(table))

    def interaction_pairs(self) -> list[tuple[str, str]]:
        """Pairs that transact each round; by default everyone trades with every query target."""
        if self.interactions is not None:
            return sorted(set(self.interactions))
        targets = {tgt for _, tgt in self.queries}
        return sorted((a, t) for t in targets for a in self.agents if a != t)

    def echo(self) -> dict:
        return {
            "name": self.name,
            "agents": [
                {
                    "id": a.id,
                    "reliability": a.reliability,
                    "behavior": a.behavior.kind,
                    "noise_level": a.behavior.noise_level,
                    "community_guarantee": a.record.community_guarantee,
                    "reputation": a.record.total_reputation,
                    "transactions": a.record.total_transactions,
                }
                for a in sorted(self.agents.values(), key=lambda a: a.id)
            ],
            "edges": [list(e) for e in self.graph.edges()],
            "queries": [list(q) for q in self.queries],
            "interactions": [list(p) for p in self.interaction_pairs()],
            "rounds": self.rounds,
            "transactions_per_round": self.transactions_per_round,
            "seed": self.seed,
            "depth_limit": self.depth_limit,
            "wg_a": self.weights.wg_a,
            "wg_b": self.weights.wg_b,
            "strategy": self.strategy.value,
            "update_every": self.update_every,
            "theta_mode": self.theta_mode,
            "deviation_threshold": self.deviation_threshold,
            "initial_weights": {r: dict(sorted(t.items())) for r, t in sorted(self.initial_weights.items())},
        }


@dataclass
class SimResult:
    config_echo: dict
    rounds: list[dict]
    weight_trajectories: dict[str, dict[str, list[float]]]
    final_weights: dict[str, dict[str, float]]
    summary: dict
    header: dict = field(default_factory=lambda: {"format": RESULT_FORMAT, "rng": RNG_ALGORITHM})

    def to_dict(self) -> dict:
        return {
            "header": self.header,
            "config_echo": self.config_echo,
            "rounds": self.rounds,
            "weight_trajectories": self.weight_trajectories,
            "final_weights": self.final_weights,
            "summary": self.summary,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    def save(self, destination: str | Path) -> None:
        Path(destination).write_text(self.to_json(), encoding="utf-8", newline="\n")

    def final_weight(self, requester: str, witness: str) -> float:
        return self.final_weights.get(requester, {}).get(witness, INITIAL_WEIGHT)


def _self_report(agent: AgentSpec, ledger: Ledger) -> AgentRecord:
    """Base self-report plus ratings received so far; liars claim every one was positive."""
    received = RatingVector()
    for rater in sorted(ledger.raters_of(agent.id)):
        received = received + ledger.aggregate(rater, agent.id)
    base = agent.record
    total = base.total_transactions + received.total
    positive = received.total if agent.behavior.kind == "liar" else received.successful
    return AgentRecord(agent.id, base.total_reputation + positive, total, base.community_guarantee)


def run_scenario(cfg: ScenarioConfig) -> SimResult:
    cfg.validate()
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    ledger = Ledger.from_events(cfg.initial_ledger.events) if cfg.initial_ledger else Ledger()
    tick0 = max((e.t for e in ledger.events), default=-1) + 1
    tables = {
        req: WeightTable(dict(cfg.initial_weights.get(req, {})))
        for req in sorted({r for r, _ in cfg.queries})
    }
    pairs = cfg.interaction_pairs()
    signed = cfg.theta_mode == "signed"
    query_pairs = set(cfg.queries)

    # requester's outcomes with each target since that pair's last weight update
    window: dict[tuple[str, str], list[int]] = defaultdict(lambda: [0, 0])
    snapshots: list[dict[str, dict[str, float]]] = []
    rounds_out: list[dict] = []

    for rnd in range(cfg.rounds):
        tick = tick0 + rnd
        for rater, ratee in pairs:
            p = cfg.agents[ratee].reliability
            outcomes = rng.random(cfg.transactions_per_round) < p
            for ok in outcomes.tolist():
                ledger.record_outcome(rater, ratee, ok, tick)
            if (rater, ratee) in query_pairs:
                n_ok = int(outcomes.sum())
                window[(rater, ratee)][0] += n_ok
                window[(rater, ratee)][1] += len(outcomes) - n_ok

        update_now = (rnd + 1) % cfg.update_every == 0
        query_rows = []
        for requester, target in cfg.queries:
            table = tables[requester]

            def reporter(witness: str, truth: RatingVector) -> RatingVector:
                return cfg.agents[witness].behavior.report(truth, rng)

            records = {target: _self_report(cfg.agents[target], ledger)}
            q = WitnessQuery(requester, target, cfg.depth_limit)
            report = trust_query(
                cfg.graph, ledger, table, records, q, cfg.weights, cfg.strategy, reporter=reporter
            )

            s_obs, u_obs = window[(requester, target)]
            observed = s_obs / (s_obs + u_obs) if s_obs + u_obs else None
            witnesses = []
            for ws in report.per_witness:
                row = {
                    "witness": ws.witness,
                    "reported": ws.rating.as_list(),
                    "raw_score": ws.raw_score,
                    "weight": ws.theta,
                    "weighted_score": ws.weighted_score,
                    "theta": None,
                    "weight_after": ws.theta,
                }
                if update_now and observed is not None:
                    th = theta(ws.raw_score, observed, signed=signed)
                    row["theta"] = th
                    row["weight_after"] = table.apply(ws.witness, th)
                witnesses.append(row)
            if update_now:
                window[(requester, target)] = [0, 0]

            query_rows.append(
                {
                    "requester": requester,
                    "target": target,
                    "trust": report.trust,
                    "own_component": report.own_component,
                    "witness_component": report.witness_component,
                    "agr": report.agr,
                    "deviation": report.deviation,
                    "deviation_flag": report.flagged(cfg.deviation_threshold),
                    "observed_rate": observed,
                    "witnesses": witnesses,
                }
            )
        rounds_out.append({"round": rnd, "tick": tick, "queries": query_rows})
        snapshots.append({req: dict(t.weights) for req, t in tables.items()})
        log.debug("round %d done", rnd)

    trajectories: dict[str, dict[str, list[float]]] = {}
    for req, table in tables.items():
        witnesses = sorted(set(table.weights) | set(cfg.initial_weights.get(req, {})))
        trajectories[req] = {
            w: [snap[req].get(w, INITIAL_WEIGHT) for snap in snapshots] for w in witnesses
        }
    final = {req: dict(sorted(t.weights.items())) for req, t in tables.items()}

    return SimResult(
        config_echo=cfg.echo(),
        rounds=rounds_out,
        weight_trajectories=trajectories,
        final_weights=final,
        summary=_summarize(cfg, rounds_out, final),
    )


def _summarize(cfg: ScenarioConfig, rounds: list[dict], final: Mapping[str, Mapping[str, float]]) -> dict:
    last = rounds[-1]["queries"]
    error_by_class: dict[str, list[float]] = defaultdict(list)
    for row in last:
        target = cfg.agents[row["target"]]
        error_by_class[target.behavior.kind].append(abs(row["trust"] - target.reliability))
    weight_by_class: dict[str, list[float]] = defaultdict(list)
    for table in final.values():
        for witness, w in table.items():
            weight_by_class[cfg.agents[witness].behavior.kind].append(w)
    flags = sum(row["deviation_flag"] for r in rounds for row in r["queries"])
    return {
        "final_trust_error_by_target_behavior": {k: fmean(v) for k, v in sorted(error_by_class.items())},
        "final_weight_by_witness_behavior": {k: fmean(v) for k, v in sorted(weight_by_class.items())},
        "deviation_flags": flags,
        "final_round": [
            {"requester": r["requester"], "target": r["target"], "trust": r["trust"], "agr": r["agr"]}
            for r in last
        ],
    }


# Table I of the worked example: a requester consults five witnesses about X.
TABLE_I_WITNESSES = (
    ("W1", RatingVector(2, 6), 0.5),
    ("W2", RatingVector(5, 5), 0.75),
    ("W3", RatingVector(6, 2), 0.8),
    ("W4", RatingVector(0, 8), 0.01),
    ("W5", RatingVector(8, 0), 1.0),
)
TABLE_I_RECORD = AgentRecord("X", total_reputation=25, total_transactions=45, community_guarantee=1)


def table_scenario() -> tuple[ReferralGraph, Ledger, WeightTable, dict[str, AgentRecord], WitnessQuery]:
    requester = "A"
    graph = ReferralGraph.from_edges(
        [requester, TABLE_I_RECORD.agent_id, *(w for w, _, _ in TABLE_I_WITNESSES)],
        [(requester, w) for w, _, _ in TABLE_I_WITNESSES],
    )
    ledger = Ledger()
    for witness, vec, _ in TABLE_I_WITNESSES:
        for ok in [True] * vec.successful + [False] * vec.unsuccessful:
            ledger.record_outcome(witness, TABLE_I_RECORD.agent_id, ok, 0)
    weights = WeightTable({w: th for w, _, th in TABLE_I_WITNESSES})
    records = {TABLE_I_RECORD.agent_id: TABLE_I_RECORD}
    return graph, ledger, weights, records, WitnessQuery(requester, TABLE_I_RECORD.agent_id, 1)


def replay_table_scenario(strategy: AgrStrategy | str = AgrStrategy.POOLED) -> TrustReport:
    """Rebuild the five-witness worked example and run one trust query on it."""
    graph, ledger, weights, records, q = table_scenario()
    return trust_query(graph, ledger, weights, records, q, TrustWeights(0.5, 0.5), strategy)


FIG2_COLUMNS = (
    "round", "requester", "target", "witness",
    "successful", "unsuccessful", "reputation_score", "theta", "weighted_score",
)
FIG3_COLUMNS = ("round", "requester", "target", "own_component", "witness_component", "total")


def _fig_rows(result: SimResult | TrustReport) -> tuple[list[list], list[list]]:
    if isinstance(result, TrustReport):
        fig2 = [
            [0, "", result.target, w.witness, w.rating.successful, w.rating.unsuccessful,
             w.raw_score, w.theta, w.weighted_score]
            for w in result.per_witness
        ]
        fig3 = [[0, "", result.target, result.own_component, result.witness_component, result.trust]]
        return fig2, fig3
    fig2, fig3 = [], []
    for rnd in result.rounds:
        for q in rnd["queries"]:
            fig3.append([rnd["round"], q["requester"], q["target"],
                         q["own_component"], q["witness_component"], q["trust"]])
    # witness breakdown from the final round only
    last = result.rounds[-1]
    for q in last["queries"]:
        for w in q["witnesses"]:
            fig2.append([last["round"], q["requester"], q["target"], w["witness"],
                         w["reported"][0], w["reported"][1], w["raw_score"], w["weight"],
                         w["weighted_score"]])
    return fig2, fig3


def export_figures(result: SimResult | TrustReport, destination: str | Path) -> tuple[Path, Path]:
    """Write ``fig2.csv`` (per-witness scores) and ``fig3.csv`` (trust components)."""
    dest = Path(destination)
    dest.mkdir(parents=True, exist_ok=True)
    fig2_rows, fig3_rows = _fig_rows(result)
    paths = []
    for name, columns, rows in (
        ("fig2.csv", FIG2_COLUMNS, fig2_rows),
        ("fig3.csv", FIG3_COLUMNS, fig3_rows),
    ):
        path = dest / name
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(columns)
            writer.writerows(rows)
        paths.append(path)
    return paths[0], paths[1]
