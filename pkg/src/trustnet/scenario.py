"""Scenario files: one JSON document describing a society and what to run on it.

Structure is checked against ``scenarios/scenario.schema.json``; cross
references and domain invariants are checked afterwards, and every failure
is raised as a :class:`ScenarioError` naming the offending field.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cache
from importlib import resources
from pathlib import Path

import jsonschema

from trustnet.aggregator import AgrStrategy
from trustnet.core import AgentRecord, TrustWeights
from trustnet.errors import DomainError, LedgerError, ScenarioError, UnknownAgentError
from trustnet.ledger import Ledger, RatingEvent
from trustnet.referral import ReferralGraph, WitnessQuery
from trustnet.sim import AgentSpec, BehaviorProfile, ScenarioConfig
from trustnet.weighting import WeightTable

BUNDLED = ("table1", "liar_vs_honest", "random_society")


@cache
def schema() -> dict:
    text = resources.files("trustnet").joinpath("scenarios/scenario.schema.json").read_text("utf-8")
    return json.loads(text)


def bundled_path(name: str) -> Path:
    return Path(str(resources.files("trustnet").joinpath(f"scenarios/{name}.json")))


@dataclass
class QuerySpec:
    query: WitnessQuery
    weights: TrustWeights
    strategy: AgrStrategy


@dataclass
class Scenario:
    name: str
    agents: dict[str, AgentSpec]
    graph: ReferralGraph
    ledger: Ledger
    witness_weights: dict[str, WeightTable]
    query: QuerySpec | None
    raw: dict

    @property
    def records(self) -> dict[str, AgentRecord]:
        return {a.id: a.record for a in self.agents.values()}

    def weights_for(self, requester: str) -> WeightTable:
        return self.witness_weights.get(requester, WeightTable())

    def sim_config(self, *, seed: int | None = None, strategy: AgrStrategy | str | None = None) -> ScenarioConfig:
        sim = self.raw.get("simulation")
        if sim is None:
            raise ScenarioError("scenario has no simulation section", "simulation")
        if "queries" in sim:
            queries = [tuple(q) for q in sim["queries"]]
        elif self.query is not None:
            queries = [(self.query.query.requester, self.query.query.target)]
        else:
            raise ScenarioError("needs queries or a query section", "simulation.queries")
        q = self.query
        return ScenarioConfig(
            agents=self.agents,
            graph=self.graph,
            queries=queries,
            rounds=sim.get("rounds", 30),
            transactions_per_round=sim.get("transactions_per_round", 10),
            seed=sim.get("seed", 0) if seed is None else seed,
            depth_limit=q.query.depth_limit if q else 2,
            weights=q.weights if q else TrustWeights(),
            strategy=AgrStrategy.parse(strategy) if strategy else (q.strategy if q else AgrStrategy.POOLED),
            interactions=[tuple(p) for p in sim["interactions"]] if "interactions" in sim else None,
            initial_ledger=self.ledger,
            initial_weights={r: dict(t.weights) for r, t in self.witness_weights.items()},
            update_every=sim.get("update_every", 1),
            theta_mode=sim.get("theta_mode", "absolute"),
            deviation_threshold=sim.get("deviation_threshold", 0.25),
            name=self.name,
        )


def _field_path(error: jsonschema.ValidationError) -> str:
    path = ""
    for part in error.absolute_path:
        path += f"[{part}]" if isinstance(part, int) else (f".{part}" if path else str(part))
    return path or "<root>"


def parse_scenario(doc: object) -> Scenario:
    validator = jsonschema.Draft202012Validator(schema())
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        first = errors[0]
        raise ScenarioError(first.message, _field_path(first))
    assert isinstance(doc, dict)

    agents: dict[str, AgentSpec] = {}
    for i, a in enumerate(doc["agents"]):
        where = f"agents[{i}]"
        if a["id"] in agents:
            raise ScenarioError(f"duplicate agent id {a['id']!r}", f"{where}.id")
        try:
            record = AgentRecord(
                a["id"],
                a.get("reputation", 0),
                a.get("transactions", 0),
                a.get("community_guarantee", 0),
            )
        except DomainError as exc:
            raise ScenarioError(str(exc), f"{where}.reputation") from None
        if a.get("behavior") != "noisy" and a.get("noise_level", 0) > 0:
            raise ScenarioError("noise_level applies only to noisy agents", f"{where}.noise_level")
        agents[a["id"]] = AgentSpec(
            a["id"],
            a.get("reliability", 0.5),
            BehaviorProfile(a.get("behavior", "honest"), a.get("noise_level", 0.0)),
            record,
        )

    def need(agent: str, where: str) -> None:
        if agent not in agents:
            raise ScenarioError(f"undeclared agent {agent!r}", where)

    graph = ReferralGraph(set(agents))
    symmetric = doc.get("symmetric_edges", False)
    for i, (src, dst) in enumerate(doc.get("edges", [])):
        need(src, f"edges[{i}]")
        need(dst, f"edges[{i}]")
        try:
            graph.add_edge(src, dst)
            if symmetric:
                graph.add_edge(dst, src)
        except (DomainError, UnknownAgentError) as exc:
            raise ScenarioError(str(exc), f"edges[{i}]") from None

    events: list[RatingEvent] = []
    try:
        for i, h in enumerate(doc.get("histories", [])):
            need(h["rater"], f"histories[{i}].rater")
            need(h["ratee"], f"histories[{i}].ratee")
            t = h.get("t", 0)
            events += [RatingEvent(h["rater"], h["ratee"], "S", t)] * h["successful"]
            events += [RatingEvent(h["rater"], h["ratee"], "U", t)] * h["unsuccessful"]
        for i, e in enumerate(doc.get("events", [])):
            need(e["rater"], f"events[{i}].rater")
            need(e["ratee"], f"events[{i}].ratee")
            events.append(RatingEvent(e["rater"], e["ratee"], e["outcome"], e["t"]))
        ledger = Ledger.from_events(sorted(events, key=lambda e: e.t))
    except LedgerError as exc:
        raise ScenarioError(str(exc), "histories/events") from None

    witness_weights = {}
    for requester, table in doc.get("witness_weights", {}).items():
        need(requester, f"witness_weights.{requester}")
        for witness in table:
            need(witness, f"witness_weights.{requester}.{witness}")
        witness_weights[requester] = WeightTable(dict(table))

    query = None
    if "query" in doc:
        qd = doc["query"]
        need(qd["requester"], "query.requester")
        need(qd["target"], "query.target")
        try:
            q = WitnessQuery(qd["requester"], qd["target"], qd.get("depth_limit", 2))
        except DomainError as exc:
            raise ScenarioError(str(exc), "query") from None
        try:
            weights = TrustWeights(qd.get("wg_a", 0.5), qd.get("wg_b", 0.5))
        except DomainError as exc:
            raise ScenarioError(f"TrustWeights invariant violated: {exc}", "query.wg_a/wg_b") from None
        query = QuerySpec(q, weights, AgrStrategy.parse(qd.get("strategy", "pooled")))

    scenario = Scenario(doc.get("name", ""), agents, graph, ledger, witness_weights, query, doc)
    if "simulation" in doc:
        scenario.sim_config()
    return scenario


def load_scenario(path: str | Path) -> Scenario:
    """Read and validate a scenario file.

    Raises:
        OSError: if the file cannot be read.
        ScenarioError: if it is not valid JSON or violates any invariant.
    """
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"invalid JSON: {exc.msg} (line {exc.lineno})", "<document>") from None
    return parse_scenario(doc)
