"""Acquaintance graph and bounded breadth-first witness discovery."""

from __future__ import annotations

from collections import deque
from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass, field

from trustnet.core import RatingVector
from trustnet.errors import DomainError, UnknownAgentError
from trustnet.ledger import Ledger
from trustnet.weighting import INITIAL_WEIGHT, WitnessReport

# Maps (witness, true vector) to the vector the witness actually reports.
Reporter = Callable[[str, RatingVector], RatingVector]


@dataclass
class ReferralGraph:
    """Directed acquaintance graph. Undirected societies use symmetric edges."""

    agents: set[str] = field(default_factory=set)
    acquaintances: dict[str, set[str]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for src, dsts in self.acquaintances.items():
            for dst in dsts:
                self._check_edge(src, dst)

    @classmethod
    def from_edges(
        cls, agents: Iterable[str], edges: Iterable[tuple[str, str]], *, symmetric: bool = False
    ) -> ReferralGraph:
        graph = cls(set(agents))
        for src, dst in edges:
            graph.add_edge(src, dst)
            if symmetric:
                graph.add_edge(dst, src)
        return graph

    def _check_edge(self, src: str, dst: str) -> None:
        if src == dst:
            raise DomainError(f"self-loop on {src!r}")
        for end in (src, dst):
            if end not in self.agents:
                raise UnknownAgentError(f"edge endpoint {end!r} is not a known agent")

    def add_agent(self, agent: str) -> None:
        self.agents.add(agent)

    def add_edge(self, src: str, dst: str) -> None:
        self._check_edge(src, dst)
        self.acquaintances.setdefault(src, set()).add(dst)

    def neighbours(self, agent: str) -> set[str]:
        return self.acquaintances.get(agent, set())

    def edges(self) -> list[tuple[str, str]]:
        return sorted((s, d) for s, ds in self.acquaintances.items() for d in ds)


@dataclass(frozen=True)
class WitnessQuery:
    requester: str
    target: str
    depth_limit: int = 2

    def __post_init__(self) -> None:
        if self.requester == self.target:
            raise DomainError("requester and target must differ")
        if isinstance(self.depth_limit, bool) or not isinstance(self.depth_limit, int):
            raise DomainError(f"depth_limit must be an integer, got {self.depth_limit!r}")
        if self.depth_limit < 0:
            raise DomainError(f"depth_limit must be non-negative, got {self.depth_limit}")


def hop_distances(graph: ReferralGraph, source: str, limit: int) -> dict[str, int]:
    """BFS hop counts from ``source`` for every agent within ``limit`` hops."""
    dist = {source: 0}
    frontier = deque([source])
    while frontier:
        node = frontier.popleft()
        if dist[node] == limit:
            continue
        for nxt in graph.neighbours(node):
            if nxt not in dist:
                dist[nxt] = dist[node] + 1
                frontier.append(nxt)
    return dist


def discover_witnesses(graph: ReferralGraph, q: WitnessQuery, ledger: Ledger) -> list[str]:
    """Agents within ``q.depth_limit`` hops of the requester that have rated the target.

    Traversal may pass through the target, but the target and requester are
    never returned. Ordered by (hop distance, agent id).
    """
    if q.requester not in graph.agents:
        raise UnknownAgentError(f"unknown requester {q.requester!r}")
    dist = hop_distances(graph, q.requester, q.depth_limit)
    found = [
        (d, agent)
        for agent, d in dist.items()
        if agent not in (q.requester, q.target) and ledger.has_history(agent, q.target)
    ]
    return [agent for _, agent in sorted(found)]


def collect_reports(
    graph: ReferralGraph,
    q: WitnessQuery,
    ledger: Ledger,
    weights: Mapping[str, float] | None = None,
    reporter: Reporter | None = None,
) -> list[WitnessReport]:
    """One report per discovered witness, carrying its current weight.

    ``reporter`` lets a simulation substitute what a witness claims for what
    it actually experienced; by default witnesses report the ledger truth.
    """
    weights = weights or {}
    reports = []
    for witness in discover_witnesses(graph, q, ledger):
        rating = ledger.aggregate(witness, q.target)
        if reporter is not None:
            rating = reporter(witness, rating)
        reports.append(
            WitnessReport(witness, q.target, rating, weights.get(witness, INITIAL_WEIGHT))
        )
    return reports
