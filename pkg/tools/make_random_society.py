"""Regenerate the bundled 50-agent random society scenario.

    python tools/make_random_society.py > src/trustnet/scenarios/random_society.json
"""

import json
import sys

import numpy as np

N_AGENTS = 50
N_EDGES = 100
N_QUERIES = 5


def build(seed: int = 2024) -> dict:
    rng = np.random.default_rng(seed)
    ids = [f"a{i:02d}" for i in range(N_AGENTS)]
    agents = []
    for agent in ids:
        kind = str(rng.choice(["honest", "liar", "noisy"], p=[0.7, 0.15, 0.15]))
        spec = {
            "id": agent,
            "reliability": round(float(rng.uniform(0.2, 0.95)), 3),
            "behavior": kind,
            "community_guarantee": int(rng.random() < 0.5),
        }
        if kind == "noisy":
            spec["noise_level"] = round(float(rng.uniform(0.05, 0.3)), 3)
        agents.append(spec)

    edges = set()
    while len(edges) < N_EDGES:
        a, b = sorted(rng.choice(N_AGENTS, size=2, replace=False).tolist())
        edges.add((ids[a], ids[b]))

    queries = []
    while len(queries) < N_QUERIES:
        r, t = rng.choice(N_AGENTS, size=2, replace=False).tolist()
        if [ids[r], ids[t]] not in queries:
            queries.append([ids[r], ids[t]])

    return {
        "name": "random_society",
        "description": f"{N_AGENTS} agents, {N_EDGES} undirected acquaintance edges, mixed witness behaviours.",
        "agents": agents,
        "edges": [list(e) for e in sorted(edges)],
        "symmetric_edges": True,
        "query": {"requester": queries[0][0], "target": queries[0][1], "depth_limit": 2},
        "simulation": {"rounds": 30, "transactions_per_round": 10, "seed": 11, "queries": queries},
    }


if __name__ == "__main__":
    json.dump(build(), sys.stdout, indent=2)
    sys.stdout.write("\n")
