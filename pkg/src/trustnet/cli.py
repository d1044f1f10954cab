"""Command-line front end.

    trustnet compute  <scenario> [--agr pooled|mean-weighted]
    trustnet simulate <scenario> --out <dir> [--seeds N]
    trustnet validate <scenario>

Exit codes: 0 success, 1 validation or usage error, 2 I/O error.
Diagnostics go to stderr (verbosity via TRUSTNET_LOG); stdout stays machine-readable.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from trustnet.aggregator import trust_query
from trustnet.errors import DomainError, ScenarioError, UnknownAgentError
from trustnet.scenario import Scenario, load_scenario
from trustnet.sim import export_figures, run_scenario

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_IO = 2

log = logging.getLogger("trustnet")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; 2 is reserved for I/O here
    def error(self, message: str):  # type: ignore[override]
        raise _UsageError(message)


def _configure_logging() -> None:
    level = os.environ.get("TRUSTNET_LOG", "error").upper()
    logging.basicConfig(
        stream=sys.stderr,
        level=getattr(logging, level, logging.ERROR),
        format="%(levelname)s %(name)s: %(message)s",
    )


def _load(path: str) -> Scenario:
    return load_scenario(path)


def cmd_validate(scenario_path: str) -> int:
    scenario = _load(scenario_path)
    log.info("scenario %r is valid (%d agents)", scenario.name, len(scenario.agents))
    print(json.dumps({"valid": True, "name": scenario.name, "agents": len(scenario.agents)}))
    return EXIT_OK


def cmd_compute(scenario_path: str, strategy_override: str | None = None) -> int:
    scenario = _load(scenario_path)
    if scenario.query is None:
        raise ScenarioError("compute needs a query section", "query")
    spec = scenario.query
    strategy = strategy_override or spec.strategy
    report = trust_query(
        scenario.graph,
        scenario.ledger,
        scenario.weights_for(spec.query.requester),
        scenario.records,
        spec.query,
        spec.weights,
        strategy,
    )
    out = report.to_dict()
    out["requester"] = spec.query.requester
    out["strategy"] = spec.strategy.parse(strategy).value
    print(json.dumps(out, indent=2))
    return EXIT_OK


def _simulate_one(scenario_path: str, out_dir: str, seed: int | None) -> str:
    scenario = _load(scenario_path)
    cfg = scenario.sim_config(seed=seed)
    result = run_scenario(cfg)
    dest = Path(out_dir)
    dest.mkdir(parents=True, exist_ok=True)
    result.save(dest / "simresult.json")
    export_figures(result, dest)
    weights = result.summary["final_weight_by_witness_behavior"]
    parts = [f"seed={cfg.seed}", f"rounds={cfg.rounds}"]
    parts += [f"final_weight[{k}]={v:.4f}" for k, v in weights.items()]
    parts += [f"trust[{r['requester']}->{r['target']}]={r['trust']:.4f}" for r in result.summary["final_round"]]
    return " ".join(parts)


def cmd_simulate(scenario_path: str, out_dir: str, seeds: int = 1) -> int:
    scenario = _load(scenario_path)
    cfg = scenario.sim_config()
    if seeds < 1:
        raise ScenarioError("must be at least 1", "--seeds")
    if seeds == 1:
        print(_simulate_one(scenario_path, out_dir, None))
        return EXIT_OK
    jobs = [(scenario_path, str(Path(out_dir) / f"seed-{cfg.seed + i}"), cfg.seed + i) for i in range(seeds)]
    with ProcessPoolExecutor(max_workers=min(seeds, os.cpu_count() or 1)) as pool:
        futures = [pool.submit(_simulate_one, *job) for job in jobs]
        for fut in futures:
            print(fut.result())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="trustnet", description="Composite trust scores and agent-society simulation.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("compute", help="run the scenario's trust query and print the report as JSON")
    p.add_argument("scenario")
    p.add_argument("--agr", choices=["pooled", "mean-weighted"], default=None,
                   help="override the scenario's aggregation strategy")

    p = sub.add_parser("simulate", help="run the scenario's simulation and write results")
    p.add_argument("scenario")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seeds", type=int, default=1, help="run N consecutive seeds in parallel")

    p = sub.add_parser("validate", help="check a scenario file")
    p.add_argument("scenario")
    return parser


def main(argv: list[str] | None = None) -> int:
    _configure_logging()
    try:
        args = build_parser().parse_args(argv)
    except _UsageError as exc:
        print(f"trustnet: error: {exc}", file=sys.stderr)
        return EXIT_INVALID

    try:
        if args.command == "compute":
            return cmd_compute(args.scenario, args.agr)
        if args.command == "simulate":
            return cmd_simulate(args.scenario, args.out, args.seeds)
        return cmd_validate(args.scenario)
    except (ScenarioError, DomainError, UnknownAgentError) as exc:
        print(f"trustnet: invalid scenario: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"trustnet: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
