"""Service for running Monte-Carlo experiments over the relay network"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed

from codes.channel import DESTINATION, ERASED, ErasureLink, relay_node, source_node, stream_for
from codes.decoder import DecodingGraph, erasure_rate, parse_scope, verify_payload
from codes.relay import RelayCodedSymbol, RelayNode
from codes.source import encode_conventional, encode_round, information_bits
from config.constants import MAX_ROUNDS_FACTOR
from config.experiment import ExperimentConfig, Scheduling
from utils.errors import ConfigInvalid

# Seed-key namespaces next to the node kinds used by channel.node_key
_SCHEDULER_KEY = 4
_BITS_KEY = 5


@dataclass
class TrialResult:
    trial: int
    seed: int
    reports: list
    fill_rounds: dict
    first_transmissions: dict
    stalls: dict
    rounds: int
    transmissions: int
    payload_verified: bool | None = None


@dataclass
class ExperimentResult:
    rows: list
    K: int = 0
    scheme: str = ""
    seed: int = 0
    trials: int = 0
    fill_rounds: list = field(default_factory=list)
    stalls: list = field(default_factory=list)
    mean_received: list = field(default_factory=list)
    mean_unconnected: dict = field(default_factory=dict)
    payload_failures: int = 0

    def curve(self, scope="overall") -> list:
        """(overhead, erasure_rate) pairs for one scope"""
        return [(row["overhead"], row["erasure_rate"]) for row in self.rows if row["scope"] == scope]

    def scopes(self) -> list:
        seen = []
        for row in self.rows:
            if row["scope"] not in seen:
                seen.append(row["scope"])
        return seen


def scope_sort_key(scope: str) -> tuple:
    """overall first, then source:<i>, then class:<i>"""
    kind, index = parse_scope(scope)
    rank = {"overall": 0, "source": 1, "class": 2}[kind]
    return (rank, index or 0)


def trial_seed(master_seed: int, trial: int) -> int:
    """Seed of trial `trial`, derived from the master seed only"""
    return int(np.random.SeedSequence([int(master_seed), int(trial)]).generate_state(1)[0])


def overhead_targets(overheads, K: int) -> list:
    """Relay transmissions N needed to reach each overhead point eps = N / K"""
    return [max(1, math.ceil(eps * K - 1e-9)) for eps in overheads]


def _schedule(ready, scheduling, counter, rng):
    if scheduling is Scheduling.ALL:
        return list(ready)
    if scheduling is Scheduling.ROUND_ROBIN:
        return [ready[counter % len(ready)]]
    return [ready[int(rng.integers(len(ready)))]]


def run_trial(cfg: ExperimentConfig, seed: int, trial: int = 0) -> TrialResult:
    """
    Simulate one trial up to the last overhead point

    Each round has a source phase (every source encodes one symbol and sends it
    over each source-relay link) and a relay phase (scheduled relays combine and
    send over their relay-destination link). Surviving relay symbols are added
    to the decoding graph, which is peeled whenever the relay transmission count
    reaches an overhead point.

    Raises:
        ConfigInvalid: If the last overhead point cannot be reached
    """
    sources = cfg.source_configs()
    source_rngs = [stream_for(seed, 1, src.source_id) for src in sources]
    bits = [
        information_bits(src, stream_for(seed, _BITS_KEY, src.source_id)) if cfg.payload else None
        for src in sources
    ]
    relays = [
        RelayNode(relay_cfg, [src.source_id for src in sources], stream_for(seed, 2, relay_cfg.relay_id))
        for relay_cfg in cfg.relays
    ]
    source_links = [
        [
            ErasureLink.seeded(source_node(src.source_id), relay_node(relay.relay_id), cfg.source_deltas[i][j], seed)
            for j, relay in enumerate(relays)
        ]
        for i, src in enumerate(sources)
    ]
    relay_links = [
        ErasureLink.seeded(relay_node(relay.relay_id), DESTINATION, cfg.relay_deltas[j], seed)
        for j, relay in enumerate(relays)
    ]
    scheduler_rng = stream_for(seed, _SCHEDULER_KEY, 0)
    encode = encode_round if cfg.scheme.partitioned_sources else None
    graph = DecodingGraph(sources, cfg.importance, track_payload=cfg.payload)

    targets = overhead_targets(cfg.overheads, cfg.K)
    max_rounds = MAX_ROUNDS_FACTOR * (targets[-1] + cfg.depth + 1)
    reports = []
    transmissions = 0
    slot_counter = 0
    n = 0
    while len(reports) < len(targets):
        n += 1
        if n > max_rounds:
            raise ConfigInvalid(
                f"Only {transmissions} of {targets[-1]} relay transmissions after {max_rounds} rounds"
            )

        arrivals = [[None] * len(sources) for _ in relays]
        for i, src in enumerate(sources):
            if encode is not None:
                symbol = encode(src, n, source_rngs[i], bits[i])
            else:
                symbol = encode_conventional(src, source_rngs[i], n, bits[i])
            for j in range(len(relays)):
                arrivals[j][i] = source_links[i][j].transmit(symbol)
        for j, relay in enumerate(relays):
            relay.receive(n, arrivals[j])

        ready = [j for j, relay in enumerate(relays) if relay.is_ready(n)]
        if not ready:
            continue
        for j in _schedule(ready, cfg.scheduling, slot_counter, scheduler_rng):
            out = relays[j].transmit(n)
            if not isinstance(out, RelayCodedSymbol):
                continue
            transmissions += 1
            delivered = relay_links[j].transmit(out)
            if delivered is not ERASED:
                graph.add_check(delivered)
            while len(reports) < len(targets) and transmissions >= targets[len(reports)]:
                reports.append(graph.peel())
        slot_counter += 1

    payload_verified = verify_payload(graph, np.concatenate(bits)) if cfg.payload else None
    return TrialResult(
        trial=trial,
        seed=seed,
        reports=reports,
        fill_rounds={relay.relay_id: relay.fill_round for relay in relays},
        first_transmissions={relay.relay_id: relay.first_transmission for relay in relays},
        stalls={relay.relay_id: relay.stalls for relay in relays},
        rounds=n,
        transmissions=transmissions,
        payload_verified=payload_verified,
    )


def aggregate_trials(cfg: ExperimentConfig, trial_results) -> ExperimentResult:
    """
    Average per-scope erasure rates over trials

    Rows are sorted by (scope, overhead); aggregation only depends on trial index.
    """
    trial_results = sorted(trial_results, key=lambda t: t.trial)
    count = len(trial_results)
    rows = []
    mean_received = []
    mean_unconnected = {}
    first_reports = trial_results[0].reports if trial_results else []
    for g, overhead in enumerate(cfg.overheads[: len(first_reports)]):
        reports = [t.reports[g] for t in trial_results]
        for scope in reports[0].scopes():
            rows.append({
                "overhead": float(overhead),
                "scope": scope,
                "erasure_rate": float(np.mean([erasure_rate(r, scope) for r in reports])),
                "trials": count,
                "K": cfg.K,
                "scheme": cfg.scheme.value,
                "seed": cfg.seed,
            })
        mean_received.append(float(np.mean([r.received for r in reports])))
        for class_index in reports[0].unconnected_by_class:
            scope = f"class:{class_index}"
            mean_unconnected.setdefault(scope, []).append(
                float(np.mean([r.unconnected_by_class[class_index] for r in reports]))
            )
    rows.sort(key=lambda row: (scope_sort_key(row["scope"]), row["overhead"]))
    return ExperimentResult(
        rows=rows,
        K=cfg.K,
        scheme=cfg.scheme.value,
        seed=cfg.seed,
        trials=count,
        fill_rounds=[t.fill_rounds for t in trial_results],
        stalls=[t.stalls for t in trial_results],
        mean_received=mean_received,
        mean_unconnected=mean_unconnected,
        payload_failures=sum(1 for t in trial_results if t.payload_verified is False),
    )


def run_experiment(cfg: ExperimentConfig, workers: int = 1, verbose: bool = False) -> ExperimentResult:
    """
    Run cfg.trials independent trials and aggregate them

    Trial seeds come from (master seed, trial index), so the result does not
    depend on the number of workers.

    Args:
        cfg: Experiment configuration
        workers: joblib worker count (-1 for every core)
        verbose: Print per-trial progress

    Returns:
        ExperimentResult with averaged rows and delay statistics
    """
    seeds = [trial_seed(cfg.seed, t) for t in range(cfg.trials)]
    start_time = time.time()

    if workers == 1:
        results = []
        for t, seed in enumerate(seeds):
            if verbose:
                current = t + 1
                percentage = f"{(current / cfg.trials * 100):.1f}"
                print(f"[{current}/{cfg.trials}] ({percentage}%) Trial {current}... ", end="", flush=True)
            trial_start_time = time.time()
            results.append(run_trial(cfg, seed, t))
            if verbose:
                trial_time = f"{(time.time() - trial_start_time):.2f}"
                print(f"✓ {results[-1].rounds} rounds ({trial_time}s)")
    else:
        if verbose:
            print(f"🔍 Running {cfg.trials} trials on {workers} workers... ", end="", flush=True)
        results = Parallel(n_jobs=workers)(
            delayed(run_trial)(cfg, seed, t) for t, seed in enumerate(seeds)
        )
        if verbose:
            print(f"✓ ({(time.time() - start_time):.2f}s)")

    return aggregate_trials(cfg, results)
