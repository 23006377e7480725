"""Monte-Carlo multicast sessions: throughput and packet delivery rate.

A trial draws a topology, builds the link table and the configured tree,
then pushes ``num_packets`` packets through the tree. Every transmission
group sees a fresh idle-channel sample per packet, picks a channel with the
configured scheme and each receiver succeeds with the POS of that channel.
A destination gets a packet only if every hop on its path succeeded.

Each trial's randomness comes from four independent child streams of its
seed (topology, channel idleness, RS choices, delivery draws), so switching
the scheme or tree leaves the topology of a given trial unchanged.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .channels import NO_CHANNEL, Scheme, assign_batch, min_receiver_rate
from .params import NetworkParams, SeedLike, child_seed, regenerate_until_connected
from .radio import LinkChannelTable, build_table
from .trees import EdgeMetric, MulticastTree, TreeKind, build_tree, edge_weights

TOPOLOGY, IDLE, RS_STREAM, DELIVERY = range(4)


@dataclass(frozen=True)
class RunConfig:
    scheme: Scheme = Scheme.POS
    tree: TreeKind = TreeKind.SPT
    metric: EdgeMetric = EdgeMetric.ETX

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        object.__setattr__(self, "tree", TreeKind(self.tree))
        object.__setattr__(self, "metric", EdgeMetric(self.metric))


@dataclass(frozen=True)
class SessionOutcome:
    delivered: int
    offered: int  # packets x destinations
    airtime: float  # seconds
    delivered_bits: float

    @property
    def pdr(self) -> float:
        return self.delivered / self.offered if self.offered else 0.0

    @property
    def throughput(self) -> float:
        if self.airtime <= 0 or not math.isfinite(self.airtime):
            return 0.0
        return self.delivered_bits / self.airtime


@dataclass(frozen=True)
class SimResult:
    throughput: float
    pdr: float
    trials: int
    throughput_stderr: float
    pdr_stderr: float
    scheme: Scheme
    tree_kind: TreeKind
    metric_kind: EdgeMetric
    throughput_samples: np.ndarray = field(repr=False, compare=False, default=None)
    pdr_samples: np.ndarray = field(repr=False, compare=False, default=None)


def simulate_session(
    tree: MulticastTree,
    table: LinkChannelTable,
    scheme: Scheme,
    *,
    num_packets: int,
    packet_bits: float,
    idle_prob: float,
    num_destinations: int,
    seed: SeedLike,
) -> SessionOutcome:
    """Run one multicast session over a fixed tree and link table.

    ``num_destinations`` is the full multicast group size; destinations that
    are not in ``tree`` count as never delivered.
    """
    groups = tree.groups
    n_ch = table.num_channels
    idle_rng = np.random.default_rng(child_seed(seed, IDLE))
    rs_rng = np.random.default_rng(child_seed(seed, RS_STREAM))
    del_rng = np.random.default_rng(child_seed(seed, DELIVERY))
    shape = (len(groups), num_packets, n_ch)
    idle = idle_rng.random(shape) < idle_prob
    rs_keys = rs_rng.random(shape)
    n_recv = sum(len(g.receivers) for g in groups)
    draws = del_rng.random((n_recv, num_packets))

    received = {tree.source: np.ones(num_packets, dtype=bool)}
    airtime = 0.0
    k = 0
    for gi, group in enumerate(groups):
        chosen = assign_batch(scheme, group, table, idle[gi], rs_keys[gi])
        sent = chosen != NO_CHANNEL
        ch = np.where(sent, chosen, 0)
        slowest = min_receiver_rate(group, table)[ch]
        with np.errstate(divide="ignore"):
            per_packet = np.where(slowest > 0, packet_bits / np.where(slowest > 0, slowest, 1.0), math.inf)
        airtime += float(per_packet[sent].sum())
        upstream = received[group.transmitter]
        for r in group.receivers:
            p = table.pos_of(group.transmitter, r)[ch]
            ok = sent & (draws[k] < p)
            received[r] = upstream & ok
            k += 1

    delivered = sum(int(received[d].sum()) for d in tree.destinations if d in received)
    offered = num_packets * num_destinations
    assert delivered <= offered
    return SessionOutcome(
        delivered=delivered,
        offered=offered,
        airtime=airtime,
        delivered_bits=float(delivered) * packet_bits,
    )


def trial_seed(master_seed: int, trial_index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(int(master_seed), spawn_key=(int(trial_index),))


def prepare_trial(params: NetworkParams, seed: SeedLike, config: RunConfig):
    """Topology, link table and multicast tree of one trial."""
    topo = regenerate_until_connected(params, child_seed(seed, TOPOLOGY))
    table = build_table(topo, params)
    weights = edge_weights(table, config.metric)
    tree = build_tree(config.tree, weights, topo.source, topo.destinations)
    return topo, table, tree


def simulate_trial(params: NetworkParams, seed: SeedLike, config: RunConfig = RunConfig()):
    """Returns ``(throughput bits/s, pdr)`` of one trial."""
    outcome = simulate_trial_outcome(params, seed, config)
    return outcome.throughput, outcome.pdr


def simulate_trial_outcome(params: NetworkParams, seed: SeedLike, config: RunConfig) -> SessionOutcome:
    topo, table, tree = prepare_trial(params, seed, config)
    return simulate_session(
        tree,
        table,
        config.scheme,
        num_packets=params.num_packets,
        packet_bits=params.packet_bits,
        idle_prob=params.idle_prob,
        num_destinations=params.num_destinations,
        seed=seed,
    )


def _stderr(x: np.ndarray) -> float:
    if len(x) < 2:
        return 0.0
    return float(np.std(x, ddof=1) / math.sqrt(len(x)))


def run_monte_carlo(params: NetworkParams, config: RunConfig = RunConfig(), workers: int = 1) -> SimResult:
    """Average ``num_trials`` independent trials seeded from ``master_seed``.

    Trials are gathered back in index order, so the result does not depend on
    ``workers``.
    """
    config = RunConfig(config.scheme, config.tree, config.metric)

    def one(i):
        return simulate_trial(params, trial_seed(params.master_seed, i), config)

    indices = range(params.num_trials)
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(one, indices))
    else:
        outcomes = [one(i) for i in indices]
    thr = np.array([o[0] for o in outcomes], dtype=float)
    pdr = np.array([o[1] for o in outcomes], dtype=float)
    return SimResult(
        throughput=float(thr.mean()),
        pdr=float(pdr.mean()),
        trials=len(outcomes),
        throughput_stderr=_stderr(thr),
        pdr_stderr=_stderr(pdr),
        scheme=config.scheme,
        tree_kind=config.tree,
        metric_kind=config.metric,
        throughput_samples=thr,
        pdr_samples=pdr,
    )
