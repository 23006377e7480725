"""Experiment parameters, random geometric topologies and the sampled channel environment."""

from __future__ import annotations

import dataclasses
from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

SeedLike = Union[int, np.random.SeedSequence]


class ParameterError(ValueError):
    """Raised when a NetworkParams invariant is violated."""


@dataclass(frozen=True)
class NetworkParams:
    field_side: float = 200.0  # meters
    num_nodes: int = 40
    num_destinations: int = 16
    num_channels: int = 20
    bandwidth: float = 1e6  # Hz
    tx_power: float = 0.1  # W
    packet_bits: int = 32768  # 4 KB, 1024 bytes/KB
    noise_density: float = 1e-18  # W/Hz
    path_loss_exp: float = 4.0
    wavelength: float = 0.5  # m, 600 MHz (TV white space) carrier
    tx_range: float = 100.0  # m
    idle_prob: float = 0.5
    mu_range: tuple[float, float] = (0.002, 0.070)  # s
    num_packets: int = 100
    num_trials: int = 200
    master_seed: int = 2016
    fixed_rate_override: Optional[float] = None  # bits/s
    fixed_mu_override: Optional[float] = None  # s

    def __post_init__(self):
        object.__setattr__(self, "mu_range", tuple(float(v) for v in self.mu_range))
        self.validate()

    def validate(self) -> None:
        checks = [
            (self.field_side > 0, "field_side", "field_side > 0"),
            (self.num_nodes >= 2, "num_nodes", "num_nodes >= 2"),
            (
                1 <= self.num_destinations <= self.num_nodes - 1,
                "num_destinations",
                "1 <= num_destinations <= num_nodes - 1",
            ),
            (self.num_channels >= 1, "num_channels", "num_channels >= 1"),
            (self.bandwidth > 0, "bandwidth", "bandwidth > 0"),
            (self.tx_power > 0, "tx_power", "tx_power > 0"),
            (self.packet_bits > 0, "packet_bits", "packet_bits > 0"),
            (self.noise_density > 0, "noise_density", "noise_density > 0"),
            (self.path_loss_exp > 0, "path_loss_exp", "path_loss_exp > 0"),
            (self.wavelength > 0, "wavelength", "wavelength > 0"),
            (self.tx_range > 0, "tx_range", "tx_range > 0"),
            (0.0 <= self.idle_prob <= 1.0, "idle_prob", "0 <= idle_prob <= 1"),
            (len(self.mu_range) == 2, "mu_range", "mu_range is a (low, high) pair"),
            (self.mu_range[0] > 0, "mu_range", "mu_range low > 0"),
            (self.mu_range[0] <= self.mu_range[-1], "mu_range", "mu_range low <= high"),
            (self.num_packets >= 1, "num_packets", "num_packets >= 1"),
            (self.num_trials >= 1, "num_trials", "num_trials >= 1"),
            (0 <= self.master_seed < 2**64, "master_seed", "master_seed is a 64-bit unsigned integer"),
            (
                self.fixed_rate_override is None or self.fixed_rate_override > 0,
                "fixed_rate_override",
                "fixed_rate_override > 0",
            ),
            (
                self.fixed_mu_override is None or self.fixed_mu_override > 0,
                "fixed_mu_override",
                "fixed_mu_override > 0",
            ),
        ]
        for ok, name, rule in checks:
            if not ok:
                raise ParameterError(f"{name}: violates {rule}")

    def replace(self, **changes) -> "NetworkParams":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True, eq=False)
class Topology:
    """One random network realisation.

    ``edges`` holds sorted node pairs ``(i, j)`` with ``i < j``; row ``k`` of
    ``gains`` is the per-channel Rayleigh power gain of ``edges[k]``.
    """

    positions: np.ndarray  # (M, 2)
    source: int
    destinations: frozenset
    edges: tuple
    gains: np.ndarray  # (E, N)
    mu: np.ndarray  # (N,)
    attempts: int = 1
    unreachable: frozenset = field(default_factory=frozenset)

    @property
    def num_nodes(self) -> int:
        return len(self.positions)

    def __eq__(self, other):
        if not isinstance(other, Topology):
            return NotImplemented
        return (
            np.array_equal(self.positions, other.positions)
            and self.source == other.source
            and self.destinations == other.destinations
            and self.edges == other.edges
            and np.array_equal(self.gains, other.gains)
            and np.array_equal(self.mu, other.mu)
            and self.attempts == other.attempts
            and self.unreachable == other.unreachable
        )

    __hash__ = None


def _seed_sequence(seed: SeedLike) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(int(seed))


def child_seed(seed: SeedLike, *key: int) -> np.random.SeedSequence:
    """Deterministic child of ``seed``; unlike ``SeedSequence.spawn`` it does not mutate the parent."""
    ss = _seed_sequence(seed)
    return np.random.SeedSequence(ss.entropy, spawn_key=tuple(ss.spawn_key) + tuple(key))


def range_edges(positions: np.ndarray, tx_range: float) -> tuple:
    """All pairs ``(i, j)``, ``i < j``, no farther apart than ``tx_range``."""
    diff = positions[:, None, :] - positions[None, :, :]
    dist = np.sqrt((diff**2).sum(axis=-1))
    i, j = np.nonzero(np.triu(dist <= tx_range, k=1))
    return tuple(zip(i.tolist(), j.tolist()))


def topology_from_positions(
    params: NetworkParams,
    positions,
    source: int,
    destinations,
    seed: SeedLike = 0,
) -> Topology:
    """Build a topology with fixed node placement; fading and availability are still sampled."""
    positions = np.asarray(positions, dtype=float)
    rng = np.random.default_rng(_seed_sequence(seed))
    edges = range_edges(positions, params.tx_range)
    gains = rng.exponential(1.0, size=(len(edges), params.num_channels))
    mu = _sample_mu(params, rng)
    return Topology(positions, int(source), frozenset(destinations), edges, gains, mu)


def _sample_mu(params: NetworkParams, rng: np.random.Generator) -> np.ndarray:
    low, high = params.mu_range
    mu = rng.uniform(low, high, size=params.num_channels)
    if params.fixed_mu_override is not None:
        mu = np.full(params.num_channels, float(params.fixed_mu_override))
    return mu


def generate_topology(params: NetworkParams, seed: SeedLike) -> Topology:
    params.validate()
    rng = np.random.default_rng(_seed_sequence(seed))
    L = params.field_side
    positions = rng.uniform(0.0, L, size=(params.num_nodes, 2))
    picked = rng.choice(params.num_nodes, size=params.num_destinations + 1, replace=False)
    source = int(picked[0])
    destinations = frozenset(int(v) for v in picked[1:])
    edges = range_edges(positions, params.tx_range)
    gains = rng.exponential(1.0, size=(len(edges), params.num_channels))
    mu = _sample_mu(params, rng)
    return Topology(positions, source, destinations, edges, gains, mu)


def reachable_nodes(edges, source) -> set:
    adj = {}
    for i, j in edges:
        adj.setdefault(i, []).append(j)
        adj.setdefault(j, []).append(i)
    seen = {source}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in adj.get(u, ()):
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return seen


def reachable_destinations(topology: Topology) -> set:
    seen = reachable_nodes(topology.edges, topology.source)
    return set(topology.destinations) & seen


def regenerate_until_connected(
    params: NetworkParams, seed: SeedLike, max_attempts: int = 100
) -> Topology:
    """Redraw the topology until every destination is reachable from the source.

    Attempt ``k`` uses the ``k``-th child of ``seed``. When all attempts are
    exhausted the last topology is returned with ``unreachable`` populated.
    """
    if max_attempts < 1:
        raise ParameterError("max_attempts: violates max_attempts >= 1")
    topo = None
    for attempt in range(1, max_attempts + 1):
        topo = generate_topology(params, child_seed(seed, attempt - 1))
        missing = frozenset(topo.destinations - reachable_destinations(topo))
        if not missing:
            return dataclasses.replace(topo, attempts=attempt)
    return dataclasses.replace(topo, attempts=max_attempts, unreachable=missing)
