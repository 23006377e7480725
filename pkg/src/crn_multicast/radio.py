"""Closed-form link physics: received power, Shannon rate, transmission time, POS and ETX.

All scalar functions also accept numpy arrays and broadcast.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from .params import NetworkParams, Topology

INF = math.inf


class DomainError(ValueError):
    pass


def received_power(p_t, d, n, wavelength, gamma):
    """Free-space-style received power ``p_t / d**n * (wavelength / 4 pi)**2 * gamma``."""
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise DomainError("distance must be > 0")
    out = (p_t / d**n) * (wavelength / (4.0 * math.pi)) ** 2 * np.asarray(gamma, dtype=float)
    return out if out.ndim else float(out)


def link_rate(bw, rx_power, n_0):
    r = bw * np.log2(1.0 + np.asarray(rx_power, dtype=float) / (bw * n_0))
    return r if np.ndim(r) else float(r)


def required_time(d_bits, rate):
    """Seconds to push ``d_bits`` at ``rate``; a zero rate gives ``inf``."""
    rate = np.asarray(rate, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        t = np.where(rate > 0, d_bits / np.where(rate > 0, rate, 1.0), INF)
    return t if t.ndim else float(t)


def pos_value(req_time, mu):
    """Probability that a channel stays idle for ``req_time``: ``exp(-req_time / mu)``."""
    mu = np.asarray(mu, dtype=float)
    if np.any(mu <= 0):
        raise DomainError("mu must be > 0")
    p = np.exp(-np.asarray(req_time, dtype=float) / mu)
    return p if p.ndim else float(p)


def etx_link(pos_per_channel) -> float:
    """Expected transmission count ``1 / max(POS)``; ``inf`` when every channel has POS 0."""
    best = float(np.max(np.asarray(pos_per_channel, dtype=float)))
    return INF if best <= 0.0 else 1.0 / best


@dataclass(frozen=True, eq=False)
class LinkChannelTable:
    """Per-(link, channel) radio quantities.

    Row ``k`` of every 2-D array belongs to ``edges[k]``; columns are channel
    ids ``0..N-1``. Links are symmetric so ``(u, v)`` and ``(v, u)`` share a row.
    """

    edges: tuple
    rx_power: np.ndarray
    rate: np.ndarray
    req_time: np.ndarray
    pos: np.ndarray
    etx: np.ndarray
    dist: np.ndarray
    mu: np.ndarray

    def __post_init__(self):
        index = {}
        for k, (u, v) in enumerate(self.edges):
            index[(u, v)] = k
            index[(v, u)] = k
        object.__setattr__(self, "_index", index)

    @property
    def num_channels(self) -> int:
        return self.pos.shape[1]

    def edge_id(self, u, v) -> int:
        return self._index[(u, v)]

    def has_edge(self, u, v) -> bool:
        return (u, v) in self._index

    def pos_of(self, u, v) -> np.ndarray:
        return self.pos[self._index[(u, v)]]

    def rate_of(self, u, v) -> np.ndarray:
        return self.rate[self._index[(u, v)]]

    def equals(self, other: "LinkChannelTable") -> bool:
        fields = ("rx_power", "rate", "req_time", "pos", "etx", "dist", "mu")
        return self.edges == other.edges and all(
            np.array_equal(getattr(self, f), getattr(other, f)) for f in fields
        )

    @classmethod
    def from_pos(
        cls,
        pos: Mapping[tuple, Sequence[float]],
        rate: Optional[Mapping[tuple, Sequence[float]]] = None,
        mu: Optional[Sequence[float]] = None,
        dist: Optional[Mapping[tuple, float]] = None,
    ) -> "LinkChannelTable":
        """Table with POS (and optionally rate) injected directly, bypassing the physics.

        Missing rates default to 1 bit/s; ``req_time`` is derived from rate with a
        1-bit packet, which only matters to callers that read it.
        """
        edges = tuple(pos)
        P = np.array([pos[e] for e in edges], dtype=float)
        n = P.shape[1]
        R = np.array([rate[e] for e in edges], dtype=float) if rate else np.ones_like(P)
        return cls(
            edges=edges,
            rx_power=np.zeros_like(P),
            rate=R,
            req_time=required_time(1.0, R),
            pos=P,
            etx=np.array([etx_link(row) for row in P]),
            dist=np.array([dist[e] if dist else 1.0 for e in edges], dtype=float),
            mu=np.ones(n) if mu is None else np.asarray(mu, dtype=float),
        )


def build_table(topology: Topology, params: NetworkParams) -> LinkChannelTable:
    edges = topology.edges
    n_ch = params.num_channels
    if edges:
        idx = np.array(edges)
        diff = topology.positions[idx[:, 0]] - topology.positions[idx[:, 1]]
        dist = np.sqrt((diff**2).sum(axis=1))
    else:
        dist = np.zeros(0)
    gains = topology.gains.reshape(len(edges), n_ch)
    rx = received_power(
        params.tx_power, dist[:, None], params.path_loss_exp, params.wavelength, gains
    )
    rx = np.asarray(rx, dtype=float).reshape(len(edges), n_ch)
    if params.fixed_rate_override is not None:
        rate = np.full_like(rx, float(params.fixed_rate_override))
    else:
        rate = np.asarray(link_rate(params.bandwidth, rx, params.noise_density)).reshape(rx.shape)
    tr = np.asarray(required_time(params.packet_bits, rate)).reshape(rx.shape)
    pos = np.asarray(pos_value(tr, topology.mu[None, :])).reshape(rx.shape)
    best = pos.max(axis=1) if len(edges) else np.zeros(0)
    with np.errstate(divide="ignore"):
        etx = np.where(best > 0, 1.0 / np.where(best > 0, best, 1.0), INF)
    return LinkChannelTable(
        edges=tuple(edges),
        rx_power=rx,
        rate=rate,
        req_time=tr,
        pos=pos,
        etx=etx,
        dist=dist,
        mu=np.array(topology.mu, dtype=float),
    )
