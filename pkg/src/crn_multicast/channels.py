"""Unified channel selection for a transmission group.

Every scheme reduces to a per-channel score followed by an argmax over the
idle (candidate) channels, ties going to the smallest channel id:

* POS  - worst receiver's probability of success (plain max POS for unicast)
* MASA - average availability time of the channel
* MDR  - worst receiver's data rate
* RS   - uniform random choice

Channel ids are 0-based column indices of the link table.
"""

from __future__ import annotations

from enum import Enum
from typing import Iterable, Optional

import numpy as np

from .params import NetworkParams
from .radio import LinkChannelTable
from .trees import TransmissionGroup

NO_CHANNEL = -1


class Scheme(str, Enum):
    POS = "POS"
    MASA = "MASA"
    MDR = "MDR"
    RS = "RS"


def candidate_channels(params: NetworkParams, rng: np.random.Generator) -> frozenset:
    """Channels idle right now, each independently with probability ``idle_prob``."""
    idle = rng.random(params.num_channels) < params.idle_prob
    return frozenset(np.flatnonzero(idle).tolist())


def _argmax_over(scores: np.ndarray, candidates: Iterable[int]) -> Optional[int]:
    best = None
    for ch in sorted(candidates):
        if best is None or scores[ch] > scores[best]:
            best = ch
    return best


def min_receiver_pos(group: TransmissionGroup, table: LinkChannelTable) -> np.ndarray:
    rows = [table.pos_of(group.transmitter, r) for r in group.receivers]
    return np.min(rows, axis=0)


def min_receiver_rate(group: TransmissionGroup, table: LinkChannelTable) -> np.ndarray:
    rows = [table.rate_of(group.transmitter, r) for r in group.receivers]
    return np.min(rows, axis=0)


def assign_pos(group: TransmissionGroup, table: LinkChannelTable, candidates) -> Optional[int]:
    return _argmax_over(min_receiver_pos(group, table), candidates)


def assign_masa(group: TransmissionGroup, table: LinkChannelTable, candidates, mu) -> Optional[int]:
    return _argmax_over(np.asarray(mu, dtype=float), candidates)


def assign_mdr(group: TransmissionGroup, table: LinkChannelTable, candidates) -> Optional[int]:
    return _argmax_over(min_receiver_rate(group, table), candidates)


def assign_rs(group: TransmissionGroup, candidates, rng: np.random.Generator) -> Optional[int]:
    pool = sorted(candidates)
    if not pool:
        return None
    return int(pool[rng.integers(len(pool))])


def assign(scheme: Scheme, group, table, candidates, rng=None) -> Optional[int]:
    scheme = Scheme(scheme)
    if scheme is Scheme.POS:
        return assign_pos(group, table, candidates)
    if scheme is Scheme.MASA:
        return assign_masa(group, table, candidates, table.mu)
    if scheme is Scheme.MDR:
        return assign_mdr(group, table, candidates)
    return assign_rs(group, candidates, rng)


def channel_scores(scheme: Scheme, group: TransmissionGroup, table: LinkChannelTable) -> np.ndarray:
    """Deterministic per-channel score of a scheme (RS has none)."""
    scheme = Scheme(scheme)
    if scheme is Scheme.POS:
        return min_receiver_pos(group, table)
    if scheme is Scheme.MASA:
        return np.asarray(table.mu, dtype=float)
    if scheme is Scheme.MDR:
        return min_receiver_rate(group, table)
    raise ValueError("RS has no deterministic score")


def assign_batch(
    scheme: Scheme,
    group: TransmissionGroup,
    table: LinkChannelTable,
    idle: np.ndarray,
    rs_keys: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Choose a channel for many packet attempts at once.

    ``idle`` is a boolean ``(packets, N)`` candidate mask. RS picks the idle
    channel with the largest ``rs_keys`` entry, which is uniform over the
    candidates when the keys are i.i.d. Returns ``NO_CHANNEL`` where no channel
    is idle.
    """
    scheme = Scheme(scheme)
    if scheme is Scheme.RS:
        scores = rs_keys
    else:
        scores = np.broadcast_to(channel_scores(scheme, group, table), idle.shape)
    masked = np.where(idle, scores, -np.inf)
    # argmax returns the first maximum, i.e. the smallest channel id on ties
    choice = masked.argmax(axis=1)
    return np.where(idle.any(axis=1), choice, NO_CHANNEL)
