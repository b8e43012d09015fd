"""Checks run against recorded traces and protocol results.

Each function returns a list of human-readable problems; an empty list
means the property held.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

from ..runtime import RoundTrace
from ..sinr import Network, bfs_layers, comm_graph, sinr
from .broadcast import BroadcastResult

__all__ = [
    "recheck_receptions",
    "missed_receptions",
    "coverage_problems",
    "progress_problems",
]


def recheck_receptions(trace: Iterable[RoundTrace], net: Network) -> list[str]:
    """Recompute every classical round with the scalar SINR and compare receptions."""
    beta = net.params.beta
    out = []
    for rec in trace:
        T = set(rec.transmitters)
        expect = set()
        for u in net.ids:
            if u in T:
                continue
            for v in rec.transmitters:
                if sinr(v, u, rec.transmitters, net) >= beta:
                    expect.add((u, v))
        got = set(rec.receptions)
        if got != expect:
            out.append(f"round {rec.round_index}: recorded {sorted(got ^ expect)} disagree with SINR")
    return out


def missed_receptions(trace: Iterable[RoundTrace], net: Network, radius: float, tag_prefix: str = "") -> list[tuple[int, int, int]]:
    """``(round, sender, receiver)`` for every non-transmitter within ``radius`` of a sender that did not decode it."""
    missed = []
    for rec in trace:
        if not rec.phase_tag.startswith(tag_prefix):
            continue
        T = set(rec.transmitters)
        got = set(rec.receptions)
        for v in rec.transmitters:
            row = net.distances[net.index[v]]
            for k in np.flatnonzero(row <= radius):
                u = net.ids[k]
                if u not in T and (u, v) not in got:
                    missed.append((rec.round_index, v, u))
    return missed


def coverage_problems(result: BroadcastResult, net: Network) -> list[str]:
    """Every station active in a stage must see all its communication-graph neighbours informed when the stage ends."""
    g = comm_graph(net)
    out = []
    for st in result.stages:
        for v in st.active:
            lost = sorted(w for w in g.neighbors(v) if w not in st.informed_after)
            if lost:
                out.append(f"stage {st.index}: neighbours {lost} of active station {v} not informed")
    return out


def progress_problems(result: BroadcastResult, net: Network) -> list[str]:
    """The farthest informed BFS layer must advance by at least one per stage until everyone is informed."""
    layers = bfs_layers(comm_graph(net), net.source)
    total = len(net)
    out = []
    reach = 1 if total > 1 else 0
    for st in result.stages:
        if len(st.informed_after) == total and reach == max(layers.values()):
            break
        far = max(layers[v] for v in st.informed_after)
        if len(st.informed_after) < total and far < reach + 1:
            out.append(f"stage {st.index}: farthest informed layer {far} did not pass {reach}")
        reach = far
    return out
