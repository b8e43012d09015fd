"""SINR reception: physical parameters, networks, round resolution.

A station ``u`` receives from ``v`` in a round with transmitter set ``T``
when ``v in T``, ``u not in T`` and

    SINR(v, u, T) = P d(v,u)^-a / (N + sum_{w in T, w != v} P d(w,u)^-a) >= beta.

With ``beta >= 1`` at most one sender can clear the threshold at a receiver.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Protocol

import numpy as np
from scipy.spatial.distance import cdist

__all__ = [
    "SinrParams",
    "Network",
    "CommGraph",
    "Model",
    "Disturbance",
    "UniformTailDisturbance",
    "sinr",
    "resolve_round",
    "comm_graph",
    "eccentricity",
    "bfs_layers",
    "disturbance_radius",
]

CLASSICAL = "classical"
OPPORTUNISTIC = "opportunistic"
DISTURBANCE = "disturbance"


class Model:
    CLASSICAL = CLASSICAL
    OPPORTUNISTIC = OPPORTUNISTIC
    DISTURBANCE = DISTURBANCE
    ALL = (CLASSICAL, OPPORTUNISTIC, DISTURBANCE)


@dataclass(frozen=True)
class SinrParams:
    """Physical model constants.

    ``power`` defaults to ``beta * noise`` so that the range of a lone
    transmitter is exactly 1.
    """

    alpha: float = 3.0
    beta: float = 1.0
    noise: float = 1.0
    power: float | None = None
    eps: float = 0.2
    eta: float = 0.2
    zeta: float = 0.1

    def __post_init__(self):
        if self.power is None:
            object.__setattr__(self, "power", self.beta * self.noise)
        if not self.alpha > 2:
            raise ValueError(f"unsupported parameters: alpha must exceed 2, got {self.alpha}")
        if not self.beta >= 1:
            raise ValueError(f"beta must be >= 1, got {self.beta}")
        if not self.noise >= 1:
            raise ValueError(f"ambient noise must be >= 1, got {self.noise}")
        if not math.isclose(self.power, self.beta * self.noise, rel_tol=1e-12):
            raise ValueError("power must equal beta * noise (unit transmission range)")
        if not 0 < self.eps < 1:
            raise ValueError(f"eps must lie in (0, 1), got {self.eps}")
        if not 0 < self.eta < 1:
            raise ValueError(f"eta must lie in (0, 1), got {self.eta}")
        if not 0 <= self.zeta < 1:
            raise ValueError(f"zeta must lie in [0, 1), got {self.zeta}")


@dataclass(frozen=True, eq=False)
class Network:
    """Stations with unique IDs and distinct planar positions.

    Stations are stored sorted by ID, so row ``k`` of :attr:`positions`
    belongs to ``ids[k]``.  ``n_bound`` is the upper bound on the number of
    stations known to every station; ``source`` marks the broadcast source.
    """

    ids: tuple[int, ...]
    positions: np.ndarray
    params: SinrParams = field(default_factory=SinrParams)
    id_domain: int | None = None
    n_bound: int | None = None
    source: int | None = None

    def __post_init__(self):
        ids = tuple(int(i) for i in self.ids)
        pos = np.asarray(self.positions, dtype=float).reshape(-1, 2)
        if len(ids) != len(pos):
            raise ValueError("ids and positions differ in length")
        if len(set(ids)) != len(ids):
            raise ValueError("invalid network: duplicate station IDs")
        if not np.all(np.isfinite(pos)):
            raise ValueError("invalid network: non-finite coordinates")
        order = np.argsort(ids, kind="stable")
        ids = tuple(ids[k] for k in order)
        pos = pos[order].copy()
        pos.setflags(write=False)
        if len(np.unique(pos, axis=0)) != len(pos):
            raise ValueError("invalid network: two stations share a position")
        n_bound = self.n_bound if self.n_bound is not None else len(ids)
        if n_bound < len(ids):
            raise ValueError("more stations than the declared bound n")
        id_domain = self.id_domain if self.id_domain is not None else max(n_bound**3, max(ids, default=1))
        if ids and (ids[0] < 1 or ids[-1] > id_domain):
            raise ValueError(f"station IDs must lie in [1, {id_domain}]")
        source = self.source if self.source is not None else (ids[0] if ids else None)
        if ids and source not in ids:
            raise ValueError(f"source {source} is not a station")
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "n_bound", int(n_bound))
        object.__setattr__(self, "id_domain", int(id_domain))
        object.__setattr__(self, "source", source)

    def __len__(self) -> int:
        return len(self.ids)

    @cached_property
    def index(self) -> dict[int, int]:
        return {sid: k for k, sid in enumerate(self.ids)}

    def pos(self, sid: int) -> np.ndarray:
        return self.positions[self.index[sid]]

    @cached_property
    def distances(self) -> np.ndarray:
        d = cdist(self.positions, self.positions)
        d.setflags(write=False)
        return d

    @cached_property
    def received_power(self) -> np.ndarray:
        """``P * d(v, u)^-alpha`` with sender rows and receiver columns."""
        d = self.distances.copy()
        np.fill_diagonal(d, np.inf)
        p = self.params.power * d ** (-self.params.alpha)
        p.setflags(write=False)
        return p

    def with_params(self, params: SinrParams) -> "Network":
        return Network(self.ids, self.positions, params, self.id_domain, self.n_bound, self.source)


def _indices(net: Network, stations: Iterable[int]) -> np.ndarray:
    try:
        return np.array(sorted(net.index[s] for s in set(stations)), dtype=np.int64)
    except KeyError as exc:
        raise ValueError(f"unknown station {exc.args[0]}") from None


def sinr(v: int, u: int, transmitters: Iterable[int], net: Network) -> float:
    """SINR of a transmission from ``v`` at ``u``; interference is summed by ascending ID."""
    T = sorted(set(transmitters))
    if v not in T:
        raise ValueError(f"sender {v} is not transmitting")
    if u in T:
        raise ValueError(f"undefined receiver: {u} is transmitting")
    if u == v:
        raise ValueError("sender and receiver coincide")
    pw = net.received_power
    iu = net.index[u]
    interference = 0.0
    for w in T:
        if w != v:
            interference += pw[net.index[w], iu]
    return pw[net.index[v], iu] / (net.params.noise + interference)


class Disturbance(Protocol):
    def sample(self, rng: np.random.Generator, shape: tuple[int, ...], eta: float, zeta: float) -> np.ndarray:
        ...


class UniformTailDisturbance:
    """Factor ~ U(1-eta, 1+eta) w.p. 1-zeta, else U(0, 1-eta] (adversarially low)."""

    def sample(self, rng, shape, eta, zeta):
        good = rng.uniform(1.0 - eta, 1.0 + eta, size=shape)
        low = (1.0 - eta) * (1.0 - rng.random(size=shape))
        tail = rng.random(size=shape) < zeta
        return np.where(tail, low, good)


def disturbance_radius(params: SinrParams) -> float:
    """Largest distance at which a lone link survives a (1-eta) scaling."""
    return (1.0 - params.eta) ** (1.0 / params.alpha)


def _classical(idx: np.ndarray, net: Network) -> list[tuple[int, int]]:
    pw = net.received_power[idx]
    t, n = pw.shape
    cols = np.arange(n)
    best = np.argmax(pw, axis=0)
    signal = pw[best, cols]
    masked = pw.copy()
    masked[best, cols] = 0.0
    # rows are in ascending ID order; axis-0 reduction adds them in that order
    interference = np.add.reduce(masked, axis=0)
    ratio = signal / (net.params.noise + interference)
    ok = ratio >= net.params.beta
    ok[idx] = False
    if t > 1 and ok.any():
        total = interference + signal
        others = pw / (net.params.noise + total - pw)
        others[best, cols] = 0.0
        if np.any(others[:, ok] >= net.params.beta):
            raise AssertionError("two senders cleared the SINR threshold at one receiver")
    receivers = np.flatnonzero(ok)
    return [(net.ids[r], net.ids[idx[best[r]]]) for r in receivers]


def _disturbed(idx, net, rng, distribution) -> list[tuple[int, int]]:
    p = net.params
    pw = net.received_power[idx]
    total = np.add.reduce(pw, axis=0)
    ratio = pw / (p.noise + total - pw)
    ratio *= distribution.sample(rng, ratio.shape, p.eta, p.zeta)
    ok = ratio >= p.beta
    ok &= net.distances[idx] <= disturbance_radius(p)
    ok[:, idx] = False
    receivers = np.flatnonzero(ok.any(axis=0))
    # several senders may clear beta once scaled; the strongest is decoded
    best = np.argmax(np.where(ok, ratio, -np.inf), axis=0)
    return [(net.ids[r], net.ids[idx[best[r]]]) for r in receivers]


def resolve_round(
    transmitters: Iterable[int],
    net: Network,
    model: str = CLASSICAL,
    rng: np.random.Generator | None = None,
    distribution: Disturbance | None = None,
) -> list[tuple[int, int]]:
    """Return the realised ``(receiver, sender)`` pairs, sorted by receiver.

    ``classical`` and ``opportunistic`` resolve identically; they differ only
    in which links the analysis credits.  ``disturbance`` scales each pair's
    SINR by an independent factor drawn from ``distribution`` and drops
    receptions from senders beyond :func:`disturbance_radius`.
    """
    if model not in Model.ALL:
        raise ValueError(f"unknown reception model {model!r}")
    idx = _indices(net, transmitters)
    if len(idx) == 0:
        return []
    if model == DISTURBANCE:
        if rng is None:
            raise ValueError("the disturbance model needs a random generator")
        return _disturbed(idx, net, rng, distribution or UniformTailDisturbance())
    return _classical(idx, net)


@dataclass(frozen=True)
class CommGraph:
    ids: tuple[int, ...]
    adjacency: dict[int, frozenset[int]]
    radius: float

    def neighbors(self, v: int) -> frozenset[int]:
        return self.adjacency[v]

    def edges(self) -> set[tuple[int, int]]:
        return {(u, v) for u, nb in self.adjacency.items() for v in nb if u < v}


def comm_graph(net: Network, eps_override: float | None = None) -> CommGraph:
    """Graph with an edge wherever two stations are within ``(1 - eps)``."""
    eps = net.params.eps if eps_override is None else eps_override
    radius = 1.0 - eps
    close = net.distances <= radius
    np.fill_diagonal(close, False)
    adjacency = {
        sid: frozenset(net.ids[k] for k in np.flatnonzero(close[i])) for i, sid in enumerate(net.ids)
    }
    return CommGraph(net.ids, adjacency, radius)


def bfs_layers(g: CommGraph, source: int) -> dict[int, int]:
    """Hop distance from ``source`` to every reachable station."""
    if source not in g.adjacency:
        raise ValueError(f"unknown station {source}")
    hops = {source: 0}
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for w in g.adjacency[v]:
            if w not in hops:
                hops[w] = hops[v] + 1
                queue.append(w)
    return hops


def eccentricity(g: CommGraph, source: int) -> int | None:
    """Largest hop distance from ``source``; ``None`` if some station is unreachable."""
    hops = bfs_layers(g, source)
    if len(hops) < len(g.ids):
        return None
    return max(hops.values())
