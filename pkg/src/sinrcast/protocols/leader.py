"""Local leader election in the boxes of a grid.

Two procedures choose one leader per occupied box of ``G_z``:

* :func:`gran_leader_election` needs a bound ``g`` on the granularity.  It
  starts from a grid fine enough that every station is alone in its box
  and doubles the grid with :func:`lead_increase` until it reaches ``z``.
* :func:`gen_leader_election` needs no granularity.  Elimination halves the
  candidates of every box with strongly-selective transmissions; Selection
  then runs the granularity-based election level by level on the
  survivors, whose spacing Elimination has bounded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

from ..geometry import min_pairwise_distance
from ..runtime import ACTIVE, PASSIVE, ProtocolViolation, Simulator
from .config import MATCHING, ProtocolConfig
from .constants import SQRT2
from .transmit import box_map, diluted_transmit, execute_ssf

__all__ = [
    "LeaderMap",
    "EliminationRecord",
    "GranularityViolation",
    "LEADER",
    "initial_side",
    "sub_box_label",
    "lead_increase",
    "gran_leader_election",
    "gran_election_rounds",
    "survivors",
    "gen_leader_election",
    "gen_election_rounds",
]

LEADER = "leader"

PARITY_CLASSES = ((0, 0), (0, 1), (1, 0), (1, 1))


class GranularityViolation(ValueError):
    """Two stations share a box of the starting grid, so the granularity bound is wrong."""

    def __init__(self, u: int, v: int, side: float):
        super().__init__(f"stations {u} and {v} share a box of side {side:g}; granularity bound violated")
        self.pair = (u, v)


@dataclass
class LeaderMap:
    """Outcome of an election on grid ``G_z``.

    ``leaders`` maps box coordinates to the leader's ID; ``known`` maps every
    participating station to the leader it believes rules its box.
    """

    z: float
    leaders: dict[tuple[int, int], int]
    known: dict[int, int | None]

    def leader_ids(self) -> set[int]:
        return set(self.leaders.values())

    def problems(self, sim: Simulator, stations: Iterable[int]) -> list[str]:
        """Violations of: one leader per occupied box, known to every box-mate."""
        stations = list(stations)
        boxes = box_map(sim, stations, self.z)
        out = []
        by_box: dict[tuple[int, int], list[int]] = {}
        for s in stations:
            by_box.setdefault(boxes[s], []).append(s)
        lead_boxes = box_map(sim, self.leaders.values(), self.z)
        for b, v in self.leaders.items():
            if lead_boxes[v] != b:
                out.append(f"leader {v} is not inside box {b}")
        for b, members in by_box.items():
            leader = self.leaders.get(b)
            if leader is None:
                out.append(f"box {b} has no leader")
                continue
            for s in members:
                if self.known.get(s) != leader:
                    out.append(f"station {s} in box {b} believes {self.known.get(s)} leads, not {leader}")
        return out


def initial_side(g: float, z: float) -> float:
    """Largest ``z / 2**i`` whose boxes hold at most one station at granularity ``g``.

    Two points of one half-open box are closer than ``sqrt(2) * side``, so
    ``sqrt(2) * side <= 1/g`` keeps stations at distance ``>= 1/g`` apart.
    """
    if g <= 0:
        raise ValueError("granularity must be positive")
    x = z
    while SQRT2 * x > 1.0 / g:
        x /= 2
    return x


def sub_box_label(box: tuple[int, int]) -> int:
    """1 bottom-left, 2 bottom-right, 3 top-left, 4 top-right inside the doubled box."""
    i, j = box
    return 1 + (i % 2) + 2 * (j % 2)


def lead_increase(
    sim: Simulator,
    leaders: Iterable[int],
    x: float,
    cfg: ProtocolConfig,
    listeners: Iterable[int] = (),
    tag: str = "lead-increase",
) -> tuple[set[int], dict[int, int | None]]:
    """Turn leaders of ``G_x`` boxes into leaders of ``G_2x`` boxes.

    Four diluted phases, one per sub-box label.  Every station keeps the
    sender with the smallest label heard from its own ``G_2x`` box (itself,
    if it is a leader with a smaller label); that station is the new leader.
    Returns the new leaders and each listener's belief.
    """
    leaders = sorted(set(leaders))
    everyone = sorted(set(leaders) | set(listeners))
    box = box_map(sim, everyone, x)
    seen: dict[tuple[int, int], int] = {}
    for v in leaders:
        if box[v] in seen:
            raise ProtocolViolation(f"stations {seen[box[v]]} and {v} both lead box {box[v]} of side {x:g}")
        seen[box[v]] = v
    d = cfg.dilution_for(x)
    parent = {s: (b[0] // 2, b[1] // 2) for s, b in box.items()}
    best: dict[int, tuple[int, int]] = {v: (sub_box_label(box[v]), v) for v in leaders}
    for lab in (1, 2, 3, 4):
        senders = [v for v in leaders if sub_box_label(box[v]) == lab]
        heard = diluted_transmit(
            sim, senders, x, d, f"{tag}:{lab}", payload=lambda s: {"pos": tuple(sim.net.pos(s)), "label": lab}
        )
        for w, msgs in heard.items():
            if w not in parent:
                continue
            for m in msgs:
                if parent.get(m.sender) == parent[w]:
                    cand = (m.payload["label"], m.sender)
                    if w not in best or cand < best[w]:
                        best[w] = cand
    known = {w: (best[w][1] if w in best else None) for w in everyone}
    new_leaders = {v for v in leaders if known[v] == v}
    return new_leaders, known


def gran_leader_election(
    sim: Simulator,
    stations: Iterable[int],
    g: float,
    z: float,
    cfg: ProtocolConfig,
    listeners: Iterable[int] = (),
    tag: str = "gran",
) -> LeaderMap:
    """Leaders of every occupied ``G_z`` box for stations of granularity ``<= g``."""
    if not z < 1 / SQRT2:
        raise ValueError(f"z must be below 1/sqrt(2), got {z}")
    V = sorted(set(stations))
    everyone = sorted(set(V) | set(listeners))
    x = initial_side(g, z)
    first = box_map(sim, V, x)
    owner: dict[tuple[int, int], int] = {}
    for v in V:
        if first[v] in owner:
            raise GranularityViolation(owner[first[v]], v, x)
        owner[first[v]] = v
    known: dict[int, int | None] = {w: (w if w in owner.values() else None) for w in everyone}
    A = set(V)
    level = 0
    while x <= z / 2:
        A, beliefs = lead_increase(sim, A, x, cfg, everyone, f"{tag}:L{level}")
        known.update(beliefs)
        x *= 2
        level += 1
    zbox = box_map(sim, A, z)
    return LeaderMap(z, {zbox[v]: v for v in sorted(A)}, known)


def gran_election_rounds(g: float, z: float, cfg: ProtocolConfig) -> int:
    """Rounds consumed by :func:`gran_leader_election`; independent of the input set."""
    x = initial_side(g, z)
    total = 0
    while x <= z / 2:
        total += 4 * cfg.dilution_for(x) ** 2
        x *= 2
    return total


def survivors(group: Iterable[int], X: dict[int, frozenset[int]], learned: dict[int, dict[int, frozenset[int]]], rule: str = MATCHING) -> tuple[set[int], list[tuple[int, int]]]:
    """Apply the Elimination pairing rule to one parity class.

    ``X[v]`` holds the box-mates ``v`` heard in the first pass; ``learned[v]``
    the sets ``X[u]`` that ``v`` received in the second pass.  A candidate
    ``v`` survives when ``X[v]`` is nonempty and, with ``u = min(X[v])``,
    ``v <= min(X[u] | {u})``.  The ``matching`` rule also requires
    ``v in X[u]``, i.e. that the two heard each other, which is what makes
    the survivors the smaller ends of a matching.  Returns survivors and
    their ``(v, u)`` pairs.
    """
    keep: set[int] = set()
    pairs: list[tuple[int, int]] = []
    for v in sorted(group):
        xv = X.get(v, frozenset())
        if not xv:
            continue
        u = min(xv)
        xu = learned.get(v, {}).get(u)
        if xu is None:
            continue
        if rule == MATCHING and v not in xu:
            continue
        if v > min(xu | {u}):
            continue
        keep.add(v)
        pairs.append((v, u))
    return keep, pairs


@dataclass
class EliminationRecord:
    """What Elimination did, kept for audits."""

    log_n: int
    ph: dict[int, int] = field(default_factory=dict)
    pairs: list[tuple[int, tuple[int, int], list[tuple[int, int]]]] = field(default_factory=list)
    box: dict[int, tuple[int, int]] = field(default_factory=dict)

    def level_sets(self) -> dict[tuple[int, int], list[int]]:
        """Per box, ``|V_C(l)|`` for ``l = 0 .. log_n + 1`` where ``V_C(l) = {ph > l}``."""
        out: dict[tuple[int, int], list[int]] = {}
        for v, b in self.box.items():
            out.setdefault(b, [0] * (self.log_n + 2))
            for l in range(self.log_n + 2):
                if self.ph[v] > l:
                    out[b][l] += 1
        return out

    def halving_violations(self) -> list[str]:
        bad = []
        for b, sizes in self.level_sets().items():
            for l in range(len(sizes) - 1):
                if 2 * sizes[l + 1] > sizes[l]:
                    bad.append(f"box {b}: |V_C({l + 1})|={sizes[l + 1]} > |V_C({l})|/2={sizes[l] / 2}")
        return bad

    def matching_violations(self) -> list[str]:
        bad = []
        for block, cls, pairs in self.pairs:
            seen: set[int] = set()
            for v, u in pairs:
                for s in (v, u):
                    if s in seen:
                        bad.append(f"block {block} class {cls}: station {s} in two pairs")
                    seen.add(s)
        return bad


def gen_leader_election(
    sim: Simulator,
    stations: Iterable[int],
    z: float,
    cfg: ProtocolConfig,
    tag: str = "gen",
) -> tuple[LeaderMap, EliminationRecord]:
    """Leaders of every occupied ``G_z`` box without granularity knowledge."""
    lam = 1 - SQRT2 * z
    if not lam > 0:
        raise ValueError(f"z must be below 1/sqrt(2), got {z}")
    V = sorted(set(stations))
    family = cfg.ssf(z)
    L = cfg.log_n
    box = box_map(sim, V, z)
    rec = EliminationRecord(L, box=dict(box))
    states = sim.states
    for v in V:
        states[v].cand = True
        states[v].ph = None
    pos = {v: tuple(sim.net.pos(v)) for v in V}

    # Elimination
    for i in range(1, L + 2):
        for cls in PARITY_CLASSES:
            group = [v for v in V if states[v].cand and (box[v][0] % 2, box[v][1] % 2) == cls]
            first = execute_ssf(sim, group, family, f"{tag}:elim{i}:{cls[0]},{cls[1]}:a", lambda s: {"pos": pos[s]})
            X: dict[int, frozenset[int]] = {}
            for w in V:
                heard = first.get(w, [])
                X[w] = frozenset(m.sender for m in heard if m.sender in box and box[m.sender] == box[w])
                states[w].x_heard = X[w]
            second = execute_ssf(sim, group, family, f"{tag}:elim{i}:{cls[0]},{cls[1]}:b", lambda s: {"pos": pos[s], "X": X[s]})
            learned = {w: {m.sender: m.payload["X"] for m in msgs} for w, msgs in second.items()}
            keep, pairs = survivors(group, X, learned, cfg.pairing)
            rec.pairs.append((i, cls, pairs))
            for v in group:
                if v not in keep:
                    states[v].cand = False
                    states[v].ph = i
                    rec.ph[v] = i
    for v in V:
        if states[v].cand:
            # only possible when more than n stations share a box
            raise ProtocolViolation(f"station {v} survived every Elimination block")

    # Selection
    for v in V:
        states[v].sel_state = ACTIVE
    leaders: dict[tuple[int, int], int] = {}
    known: dict[int, int | None] = {v: None for v in V}
    d = cfg.dilution_for(z)
    for i in range(L + 1, 0, -1):
        A = [v for v in V if rec.ph[v] == i and states[v].sel_state == ACTIVE]
        lm = gran_leader_election(sim, A, cfg.n / z, z, cfg, tag=f"{tag}:sel{i}")
        for v in A:
            known[v] = lm.known.get(v)
        new = sorted(lm.leader_ids())
        for v in new:
            states[v].sel_state = LEADER
            leaders[box[v]] = v
        heard = diluted_transmit(sim, new, z, d, f"{tag}:sel{i}:announce", lambda s: {"pos": pos[s], "leader": True})
        for w, msgs in heard.items():
            if w not in box or states[w].sel_state == LEADER:
                continue
            for m in msgs:
                if box.get(m.sender) == box[w]:
                    states[w].sel_state = PASSIVE
                    known[w] = m.sender
    for v in leaders.values():
        known[v] = v
    for v in V:
        states[v].known_leader = known[v]
    return LeaderMap(z, leaders, known), rec


def gen_election_rounds(z: float, cfg: ProtocolConfig) -> int:
    L = cfg.log_n
    elimination = (L + 1) * len(PARITY_CLASSES) * 2 * len(cfg.ssf(z))
    selection = (L + 1) * (gran_election_rounds(cfg.n / z, z, cfg) + cfg.dilution_for(z) ** 2)
    return elimination + selection


def closest_pair_heard(rec: EliminationRecord, sim: Simulator, z: float, n: int) -> list[str]:
    """Audit: for each box, the top Elimination level is spaced more than ``z/n`` apart."""
    bad = []
    by_box: dict[tuple[int, int], list[int]] = {}
    for v, b in rec.box.items():
        by_box.setdefault(b, []).append(v)
    for b, members in by_box.items():
        top = max(rec.ph[v] for v in members)
        level = [v for v in members if rec.ph[v] == top]
        dmin = min_pairwise_distance([sim.net.pos(v) for v in level])
        if dmin <= z / n:
            bad.append(f"box {b}: top level {top} keeps stations {dmin:.3g} <= z/n apart")
    return bad
