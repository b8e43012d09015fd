"""Deterministic broadcast by stages.

After the source's opening transmission, every stage elects a leader in
each ``G_z`` box holding freshly informed (active) stations and lets those
leaders relay the message with a diluted schedule.  A leader reaches
distance ``1 - eps'`` and every box-mate lies within ``eps'`` of it, so all
communication-graph neighbours of every active station hear the message by
the end of the stage.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

from ..geometry import granularity
from ..runtime import ACTIVE, ASLEEP, PASSIVE, RoundTrace, Simulator, phase_wrap, run_protocol
from ..sinr import CLASSICAL, DISTURBANCE, Disturbance, Network, comm_graph, disturbance_radius, eccentricity
from .config import ProtocolConfig
from .constants import StageParams
from .leader import EliminationRecord, LeaderMap, gen_election_rounds, gen_leader_election, gran_election_rounds, gran_leader_election
from .transmit import box_map, diluted_transmit

__all__ = [
    "GEN",
    "GRAN",
    "InadmissibleNetwork",
    "StageReport",
    "BroadcastResult",
    "stage_of_broadcast",
    "broadcast_program",
    "det_broadcast",
    "stage_rounds",
    "broadcast_rounds",
]

GEN = "gen"
GRAN = "gran"

MESSAGE = {"msg": "broadcast"}


class InadmissibleNetwork(ValueError):
    """The communication graph does not connect every station to the source."""


@dataclass
class StageReport:
    index: int
    start_round: int
    end_round: int
    active: tuple[int, ...]
    leaders: LeaderMap
    newly_active: tuple[int, ...]
    informed_after: frozenset[int]
    elimination: EliminationRecord | None = None


@dataclass
class BroadcastResult:
    variant: str
    stages_used: int
    rounds_used: int
    all_informed: bool
    timed_out: bool = False
    stages: list[StageReport] = field(default_factory=list)
    trace: list[RoundTrace] = field(default_factory=list)
    tau: int = 1

    @property
    def informed_count(self) -> int:
        return len(self.stages[-1].informed_after) if self.stages else 0


def stage_of_broadcast(
    sim: Simulator,
    variant: str,
    cfg: ProtocolConfig,
    sp: StageParams,
    index: int,
    g: float | None = None,
) -> StageReport:
    """Run one stage on the currently active stations."""
    states = sim.states
    V = sorted(s for s, st in states.items() if st.bcast_state == ACTIVE)
    start = sim.round_index
    rec = None
    tag = f"stage{index}"
    if variant == GEN:
        leaders, rec = gen_leader_election(sim, V, sp.z, cfg, tag=f"{tag}:gen")
    elif variant == GRAN:
        if g is None:
            raise ValueError("the granularity variant needs a granularity bound")
        leaders = gran_leader_election(sim, V, g, sp.z, cfg, listeners=V, tag=f"{tag}:gran")
    else:
        raise ValueError(f"unknown variant {variant!r}")

    chosen = sorted(leaders.leader_ids())
    zbox = box_map(sim, chosen, sp.z)
    d = cfg.dilution_for(sp.box_side, radius=sp.reach)
    woken: set[int] = set()
    for a in range(sp.l):
        for b in range(sp.l):
            group = [v for v in chosen if zbox[v][0] % sp.l == a and zbox[v][1] % sp.l == b]
            heard = diluted_transmit(sim, group, sp.box_side, d, f"{tag}:relay:{a},{b}", lambda s: MESSAGE)
            woken.update(w for w in heard if states[w].bcast_state == ASLEEP)
    for v in V:
        states[v].bcast_state = PASSIVE
    for w in woken:
        states[w].bcast_state = ACTIVE
    return StageReport(
        index,
        start,
        sim.round_index,
        tuple(V),
        leaders,
        tuple(sorted(woken)),
        frozenset(sim.informed()),
        rec,
    )


def broadcast_program(variant: str, cfg: ProtocolConfig, g: float | None = None) -> Callable[[Simulator], BroadcastResult]:
    """Program for :func:`~sinrcast.runtime.run_protocol`; the result's trace is filled in by the caller."""
    sp = StageParams.from_eps(cfg.params.eps)

    def program(sim: Simulator) -> BroadcastResult:
        src = sim.net.source
        states = sim.states
        states[src].bcast_state = ACTIVE
        states[src].informed = True
        heard = sim.exchange([src], "source", lambda s: MESSAGE)
        states[src].bcast_state = PASSIVE
        for w in heard:
            if states[w].bcast_state == ASLEEP:
                states[w].bcast_state = ACTIVE
        reports: list[StageReport] = []
        while any(st.bcast_state == ACTIVE for st in states.values()):
            reports.append(stage_of_broadcast(sim, variant, cfg, sp, len(reports) + 1, g))
        everyone = all(st.informed for st in states.values())
        return BroadcastResult(variant, len(reports), sim.round_index, everyone, stages=reports)

    program.__name__ = f"det_{variant}_broadcast"
    return program


def det_broadcast(
    variant: str,
    net: Network,
    model: str = CLASSICAL,
    *,
    seed: int = 0,
    cfg: ProtocolConfig | None = None,
    tau: int = 1,
    round_budget: int = 10**9,
    record: bool = True,
    distribution: Disturbance | None = None,
    ignore_beyond: float | None = None,
    **cfg_kw: Any,
) -> BroadcastResult:
    """Broadcast from ``net.source``; ``tau > 1`` wraps every round into a phase.

    Under the disturbance model receivers ignore senders beyond
    :func:`~sinrcast.sinr.disturbance_radius` unless ``ignore_beyond`` says
    otherwise.  Raises :class:`InadmissibleNetwork` before any round runs
    when some station is unreachable in the communication graph.
    """
    eps = net.params.eps
    if eccentricity(comm_graph(net), net.source) is None:
        raise InadmissibleNetwork(f"communication graph at radius {1 - eps:g} does not reach every station")
    if model == DISTURBANCE and 1 - eps / 2 > disturbance_radius(net.params):
        raise ValueError(
            f"relay reach {1 - eps / 2:g} exceeds the disturbance filter radius {disturbance_radius(net.params):g}; raise eps"
        )
    if cfg is None:
        cfg = ProtocolConfig.for_network(net, model, **cfg_kw)
    g = granularity(net) if variant == GRAN else None
    program = broadcast_program(variant, cfg, g)
    if ignore_beyond is None and model == DISTURBANCE:
        ignore_beyond = disturbance_radius(net.params)
    if tau > 1 or ignore_beyond is not None:
        program = phase_wrap(program, tau, ignore_beyond)
    run = run_protocol(program, net, model, round_budget, seed, record=record, distribution=distribution)
    if run.timed_out:
        informed = all(st.informed for st in run.states.values())
        res = BroadcastResult(variant, -1, run.rounds, informed, timed_out=True)
    else:
        res = run.value
    res.trace = run.trace
    res.tau = tau
    return res


def stage_rounds(variant: str, cfg: ProtocolConfig, g: float | None = None) -> int:
    """Rounds of one stage; fixed by the schedule regardless of who is active."""
    sp = StageParams.from_eps(cfg.params.eps)
    relay = sp.l**2 * cfg.dilution_for(sp.box_side, radius=sp.reach) ** 2
    if variant == GEN:
        return gen_election_rounds(sp.z, cfg) + relay
    if g is None:
        raise ValueError("the granularity variant needs a granularity bound")
    return gran_election_rounds(g, sp.z, cfg) + relay


def broadcast_rounds(variant: str, cfg: ProtocolConfig, stages: int, g: float | None = None, tau: int = 1) -> int:
    """Closed-form total: the source round plus ``stages`` stages, times ``tau``."""
    return tau * (1 + stages * stage_rounds(variant, cfg, g))
