"""Synchronous round engine.

Protocols are written as drivers that decide, from each station's local
state, who transmits in a round and then hand the transmitter set to
:meth:`Simulator.exchange`.  The simulator owns the global round counter,
enforces non-spontaneous wake-up, resolves receptions through the SINR
engine and records a trace.

Silent rounds are only counted, never resolved; traces keep the round index
of every non-silent round so the gaps are recoverable.
"""

from __future__ import annotations

import contextlib
import json
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping

import numpy as np

from .sinr import CLASSICAL, DISTURBANCE, Disturbance, Network, resolve_round

__all__ = [
    "ASLEEP",
    "ACTIVE",
    "PASSIVE",
    "NodeState",
    "Message",
    "RoundTrace",
    "Simulator",
    "ProtocolViolation",
    "BudgetExhausted",
    "RunResult",
    "run_protocol",
    "phase_wrap",
    "default_tau",
    "write_trace",
    "read_trace",
]

ASLEEP = "asleep"
ACTIVE = "active"
PASSIVE = "passive"



class ProtocolViolation(RuntimeError):
    pass


class BudgetExhausted(RuntimeError):
    pass


@dataclass
class NodeState:
    id: int
    pos: tuple[float, float]
    bcast_state: str = ASLEEP
    informed: bool = False
    cand: bool = False
    ph: int | None = None
    x_heard: frozenset[int] = frozenset()
    sel_state: str | None = None
    known_leader: int | None = None
    inbox: list["Message"] = field(default_factory=list)
    first_rx: int | None = None
    first_tx: int | None = None


@dataclass(frozen=True)
class Message:
    sender: int
    payload: Mapping[str, Any] = field(default_factory=dict)

    def control_fields(self) -> int:
        count = 0
        for value in self.payload.values():
            count += len(value) if isinstance(value, (set, frozenset, list, tuple, dict)) else 1
        return count


@dataclass(frozen=True)
class RoundTrace:
    round_index: int
    phase_tag: str
    transmitters: tuple[int, ...]
    receptions: tuple[tuple[int, int], ...]

    def to_json(self) -> str:
        return json.dumps(
            {
                "round": self.round_index,
                "phase_tag": self.phase_tag,
                "transmitters": list(self.transmitters),
                "receptions": [list(p) for p in self.receptions],
            },
            separators=(",", ":"),
        )


Inbox = dict[int, list[Message]]


class Simulator:
    """Round-synchronous world: a network, per-station state and a channel.

    ``tau > 1`` turns every :meth:`exchange` into a phase of ``tau`` physical
    rounds with the same transmitters; receptions are unioned over the phase.
    With ``ignore_beyond`` set, receivers discard messages from senders
    farther away than that; the trace still shows what the channel delivered.
    """

    def __init__(
        self,
        net: Network,
        model: str = CLASSICAL,
        seed: int = 0,
        *,
        tau: int = 1,
        record: bool = True,
        round_budget: int | None = None,
        distribution: Disturbance | None = None,
        states: dict[int, NodeState] | None = None,
        ignore_beyond: float | None = None,
    ):
        if tau < 1:
            raise ValueError("tau must be >= 1")
        self.net = net
        self.model = model
        self.seed = seed
        self.tau = tau
        self.record = record
        self.round_budget = round_budget
        self.distribution = distribution
        self.ignore_beyond = ignore_beyond
        self.round_index = 0
        self.trace: list[RoundTrace] = []
        if states is None:
            states = {sid: NodeState(sid, tuple(net.pos(sid))) for sid in net.ids}
        self.states = states

    def state(self, sid: int) -> NodeState:
        return self.states[sid]

    def informed(self) -> set[int]:
        return {sid for sid, st in self.states.items() if st.informed}

    @contextlib.contextmanager
    def phased(self, tau: int, ignore_beyond: float | None = None):
        if tau < 1:
            raise ValueError("tau must be >= 1")
        saved = self.tau, self.ignore_beyond
        self.tau = saved[0] * tau
        if ignore_beyond is not None:
            self.ignore_beyond = ignore_beyond if saved[1] is None else min(saved[1], ignore_beyond)
        try:
            yield self
        finally:
            self.tau, self.ignore_beyond = saved

    def _advance(self, rounds: int) -> None:
        if self.round_budget is not None and self.round_index + rounds > self.round_budget:
            self.round_index = self.round_budget
            raise BudgetExhausted(f"round budget {self.round_budget} exhausted")
        self.round_index += rounds

    def idle(self, rounds: int = 1) -> None:
        """Let ``rounds`` logical rounds pass with nobody transmitting."""
        if rounds < 0:
            raise ValueError("negative round count")
        self._advance(rounds * self.tau)

    def _physical(self, T: tuple[int, ...], tag: str) -> list[tuple[int, int]]:
        self._advance(1)
        rng = None
        if self.model == DISTURBANCE:
            rng = np.random.default_rng((self.seed, self.round_index))
        pairs = resolve_round(T, self.net, self.model, rng, self.distribution)
        if self.record:
            self.trace.append(RoundTrace(self.round_index, tag, T, tuple(pairs)))
        return pairs

    def exchange(
        self,
        transmitters: Iterable[int],
        tag: str = "",
        payload: Callable[[int], Mapping[str, Any]] | None = None,
    ) -> Inbox:
        """One logical round: ``transmitters`` send, everyone else listens.

        Returns receiver -> messages heard (at most one per sender).
        """
        T = tuple(sorted(set(transmitters)))
        if not T:
            self.idle(1)
            return {}
        for sid in T:
            st = self.states[sid]
            if st.bcast_state == ASLEEP:
                raise ProtocolViolation(f"station {sid} is asleep but was scheduled to transmit")
            if st.first_tx is None:
                st.first_tx = self.round_index + 1
        heard: dict[int, set[int]] = {}
        far = self.ignore_beyond
        dist, index = self.net.distances, self.net.index
        for _ in range(self.tau):
            for rx, tx in self._physical(T, tag):
                if far is None or dist[index[rx], index[tx]] <= far:
                    heard.setdefault(rx, set()).add(tx)
        if not heard:
            return {}
        msgs = {}
        for tx in sorted({s for ss in heard.values() for s in ss}):
            m = msgs[tx] = Message(tx, payload(tx) if payload else {})
            # payloads must stay polynomial in n: at most I^3 fields
            if m.control_fields() > self.net.id_domain**3:
                raise ProtocolViolation(f"message from {tx} carries too many control fields")
        inbox: Inbox = {}
        for rx in sorted(heard):
            st = self.states[rx]
            if not st.informed:
                st.informed = True
                st.first_rx = self.round_index
            got = [msgs[tx] for tx in sorted(heard[rx])]
            st.inbox = got
            inbox[rx] = got
        return inbox


@dataclass
class RunResult:
    trace: list[RoundTrace]
    states: dict[int, NodeState]
    rounds: int
    timed_out: bool
    value: Any = None


def run_protocol(
    program: Callable[[Simulator], Any],
    net: Network,
    model: str = CLASSICAL,
    round_budget: int = 10**9,
    seed: int = 0,
    *,
    record: bool = True,
    distribution: Disturbance | None = None,
    setup: Callable[[Simulator], None] | None = None,
    ignore_beyond: float | None = None,
) -> RunResult:
    """Run ``program`` to completion or until ``round_budget`` rounds pass.

    Exhausting the budget is reported through ``timed_out`` together with
    the partial trace; it is not raised.
    """
    if round_budget <= 0:
        raise ValueError("round budget must be positive")
    sim = Simulator(
        net, model, seed, record=record, round_budget=round_budget, distribution=distribution, ignore_beyond=ignore_beyond
    )
    if setup is not None:
        setup(sim)
    try:
        value = program(sim)
    except BudgetExhausted:
        return RunResult(sim.trace, sim.states, sim.round_index, True)
    return RunResult(sim.trace, sim.states, sim.round_index, False, value)


def phase_wrap(program: Callable[[Simulator], Any], tau: int, ignore_beyond: float | None = None) -> Callable[[Simulator], Any]:
    """Replace every round of ``program`` by a phase of ``tau`` rounds.

    Transmitters repeat in all rounds of a phase; local computation sees the
    union of the phase's receptions once, after its last round.  Messages
    from senders farther than ``ignore_beyond`` are dropped on arrival.
    """
    if tau < 1:
        raise ValueError("tau must be >= 1")

    def wrapped(sim: Simulator):
        with sim.phased(tau, ignore_beyond):
            return program(sim)

    wrapped.tau = tau
    wrapped.ignore_beyond = ignore_beyond
    wrapped.__name__ = f"phased_{getattr(program, '__name__', 'program')}"
    return wrapped


def default_tau(n: int, zeta: float, c: float = 3.0) -> int:
    """``ceil(c * ln(max(n, 2)) / ln(1/zeta))``; 1 when disturbances never fail."""
    if zeta <= 0:
        return 1
    return max(1, math.ceil(round(c * math.log(max(n, 2)) / math.log(1 / zeta), 9)))


def write_trace(trace: Iterable[RoundTrace], path) -> None:
    with open(path, "w") as fh:
        for rec in trace:
            fh.write(rec.to_json() + "\n")


def read_trace(path) -> list[RoundTrace]:
    out = []
    with open(path) as fh:
        for line in fh:
            d = json.loads(line)
            out.append(
                RoundTrace(
                    d["round"],
                    d["phase_tag"],
                    tuple(d["transmitters"]),
                    tuple(tuple(p) for p in d["receptions"]),
                )
            )
    return out
