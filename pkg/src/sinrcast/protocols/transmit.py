from __future__ import annotations

from typing import Any, Callable, Iterable, Mapping

from ..geometry import boxes_of
from ..runtime import Inbox, Simulator
from ..selectors import Ssf

__all__ = ["box_map", "diluted_transmit", "execute_ssf", "merge_inbox"]


def box_map(sim: Simulator, stations: Iterable[int], c: float) -> dict[int, tuple[int, int]]:
    """Grid coordinates in ``G_c`` of each station (computed from its own position)."""
    ids = list(stations)
    if not ids:
        return {}
    net = sim.net
    pos = net.positions[[net.index[s] for s in ids]]
    b = boxes_of(pos, c)
    return {s: (int(i), int(j)) for s, (i, j) in zip(ids, b)}


def merge_inbox(into: Inbox, more: Inbox) -> Inbox:
    for rx, msgs in more.items():
        into.setdefault(rx, []).extend(msgs)
    return into


def diluted_transmit(
    sim: Simulator,
    stations: Iterable[int],
    x: float,
    d: int,
    tag: str = "diluted",
    payload: Callable[[int], Mapping[str, Any]] | None = None,
) -> Inbox:
    """``d**2`` rounds; in round ``(a, b)`` the stations whose ``G_x`` box is
    congruent to ``(a, b)`` mod ``d`` transmit.

    The full ``d**2`` rounds elapse even when classes are empty.  Returns
    everything heard over the block.
    """
    if d < 1:
        raise ValueError(f"dilution must be >= 1, got {d}")
    boxes = box_map(sim, stations, x)
    slots: dict[int, list[int]] = {}
    for s, (i, j) in boxes.items():
        slots.setdefault((i % d) * d + (j % d), []).append(s)
    heard: Inbox = {}
    at = 0
    for slot in sorted(slots):
        sim.idle(slot - at)
        merge_inbox(heard, sim.exchange(slots[slot], tag, payload))
        at = slot + 1
    sim.idle(d * d - at)
    return heard


def execute_ssf(
    sim: Simulator,
    stations: Iterable[int],
    family: Ssf,
    tag: str = "ssf",
    payload: Callable[[int], Mapping[str, Any]] | None = None,
) -> Inbox:
    """One pass over ``family``: in round ``i`` the stations in set ``i`` transmit."""
    plan = family.schedule(stations)
    heard: Inbox = {}
    at = 0
    for r in sorted(plan):
        sim.idle(r - at)
        merge_inbox(heard, sim.exchange(plan[r], tag, payload))
        at = r + 1
    sim.idle(len(family) - at)
    return heard
