"""Network generators.

Every generator is deterministic in its seed, draws station IDs as a random
sample of ``[1, n^3]`` and only returns networks whose communication graph
connects every station to the source.
"""

from __future__ import annotations

import math

import numpy as np

from ..sinr import Network, SinrParams, comm_graph, eccentricity

__all__ = [
    "GENERATORS",
    "GenerationFailure",
    "line_network",
    "grid_network",
    "uniform_disc_network",
    "cluster_network",
    "generate",
]

# keeps nominal spacings strictly inside the communication radius after rounding
SPACING_GUARD = 1e-9


class GenerationFailure(RuntimeError):
    def __init__(self, msg: str, attempts: int):
        super().__init__(f"{msg} after {attempts} attempts")
        self.attempts = attempts


def _ids(rng: np.random.Generator, n: int, id_domain: int) -> np.ndarray:
    return rng.choice(id_domain, size=n, replace=False) + 1


def _assemble(pos: np.ndarray, rng, params: SinrParams, n_bound: int | None, source_row: int = 0) -> Network:
    n = len(pos)
    n_bound = n if n_bound is None else n_bound
    ids = _ids(rng, n, n_bound**3)
    return Network(tuple(int(i) for i in ids), pos, params, n_bound=n_bound, source=int(ids[source_row]))


def _connected(net: Network) -> bool:
    return eccentricity(comm_graph(net), net.source) is not None


def line_network(n: int, seed: int, params: SinrParams | None = None, spacing: float | None = None, n_bound: int | None = None) -> Network:
    """``n`` stations on the x-axis; the source sits at the left end."""
    params = params or SinrParams()
    reach = 1 - params.eps
    s = reach * (1 - SPACING_GUARD) if spacing is None else spacing
    if s > reach:
        raise ValueError(f"spacing {s} exceeds the communication radius {reach}")
    pos = np.c_[np.arange(n) * s, np.zeros(n)]
    return _assemble(pos, np.random.default_rng(seed), params, n_bound)


def grid_network(n: int, seed: int, params: SinrParams | None = None, spacing: float | None = None, n_bound: int | None = None) -> Network:
    """First ``n`` points of a ``ceil(sqrt(n))``-wide lattice, filled row by row."""
    params = params or SinrParams()
    reach = 1 - params.eps
    s = reach * (1 - SPACING_GUARD) if spacing is None else spacing
    if s > reach:
        raise ValueError(f"spacing {s} exceeds the communication radius {reach}")
    side = math.isqrt(n - 1) + 1 if n > 1 else 1
    k = np.arange(n)
    pos = np.c_[(k % side) * s, (k // side) * s]
    return _assemble(pos, np.random.default_rng(seed), params, n_bound)


def uniform_disc_network(
    n: int,
    seed: int,
    params: SinrParams | None = None,
    area_scale: float = 1.0,
    max_retries: int = 200,
    n_bound: int | None = None,
) -> tuple[Network, int]:
    """Uniform points in a disc, redrawn until connected.

    The radius ``area_scale * (1 - eps) * sqrt(n / (2 ln n))`` keeps the
    expected degree near ``2 ln n``, close to the connectivity threshold.
    Returns the network and the number of rejected draws.
    """
    params = params or SinrParams()
    rng = np.random.default_rng(seed)
    R = area_scale * (1 - params.eps) * math.sqrt(n / (2 * math.log(max(n, 2))))
    for attempt in range(max_retries):
        r = R * np.sqrt(rng.random(n))
        th = 2 * np.pi * rng.random(n)
        net = _assemble(np.c_[r * np.cos(th), r * np.sin(th)], rng, params, n_bound)
        if _connected(net):
            return net, attempt
    raise GenerationFailure(f"uniform disc of radius {R:.4g} with {n} stations stayed disconnected", max_retries)


def cluster_network(
    n: int,
    seed: int,
    params: SinrParams | None = None,
    clusters: int = 4,
    g_target: float = 100.0,
    n_bound: int | None = None,
) -> Network:
    """Identical small lattices of spacing ``1 / g_target`` chained along the x-axis.

    Corresponding stations of consecutive clusters are ``0.95 * (1 - eps)``
    apart, so the chain is connected and its eccentricity from the source
    is ``clusters - 1`` hops.
    """
    params = params or SinrParams()
    if clusters < 1 or n < clusters:
        raise ValueError("need at least one station per cluster")
    step = 0.95 * (1 - params.eps)
    per = math.ceil(n / clusters)
    side = math.isqrt(per - 1) + 1
    width = (side - 1) * math.sqrt(2) / g_target
    if width >= step / 2:
        raise ValueError(f"clusters of {per} stations at spacing {1 / g_target:g} are too wide to chain")
    k = np.arange(per)
    local = np.c_[(k % side), (k // side)] / g_target
    pos = np.concatenate([local + [c * step, 0.0] for c in range(clusters)])[:n]
    return _assemble(pos, np.random.default_rng(seed), params, n_bound)


GENERATORS = ("uniform-disc", "grid", "line", "cluster")


def generate(
    kind: str,
    n: int,
    seed: int,
    params: SinrParams | None = None,
    *,
    area_scale: float = 1.0,
    spacing: float | None = None,
    clusters: int = 4,
    g_target: float = 100.0,
    n_bound: int | None = None,
    max_retries: int = 200,
) -> tuple[Network, int]:
    """Dispatch on ``kind``; returns the network and the rejected-draw count."""
    if n < 1:
        raise ValueError("n must be positive")
    if kind == "line":
        net, rejected = line_network(n, seed, params, spacing, n_bound), 0
    elif kind == "grid":
        net, rejected = grid_network(n, seed, params, spacing, n_bound), 0
    elif kind == "uniform-disc":
        net, rejected = uniform_disc_network(n, seed, params, area_scale, max_retries, n_bound)
    elif kind == "cluster":
        net, rejected = cluster_network(n, seed, params, clusters, g_target, n_bound), 0
    else:
        raise ValueError(f"unknown generator {kind!r}; choose from {', '.join(GENERATORS)}")
    if not _connected(net):
        raise GenerationFailure(f"{kind} network with {n} stations is disconnected at radius {1 - net.params.eps:g}", 1)
    return net, rejected
