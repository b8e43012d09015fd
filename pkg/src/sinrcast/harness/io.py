"""Text formats for networks; traces live in :mod:`sinrcast.runtime`.

A network file has a header line ``n I eps alpha beta noise`` followed by
one ``id x y`` line per station, the source first.  Reals are written with
17 significant digits so that a read gives back the same doubles.
"""

from __future__ import annotations

from ..runtime import read_trace, write_trace
from ..sinr import Network, SinrParams

__all__ = ["write_network", "read_network", "format_network", "read_trace", "write_trace"]


def _real(x: float) -> str:
    return format(float(x), ".17g")


def format_network(net: Network) -> str:
    p = net.params
    head = " ".join([str(net.n_bound), str(net.id_domain), _real(p.eps), _real(p.alpha), _real(p.beta), _real(p.noise)])
    order = [net.source] + [s for s in net.ids if s != net.source]
    rows = [f"{s} {_real(net.pos(s)[0])} {_real(net.pos(s)[1])}" for s in order]
    return "\n".join([head, *rows]) + "\n"


def write_network(net: Network, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_network(net))


def read_network(path, eta: float | None = None, zeta: float | None = None) -> Network:
    """Parse a network file; ``eta`` and ``zeta`` are not stored and default as in :class:`SinrParams`."""
    with open(path) as fh:
        lines = [ln.split() for ln in fh if ln.strip()]
    if not lines or len(lines[0]) != 6:
        raise ValueError(f"{path}: header must be 'n I eps alpha beta noise'")
    n, I = int(lines[0][0]), int(lines[0][1])
    eps, alpha, beta, noise = (float(t) for t in lines[0][2:])
    extra = {k: v for k, v in (("eta", eta), ("zeta", zeta)) if v is not None}
    params = SinrParams(alpha=alpha, beta=beta, noise=noise, eps=eps, **extra)
    body = lines[1:]
    for k, row in enumerate(body, start=2):
        if len(row) != 3:
            raise ValueError(f"{path}:{k}: expected 'id x y'")
    ids = [int(r[0]) for r in body]
    pos = [[float(r[1]), float(r[2])] for r in body]
    if not ids:
        raise ValueError(f"{path}: no stations")
    return Network(tuple(ids), pos, params, id_domain=I, n_bound=n, source=ids[0])
