from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

from ..selectors import Ssf, build_ssf, elimination_k
from ..sinr import DISTURBANCE, Network, SinrParams
from .constants import SQRT2, dilution

__all__ = ["ProtocolConfig", "MATCHING", "PSEUDOCODE"]

# survivor rules for the Elimination stage of the general leader election
MATCHING = "matching"
PSEUDOCODE = "pseudocode"


@dataclass(frozen=True)
class ProtocolConfig:
    """Knowledge shared by every station plus simulator-side tuning.

    ``n`` is the known upper bound on the number of stations and
    ``id_domain`` the ID range ``[1, I]``.  ``selector_k`` overrides the
    worst-case selectivity from :func:`~sinrcast.selectors.elimination_k`.
    ``margin`` scales the SINR threshold used when sizing dilutions; set it
    above 1 to keep intended links alive under multiplicative disturbances.
    """

    n: int
    params: SinrParams = field(default_factory=SinrParams)
    id_domain: int | None = None
    selector_k: int | None = None
    margin: float = 1.0
    pairing: str = MATCHING

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.id_domain is None:
            object.__setattr__(self, "id_domain", self.n**3)
        if self.pairing not in (MATCHING, PSEUDOCODE):
            raise ValueError(f"unknown pairing rule {self.pairing!r}")
        if self.margin < 1:
            raise ValueError("margin must be >= 1")

    @classmethod
    def for_network(cls, net: Network, model: str = "classical", **kw) -> "ProtocolConfig":
        if model == DISTURBANCE and "margin" not in kw:
            kw["margin"] = 1.0 / (1.0 - net.params.eta)
        return cls(net.n_bound, net.params, net.id_domain, **kw)

    @property
    def log_n(self) -> int:
        return max(1, math.ceil(math.log2(self.n))) if self.n > 1 else 1

    def dilution_for(self, box_side: float, radius: float | None = None) -> int:
        """Dilution making one-per-box senders ``radius``-successful (default ``2*sqrt(2)*box_side``)."""
        if radius is None:
            radius = 2 * SQRT2 * box_side
        return _cached_dilution(self.n, self.params, radius, box_side, self.margin)

    def selectivity(self, z: float) -> int:
        if self.selector_k is not None:
            return min(self.selector_k, self.id_domain)
        return min(elimination_k(self.params, 1 - SQRT2 * z), self.id_domain)

    def ssf(self, z: float) -> Ssf:
        return _cached_ssf(self.id_domain, self.selectivity(z))


_dilutions: dict = {}
_ssfs: dict = {}


def _cached_dilution(n, params, radius, box_side, margin) -> int:
    key = (n, params, radius, box_side, margin)
    d = _dilutions.get(key)
    if d is None:
        d = _dilutions[key] = dilution(n, params, radius, box_side, margin)
    return d


def _cached_ssf(I: int, k: int) -> Ssf:
    f = _ssfs.get((I, k))
    if f is None:
        f = _ssfs[(I, k)] = build_ssf(I, k)
    return f
