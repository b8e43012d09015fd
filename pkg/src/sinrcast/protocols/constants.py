"""Flat function, dilution factors and per-stage geometry."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..sinr import SinrParams

SQRT2 = math.sqrt(2.0)

__all__ = [
    "flat_d_alpha",
    "naive_dilution",
    "dilution",
    "StageParams",
    "ceil_tol",
]


def ceil_tol(x: float, tol: float = 1e-9) -> int:
    """Ceiling that forgives floating noise such as 0.9 / 0.1 = 9.000000000000002."""
    return math.ceil(x - tol * max(1.0, abs(x)))


def _e_alpha(n: int, alpha: float) -> float:
    # sum in increasing magnitude order: smallest terms first
    i = np.arange(n, 0, -1, dtype=float)
    return float(np.sum(i ** (1.0 - alpha)))


def flat_d_alpha(n: int, params: SinrParams) -> float:
    """``2*sqrt(2) * (8 * beta * e_alpha(n))**(1/alpha)`` with ``e_alpha(n) = sum i^(1-alpha)``."""
    if not params.alpha > 2:
        raise ValueError(f"unsupported parameters: alpha must exceed 2, got {params.alpha}")
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    return 2 * SQRT2 * (8 * params.beta * _e_alpha(n, params.alpha)) ** (1.0 / params.alpha)


def naive_dilution(n: int, params: SinrParams, lam: float) -> int:
    """Dilution ``ceil((d_alpha(n) / lam)**(1/alpha))``.

    Kept for comparison only: it ignores the offset between sender and
    receiver boxes and misses receptions in practice (see ``dilution``).
    """
    return max(1, ceil_tol((flat_d_alpha(n, params) / lam) ** (1.0 / params.alpha)))


def dilution(n: int, params: SinrParams, radius: float, box_side: float, margin: float = 1.0) -> int:
    """Smallest per-axis dilution that makes every sender ``radius``-successful.

    Senders sit at most one per box of ``G_box_side`` and every sender in a
    dilution class transmits at once.  With ``rho = radius / box_side``, a
    receiver within ``radius`` of its sender is at least
    ``(i*d - 1 - rho) * box_side`` away from each of the ``8i`` class boxes
    on ring ``i``.  Requiring the received SINR to clear ``margin * beta``
    gives

        d >= 1 + rho + rho * (8 * margin * beta * e_alpha(n) / (1 - margin * radius**alpha))**(1/alpha).

    ``margin > 1`` leaves headroom for multiplicative SINR disturbances.
    """
    a = params.alpha
    slack = 1.0 - margin * radius**a
    if slack <= 0:
        raise ValueError(f"radius {radius} is out of reach at margin {margin}")
    rho = radius / box_side
    bound = 1.0 + rho + rho * (8 * margin * params.beta * _e_alpha(n, a) / slack) ** (1.0 / a)
    return ceil_tol(bound)


@dataclass(frozen=True)
class StageParams:
    """Geometry of one broadcast stage for communication-graph parameter ``eps``.

    ``z`` is the leader-election grid side, ``box_side`` the grid used to
    dilute leader transmissions and ``l`` the per-axis residue count of
    G_z boxes scheduled apart.  ``l`` starts from ``ceil((1 - eps') / eps')``
    and grows until two leaders sharing a residue can never share a
    ``box_side`` box.
    """

    eps: float
    eps_prime: float
    gamma_prime: float
    z: float
    lam: float
    l: int
    box_side: float
    reach: float

    @classmethod
    def from_eps(cls, eps: float) -> "StageParams":
        if not 0 < eps < 0.5:
            raise ValueError(f"eps must lie in (0, 1/2), got {eps}")
        ep = eps / 2
        z = ep / SQRT2
        box_side = (1 - ep) / (2 * SQRT2)
        l = ceil_tol((1 - ep) / ep)
        # same-residue boxes are (l - 1) * z apart; a box_side box spans sqrt(2) * box_side
        while (l - 1) * z < SQRT2 * box_side:
            l += 1
        return cls(
            eps=eps,
            eps_prime=ep,
            gamma_prime=(1 - ep) / (2 * SQRT2),
            z=z,
            lam=1 - SQRT2 * z,
            l=l,
            box_side=box_side,
            reach=1 - ep,
        )
