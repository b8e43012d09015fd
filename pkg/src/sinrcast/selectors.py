"""Strongly-selective families.

A family ``S`` of subsets of ``[1, I]`` is ``(I, k)``-strongly-selective when
for every nonempty ``Z`` with ``|Z| <= k`` and every ``z in Z`` some set
``S_i`` satisfies ``S_i & Z == {z}``.

Construction: the singleton family, the one-set family for ``k = 1``, or a
Kautz-Singleton code.  The latter maps ID ``v`` to the polynomial over
``GF(q)`` whose coefficients are the base-``q`` digits of ``v - 1``; set
``(a, b)`` holds every ID whose polynomial takes value ``b`` at ``a``.  Two
distinct polynomials of degree ``< m`` agree on fewer than ``m`` points, so
``q > (k - 1)(m - 1)`` isolates each member of any ``k``-set somewhere.
Whichever valid family is shortest is returned.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .sinr import SinrParams

__all__ = [
    "Ssf",
    "ExplicitSsf",
    "SingletonSsf",
    "WholeDomainSsf",
    "PolynomialSsf",
    "build_ssf",
    "verify_ssf",
    "find_violation",
    "elimination_k",
    "SIZE_CONSTANT",
    "EnumerationTooLarge",
    "read_ssf",
    "write_ssf",
]

# size <= SIZE_CONSTANT * k^2 * ceil(log2 I) for every family build_ssf returns
SIZE_CONSTANT = 4

MAX_ENUMERATION = 2_000_000


class EnumerationTooLarge(ValueError):
    """Exhaustive verification would exceed ``MAX_ENUMERATION`` subsets."""


class Ssf:
    """Base class: an ordered family of subsets of ``[1, id_domain]``.

    Subclasses answer :meth:`rounds_for` without materialising the sets,
    which matters when the ID domain is ``n^3``.
    """

    id_domain: int
    k: int
    method: str = "explicit"

    def __len__(self) -> int:
        raise NotImplementedError

    def rounds_for(self, ident: int) -> tuple[int, ...]:
        """Indices of the sets containing ``ident``, ascending."""
        raise NotImplementedError

    def schedule(self, ids: Iterable[int]) -> dict[int, list[int]]:
        """Map set index -> members of ``ids`` it contains (only nonempty entries)."""
        out: dict[int, list[int]] = {}
        for v in sorted(ids):
            for r in self.rounds_for(v):
                out.setdefault(r, []).append(v)
        return out

    @property
    def sets(self) -> list[frozenset[int]]:
        if self.id_domain > 1 << 16:
            raise MemoryError(f"refusing to materialise sets over an ID domain of {self.id_domain}")
        members: list[set[int]] = [set() for _ in range(len(self))]
        for v in range(1, self.id_domain + 1):
            for r in self.rounds_for(v):
                members[r].add(v)
        return [frozenset(s) for s in members]

    def size_bound(self) -> int:
        return SIZE_CONSTANT * self.k**2 * max(1, math.ceil(math.log2(self.id_domain)))

    def __repr__(self):
        return f"{type(self).__name__}(I={self.id_domain}, k={self.k}, size={len(self)})"


class ExplicitSsf(Ssf):
    def __init__(self, id_domain: int, k: int, sets: Sequence[Iterable[int]]):
        self.id_domain = id_domain
        self.k = k
        self._sets = [frozenset(int(v) for v in s) for s in sets]
        for s in self._sets:
            if s and (min(s) < 1 or max(s) > id_domain):
                raise ValueError(f"set {sorted(s)} leaves [1, {id_domain}]")
        self._index: dict[int, tuple[int, ...]] = {}
        for r, s in enumerate(self._sets):
            for v in s:
                self._index[v] = self._index.get(v, ()) + (r,)

    def __len__(self):
        return len(self._sets)

    def rounds_for(self, ident):
        return self._index.get(ident, ())

    @property
    def sets(self):
        return list(self._sets)


class SingletonSsf(Ssf):
    method = "singletons"

    def __init__(self, id_domain: int, k: int):
        self.id_domain, self.k = id_domain, k

    def __len__(self):
        return self.id_domain

    def rounds_for(self, ident):
        return (ident - 1,)


class WholeDomainSsf(Ssf):
    """One set holding every ID; strongly selective for ``k = 1`` only."""

    method = "whole-domain"

    def __init__(self, id_domain: int):
        self.id_domain, self.k = id_domain, 1

    def __len__(self):
        return 1

    def rounds_for(self, ident):
        return (0,)


class PolynomialSsf(Ssf):
    method = "kautz-singleton"

    def __init__(self, id_domain: int, k: int, q: int, m: int):
        if q**m < id_domain:
            raise ValueError("q**m must cover the ID domain")
        self.id_domain, self.k, self.q, self.m = id_domain, k, q, m
        self._cache: dict[int, tuple[int, ...]] = {}

    def __len__(self):
        return self.q * self.q

    def rounds_for(self, ident):
        hit = self._cache.get(ident)
        if hit is None:
            q = self.q
            digits = []
            v = ident - 1
            for _ in range(self.m):
                v, r = divmod(v, q)
                digits.append(r)
            a = np.arange(q, dtype=np.int64)
            val = np.zeros(q, dtype=np.int64)
            for coef in reversed(digits):
                val = (val * a + coef) % q
            hit = tuple(int(x) for x in a * q + val)
            self._cache[ident] = hit
        return hit


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % f for f in range(2, math.isqrt(p) + 1))


def _digits_needed(q: int, I: int) -> int:
    m, cover = 1, q
    while cover < I:
        m += 1
        cover *= q
    return m


@lru_cache(maxsize=None)
def _polynomial_params(I: int, k: int) -> tuple[int, int]:
    q = 2
    while True:
        if _is_prime(q):
            m = _digits_needed(q, I)
            if q > (k - 1) * (m - 1):
                return q, m
        q += 1


def build_ssf(I: int, k: int) -> Ssf:
    """Shortest of the constructions above for the given ``(I, k)``."""
    if I < 1 or k < 1:
        raise ValueError("I and k must be positive")
    if k > I:
        raise ValueError(f"k={k} exceeds the ID domain I={I}")
    if k == 1:
        return WholeDomainSsf(I)
    q, m = _polynomial_params(I, k)
    if q * q < I:
        return PolynomialSsf(I, k, q, m)
    return SingletonSsf(I, k)


def _enumeration_size(I: int, k: int) -> int:
    return sum(math.comb(I, j) for j in range(1, k + 1))


def find_violation(f: Ssf) -> tuple[tuple[int, ...], int] | None:
    """First ``(Z, z)`` with no set isolating ``z`` in ``Z``, or ``None``.

    Only maximal sets need checking: if ``z`` is isolated in ``Z`` it is
    isolated in every subset of ``Z`` containing it.
    """
    I, k = f.id_domain, f.k
    size = math.comb(I, min(k, I))
    if size > MAX_ENUMERATION:
        raise EnumerationTooLarge(f"refusing to enumerate {size} subsets of [1, {I}]")
    sets = f.sets
    # bitmask per ID: which sets contain it
    masks = [0] * (I + 1)
    for r, s in enumerate(sets):
        bit = 1 << r
        for v in s:
            masks[v] |= bit
    for Z in itertools.combinations(range(1, I + 1), min(k, I)):
        for z in Z:
            others = 0
            for w in Z:
                if w != z:
                    others |= masks[w]
            if masks[z] & ~others == 0:
                return Z, z
    return None


def verify_ssf(f: Ssf) -> bool:
    return find_violation(f) is None


def elimination_k(params: SinrParams, lam: float) -> int:
    """Selectivity that lets the closest pair of a set hear each other.

    ``d = ceil((8 * 2^(alpha/2) / (N * lam * (alpha - 2)))^(1/(alpha-2)))``,
    ``d' = ceil(d / lam^(1/(alpha-2)))`` and ``k = (2 d' + 1)^2``.
    """
    a = params.alpha
    if not a > 2:
        raise ValueError(f"unsupported parameters: alpha must exceed 2, got {a}")
    if not 0 < lam < 1:
        raise ValueError(f"lambda must lie in (0, 1), got {lam}")
    d = math.ceil((8 * 2 ** (a / 2) / (params.noise * lam * (a - 2))) ** (1 / (a - 2)) - 1e-12)
    d_prime = math.ceil(d / lam ** (1 / (a - 2)) - 1e-12)
    return (2 * d_prime + 1) ** 2


def write_ssf(f: Ssf, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"{f.id_domain} {f.k}\n")
        for s in f.sets:
            fh.write(" ".join(str(v) for v in sorted(s)) + "\n")


def read_ssf(path) -> ExplicitSsf:
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError("first line must be 'I k'")
        I, k = int(header[0]), int(header[1])
        sets = [[int(tok) for tok in line.split()] for line in fh]
    return ExplicitSsf(I, k, sets)
