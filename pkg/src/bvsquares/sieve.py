"""Immutable least-prime-factor table and the arithmetic functions built on it."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Tuple

import numpy as np

from . import kernels
from .errors import ConfigurationError, RangeError

MAX_LIMIT = 400_000_000


@dataclass(frozen=True, eq=False)
class PrimeTable:
    """Least prime factors for ``1 <= n <= limit``.

    ``smallest_prime_factor[n]`` is stored as ``uint32`` (4 bytes per entry);
    ``smallest_prime_factor[0] = 0`` and ``smallest_prime_factor[1] = 1``.
    The arrays are read-only, so one table can be shared between threads.
    """

    limit: int
    smallest_prime_factor: np.ndarray = field(repr=False)
    primes: np.ndarray = field(repr=False)

    def _check(self, n: int) -> None:
        if n < 1 or n > self.limit:
            raise RangeError(f"n={n} outside table range [1, {self.limit}]")

    def factorize(self, n: int) -> list[Tuple[int, int]]:
        """Prime factorisation of ``n`` as ``[(p, e), ...]`` with p ascending."""
        self._check(n)
        spf = self.smallest_prime_factor
        out = []
        while n > 1:
            p = int(spf[n])
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        return out

    def prime_power_form(self, n: int) -> Tuple[int, int] | None:
        """``(p, k)`` if ``n = p**k`` with k >= 1, else None (exact form of Lambda)."""
        f = self.factorize(n)
        if len(f) == 1:
            return f[0]
        return None

    def arithmetic_tables(self, n: int | None = None):
        """Arrays ``(mu, phi, Lambda)`` indexed ``0..n``."""
        n = self.limit if n is None else n
        if n > self.limit:
            raise RangeError(f"n={n} exceeds table limit {self.limit}")
        if n == self.limit:
            return self._full_tables
        return kernels.arith_tables(self.smallest_prime_factor, n)

    @cached_property
    def _full_tables(self):
        tabs = kernels.arith_tables(self.smallest_prime_factor, self.limit)
        for a in tabs:
            a.setflags(write=False)
        return tabs

    def prime_powers(self, x: float):
        """Sorted prime powers ``n <= x`` and matching ``log p`` values."""
        xi = int(math.floor(x))
        if xi > self.limit:
            raise RangeError(f"x={x} exceeds table limit {self.limit}")
        if xi < 2:
            return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.float64)
        ns, logs = self._prime_power_list
        cut = int(np.searchsorted(ns, xi, side="right"))
        return ns[:cut], logs[:cut]

    @cached_property
    def _prime_power_list(self):
        p = self.primes.astype(np.int64)
        logp = np.log(p.astype(np.float64))
        ns, ls = [p], [logp]
        pk = p.copy()
        mask = np.ones(len(p), dtype=bool)
        while True:
            mask &= pk <= self.limit // p
            if not mask.any():
                break
            pk = np.where(mask, pk * p, pk)
            ns.append(pk[mask])
            ls.append(logp[mask])
        n = np.concatenate(ns)
        lg = np.concatenate(ls)
        order = np.argsort(n, kind="stable")
        n, lg = n[order], lg[order]
        n.setflags(write=False)
        lg.setflags(write=False)
        return n, lg


def build_prime_table(limit: int, segment: int = kernels.SEGMENT) -> PrimeTable:
    """Segmented least-prime-factor sieve up to ``limit``."""
    if not isinstance(limit, (int, np.integer)) or limit < 2 or limit > MAX_LIMIT:
        raise ConfigurationError(f"limit must be an integer in [2, {MAX_LIMIT}], got {limit!r}")
    limit = int(limit)
    base = kernels.base_primes(math.isqrt(limit))
    spf = kernels.spf_sieve(limit, base, segment)
    spf[1] = 1
    idx = np.arange(2, limit + 1, dtype=np.int64)
    primes = idx[spf[2:] == idx]
    spf.setflags(write=False)
    primes.setflags(write=False)
    return PrimeTable(limit, spf, primes)


def von_mangoldt(n: int, t: PrimeTable) -> float:
    t._check(n)
    if n == 1:
        return 0.0
    pk = t.prime_power_form(n)
    return math.log(pk[0]) if pk else 0.0


def mobius(n: int, t: PrimeTable) -> int:
    mu = 1
    for _, e in t.factorize(n):
        if e > 1:
            return 0
        mu = -mu
    return mu


def euler_phi(n: int, t: PrimeTable) -> int:
    phi = 1
    for p, e in t.factorize(n):
        phi *= (p - 1) * p ** (e - 1)
    return phi


def squarefree_square_split(n: int, t: PrimeTable) -> Tuple[int, int]:
    """The unique ``(g, k)`` with ``n = g * k**2`` and ``g`` squarefree."""
    g = k = 1
    for p, e in t.factorize(n):
        if e % 2:
            g *= p
        k *= p ** (e // 2)
    return g, k
