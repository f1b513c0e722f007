"""Dirichlet characters stored as exponents on fixed unit-group generators.

A character mod m is a tuple of exponents, one per cyclic component of
(Z/mZ)^*.  Odd prime powers p^e contribute one component generated by the
smallest primitive root mod p^e; 2^2 contributes one component generated by
3; 2^e with e >= 3 contributes two, generated by -1 and 5.  Values are kept as
integer phases k/N (N = lcm of component orders) until a complex number is
actually needed.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .errors import BudgetError, ChainError, ConfigurationError, RangeError
from .sieve import PrimeTable

CHAR_BUDGET = 10**6


def _factor(m: int, t: Optional[PrimeTable]) -> List[Tuple[int, int]]:
    if m == 1:
        return []
    if t is not None:
        if m > t.limit:
            raise RangeError(f"modulus {m} exceeds prime table limit {t.limit}")
        return t.factorize(m)
    out, p = [], 2
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out.append((p, e))
        p += 1
    if m > 1:
        out.append((m, 1))
    return out


def _prime_divisors(n: int) -> List[int]:
    return [p for p, _ in _factor(n, None)]


@lru_cache(maxsize=None)
def primitive_root(pe: int, p: int) -> int:
    """Smallest primitive root modulo the odd prime power ``pe``."""
    phi = pe // p * (p - 1)
    rs = _prime_divisors(phi)
    for g in range(2, pe):
        if g % p and all(pow(g, phi // r, pe) != 1 for r in rs):
            return g
    raise ConfigurationError(f"no primitive root mod {pe}")  # pragma: no cover


@dataclass(frozen=True, eq=False)
class Component:
    """One cyclic factor of the unit group of the prime power ``pe``."""

    p: int
    e: int
    order: int
    generator: int  # as an integer unit mod pe
    logs: np.ndarray = field(repr=False)  # logs[u] = discrete log, -1 off units

    @property
    def pe(self) -> int:
        return self.p**self.e


@lru_cache(maxsize=None)
def _components(p: int, e: int) -> Tuple[Component, ...]:
    pe = p**e
    if p == 2:
        if e == 1:
            return ()
        if e == 2:
            logs = np.full(4, -1, dtype=np.int64)
            logs[1], logs[3] = 0, 1
            return (Component(2, 2, 2, 3, logs),)
        half = pe >> 2
        sign = np.full(pe, -1, dtype=np.int64)
        five = np.full(pe, -1, dtype=np.int64)
        u = 1
        for k in range(half):
            sign[u], five[u] = 0, k
            sign[pe - u], five[pe - u] = 1, k
            u = u * 5 % pe
        return (Component(2, e, 2, pe - 1, sign), Component(2, e, half, 5, five))
    g = primitive_root(pe, p)
    phi = pe // p * (p - 1)
    logs = np.full(pe, -1, dtype=np.int64)
    u = 1
    for k in range(phi):
        logs[u] = k
        u = u * g % pe
    return (Component(p, e, phi, g, logs),)


def _vp(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


class CharacterGroup:
    """All characters modulo ``modulus``, enumerated in a fixed order."""

    def __init__(self, modulus: int, t: Optional[PrimeTable] = None):
        if modulus < 1:
            raise ConfigurationError("modulus must be positive")
        self.modulus = modulus
        self.factors = _factor(modulus, t)
        self.components: Tuple[Component, ...] = tuple(
            c for p, e in self.factors for c in _components(p, e)
        )
        self.orders = tuple(c.order for c in self.components)
        self.exponent = math.lcm(*self.orders) if self.orders else 1

    def __len__(self) -> int:
        return math.prod(self.orders)

    def __iter__(self) -> Iterator["DirichletCharacter"]:
        for ex in itertools.product(*(range(o) for o in self.orders)):
            yield DirichletCharacter(self, ex)

    def characters(self) -> List["DirichletCharacter"]:
        return list(self)

    @cached_property
    def primitive_characters(self) -> List["DirichletCharacter"]:
        return [chi for chi in self if chi.is_primitive()]

    @cached_property
    def conductors(self) -> np.ndarray:
        return np.array([chi.conductor for chi in self], dtype=np.int64)

    def principal(self) -> "DirichletCharacter":
        return DirichletCharacter(self, (0,) * len(self.components))

    def character(self, exponents: Sequence[int]) -> "DirichletCharacter":
        return DirichletCharacter(self, tuple(exponents))

    @cached_property
    def _scale(self) -> np.ndarray:
        return np.array([self.exponent // o for o in self.orders], dtype=np.int64)

    @cached_property
    def roots(self) -> np.ndarray:
        k = np.arange(self.exponent)
        return np.exp(2j * np.pi * k / self.exponent)

    def log_matrix(self, ns: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Per-component discrete logs of ``ns`` (shape comps x len) and unit mask."""
        ns = np.asarray(ns, dtype=np.int64)
        unit = np.gcd(ns, self.modulus) == 1
        L = np.zeros((len(self.components), len(ns)), dtype=np.int64)
        for j, c in enumerate(self.components):
            lg = c.logs[ns % c.pe]
            L[j] = np.where(unit, lg, 0)
        return L, unit

    def phase_matrix(self, chars: Sequence["DirichletCharacter"], ns) -> Tuple[np.ndarray, np.ndarray]:
        """Integer phases k with chi(n) = exp(2 pi i k / exponent)."""
        L, unit = self.log_matrix(ns)
        if not self.components:
            return np.zeros((len(chars), len(unit)), dtype=np.int64), unit
        E = np.array([c.exponents for c in chars], dtype=np.int64).reshape(len(chars), -1)
        idx = ((E * self._scale) @ L) % self.exponent
        return idx, unit

    def values(self, chars: Sequence["DirichletCharacter"], ns) -> np.ndarray:
        """Complex matrix ``chi(n)`` with rows over ``chars`` and columns over ``ns``."""
        idx, unit = self.phase_matrix(chars, ns)
        return self.roots[idx] * unit[None, :]


@dataclass(frozen=True, eq=False)
class DirichletCharacter:
    group: CharacterGroup = field(repr=False)
    exponents: Tuple[int, ...]

    def __post_init__(self):
        if len(self.exponents) != len(self.group.orders):
            raise ConfigurationError("wrong number of exponents for this modulus")
        if any(not 0 <= x < o for x, o in zip(self.exponents, self.group.orders)):
            raise ConfigurationError("exponent out of range")

    @property
    def modulus(self) -> int:
        return self.group.modulus

    @property
    def label(self) -> str:
        return "(" + ",".join(map(str, self.exponents)) + ")"

    def __eq__(self, other):
        return (
            isinstance(other, DirichletCharacter)
            and self.modulus == other.modulus
            and self.exponents == other.exponents
        )

    def __hash__(self):
        return hash((self.modulus, self.exponents))

    def phase(self, n: int) -> Optional[Fraction]:
        """chi(n) = e(phase), or None when gcd(n, modulus) > 1."""
        if math.gcd(n, self.modulus) != 1:
            return None
        s = Fraction(0)
        for x, c in zip(self.exponents, self.group.components):
            s += Fraction(x * int(c.logs[n % c.pe]), c.order)
        return s - math.floor(s)

    def __call__(self, n: int) -> complex:
        ph = self.phase(n)
        if ph is None:
            return 0j
        k = ph * self.group.exponent
        return complex(self.group.roots[int(k) % self.group.exponent])

    @cached_property
    def _local_conductors(self) -> dict:
        loc = {}
        comps = self.group.components
        for p, e in self.group.factors:
            js = [j for j, c in enumerate(comps) if c.p == p]
            if p == 2 and e >= 3:
                s, tt = (self.exponents[j] for j in js)
                o5 = comps[js[1]].order // math.gcd(comps[js[1]].order, tt)
                c = 2 + _vp(o5, 2) if o5 > 1 else (2 if s else 0)
            elif p == 2:
                c = 2 if js and self.exponents[js[0]] else 0
            else:
                j = js[0]
                o = comps[j].order // math.gcd(comps[j].order, self.exponents[j])
                c = 1 + _vp(o, p) if o > 1 else 0
            loc[p] = c
        return loc

    @cached_property
    def conductor(self) -> int:
        return math.prod(p**c for p, c in self._local_conductors.items())

    def is_primitive(self) -> bool:
        return self.conductor == self.modulus

    def primitive_part(self) -> "DirichletCharacter":
        """The primitive character mod the conductor that induces this one."""
        f = self.conductor
        if f == self.modulus:
            return self
        newg = CharacterGroup(f)
        comps = self.group.components
        ex = []
        for nc in newg.components:
            # evaluate the p-part of self at the new generator (a unit mod p^e)
            ph = Fraction(0)
            for x, c in zip(self.exponents, comps):
                if c.p == nc.p:
                    ph += Fraction(x * int(c.logs[nc.generator % c.pe]), c.order)
            y = ph * nc.order
            if y.denominator != 1:  # pragma: no cover - conductor logic guarantees this
                raise ChainError("character does not factor through its conductor")
            ex.append(int(y) % nc.order)
        return DirichletCharacter(newg, tuple(ex))


@lru_cache(maxsize=512)
def _cached_group(m: int) -> CharacterGroup:
    return CharacterGroup(m)


def character_group(m: int, t: Optional[PrimeTable] = None, budget: int = CHAR_BUDGET) -> CharacterGroup:
    if m < 1:
        raise ConfigurationError("modulus must be positive")
    if t is not None and m > t.limit:
        raise RangeError(f"modulus {m} exceeds prime table limit {t.limit}")
    if m > budget:
        raise BudgetError(f"modulus {m} exceeds character budget {budget}")
    return _cached_group(m)


def eval_char(chi: DirichletCharacter, n: int) -> complex:
    return chi(n)


def conductor(chi: DirichletCharacter) -> int:
    return chi.conductor


def is_primitive(chi: DirichletCharacter) -> bool:
    return chi.is_primitive()


def primitive_part(chi: DirichletCharacter) -> DirichletCharacter:
    return chi.primitive_part()


def _split(n: int) -> Tuple[int, int]:
    g = k = 1
    for p, e in _factor(n, None):
        if e % 2:
            g *= p
        k *= p ** (e // 2)
    return g, k


def chars_with_conductor_in(
    m: int, window: Tuple[float, float], t: Optional[PrimeTable] = None
) -> List[Tuple[DirichletCharacter, Tuple[int, int]]]:
    """Characters mod m with low < conductor <= high, each with its (g, k) split."""
    low, high = window
    G = character_group(m, t)
    return [(chi, _split(chi.conductor)) for chi in G if low < chi.conductor <= high]


def divisibility_chain_check(q: int, chi: DirichletCharacter) -> Tuple[int, int, int, int]:
    """(g, k, t, v) with conductor g k^2, q^2 = v g k^2, v = g t^2 and q = g t k."""
    if chi.modulus != q * q:
        raise ConfigurationError(f"character modulus {chi.modulus} is not q^2 = {q * q}")
    C = chi.conductor
    if (q * q) % C:
        raise ChainError(f"conductor {C} does not divide {q * q}")
    g, k = _split(C)
    v = q * q // C
    if v % g:
        raise ChainError(f"g={g} does not divide v={v}")
    t2 = v // g
    tp = math.isqrt(t2)
    if tp * tp != t2 or g * tp * k != q:
        raise ChainError(f"chain fails for q={q}, C={C}: v={v}, g={g}, k={k}")
    return g, k, tp, v


def char_table_rows(m: int, t: Optional[PrimeTable] = None) -> List[dict]:
    rows = []
    for chi in character_group(m, t):
        g, k = _split(chi.conductor)
        rows.append(
            {
                "modulus": m,
                "label": chi.label,
                "conductor": chi.conductor,
                "primitive": chi.is_primitive(),
                "g": g,
                "k": k,
            }
        )
    return rows
