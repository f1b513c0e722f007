"""Exact counts of fractions a/q**2 and a/(g q**2) close to a target point.

All distance comparisons are done with integers or :class:`fractions.Fraction`;
floats appear only as sort keys, and ties are re-decided exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple, Union

import numpy as np

from . import kernels
from .errors import BudgetError, ConfigurationError, DomainError

Rational = Union[int, Fraction]

SWEEP_BUDGET = 2_000_000
HALF = Fraction(1, 2)


def _frac(v) -> Fraction:
    if isinstance(v, float):
        return Fraction(v).limit_denominator(10**12)
    return Fraction(v)


def dist_to_nearest_int(theta: Rational) -> Fraction:
    theta = _frac(theta)
    r = theta - math.floor(theta)
    return min(r, 1 - r)


@dataclass(frozen=True)
class FareyQuery:
    target: Fraction
    Delta: Fraction
    Q: int
    g: int = 1

    def __post_init__(self):
        t = _frac(self.target)
        d = _frac(self.Delta)
        if d < 0 or d > HALF:
            raise ConfigurationError(f"Delta must lie in [0, 1/2], got {d}")
        if self.Q < 1 or self.g < 1:
            raise ConfigurationError("Q and g must be positive")
        object.__setattr__(self, "target", t - math.floor(t))
        object.__setattr__(self, "Delta", d)


def _residues_near(m: int, target: Fraction, delta: Fraction) -> np.ndarray:
    """Distinct residues a mod m with ||a/m - target|| <= delta."""
    lo = math.ceil(m * (target - delta))
    hi = math.floor(m * (target + delta))
    if hi < lo:
        return np.zeros(0, dtype=np.int64)
    if hi - lo + 1 >= m:
        return np.arange(m, dtype=np.int64)
    return np.unique(np.arange(lo, hi + 1, dtype=np.int64) % m)


def count_N(query: FareyQuery) -> int:
    """Pairs (a, q), 1 <= a <= q**2, gcd(a, q) = 1, q <= Q, ||a/q**2 - beta|| <= Delta."""
    if query.g != 1:
        raise ConfigurationError("count_N is defined for g = 1 only")
    total = 0
    for q in range(1, query.Q + 1):
        m = q * q
        a = _residues_near(m, query.target, query.Delta)
        a = np.where(a == 0, m, a)
        total += int(np.count_nonzero(np.gcd(a, q) == 1))
    return total


def _count_M_q(q: int, g: int, target: Fraction, delta: Fraction) -> int:
    m = g * q * q
    a = _residues_near(m, target, delta)
    return int(np.count_nonzero(np.gcd(a, m) == 1))


def count_M(query: FareyQuery) -> int:
    """Pairs (a, q), 0 <= a < g q**2, gcd(a, g q**2) = 1, q <= Q, ||a/(g q**2) - alpha|| <= Delta."""
    return sum(_count_M_q(q, query.g, query.target, query.Delta) for q in range(1, query.Q + 1))


def admissible_fractions(Q: int, g: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Numerators, denominators and q of every a/(g q**2) counted by count_M."""
    nums, dens, qs = [], [], []
    for q in range(1, Q + 1):
        m = g * q * q
        a = np.arange(m, dtype=np.int64)
        a = a[np.gcd(a, m) == 1]
        nums.append(a)
        dens.append(np.full(len(a), m, dtype=np.int64))
        qs.append(np.full(len(a), q, dtype=np.int64))
    return np.concatenate(nums), np.concatenate(dens), np.concatenate(qs)


def fraction_budget(Q: int, g: int) -> int:
    return sum(
        int(np.count_nonzero(np.gcd(np.arange(g * q * q), g * q * q) == 1)) for q in range(1, Q + 1)
    )


def _sorted_events(P: np.ndarray, S: np.ndarray, kind: np.ndarray) -> np.ndarray:
    """Order of events by exact position, opens (kind 0) before closes (kind 1)."""
    keys = P / S
    order = np.lexsort((kind, keys))
    if len(order) < 2:
        return order
    smax = int(S.max())
    if smax * smax >= 2 * 10**13:
        # float keys cannot separate distinct values; sort everything exactly
        items = sorted(range(len(P)), key=lambda i: (Fraction(int(P[i]), int(S[i])), int(kind[i])))
        return np.array(items, dtype=np.int64)
    ks = keys[order]
    close = np.diff(ks) <= 1e-14
    if not close.any():
        return order
    # re-sort each run of (numerically) tied events exactly
    idx = np.flatnonzero(close)
    run_start = idx[np.concatenate(([True], np.diff(idx) > 1))]
    run_end = idx[np.concatenate((np.diff(idx) > 1, [True]))] + 2
    order = order.copy()
    for a, b in zip(run_start, run_end):
        seg = order[a:b].tolist()
        seg.sort(key=lambda i: (Fraction(int(P[i]), int(S[i])), int(kind[i])))
        order[a:b] = seg
    return order


def max_M_sweep(Delta: Rational, Q: int, g: int, budget: int = SWEEP_BUDGET) -> Tuple[int, Fraction]:
    """Exact max over alpha of count_M, with a witness alpha in [0, 1).

    Each admissible fraction f contributes the closed arc [f - Delta, f + Delta]
    on R/Z; the maximal overlap depth is found by sorting arc endpoints.
    """
    delta = _frac(Delta)
    if delta < 0 or delta > HALF:
        raise ConfigurationError("Delta must lie in [0, 1/2]")
    if Q < 1 or g < 1:
        raise ConfigurationError("Q and g must be positive")
    est = g * Q * (Q + 1) * (2 * Q + 1) // 6
    if est > budget:
        raise BudgetError(f"about {est} fractions for Q={Q}, g={g} exceeds budget {budget}")
    num, den, _ = admissible_fractions(Q, g)
    if delta == HALF:
        return len(num), Fraction(0)
    r, s = delta.numerator, delta.denominator
    S = den * s
    lo = num * s - r * den
    hi = num * s + r * den
    P, SS, kind = [], [], []
    wrap_lo = lo < 0
    wrap_hi = hi >= S
    plain = ~(wrap_lo | wrap_hi)
    # ordinary arcs
    P += [lo[plain], hi[plain]]
    SS += [S[plain], S[plain]]
    kind += [np.zeros(plain.sum(), np.int8), np.ones(plain.sum(), np.int8)]
    # arc through 0 from below: [lo + 1, 1) and [0, hi]
    P += [lo[wrap_lo] + S[wrap_lo], np.zeros(wrap_lo.sum(), np.int64), hi[wrap_lo]]
    SS += [S[wrap_lo]] * 3
    kind += [np.zeros(wrap_lo.sum(), np.int8)] * 2 + [np.ones(wrap_lo.sum(), np.int8)]
    # arc through 1 from above: [lo, 1) and [0, hi - 1]
    P += [lo[wrap_hi], np.zeros(wrap_hi.sum(), np.int64), hi[wrap_hi] - S[wrap_hi]]
    SS += [S[wrap_hi]] * 3
    kind += [np.zeros(wrap_hi.sum(), np.int8)] * 2 + [np.ones(wrap_hi.sum(), np.int8)]
    P = np.concatenate(P)
    SS = np.concatenate(SS)
    kind = np.concatenate(kind)
    order = _sorted_events(P, SS, kind)
    depth = np.cumsum(np.where(kind[order] == 0, 1, -1))
    best = int(np.argmax(depth))
    e = order[best]
    return int(depth[best]), Fraction(int(P[e]), int(SS[e]))


def grid_counts(Delta: Rational, Q: int, g: int, step: Rational | None = None):
    """count_M at every grid point j*step in [0, 1); step defaults to Delta/16."""
    delta = _frac(Delta)
    step = delta / 16 if step is None else _frac(step)
    if step <= 0:
        raise DomainError("grid step must be positive")
    width = step.denominator
    npts = math.ceil(Fraction(1) / step)
    grid = np.arange(npts, dtype=np.int64) * step.numerator
    num, den, _ = admissible_fractions(Q, g)
    counts = kernels.arc_counts(num, den, grid, width, delta.numerator, delta.denominator)
    return [Fraction(int(u), width) for u in grid], counts


def grid_max(Delta: Rational, Q: int, g: int, step: Rational | None = None) -> int:
    _, counts = grid_counts(Delta, Q, g, step)
    return int(counts.max()) if len(counts) else 0


def residue_split(a: int, q: int, g: int) -> Tuple[int, int]:
    """(b, n) with a = b + q**2 n, 0 <= b < q**2, 0 <= n < g."""
    m = q * q
    if q < 1 or g < 1 or not 0 <= a < g * m:
        raise DomainError(f"need 0 <= a < g q^2, got a={a}, q={q}, g={g}")
    n, b = divmod(a, m)
    return b, n


def split_inflation_holds(a: int, q: int, g: int, alpha: Rational, Delta: Rational) -> bool:
    """If a/(g q**2) is within Delta of alpha, then b/q**2 is within g*Delta of g*alpha."""
    alpha, delta = _frac(alpha), _frac(Delta)
    if dist_to_nearest_int(Fraction(a, g * q * q) - alpha) > delta:
        return True
    b, _ = residue_split(a, q, g)
    return dist_to_nearest_int(Fraction(b, q * q) - g * alpha) <= g * delta


def lemma1_bound(Q: int, Delta: Rational, eps: float) -> float:
    delta = _frac(Delta)
    if delta <= 0:
        raise DomainError("the bound needs Delta > 0")
    d = float(delta)
    return (Q / d) ** eps * (Q**3 * d + math.sqrt(Q))


def lemma1_ratio(query: FareyQuery, eps: float) -> float:
    """count_N divided by (Q/Delta)^eps (Q^3 Delta + Q^(1/2))."""
    n = count_N(query)
    if n == 0:
        return 0.0
    return n / lemma1_bound(query.Q, query.Delta, eps)
