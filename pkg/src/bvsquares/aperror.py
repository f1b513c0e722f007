"""Prime sums in progressions, E(x, q), Riesz means and convolution weights."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, Mapping, Sequence, Union

import numpy as np

from . import kernels
from .errors import ConfigurationError, DomainError, RangeError
from .sieve import PrimeTable

MAX_RIESZ_K = 60
MAX_CONV_PRODUCT = 10**7


@dataclass(frozen=True)
class SquareModulusWindow:
    """The admissible ``q`` with ``Q < q**2 <= 2Q``."""

    Q: float
    q_min: int = field(init=False)
    q_max: int = field(init=False)

    def __post_init__(self):
        if not self.Q > 0:
            raise ConfigurationError(f"Q must be positive, got {self.Q}")
        Q = self.Q
        lo = math.isqrt(int(math.floor(Q)))
        while lo * lo <= Q:
            lo += 1
        hi = math.isqrt(int(math.floor(2 * Q)))
        while hi * hi > 2 * Q:
            hi -= 1
        while (hi + 1) ** 2 <= 2 * Q:
            hi += 1
        object.__setattr__(self, "q_min", lo)
        object.__setattr__(self, "q_max", hi)

    @classmethod
    def from_theta(cls, x: float, theta: float) -> "SquareModulusWindow":
        return cls(float(x) ** theta)

    def __iter__(self):
        return iter(range(self.q_min, self.q_max + 1))

    def __len__(self):
        return max(0, self.q_max - self.q_min + 1)

    @property
    def moduli(self) -> list[int]:
        return [q * q for q in self]


@dataclass(frozen=True)
class RieszParams:
    x: float
    q: int
    a: int
    d: int
    k: int = 0

    def __post_init__(self):
        if self.q < 1 or self.d < 1:
            raise ConfigurationError("q and d must be positive")
        if not 0 <= self.k <= MAX_RIESZ_K:
            raise ConfigurationError(f"k must lie in [0, {MAX_RIESZ_K}], got {self.k}")


def _floor_x(x: float, t: PrimeTable | None = None) -> int:
    xi = int(math.floor(x))
    if t is not None and xi > t.limit:
        raise RangeError(f"x={x} exceeds prime table limit {t.limit}")
    return xi


def psi_ap(x: float, q: int, a: int, t: PrimeTable) -> float:
    """Sum of Lambda(n) over ``n <= x``, ``n = a (mod q)``."""
    _floor_x(x, t)
    ns, logs = t.prime_powers(x)
    return math.fsum(logs[ns % q == a % q])


def _reduced_residues(m: int) -> np.ndarray:
    a = np.arange(m, dtype=np.int64)
    return a[np.gcd(a, m) == 1]


def _errors_from_sums(sums: np.ndarray, m: int, phi: int, x: float) -> float:
    main = x / phi
    red = _reduced_residues(m)
    return float(np.max(np.abs(sums[red] - main)))


def _phi(m: int) -> int:
    return int(np.count_nonzero(np.gcd(np.arange(m, dtype=np.int64), m) == 1))


def error_E(x: float, q: int, t: PrimeTable) -> float:
    """max over reduced a of |psi(x; q, a) - x/phi(q)|."""
    _floor_x(x, t)
    if q < 1:
        raise ConfigurationError("q must be positive")
    ns, logs = t.prime_powers(x)
    sums, _ = kernels.residue_sums(ns, logs, np.array([q], dtype=np.int64))
    return _errors_from_sums(sums, q, _phi(q), x)


def errors_for_moduli(x: float, moduli: Sequence[int], t: PrimeTable) -> list[float]:
    """E(x, m) for every m in ``moduli`` from one scan over the prime powers."""
    _floor_x(x, t)
    if len(moduli) == 0:
        return []
    mod = np.asarray(moduli, dtype=np.int64)
    ns, logs = t.prime_powers(x)
    sums, off = kernels.residue_sums(ns, logs, mod)
    return [
        _errors_from_sums(sums[off[j] : off[j + 1]], int(m), _phi(int(m)), x)
        for j, m in enumerate(mod)
    ]


def pairwise_sum(values: Sequence[float]) -> float:
    """Fixed-shape pairwise reduction (order independent of how values were made)."""
    vals = [float(v) for v in values]
    if not vals:
        return 0.0
    while len(vals) > 1:
        nxt = [vals[i] + vals[i + 1] for i in range(0, len(vals) - 1, 2)]
        if len(vals) % 2:
            nxt.append(vals[-1])
        vals = nxt
    return vals[0]


def _chunks(seq, n):
    n = max(1, min(n, len(seq)))
    size = -(-len(seq) // n)
    return [seq[i : i + size] for i in range(0, len(seq), size)]


def averaged_error_terms(
    x: float, window: SquareModulusWindow, t: PrimeTable, threads: int = 1
) -> list[float]:
    """E(x, q**2) for q in the window, ascending q."""
    moduli = window.moduli
    if not moduli:
        _floor_x(x, t)
        return []
    if threads <= 1:
        return errors_for_moduli(x, moduli, t)
    parts = _chunks(moduli, threads)
    with ThreadPoolExecutor(max_workers=len(parts)) as pool:
        results = list(pool.map(lambda ms: errors_for_moduli(x, ms, t), parts))
    return [e for part in results for e in part]


def averaged_error(x: float, window: SquareModulusWindow, t: PrimeTable, threads: int = 1) -> float:
    """Sum of E(x, q**2) over the square-modulus window."""
    return pairwise_sum(averaged_error_terms(x, window, t, threads))


# ---------------------------------------------------------------------------
# Riesz means
# ---------------------------------------------------------------------------


def _crt_progression(q: int, a: int, d: int):
    """First l >= 1 and step L with l = a (mod q), l = 0 (mod d); None if empty."""
    g = math.gcd(q, d)
    if a % g:
        return None
    L = q // g * d
    # l = d*y with d*y = a (mod q)  <=>  (d/g) y = a/g (mod q/g)
    qg = q // g
    y = (a // g) * pow(d // g, -1, qg) % qg if qg > 1 else 0
    first = (d * y) % L
    if first == 0:
        first = L
    return first, L


def riesz_mean_A(p: RieszParams, t: PrimeTable | None = None) -> float:
    """(1/k!) sum over l <= x in both progressions of log(x/l)**k."""
    x = p.x
    if x < 1:
        return 0.0
    prog = _crt_progression(p.q, p.a % p.q, p.d)
    if prog is None:
        return 0.0
    first, L = prog
    xi = int(math.floor(x))
    if first > xi:
        return 0.0
    count = (xi - first) // L + 1
    if p.k == 0:
        return float(count)
    kf = math.factorial(p.k)
    return math.fsum(math.log(x / ell) ** p.k / kf for ell in range(first, xi + 1, L))


def riesz_error_r(p: RieszParams, t: PrimeTable | None = None) -> float:
    return riesz_mean_A(p, t) - p.x / (p.q * p.d)


# ---------------------------------------------------------------------------
# Convolution coefficients u_d
# ---------------------------------------------------------------------------

Family = Union[str, Callable[[int], float], Sequence[float]]


@dataclass(frozen=True)
class ConvolutionSpec:
    """Dyadic factor ranges ``(M_i/2, M_i]`` with a coefficient family per factor.

    A family is ``"one"``, ``"log"``, a callable ``m -> a(m)`` or an explicit
    sequence indexed from the first integer of the range.  Custom families
    must satisfy ``|a(m)| <= log m``; factors with ``M_i > large_threshold``
    must use ``"one"`` or ``"log"``.
    """

    M: tuple
    families: tuple = ()
    large_threshold: float = math.inf

    def __post_init__(self):
        if len(self.M) < 1:
            raise ConfigurationError("fold_count must be positive")
        if any(m < 1 for m in self.M):
            raise ConfigurationError("every M_i must be >= 1")
        fams = tuple(self.families) or ("one",) * len(self.M)
        if len(fams) == 1 and len(self.M) > 1:
            fams = fams * len(self.M)
        if len(fams) != len(self.M):
            raise ConfigurationError("need one family per factor")
        object.__setattr__(self, "families", fams)
        D = math.prod(self.M)
        if D > MAX_CONV_PRODUCT:
            raise ConfigurationError(f"product of M_i = {D} exceeds {MAX_CONV_PRODUCT}")
        for Mi, fam in zip(self.M, fams):
            if Mi > self.large_threshold and fam not in ("one", "log"):
                raise ConfigurationError(f"factor with M_i={Mi} above threshold must be 'one' or 'log'")

    @property
    def fold_count(self) -> int:
        return len(self.M)

    @property
    def D(self) -> float:
        return math.prod(self.M)

    @property
    def D1(self) -> float:
        return self.D / 2**self.fold_count

    def factor_range(self, i: int) -> range:
        Mi = self.M[i]
        return range(int(math.floor(Mi / 2)) + 1, int(math.floor(Mi)) + 1)

    def factor_values(self, i: int) -> np.ndarray:
        r = self.factor_range(i)
        fam = self.families[i]
        ms = np.arange(r.start, r.stop, dtype=np.int64)
        if fam == "one":
            return np.ones(len(ms), dtype=np.int64)
        if fam == "log":
            return np.log(ms.astype(np.float64))
        if callable(fam):
            vals = np.array([fam(int(m)) for m in ms], dtype=np.float64)
        else:
            vals = np.asarray(fam, dtype=np.float64)[: len(ms)]
            if len(vals) != len(ms):
                raise ConfigurationError(f"family {i} has {len(vals)} values, range needs {len(ms)}")
        if np.any(np.abs(vals) > np.log(ms.astype(np.float64)) + 1e-12):
            raise ConfigurationError(f"family {i} violates |a(m)| <= log m")
        return vals


def convolution_coefficients(spec: ConvolutionSpec) -> Dict[int, float]:
    """``{d: u_d}`` for every d with u_d != 0, by iterated Dirichlet convolution."""
    values = [spec.factor_values(i) for i in range(spec.fold_count)]
    exact = all(v.dtype == np.int64 for v in values)
    cur = np.zeros(2, dtype=np.int64 if exact else np.float64)
    cur[1] = 1
    for i, v in enumerate(values):
        r = spec.factor_range(i)
        if len(r) == 0:
            return {}
        out_len = (len(cur) - 1) * (r.stop - 1) + 1
        vv = v if exact else v.astype(np.float64)
        cur = kernels.convolve_step(cur, r.start, vv, out_len)
    nz = np.flatnonzero(cur)
    if exact:
        return {int(d): int(cur[d]) for d in nz}
    return {int(d): float(cur[d]) for d in nz}


ResidueRule = Union[str, int, Callable[[int], int]]


def _inner_sums(coeffs: Mapping[int, float], x: float, m: int, k: int) -> np.ndarray:
    """sum_d u_d r_k(x, m, a, d) for every residue a mod m."""
    xi = int(math.floor(x)) if x >= 1 else 0
    ds = np.array(sorted(coeffs), dtype=np.int64)
    us = np.array([float(coeffs[d]) for d in ds], dtype=np.float64)
    if xi >= 1 and len(ds):
        U = kernels.divisor_scatter(ds, us, xi)
        ell = np.arange(1, xi + 1, dtype=np.int64)
        if k == 0:
            w = U[1:]
        else:
            w = np.array(
                [math.log(x / e) ** k for e in range(1, xi + 1)], dtype=np.float64
            ) / math.factorial(k) * U[1:]
        A, _ = kernels.residue_sums(ell, np.ascontiguousarray(w), np.array([m], dtype=np.int64))
    else:
        A = np.zeros(m, dtype=np.float64)
    main = math.fsum(u * x / (m * d) for d, u in zip(ds.tolist(), us.tolist()))
    return A - main


def weighted_remainder_sum(
    coeffs: Mapping[int, float],
    x: float,
    window: SquareModulusWindow,
    k: int,
    residue_rule: ResidueRule = "worst",
    t: PrimeTable | None = None,
    per_modulus: bool = False,
):
    """Sum over q in the window of |sum_d u_d r_k(x, q**2, a_q, d)|.

    ``residue_rule`` is ``"worst"`` (maximise over reduced residues), a fixed
    integer, or a callable ``q -> a``.  The exceptional set is taken empty.
    """
    if not 0 <= k <= MAX_RIESZ_K:
        raise ConfigurationError(f"k must lie in [0, {MAX_RIESZ_K}]")
    if t is not None:
        _floor_x(x, t)
    terms = []
    for q in window:
        m = q * q
        inner = _inner_sums(coeffs, x, m, k)
        if residue_rule == "worst":
            red = _reduced_residues(m)
            terms.append(float(np.max(np.abs(inner[red]))))
        else:
            a = residue_rule(q) if callable(residue_rule) else int(residue_rule)
            if math.gcd(a, m) != 1:
                raise DomainError(f"residue {a} is not reduced mod {m}")
            terms.append(abs(float(inner[a % m])))
    total = pairwise_sum(terms)
    return (total, terms) if per_modulus else total


def exponent_fit(samples: Sequence[tuple]) -> tuple[float, float]:
    """Least-squares line through (log x, log value)."""
    if len(samples) < 2:
        raise DomainError("need at least two samples")
    xs = np.array([s[0] for s in samples], dtype=np.float64)
    ys = np.array([s[1] for s in samples], dtype=np.float64)
    if np.any(ys <= 0) or np.any(xs <= 0):
        raise DomainError("exponent_fit needs positive x and values")
    slope, intercept = np.polyfit(np.log(xs), np.log(ys), 1)
    return float(slope), float(intercept)
