"""Exponential sums at fractions a/(g q^2), character sums mod q^2 and the
inequalities relating them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .aperror import SquareModulusWindow, pairwise_sum
from .characters import DirichletCharacter, character_group
from .errors import BudgetError, ConfigurationError, DomainError
from .farey import max_M_sweep
from .sieve import PrimeTable

MODULUS_BUDGET = 10**4
CHUNK = 1 << 22


@dataclass(frozen=True, eq=False)
class CoefficientVector:
    """Complex coefficients c_start, ..., c_{start+N-1}."""

    values: np.ndarray
    start: int = 1

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.complex128).ravel()
        if len(v) < 1:
            raise ConfigurationError("coefficient vector needs N >= 1")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def N(self) -> int:
        return len(self.values)

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.start, self.start + self.N, dtype=np.int64)

    @cached_property
    def norm2_sq(self) -> float:
        return math.fsum(np.abs(self.values) ** 2)

    @property
    def norm2(self) -> float:
        return math.sqrt(self.norm2_sq)


# ---------------------------------------------------------------------------
# Coefficient families
# ---------------------------------------------------------------------------

FAMILIES = ("one", "moebius", "mangoldt", "random")


def coefficient_family(
    name: str, n_lo: int, n_hi: int, t: Optional[PrimeTable] = None, seed: int = 0
) -> CoefficientVector:
    """Coefficients for n in [n_lo, n_hi] from a named family.

    ``mangoldt`` means Lambda(n)/log n; ``random`` is uniform on the unit disk
    from ``numpy.random.default_rng(seed)``.
    """
    if n_hi < n_lo:
        raise ConfigurationError("empty coefficient range")
    n = n_hi - n_lo + 1
    if name == "one":
        vals = np.ones(n, dtype=np.complex128)
    elif name in ("moebius", "mangoldt"):
        if t is None or t.limit < n_hi:
            raise ConfigurationError(f"family {name!r} needs a prime table up to {n_hi}")
        mu, _, lam = t.arithmetic_tables(n_hi)
        if name == "moebius":
            vals = mu[n_lo : n_hi + 1].astype(np.complex128)
        else:
            idx = np.arange(n_lo, n_hi + 1)
            with np.errstate(divide="ignore", invalid="ignore"):
                vals = np.where(idx > 1, lam[n_lo : n_hi + 1] / np.log(np.maximum(idx, 2)), 0.0)
            vals = vals.astype(np.complex128)
    elif name == "random":
        rng = np.random.default_rng(seed)
        r = np.sqrt(rng.random(n))
        th = 2 * np.pi * rng.random(n)
        vals = r * np.exp(1j * th)
    else:
        raise ConfigurationError(f"unknown coefficient family {name!r}; choose from {FAMILIES}")
    return CoefficientVector(vals, start=n_lo)


# ---------------------------------------------------------------------------
# Exponential sums
# ---------------------------------------------------------------------------


def e(theta) -> complex:
    return complex(np.exp(2j * np.pi * theta))


def exp_sum_T(c: CoefficientVector, alpha: Union[float, Fraction, int]) -> complex:
    """sum_n c_n e(n alpha); rational alpha is reduced exactly mod 1 first."""
    n = c.indices
    if isinstance(alpha, (Fraction, int)):
        alpha = Fraction(alpha)
        num, den = alpha.numerator % alpha.denominator, alpha.denominator
        if den < 2**31:
            frac = (n * num % den) / den
        else:
            frac = np.array([float(Fraction(int(k) * num % den, den)) for k in n])
    else:
        frac = (n * (float(alpha) % 1.0)) % 1.0
    return complex(np.sum(c.values * np.exp(2j * np.pi * frac)))


def residue_profile(c: CoefficientVector, m: int) -> np.ndarray:
    """C_r = sum of c_n over n = r (mod m)."""
    out = np.zeros(m, dtype=np.complex128)
    np.add.at(out, c.indices % m, c.values)
    return out


def exp_sums_mod(c: CoefficientVector, m: int) -> np.ndarray:
    """T(a/m) for a = 0..m-1 in one FFT."""
    return np.fft.ifft(residue_profile(c, m)) * m


def _check_budget(Q: int, g: int):
    if Q < 1 or g < 1:
        raise ConfigurationError("Q and g must be positive")
    if g * Q * Q > MODULUS_BUDGET:
        raise BudgetError(f"modulus g*Q^2 = {g * Q * Q} exceeds budget {MODULUS_BUDGET}")


def lemma2_lhs(c: CoefficientVector, Q: int, g: int) -> float:
    """sum over q <= Q and reduced a mod g q^2 of |T(a/(g q^2))|^2."""
    _check_budget(Q, g)
    parts = []
    for q in range(1, Q + 1):
        m = g * q * q
        T = exp_sums_mod(c, m)
        a = np.arange(m)
        red = np.gcd(a, m) == 1
        parts.append(math.fsum(np.abs(T[red]) ** 2))
    return pairwise_sum(parts)


def lemma2_rhs(N: int, Q: int, g: int, eps: float, norm2_sq: float) -> float:
    return (Q * N) ** eps * (1 + g / N) * (g * Q**3 + math.sqrt(Q) * N) * norm2_sq


def lemma2_bound_ratio(c: CoefficientVector, Q: int, g: int, eps: float) -> float:
    lhs = lemma2_lhs(c, Q, g)
    if lhs == 0:
        return 0.0
    return lhs / lemma2_rhs(c.N, Q, g, eps, c.norm2_sq)


def duality_bound_check(
    c: CoefficientVector, Q: int, g: int, Delta: Union[Fraction, int, None] = None
) -> Tuple[float, float, bool]:
    """lhs = lemma2_lhs; rhs = (N + 1/Delta) max_alpha M(alpha) ||c||^2 (Delta = 1/N by default)."""
    delta = Fraction(1, c.N) if Delta is None else Fraction(Delta)
    if delta <= 0:
        raise DomainError("Delta must be positive")
    if delta > Fraction(1, 2):
        delta_eff = Fraction(1, 2)  # ||.|| never exceeds 1/2, so counts saturate
    else:
        delta_eff = delta
    lhs = lemma2_lhs(c, Q, g)
    mmax, _ = max_M_sweep(delta_eff, Q, g)
    rhs = (c.N + float(1 / delta)) * mmax * c.norm2_sq
    return lhs, rhs, bool(lhs <= rhs)


def primitive_reduction_check(
    c: CoefficientVector, modulus: int, t_coprime: int = 1
) -> Tuple[float, float, bool]:
    """Primitive-character mean square against the reduced-residue exponential sum.

    Coefficients c_m with gcd(m, t_coprime) > 1 are zeroed on both sides.
    """
    if modulus < 1 or t_coprime < 1:
        raise ConfigurationError("modulus and t_coprime must be positive")
    if modulus > MODULUS_BUDGET:
        raise BudgetError(f"modulus {modulus} exceeds budget {MODULUS_BUDGET}")
    idx = c.indices
    vals = np.where(np.gcd(idx, t_coprime) == 1, c.values, 0)
    cc = CoefficientVector(vals, start=c.start)
    G = character_group(modulus)
    prim = G.primitive_characters
    lhs_parts = []
    for lo in range(0, len(prim), max(1, CHUNK // max(1, len(idx)))):
        chunk = prim[lo : lo + max(1, CHUNK // max(1, len(idx)))]
        S = G.values(chunk, idx) @ cc.values
        lhs_parts.append(math.fsum(np.abs(S) ** 2))
    lhs = math.fsum(lhs_parts)
    T = exp_sums_mod(cc, modulus)
    a = np.arange(modulus)
    red = np.gcd(a, modulus) == 1
    phi = int(np.count_nonzero(red))
    rhs = phi / modulus * math.fsum(np.abs(T[red]) ** 2)
    # rounding floor: both sides can be exactly 0 in exact arithmetic
    floor = 1e-12 * max(1, len(prim)) * float(np.sum(np.abs(cc.values))) ** 2
    return lhs, rhs, bool(lhs <= rhs * (1 + 1e-9) + floor)


# ---------------------------------------------------------------------------
# Character moments over square moduli
# ---------------------------------------------------------------------------


def _chars_in_window(m: int, low: float, high: float, t: Optional[PrimeTable]):
    if m > MODULUS_BUDGET:
        raise BudgetError(f"modulus {m} exceeds budget {MODULUS_BUDGET}")
    G = character_group(m, t)
    keep = (G.conductors > low) & (G.conductors <= high)
    return G, [chi for chi, ok in zip(G, keep) if ok]


def char_sums(c: CoefficientVector, m: int, conductor_window, t: Optional[PrimeTable] = None):
    """sum_n c_n chi(n) for every chi mod m with conductor in the window."""
    low, high = conductor_window
    G, chars = _chars_in_window(m, low, high, t)
    if not chars:
        return chars, np.zeros(0, dtype=np.complex128)
    step = max(1, CHUNK // c.N)
    out = [G.values(chars[i : i + step], c.indices) @ c.values for i in range(0, len(chars), step)]
    return chars, np.concatenate(out)


def char_moment_T_lambda(
    c: CoefficientVector,
    window: SquareModulusWindow,
    conductor_window: Tuple[float, float],
    t: Optional[PrimeTable] = None,
) -> float:
    """sum over q in the window, chi mod q^2 with conductor in the window, of |sum c_m chi(m)|^2."""
    parts = []
    for q in window:
        _, S = char_sums(c, q * q, conductor_window, t)
        parts.append(math.fsum(np.abs(S) ** 2))
    return pairwise_sum(parts)


def lemma3_bound(Q: float, M: int, x: float, lam: float, eps: float, norm2_sq: float) -> float:
    return x**eps * (Q**0.5 * x**lam + Q**0.75 * M * x ** (-lam / 2)) * norm2_sq


def lemma3_ratio(
    c: CoefficientVector,
    window: SquareModulusWindow,
    conductor_window: Tuple[float, float],
    x: float,
    lam: float,
    eps: float,
    t: Optional[PrimeTable] = None,
) -> float:
    T = char_moment_T_lambda(c, window, conductor_window, t)
    if T == 0:
        return 0.0
    M = c.start + c.N - 1
    return T / lemma3_bound(window.Q, M, x, lam, eps, c.norm2_sq)


# ---------------------------------------------------------------------------
# Dirichlet polynomials on Re s = 1/2
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DirichletPolySpec:
    """sum a_n chi(n) n^(-s) over the coefficient support, s = sigma + i t."""

    coeffs: CoefficientVector
    t: float = 0.0
    chi: Optional[DirichletCharacter] = None
    sigma: float = 0.5
    cap: Optional[float] = field(default=None)

    @property
    def s(self) -> complex:
        return complex(self.sigma, self.t)

    def cap_respected(self) -> bool:
        if self.cap is None:
            return True
        return bool(np.all(np.abs(self.coeffs.values) <= self.cap * (1 + 1e-12)))


def _weights(c: CoefficientVector, s: complex) -> np.ndarray:
    n = c.indices.astype(np.float64)
    return c.values * np.exp(-s * np.log(n))


def dirichlet_poly_eval(spec: DirichletPolySpec) -> complex:
    if spec.sigma != 0.5:
        raise DomainError("Dirichlet polynomials are evaluated on Re s = 1/2 only")
    w = _weights(spec.coeffs, spec.s)
    if spec.chi is None:
        return complex(np.sum(w))
    G = spec.chi.group
    vals = G.values([spec.chi], spec.coeffs.indices)[0]
    return complex(np.sum(vals * w))


def dyadic_coefficients(lo: float, values, start: Optional[int] = None) -> CoefficientVector:
    """Coefficient vector on the integers of (lo, 2 lo]."""
    first = int(math.floor(lo)) + 1 if start is None else start
    return CoefficientVector(values, start=first)


def bilinear_terms(
    h: CoefficientVector,
    k: CoefficientVector,
    window: SquareModulusWindow,
    conductor_window: Tuple[float, float],
    t_shift: float = 0.0,
    t: Optional[PrimeTable] = None,
):
    """Per (q, chi) values of H(1/2 + it, chi) and K(1/2 + it, chi)."""
    s = complex(0.5, t_shift)
    hw = CoefficientVector(_weights(h, s), start=h.start)
    kw = CoefficientVector(_weights(k, s), start=k.start)
    Hs, Ks = [], []
    for q in window:
        _, H = char_sums(hw, q * q, conductor_window, t)
        _, K = char_sums(kw, q * q, conductor_window, t)
        Hs.append(H)
        Ks.append(K)
    if not Hs:
        return np.zeros(0, np.complex128), np.zeros(0, np.complex128)
    return np.concatenate(Hs), np.concatenate(Ks)


def bilinear_sum_S(
    h: CoefficientVector,
    k: CoefficientVector,
    window: SquareModulusWindow,
    conductor_window: Tuple[float, float],
    t_shift: float = 0.0,
    t: Optional[PrimeTable] = None,
) -> float:
    """sum over (q, chi) of |H(1/2 + it, chi) K(1/2 + it, chi)|."""
    H, K = bilinear_terms(h, k, window, conductor_window, t_shift, t)
    return math.fsum(np.abs(H * K))


def lemma4_ratio(S_value: float, x: float, Q: float, eps: float) -> float:
    if S_value == 0:
        return 0.0
    return S_value / (x ** (0.5 - eps / 20) * Q**0.5)


def lemma4_conditions(x: float, Q: float, lam: float, H: float, K: float, eps: float) -> dict:
    """Which of the size hypotheses on (x, Q, lambda, H, K) hold literally (constants 1)."""
    xl = x**lam
    return {
        "Q_le_x_half_minus_eps": Q <= x ** (0.5 - eps),
        "xlam_ge_1": xl >= 1,
        "xlam_le_Q": xl <= Q,
        "xlam_ge_sqrtQ_x_eps6": xl >= Q**0.5 * x ** (eps / 6),
        "K_ge_Q_over_xlam": K >= Q / xl,
        "K_le_H": K <= H,
        "H_le_x_3_5": H <= x**0.6,
        "HK_le_x": H * K <= x,
    }
