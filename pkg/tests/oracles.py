"""Slow, independent reference implementations used only by the tests."""

import itertools
import math
from fractions import Fraction

import numpy as np


def trial_factor(n):
    out = []
    p = 2
    while p * p <= n:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        if e:
            out.append((p, e))
        p += 1 if p == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def mangoldt_td(n):
    f = trial_factor(n)
    return math.log(f[0][0]) if len(f) == 1 else 0.0


def mobius_td(n):
    f = trial_factor(n)
    if any(e > 1 for _, e in f):
        return 0
    return (-1) ** len(f)


def phi_td(n):
    return sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)


def phi_formula_td(n):
    r = n
    for p, _ in trial_factor(n):
        r = r // p * (p - 1)
    return r


def split_td(n):
    """Largest k with k^2 | n, by brute force."""
    k = max(k for k in range(1, math.isqrt(n) + 1) if n % (k * k) == 0)
    return n // (k * k), k


def mangoldt_array_eratosthenes(x):
    """Lambda(n) for n <= x from a plain boolean sieve."""
    isp = np.ones(x + 1, dtype=bool)
    isp[:2] = False
    for p in range(2, math.isqrt(x) + 1):
        if isp[p]:
            isp[p * p :: p] = False
    lam = np.zeros(x + 1)
    for p in np.flatnonzero(isp):
        p = int(p)
        pk = p
        while pk <= x:
            lam[pk] = math.log(p)
            pk *= p
    return lam


def error_E_bruteforce(lam, x, q):
    """Per-residue sums over explicit progressions n = a, a+q, ... <= x."""
    xi = int(math.floor(x))
    phi = sum(1 for a in range(q) if math.gcd(a, q) == 1)
    best = 0.0
    for a in range(q):
        if math.gcd(a, q) != 1:
            continue
        s = float(np.sum(lam[a : xi + 1 : q])) if a else float(np.sum(lam[q : xi + 1 : q]))
        best = max(best, abs(s - x / phi))
    return best


def riesz_by_residue(x, q, d, k):
    """{a: A_k(x, q, a, d)} by walking the multiples of d."""
    buckets = {}
    kf = math.factorial(k)
    ell = d
    while ell <= x:
        buckets.setdefault(ell % q, []).append(math.log(x / ell) ** k / kf)
        ell += d
    return {a: math.fsum(v) for a, v in buckets.items()}


def riesz_double_loop_count(x, q, a, d):
    return sum(1 for ell in range(1, int(x) + 1) if ell % q == a % q and ell % d == 0)


def convolution_exhaustive(M, fams=None):
    ranges = [range(int(math.floor(m / 2)) + 1, int(math.floor(m)) + 1) for m in M]
    fams = fams or [lambda m: 1] * len(M)
    out = {}
    for tup in itertools.product(*ranges):
        d = math.prod(tup)
        w = math.prod(f(m) for f, m in zip(fams, tup))
        out[d] = out.get(d, 0) + w
    return {d: v for d, v in out.items() if v != 0}


def weighted_remainder_double_loop(coeffs, x, qs, k, rule="worst"):
    """sum_q max_a |sum_d u_d (sum_{l<=x, l=a (q^2), d|l} w(l) - x/(q^2 d))|."""
    kf = math.factorial(k)
    total = []
    for q in qs:
        m = q * q
        inner = {}
        for a in range(m):
            if math.gcd(a, m) != 1:
                continue
            if rule != "worst" and a != rule % m:
                continue
            parts = []
            for d, u in coeffs.items():
                acc = []
                for ell in range(d, int(x) + 1, d):
                    if ell % m == a:
                        acc.append(math.log(x / ell) ** k / kf)
                parts.append(u * (math.fsum(acc) - x / (m * d)))
            inner[a] = abs(math.fsum(parts))
        total.append(max(inner.values()))
    return math.fsum(total), total


def dist_int(theta):
    theta = Fraction(theta)
    return min(theta - math.floor(theta), math.ceil(theta) - theta)


def count_N_enum(beta, delta, Q):
    return sum(
        1
        for q in range(1, Q + 1)
        for a in range(1, q * q + 1)
        if math.gcd(a, q) == 1 and dist_int(Fraction(a, q * q) - beta) <= delta
    )


def count_M_enum(alpha, delta, Q, g):
    return sum(
        1
        for q in range(1, Q + 1)
        for a in range(0, g * q * q)
        if math.gcd(a, g * q * q) == 1 and dist_int(Fraction(a, g * q * q) - alpha) <= delta
    )


def max_M_endpoints(delta, Q, g):
    """Max of count_M over all left arc endpoints (a set that contains a maximiser)."""
    fr = [
        Fraction(a, g * q * q)
        for q in range(1, Q + 1)
        for a in range(g * q * q)
        if math.gcd(a, g * q * q) == 1
    ]
    best = 0
    for f in fr:
        alpha = f - delta
        c = sum(1 for h in fr if dist_int(h - alpha) <= delta)
        best = max(best, c)
    return best


def conductor_bruteforce(values_row, m):
    """Smallest d | m with chi(n) = 1 for every unit n = 1 (mod d), n <= m.

    ``values_row[n - 1]`` holds chi(n).
    """
    for d in sorted(k for k in range(1, m + 1) if m % k == 0):
        ok = True
        for n in range(1, m + 1, d):
            if math.gcd(n, m) == 1 and abs(values_row[n - 1] - 1) > 1e-9:
                ok = False
                break
        if ok:
            return d
    return m  # pragma: no cover


def exp_sum_direct(c, start, alpha):
    return sum(cn * complex(math.cos(2 * math.pi * n * alpha), math.sin(2 * math.pi * n * alpha))
               for n, cn in enumerate(c, start=start))


def lemma2_lhs_direct(c, Q, g):
    tot = 0.0
    for q in range(1, Q + 1):
        m = g * q * q
        for a in range(1, m + 1):
            if math.gcd(a, m) == 1:
                tot += abs(exp_sum_direct(c, 1, a / m)) ** 2
    return tot
