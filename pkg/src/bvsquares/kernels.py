"""Hot numeric loops.

Every kernel exists as ``_name_jit`` (numba) and ``_name_numpy`` (plain
numpy).  The public ``name`` is bound to one of them at import time according
to :data:`bvsquares._jit.USE_JIT`.  Both versions are importable so that the
benchmark and the tests can compare them directly.
"""

import math

import numpy as np

from ._jit import USE_JIT, njit

# ---------------------------------------------------------------------------
# Least-prime-factor sieve
# ---------------------------------------------------------------------------

SEGMENT = 1 << 18


def base_primes(n):
    """Primes up to ``n`` by a plain byte sieve (n is at most sqrt(limit))."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    mark = np.ones(n + 1, dtype=bool)
    mark[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if mark[p]:
            mark[p * p :: p] = False
    return np.flatnonzero(mark).astype(np.int64)


@njit
def _spf_jit(limit, primes, segment):
    spf = np.zeros(limit + 1, dtype=np.uint32)
    lo = 2
    while lo <= limit:
        hi = min(lo + segment, limit + 1)
        for i in range(primes.shape[0]):
            p = primes[i]
            if p * p >= hi:
                break
            start = max(p * p, ((lo + p - 1) // p) * p)
            for j in range(start, hi, p):
                if spf[j] == 0:
                    spf[j] = p
        for j in range(lo, hi):
            if spf[j] == 0:
                spf[j] = j
        lo = hi
    return spf


def _spf_numpy(limit, primes, segment):
    spf = np.zeros(limit + 1, dtype=np.uint32)
    lo = 2
    while lo <= limit:
        hi = min(lo + segment, limit + 1)
        seg = spf[lo:hi]
        active = primes[primes * primes < hi]
        # largest first, so the smallest prime factor is written last
        for p in active[::-1]:
            p = int(p)
            start = max(p * p, -(-lo // p) * p)
            if start < hi:
                seg[start - lo :: p] = p
        zero = seg == 0
        seg[zero] = np.arange(lo, hi, dtype=np.uint32)[zero]
        lo = hi
    return spf


# ---------------------------------------------------------------------------
# Multiplicative function tables from the spf array
# ---------------------------------------------------------------------------


@njit
def _arith_tables_jit(spf, n):
    mu = np.zeros(n + 1, dtype=np.int8)
    phi = np.zeros(n + 1, dtype=np.int64)
    lam = np.zeros(n + 1, dtype=np.float64)
    if n >= 1:
        mu[1] = 1
        phi[1] = 1
    for k in range(2, n + 1):
        p = np.int64(spf[k])
        r = k // p
        if r % p == 0:
            mu[k] = 0
            phi[k] = phi[r] * p
        else:
            mu[k] = -mu[r]
            phi[k] = phi[r] * (p - 1)
        # k is a prime power iff stripping p leaves 1
        while r % p == 0:
            r //= p
        if r == 1:
            lam[k] = math.log(p)
    return mu, phi, lam


def _arith_tables_numpy(spf, n):
    mu = np.ones(n + 1, dtype=np.int8)
    phi = np.arange(n + 1, dtype=np.int64)
    lam = np.zeros(n + 1, dtype=np.float64)
    mu[0] = 0
    idx = np.arange(2, n + 1)
    primes = idx[spf[2 : n + 1] == idx]
    for p in primes:
        p = int(p)
        mu[::p] *= -1
        if p * p <= n:
            mu[:: p * p] = 0
        phi[::p] -= phi[::p] // p
        lp = math.log(p)
        pk = p
        while pk <= n:
            lam[pk] = lp
            pk *= p
    mu[0] = 0
    phi[0] = 0
    return mu, phi, lam


# ---------------------------------------------------------------------------
# Shared progression scan: sum Lambda(n) into residue classes of many moduli
# ---------------------------------------------------------------------------


@njit
def _residue_sums_jit(values, weights, moduli):
    offsets = np.zeros(moduli.shape[0] + 1, dtype=np.int64)
    for j in range(moduli.shape[0]):
        offsets[j + 1] = offsets[j] + moduli[j]
    total = np.zeros(offsets[-1], dtype=np.float64)
    comp = np.zeros(offsets[-1], dtype=np.float64)
    for i in range(values.shape[0]):
        v = values[i]
        w = weights[i]
        for j in range(moduli.shape[0]):
            slot = offsets[j] + v % moduli[j]
            # Neumaier compensated add
            s = total[slot]
            t = s + w
            if abs(s) >= abs(w):
                comp[slot] += (s - t) + w
            else:
                comp[slot] += (w - t) + s
            total[slot] = t
    return total + comp, offsets


def _residue_sums_numpy(values, weights, moduli):
    offsets = np.zeros(len(moduli) + 1, dtype=np.int64)
    offsets[1:] = np.cumsum(moduli)
    out = np.zeros(int(offsets[-1]), dtype=np.float64)
    for j, m in enumerate(moduli):
        m = int(m)
        res = values % m
        order = np.argsort(res, kind="stable")
        res_sorted = res[order]
        w_sorted = weights[order]
        cuts = np.flatnonzero(np.diff(res_sorted)) + 1
        starts = np.concatenate(([0], cuts)) if len(res_sorted) else np.zeros(0, dtype=np.int64)
        for a, b in zip(starts, np.append(starts[1:], len(res_sorted))):
            out[offsets[j] + res_sorted[a]] = math.fsum(w_sorted[a:b])
    return out, offsets


# ---------------------------------------------------------------------------
# Divisor scatter: U(l) = sum_{d | l} u_d for l <= x
# ---------------------------------------------------------------------------


@njit
def _divisor_scatter_jit(ds, us, xmax):
    out = np.zeros(xmax + 1, dtype=np.float64)
    for i in range(ds.shape[0]):
        d = ds[i]
        u = us[i]
        for ell in range(d, xmax + 1, d):
            out[ell] += u
    return out


def _divisor_scatter_numpy(ds, us, xmax):
    out = np.zeros(xmax + 1, dtype=np.float64)
    for d, u in zip(ds, us):
        d = int(d)
        if d <= xmax:
            out[d::d] += u
    return out


# ---------------------------------------------------------------------------
# One step of a Dirichlet convolution: new[d*m] += old[d] * a(m)
# ---------------------------------------------------------------------------


@njit
def _convolve_step_jit(old, m_lo, a, out_len):
    new = np.zeros(out_len, dtype=old.dtype)
    for d in range(1, old.shape[0]):
        od = old[d]
        if od == 0:
            continue
        for i in range(a.shape[0]):
            new[d * (m_lo + i)] += od * a[i]
    return new


def _convolve_step_numpy(old, m_lo, a, out_len):
    new = np.zeros(out_len, dtype=old.dtype)
    support = np.flatnonzero(old)
    support = support[support >= 1]
    vals = old[support]
    for i, ai in enumerate(a):
        np.add.at(new, support * (m_lo + i), vals * ai)
    return new


# ---------------------------------------------------------------------------
# Arc counting at grid points, all integer arithmetic
# ---------------------------------------------------------------------------


@njit
def _arc_counts_jit(num, den, grid, width, r, s):
    # counts[j] = #{i : || num_i/den_i - grid_j/width || <= r/s}
    counts = np.zeros(grid.shape[0], dtype=np.int64)
    for j in range(grid.shape[0]):
        u = grid[j]
        c = 0
        for i in range(num.shape[0]):
            m = den[i]
            big = m * width
            v = (num[i] * width - u * m) % big
            if big - v < v:
                v = big - v
            if s * v <= r * big:
                c += 1
        counts[j] = c
    return counts


def _arc_counts_numpy(num, den, grid, width, r, s, chunk=1 << 22):
    counts = np.zeros(len(grid), dtype=np.int64)
    if len(num) == 0:
        return counts
    big = den * width
    step = max(1, chunk // len(num))
    for lo in range(0, len(grid), step):
        u = grid[lo : lo + step, None]
        v = (num[None, :] * width - u * den[None, :]) % big[None, :]
        v = np.minimum(v, big[None, :] - v)
        counts[lo : lo + step] = np.count_nonzero(s * v <= r * big[None, :], axis=1)
    return counts


if USE_JIT:
    spf_sieve = _spf_jit
    arith_tables = _arith_tables_jit
    residue_sums = _residue_sums_jit
    divisor_scatter = _divisor_scatter_jit
    convolve_step = _convolve_step_jit
    arc_counts = _arc_counts_jit
else:
    spf_sieve = _spf_numpy
    arith_tables = _arith_tables_numpy
    residue_sums = _residue_sums_numpy
    divisor_scatter = _divisor_scatter_numpy
    convolve_step = _convolve_step_numpy
    arc_counts = _arc_counts_numpy
