"""Experiment configuration, dispatch and report serialisation."""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from . import aperror, characters, farey, large_sieve
from .errors import BudgetError, ConfigurationError
from .sieve import build_prime_table

KINDS = ("sieve", "ap-error", "bv-average", "farey", "large-sieve", "char-table", "lemma7-toy")


class UsageError(ConfigurationError):
    """Invalid experiment configuration; the message names the field."""


def _rational(text, name: str) -> Fraction:
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"{name}: cannot parse {text!r} as a rational") from exc


@dataclass
class ExperimentConfig:
    kind: str
    x: tuple = ()
    theta: Optional[float] = None
    Q: Optional[float] = None
    lam: Optional[float] = None
    eps: float = 0.1
    delta: Optional[str] = None
    g: int = 1
    N: Optional[int] = None
    M: tuple = ()
    k: tuple = (0, 4)
    beta: str = "0"
    m: Optional[int] = None
    a: Optional[int] = None
    family: str = "one"
    seed: int = 0
    cases: int = 1
    t_shift: float = 0.0
    threads: int = 1

    def __post_init__(self):
        self.x = tuple(float(v) for v in np.atleast_1d(self.x)) if self.x != () else ()
        self.M = tuple(float(v) for v in np.atleast_1d(self.M)) if self.M != () else ()
        self.k = tuple(int(v) for v in np.atleast_1d(self.k))

    def validate(self) -> "ExperimentConfig":
        if self.kind not in KINDS:
            raise UsageError(f"kind: unknown experiment {self.kind!r}; choose from {KINDS}")
        if any(v < 1 for v in self.x):
            raise UsageError("x: every value must be >= 1")
        if self.theta is not None and not 0 < self.theta < 1:
            raise UsageError("theta: must lie in (0, 1)")
        if self.Q is not None and self.Q <= 0:
            raise UsageError("Q: must be positive")
        if not self.eps >= 0:
            raise UsageError("eps: must be nonnegative")
        if self.g < 1:
            raise UsageError("g: must be a positive integer")
        if self.N is not None and self.N < 1:
            raise UsageError("N: must be a positive integer")
        if self.cases < 1:
            raise UsageError("cases: must be a positive integer")
        if self.threads < 1:
            raise UsageError("threads: must be a positive integer")
        if not 0 <= self.seed < 2**64:
            raise UsageError("seed: must be a 64-bit unsigned integer")
        if self.family not in large_sieve.FAMILIES + ("log",):
            raise UsageError(f"family: unknown coefficient family {self.family!r}")
        if any(not 0 <= k <= aperror.MAX_RIESZ_K for k in self.k):
            raise UsageError(f"k: Riesz order must lie in [0, {aperror.MAX_RIESZ_K}]")
        if self.delta is not None:
            d = _rational(self.delta, "delta")
            if d <= 0:
                raise UsageError("delta: must be positive")
        _rational(self.beta, "beta")
        need_x = {"sieve", "ap-error", "bv-average", "lemma7-toy"}
        if self.kind in need_x and not self.x:
            raise UsageError(f"x: required for {self.kind}")
        if self.kind == "char-table" and (self.m is None or self.m < 1):
            raise UsageError("m: char-table needs a positive modulus")
        if self.kind == "lemma7-toy" and not self.M:
            raise UsageError("M: lemma7-toy needs the factor sizes M_i")
        return self

    def window(self, x: float) -> aperror.SquareModulusWindow:
        if self.Q is not None:
            return aperror.SquareModulusWindow(self.Q)
        theta = 0.4 if self.theta is None else self.theta
        return aperror.SquareModulusWindow.from_theta(x, theta)

    def in_regime(self, x: float, Q: float) -> bool:
        return Q <= x ** (0.5 - self.eps)

    def echo(self) -> Dict[str, Any]:
        # threads only changes scheduling, never results, so it is not echoed
        out = {}
        for f in fields(self):
            if f.name == "threads":
                continue
            v = getattr(self, f.name)
            out[f.name] = list(v) if isinstance(v, tuple) else v
        return out


@dataclass
class ExperimentReport:
    config: Dict[str, Any]
    columns: List[str]
    rows: List[Dict[str, Any]] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)
    status: str = "PASS"
    runtime: float = 0.0
    version: str = __version__
    notes: List[str] = field(default_factory=list)

    @property
    def violations(self) -> int:
        return sum(1 for r in self.rows if r.get("holds") is False)


# ---------------------------------------------------------------------------
# Individual experiments
# ---------------------------------------------------------------------------


def _pmap(fn: Callable, items: Sequence, threads: int) -> list:
    if threads <= 1 or len(items) <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _exp_sieve(cfg: ExperimentConfig) -> ExperimentReport:
    table = build_prime_table(int(max(cfg.x)))
    rep = ExperimentReport(cfg.echo(), ["x", "pi_x", "psi_x", "psi_minus_x"])
    for x in cfg.x:
        ns, logs = table.prime_powers(x)
        psi = math.fsum(logs)
        pi = int(np.searchsorted(table.primes, int(x), side="right"))
        rep.rows.append({"x": x, "pi_x": pi, "psi_x": psi, "psi_minus_x": psi - x})
    return rep


def _exp_ap_error(cfg: ExperimentConfig) -> ExperimentReport:
    table = build_prime_table(max(2, int(max(cfg.x))))
    qmax = int(cfg.Q) if cfg.Q is not None else 10
    rep = ExperimentReport(cfg.echo(), ["x", "q", "phi_q", "E", "E_over_sqrt_x"])
    for x in cfg.x:
        qs = list(range(1, qmax + 1))
        errs = aperror.errors_for_moduli(x, qs, table)
        for q, E in zip(qs, errs):
            phi = aperror._phi(q)
            rep.rows.append({"x": x, "q": q, "phi_q": phi, "E": E, "E_over_sqrt_x": E / math.sqrt(x)})
    return rep


def _exp_bv_average(cfg: ExperimentConfig) -> ExperimentReport:
    table = build_prime_table(max(2, int(max(cfg.x))))
    cols = ["x", "Q", "q_min", "q_max", "moduli", "sum_E", "R", "in_regime"]
    rep = ExperimentReport(cfg.echo(), cols)
    for x in cfg.x:
        w = cfg.window(x)
        s = aperror.averaged_error(x, w, table, threads=cfg.threads)
        R = s * math.sqrt(w.Q) / x
        rep.rows.append(
            {
                "x": x,
                "Q": w.Q,
                "q_min": w.q_min,
                "q_max": w.q_max,
                "moduli": len(w),
                "sum_E": s,
                "R": R,
                "in_regime": cfg.in_regime(x, w.Q),
            }
        )
    pos = [(r["x"], r["sum_E"]) for r in rep.rows if r["sum_E"] > 0]
    if len(pos) >= 2:
        slope, intercept = aperror.exponent_fit(pos)
        rep.summary["sum_E_slope"] = slope
        rep.summary["sum_E_intercept"] = intercept
    if len(rep.rows) >= 2:
        first, last = rep.rows[0], rep.rows[-1]
        rep.summary["R_first"] = first["R"]
        rep.summary["R_last"] = last["R"]
        rep.summary["R_decreasing"] = last["R"] < first["R"]
    return rep


def _seeded_betas(cfg: ExperimentConfig) -> List[Fraction]:
    if cfg.cases == 1:
        return [_rational(cfg.beta, "beta")]
    rng = np.random.default_rng(cfg.seed)
    out = []
    for _ in range(cfg.cases):
        den = int(rng.integers(1, 1000))
        out.append(Fraction(int(rng.integers(0, den)), den))
    return out


def _exp_farey(cfg: ExperimentConfig) -> ExperimentReport:
    delta = _rational(cfg.delta or "1/10", "delta")
    Q = int(cfg.Q) if cfg.Q is not None else 2
    cols = ["beta", "Delta", "Q", "g", "count_N", "count_M", "max_M", "witness", "lemma1_ratio", "convention"]
    rep = ExperimentReport(cfg.echo(), cols)
    betas = _seeded_betas(cfg)
    mmax, wit = farey.max_M_sweep(delta, Q, cfg.g)

    def one(beta):
        qN = farey.FareyQuery(beta, delta, Q, 1)
        qM = farey.FareyQuery(beta, delta, Q, cfg.g)
        nN = farey.count_N(qN)
        return {
            "beta": beta,
            "Delta": delta,
            "Q": Q,
            "g": cfg.g,
            "count_N": nN,
            "count_M": farey.count_M(qM),
            "max_M": mmax,
            "witness": wit,
            "lemma1_ratio": farey.lemma1_ratio(qN, cfg.eps) if delta > 0 else None,
            "convention": "N: 1<=a<=q^2, gcd(a,q)=1; M: 0<=a<gq^2, gcd(a,gq^2)=1",
        }

    rep.rows = _pmap(one, betas, cfg.threads)
    ratios = [r["lemma1_ratio"] for r in rep.rows if r["lemma1_ratio"] is not None]
    if ratios:
        rep.summary["max_lemma1_ratio"] = max(ratios)
    return rep


LS_COLUMNS = ["check", "Q", "g", "N", "M", "lam", "eps", "seed", "family", "lhs", "rhs", "ratio", "holds"]


def _ls_vector(cfg: ExperimentConfig, N: int, seed: int, table):
    return large_sieve.coefficient_family(cfg.family, 1, N, t=table, seed=seed)


def _exp_large_sieve(cfg: ExperimentConfig) -> ExperimentReport:
    Q = int(cfg.Q) if cfg.Q is not None else 4
    N = cfg.N if cfg.N is not None else 64
    rep = ExperimentReport(cfg.echo(), LS_COLUMNS)
    need = max([N] + [int(v) for v in cfg.M] + [int(max(cfg.x)) if cfg.x else 2])
    table = build_prime_table(max(need, 2)) if cfg.family in ("moebius", "mangoldt") else None
    seeds = [cfg.seed + i for i in range(cfg.cases)]
    delta = _rational(cfg.delta, "delta") if cfg.delta else None

    def duality(seed):
        c = _ls_vector(cfg, N, seed, table)
        lhs, rhs, holds = large_sieve.duality_bound_check(c, Q, cfg.g, delta)
        ratio2 = large_sieve.lemma2_bound_ratio(c, Q, cfg.g, cfg.eps)
        base = {"Q": Q, "g": cfg.g, "N": N, "M": None, "lam": None, "eps": cfg.eps, "seed": seed, "family": cfg.family}
        return [
            dict(base, check="duality", lhs=lhs, rhs=rhs, ratio=lhs / rhs if rhs else 0.0, holds=holds),
            dict(base, check="lemma2", lhs=lhs, rhs=lhs / ratio2 if ratio2 else None, ratio=ratio2, holds=None),
        ]

    for rows in _pmap(duality, seeds, cfg.threads):
        rep.rows.extend(rows)

    if cfg.m is not None:
        def prim(seed):
            c = _ls_vector(cfg, N, seed, table)
            lhs, rhs, holds = large_sieve.primitive_reduction_check(c, cfg.m, 1)
            return {
                "check": "primitive", "Q": None, "g": None, "N": N, "M": cfg.m, "lam": None, "eps": None,
                "seed": seed, "family": cfg.family, "lhs": lhs, "rhs": rhs,
                "ratio": lhs / rhs if rhs else 0.0, "holds": holds,
            }

        rep.rows.extend(_pmap(prim, seeds, cfg.threads))

    if cfg.lam is not None and cfg.x:
        x = cfg.x[0]
        w = aperror.SquareModulusWindow(cfg.Q) if cfg.Q is not None else cfg.window(x)
        xl = x**cfg.lam
        Mlen = int(cfg.M[0]) if cfg.M else N
        for seed in seeds:
            c = _ls_vector(cfg, Mlen, seed, table)
            T = large_sieve.char_moment_T_lambda(c, w, (xl, 2 * xl), table)
            bound = large_sieve.lemma3_bound(w.Q, Mlen, x, cfg.lam, cfg.eps, c.norm2_sq)
            rep.rows.append({
                "check": "lemma3", "Q": w.Q, "g": None, "N": None, "M": Mlen, "lam": cfg.lam, "eps": cfg.eps,
                "seed": seed, "family": cfg.family, "lhs": T, "rhs": bound,
                "ratio": T / bound if T else 0.0, "holds": None,
            })
            if len(cfg.M) >= 3:
                H, K = cfg.M[1], cfg.M[2]
                hv = _ls_vector(cfg, int(2 * H), seed, table)
                kv = _ls_vector(cfg, int(2 * K), seed + 1, table)
                h = large_sieve.CoefficientVector(hv.values[int(H):], start=int(H) + 1)
                k = large_sieve.CoefficientVector(kv.values[int(K):], start=int(K) + 1)
                S = large_sieve.bilinear_sum_S(h, k, w, (xl, 2 * xl), cfg.t_shift, table)
                denom = x ** (0.5 - cfg.eps / 20) * w.Q**0.5
                rep.rows.append({
                    "check": "lemma4", "Q": w.Q, "g": None, "N": None, "M": f"{H:g}x{K:g}", "lam": cfg.lam,
                    "eps": cfg.eps, "seed": seed, "family": cfg.family, "lhs": S, "rhs": denom,
                    "ratio": large_sieve.lemma4_ratio(S, x, w.Q, cfg.eps), "holds": None,
                })
                rep.summary.update(
                    {f"lemma4_{k_}": v for k_, v in large_sieve.lemma4_conditions(x, w.Q, cfg.lam, H, K, cfg.eps).items()}
                )
    ratios = [r["ratio"] for r in rep.rows if r["check"] == "lemma2" and r["ratio"] is not None]
    if ratios:
        rep.summary["max_lemma2_ratio"] = max(ratios)
    return rep


def _exp_char_table(cfg: ExperimentConfig) -> ExperimentReport:
    rep = ExperimentReport(cfg.echo(), ["modulus", "label", "conductor", "primitive", "g", "k"])
    rep.rows = characters.char_table_rows(cfg.m)
    return rep


def _exp_lemma7(cfg: ExperimentConfig) -> ExperimentReport:
    fam = cfg.family if cfg.family in ("one", "log") else "one"
    spec = aperror.ConvolutionSpec(tuple(cfg.M), (fam,))
    coeffs = aperror.convolution_coefficients(spec)
    rep = ExperimentReport(cfg.echo(), ["x", "k", "q", "modulus", "inner_abs"])
    rule = "worst" if cfg.a is None else cfg.a
    for x in cfg.x:
        w = cfg.window(x)
        for k in cfg.k:
            total, terms = aperror.weighted_remainder_sum(coeffs, x, w, k, rule, per_modulus=True)
            for q, v in zip(w, terms):
                rep.rows.append({"x": x, "k": k, "q": q, "modulus": q * q, "inner_abs": v})
            rep.summary[f"total_x{x:g}_k{k}"] = total
    rep.summary.update({"fold_count": spec.fold_count, "D": spec.D, "D1": spec.D1, "support": len(coeffs)})
    rep.notes.append("exceptional set F(Q) taken empty: sums are upper bounds for the restricted ones")
    return rep


DISPATCH = {
    "sieve": _exp_sieve,
    "ap-error": _exp_ap_error,
    "bv-average": _exp_bv_average,
    "farey": _exp_farey,
    "large-sieve": _exp_large_sieve,
    "char-table": _exp_char_table,
    "lemma7-toy": _exp_lemma7,
}


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Run one experiment; deterministic in (config, seed)."""
    config.validate()
    start = time.perf_counter()
    rep = DISPATCH[config.kind](config)
    rep.runtime = time.perf_counter() - start
    if rep.violations:
        rep.status = "FAIL"
    rep.summary["rows"] = len(rep.rows)
    rep.summary["violations"] = rep.violations
    return rep


# ---------------------------------------------------------------------------
# Serialisation
# ---------------------------------------------------------------------------


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".12g")
    return str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (bool, np.bool_)) or v is None:
        return None if v is None else bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if not math.isfinite(v):
            return str(v)
        return float(format(v, ".12g"))
    return str(v)


def emit_report(report: ExperimentReport, fmt: str = "csv", timings: bool = False) -> bytes:
    """Serialise a report; identical reports give identical bytes.

    Wall time is left out unless ``timings`` is set, so replayed runs compare
    byte for byte.
    """
    if fmt == "csv":
        cols = list(report.columns) + (["runtime_s"] if timings else [])
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for row in report.rows:
            vals = [_fmt(row.get(c)) for c in report.columns]
            if timings:
                vals.append(_fmt(report.runtime))
            w.writerow(vals)
        return buf.getvalue().encode("utf-8")
    if fmt == "json":
        doc = {
            "version": report.version,
            "status": report.status,
            "config": report.config,
            "columns": report.columns,
            "rows": [{c: row.get(c) for c in report.columns} for row in report.rows],
            "summary": report.summary,
            "notes": report.notes,
        }
        if timings:
            doc["runtime_s"] = report.runtime
        return (json.dumps(_jsonable(doc), indent=2) + "\n").encode("utf-8")
    raise UsageError(f"format: unknown output format {fmt!r}")


def load_report(data: bytes) -> ExperimentReport:
    doc = json.loads(data.decode("utf-8"))
    return ExperimentReport(
        config=doc["config"],
        columns=doc["columns"],
        rows=doc["rows"],
        summary=doc.get("summary", {}),
        status=doc.get("status", "PASS"),
        runtime=doc.get("runtime_s", 0.0),
        version=doc.get("version", __version__),
        notes=doc.get("notes", []),
    )
