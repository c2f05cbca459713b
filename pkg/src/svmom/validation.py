"""Sample statistics, the Itô-integral oracle, and derived-vs-sample reports."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import mdl_1fsv, mdl_1fsvj
from .euler import InvalidParams, SimConfig, simulate_chunks
from .evaluate import HestonParams, SvjParams, eval_poly

__all__ = [
    "InsufficientData",
    "Estimate",
    "sample_moments",
    "sample_cov",
    "oracle_ieii",
    "ReportRow",
    "McReport",
    "build_report",
    "MODELS",
]

N_BATCHES = 100


class InsufficientData(ValueError):
    pass


@dataclass(frozen=True)
class Estimate:
    value: float
    se: float


def _segments(returns) -> list[np.ndarray]:
    if isinstance(returns, np.ndarray):
        return [returns]
    if isinstance(returns, (list, tuple)) and returns and isinstance(returns[0], np.ndarray):
        return list(returns)
    return [np.asarray(returns, dtype=float)]


def _batches(n: int, n_batches: int) -> list[slice]:
    edges = np.linspace(0, n, n_batches + 1).astype(int)
    return [slice(a, b) for a, b in zip(edges[:-1], edges[1:])]


def _batch_se(batch_values: np.ndarray) -> float:
    b = len(batch_values)
    return float(np.std(batch_values, ddof=1) / math.sqrt(b))


def sample_moments(returns, max_order: int, n_batches: int = N_BATCHES) -> dict[int, Estimate]:
    """Raw sample moments of orders 1..max_order with batch-means standard errors."""
    y = np.concatenate(_segments(returns))
    if y.size <= 100:
        raise InsufficientData(f"need more than 100 observations, got {y.size}")
    slices = _batches(y.size, n_batches)
    out = {}
    power = np.ones_like(y)
    for l in range(1, max_order + 1):
        power = power * y
        batch = np.array([power[s].mean() for s in slices])
        out[l] = Estimate(float(power.mean()), _batch_se(batch))
    return out


def _cov_estimate(a, b, l1, l2):
    return np.mean(a ** l1 * b ** l2) - np.mean(a ** l1) * np.mean(b ** l2)


def sample_cov(returns, orders: Iterable[tuple[int, int]],
               n_batches: int = N_BATCHES) -> dict[tuple[int, int], Estimate]:
    """Lag-1 sample covariances ``cov(y_n^l1, y_{n+1}^l2)``.

    ``returns`` may be one array or a list of independent segments; lag pairs
    never straddle two segments.
    """
    segs = _segments(returns)
    a = np.concatenate([s[:-1] for s in segs])
    b = np.concatenate([s[1:] for s in segs])
    if a.size <= 100:
        raise InsufficientData(f"need more than 100 lag pairs, got {a.size}")
    slices = _batches(a.size, n_batches)
    out = {}
    for l1, l2 in orders:
        value = float(_cov_estimate(a, b, l1, l2))
        batch = np.array([_cov_estimate(a[s], b[s], l1, l2) for s in slices])
        out[(l1, l2)] = Estimate(value, _batch_se(batch))
    return out


def oracle_ieii(triples, k: float, theta: float, sigma_v: float, v0: float, tau: float,
                n_paths: int = 100_000, n_steps: int = 200, seed: int = 0):
    """Monte Carlo estimate of ``E[IE^m1 I^m2 I*^m3 | v(0) = v0]`` over ``[0, tau]``.

    Simulates the variance by full-truncation Euler and accumulates the
    left-point Itô sums of the three integrals.  ``triples`` is one
    ``(m1, m2, m3)`` or a sequence of them; returns one :class:`Estimate`
    or a dict keyed by triple.
    """
    if not (k > 0 and theta > 0 and sigma_v >= 0 and v0 >= 0 and tau > 0):
        raise InvalidParams("require k, theta, tau > 0 and sigma_v, v0 >= 0")
    single = isinstance(triples[0], int)
    wanted = [tuple(triples)] if single else [tuple(t) for t in triples]
    if any(min(t) < 0 for t in wanted):
        raise InvalidParams("orders must be nonnegative")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    dt = tau / n_steps
    v = np.full(n_paths, float(v0))
    ie = np.zeros(n_paths)
    i_ = np.zeros(n_paths)
    i_star = np.zeros(n_paths)
    for step in range(n_steps):
        s = step * dt
        vp = np.maximum(v, 0.0)
        sd = np.sqrt(vp * dt)
        z = rng.standard_normal((2, n_paths))
        dwv = sd * z[0]
        ie += math.exp(k * s) * dwv
        i_ += dwv
        i_star += sd * z[1]
        v += k * (theta - vp) * dt + sigma_v * dwv
    out = {}
    for t in wanted:
        x = ie ** t[0] * i_ ** t[1] * i_star ** t[2]
        out[t] = Estimate(float(x.mean()), float(x.std(ddof=1) / math.sqrt(n_paths)))
    return out[wanted[0]] if single else out


# -- reports -------------------------------------------------------------------

MODELS = {
    "1fsv": mdl_1fsv,
    "1fsvj": mdl_1fsvj,
}


@dataclass(frozen=True)
class ReportRow:
    order: str
    derived: float
    sample: float
    se: float
    abs_diff: float
    pct_diff: float | None

    @classmethod
    def make(cls, label: str, derived: float, est: Estimate) -> "ReportRow":
        diff = abs(est.value - derived)
        pct = None if abs(derived) <= est.se or derived == 0 else diff / abs(derived) * 100
        return cls(label, derived, est.value, est.se, diff, pct)


@dataclass
class McReport:
    model: str
    rows: list[ReportRow] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    COLUMNS = ("order", "derived", "sample", "se", "abs_diff", "pct_diff")

    def to_text(self) -> str:
        head = f"{'Order':<18}{'Derived':>10}{'Sample':>10}{'SE':>10}{'Difference':>12}{'Diff (%)':>10}"
        lines = [head, "-" * len(head)]
        for r in self.rows:
            pct = "-" if r.pct_diff is None else f"{r.pct_diff:.0f}%"
            lines.append(f"{r.order:<18}{r.derived:>10.4f}{r.sample:>10.4f}{r.se:>10.4f}"
                         f"{r.abs_diff:>12.4f}{pct:>10}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        doc = {"model": self.model, "meta": self.meta, "rows": [asdict(r) for r in self.rows]}
        return json.dumps(doc, indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.COLUMNS)
        for r in self.rows:
            w.writerow([r.order, repr(r.derived), repr(r.sample), repr(r.se), repr(r.abs_diff),
                        "" if r.pct_diff is None else repr(r.pct_diff)])
        return buf.getvalue()


def _moment_label(l: int) -> str:
    return f"E[y_n^{l}]"


def _cov_label(l1: int, l2: int) -> str:
    return f"cov(y_n^{l1},y_n+1^{l2})"


def build_report(model: str, orders: Sequence[int], cov_orders: Sequence[tuple[int, int]],
                 params: HestonParams, cfg: SimConfig, workers: int = 1) -> McReport:
    """Compare derived moments/covariances against an Euler sample path."""
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}; choose from {sorted(MODELS)}")
    mod = MODELS[model]
    if model == "1fsv" and isinstance(params, SvjParams):
        params = params.heston()
    if model == "1fsvj" and not isinstance(params, SvjParams):
        params = SvjParams(**params.as_dict())
    chunks = simulate_chunks(params, cfg, workers)
    values = params.as_dict()

    report = McReport(model, meta={"params": values, "n_obs": cfg.n_obs,
                                   "n_substeps": cfg.n_substeps, "seed": cfg.seed,
                                   "burn_in": cfg.burn_in, "chunk_size": cfg.chunk_size,
                                   "scheme": cfg.scheme, "n_batches": N_BATCHES})
    positive = [l for l in orders if l > 0]
    sample = sample_moments(chunks, max(positive)) if positive else {}
    for l in orders:
        if l == 0:
            report.rows.append(ReportRow.make(_moment_label(0), 1.0, Estimate(1.0, 0.0)))
            continue
        derived = eval_poly(mod.moment_y(l), values)
        report.rows.append(ReportRow.make(_moment_label(l), derived, sample[l]))
    covs = sample_cov(chunks, cov_orders) if cov_orders else {}
    for l1, l2 in cov_orders:
        derived = eval_poly(mod.cov_yy(l1, l2), values)
        report.rows.append(ReportRow.make(_cov_label(l1, l2), derived, covs[(l1, l2)]))
    return report
