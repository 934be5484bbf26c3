"""Simulation, empirical distances and convergence experiments."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Mapping, Sequence

import numpy as np

from .errors import InvalidParams, MomentError
from .fourmoments import TargetSpec, bound, q_poly, u_poly
from .generator import GeneratorHandle
from .pearson import PearsonParams, cdf as pearson_cdf, params_from_dict, params_to_dict
from .polycalc import as_rational
from .streams import SampleBatch, rng_stream
from .tensor import ChaosElement, TensorGenerator, first_chaos, homogeneous_sum, tensor_eigenfunction

__all__ = [
    "SampleBatch",
    "euler_maruyama",
    "kolmogorov_distance",
    "bounded_lipschitz_distance",
    "chaos_sample",
    "ConvergenceRow",
    "ExperimentDescriptor",
    "build_chaos",
    "run_convergence",
    "rows_to_csv",
    "ROW_COLUMNS",
]

EPS = 1e-12


def euler_maruyama(
    params: PearsonParams,
    x0: float,
    dt: float,
    steps: int,
    seed: int,
    n_paths: int = 1,
    thin: int = 1,
    burn_in: int | None = None,
) -> SampleBatch:
    """Euler-Maruyama for ``dX = -theta (X-m) dt + sqrt(2 theta b(X)) dB``.

    ``n_paths`` independent chains run side by side.  After a burn-in of
    ``max(10/(theta dt), 10^4)`` steps (unless given) the state is recorded
    every ``thin`` steps for ``steps`` further steps; ``steps = 0`` records
    the state once, giving ``n_paths`` i.i.d. draws.  Steps that leave the
    support are clamped to ``1e-12`` inside it.  ``values`` has shape
    ``(records, n_paths)``.
    """
    th = float(params.theta)
    if not dt > 0 or not dt * th < 0.5:
        raise ValueError("need dt > 0 and dt * theta < 1/2")
    lo, hi = params.support
    if not lo < x0 < hi:
        raise ValueError("x0 must be an interior point of the support")
    if burn_in is None:
        burn_in = max(math.ceil(10.0 / th / dt), 10_000)
    m = float(params.m)
    b2, b1, b0 = float(params.b2), float(params.b1), float(params.b0)
    lo_c = lo + EPS if math.isfinite(lo) else -math.inf
    hi_c = hi - EPS if math.isfinite(hi) else math.inf
    rng = rng_stream(seed, 0)
    x = np.full(n_paths, float(x0))
    sq = math.sqrt(dt)
    records = []
    total = burn_in + max(steps, 0)
    for i in range(1, total + 1):
        bx = (b2 * x + b1) * x + b0
        if np.any(bx < -1e-9):
            raise ValueError("negative diffusion coefficient encountered: invalid parameters")
        dw = rng.standard_normal(n_paths) * sq
        x = x - th * (x - m) * dt + np.sqrt(2.0 * th * np.maximum(bx, 0.0)) * dw
        np.clip(x, lo_c, hi_c, out=x)
        if i > burn_in and (i - burn_in) % thin == 0:
            records.append(x.copy())
    if not records:
        records.append(x.copy())
    prov = {"kind": "sde", "dt": dt, "steps": steps, "burn_in": burn_in, "n_paths": n_paths,
            "thin": thin, "x0": x0}
    return SampleBatch(np.array(records), seed, prov)


def _values(s) -> np.ndarray:
    return np.asarray(s.values if isinstance(s, SampleBatch) else s, dtype=float).ravel()


def kolmogorov_distance(samples, target) -> float:
    """``sup |ECDF - F|`` with ``F`` from Pearson params, a cdf callable or other samples."""
    x = np.sort(_values(samples))
    n = x.size
    if isinstance(target, PearsonParams):
        F = pearson_cdf(target, x)
    elif callable(target):
        F = np.asarray(target(x), dtype=float)
    else:
        y = np.sort(_values(target))
        pts = np.concatenate([x, y])
        fa = np.searchsorted(x, pts, side="right") / n
        fb = np.searchsorted(y, pts, side="right") / y.size
        return float(np.max(np.abs(fa - fb)))
    # compare the cdf with the ECDF just before and at each jump
    upper = np.arange(1, n + 1) / n
    lower = np.arange(0, n) / n
    return float(max(np.max(np.abs(upper - F)), np.max(np.abs(F - lower))))


def bounded_lipschitz_distance(samples_a, samples_b, n_centers: int = 64) -> float:
    """Lower estimate of the bounded-Lipschitz distance.

    Maximizes ``|E h(A) - E h(B)|`` over ramps ``clip(x - c, -1, 1)`` and hats
    ``max(w - |x - c|, 0)`` (``w`` in 1/4, 1/2, 1), centers on pooled
    quantiles.  Every test function is bounded by 1 and 1-Lipschitz, so the
    value is at most 2 and never exceeds the true distance.
    """
    a, b = _values(samples_a), _values(samples_b)
    if a.size == 0 or b.size == 0:
        raise ValueError("both sample sets must be nonempty")
    pooled = np.concatenate([a, b])
    centers = np.unique(np.quantile(pooled, np.linspace(0, 1, n_centers)))
    best = 0.0
    for c in centers:
        best = max(best, abs(np.mean(np.clip(a - c, -1, 1)) - np.mean(np.clip(b - c, -1, 1))))
        for w in (0.25, 0.5, 1.0):
            ha = np.mean(np.maximum(w - np.abs(a - c), 0.0))
            hb = np.mean(np.maximum(w - np.abs(b - c), 0.0))
            best = max(best, abs(ha - hb))
    return float(best)


def chaos_sample(G: ChaosElement, seed: int, n: int) -> SampleBatch:
    """``n`` values of ``G`` at product-measure draws; stream ``(seed, i)`` per coordinate."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return SampleBatch(G.sample(seed, n), seed, {"kind": "chaos", "element": G.describe(), "n": n})


# ---------------------------------------------------------------------------
# experiments


@dataclass(frozen=True)
class ConvergenceRow:
    k: int
    m1: float
    m2: float
    m3: float
    m4: float
    U_value: float
    Q2_value: float
    eta_k: Fraction
    xi_k: Fraction
    kolmogorov: float
    bound: float
    U_int: Fraction | None = None
    Q2_int: Fraction | None = None
    U_se: float = math.nan


ROW_COLUMNS = ("k", "m1", "m2", "m3", "m4", "U_value", "Q2_value", "eta_k", "xi_k", "kolmogorov", "bound",
               "U_int", "Q2_int", "U_se")


@dataclass(frozen=True)
class ExperimentDescriptor:
    """Target, chaos family, ``k`` grid and Monte Carlo settings.

    ``chaos`` is a mapping with ``kind`` one of

    * ``homogeneous_sum``: ``base`` params, ``p``, ``pattern`` (``complete`` or
      ``chain``), optional ``a`` (default 1) and ``normalize`` (default true);
    * ``first_chaos``: ``base`` params; the same element for every ``k``;
    * ``element``: ``coords`` (list of params) and ``terms``
      (``[[alpha, a], ...]`` with rationals as strings); fixed in ``k``.
    """

    target: PearsonParams
    chaos: Mapping[str, Any]
    k_grid: tuple[int, ...]
    mc_n: int
    seed: int = 0
    output: str | None = None

    def __post_init__(self):
        ks = tuple(int(k) for k in self.k_grid)
        if any(b <= a for a, b in zip(ks, ks[1:])):
            raise InvalidParams("k_grid must be strictly increasing")
        if any(k < 1 for k in ks):
            raise InvalidParams("k values must be positive")
        if int(self.mc_n) < 1000:
            raise InvalidParams("mc_n must be at least 1000")
        kind = self.chaos.get("kind") if isinstance(self.chaos, Mapping) else None
        if kind not in ("homogeneous_sum", "first_chaos", "element"):
            raise InvalidParams(f"unknown chaos kind {kind!r}")
        object.__setattr__(self, "k_grid", ks)
        object.__setattr__(self, "mc_n", int(self.mc_n))

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "ExperimentDescriptor":
        if not isinstance(d, Mapping):
            raise InvalidParams("descriptor must be a JSON object")
        missing = [k for k in ("target", "chaos", "k_grid", "mc_n") if k not in d]
        if missing:
            raise InvalidParams(f"descriptor missing fields: {', '.join(missing)}")
        return cls(params_from_dict(d["target"]), dict(d["chaos"]), tuple(d["k_grid"]), d["mc_n"],
                   int(d.get("seed", 0)), d.get("output"))

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentDescriptor":
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise InvalidParams(f"malformed JSON in {path}: {exc}") from None
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return {"target": params_to_dict(self.target), "chaos": dict(self.chaos), "k_grid": list(self.k_grid),
                "mc_n": self.mc_n, "seed": self.seed, "output": self.output}


def build_chaos(spec: Mapping[str, Any], k: int, target_mean) -> ChaosElement:
    """Chaos element for grid point ``k``, shifted to ``target_mean``."""
    kind = spec["kind"]
    if kind == "homogeneous_sum":
        base = GeneratorHandle(params_from_dict(spec["base"]))
        return homogeneous_sum(base, k, int(spec.get("p", 2)), as_rational(spec.get("a", 1)),
                               pattern=spec.get("pattern", "complete"),
                               normalize=bool(spec.get("normalize", True)), shift=target_mean)
    if kind == "first_chaos":
        base = GeneratorHandle(params_from_dict(spec["base"]))
        return first_chaos(base, shift=target_mean)
    if kind == "element":
        coords = [GeneratorHandle(params_from_dict(c)) for c in spec["coords"]]
        terms = [(alpha, a) for alpha, a in spec["terms"]]
        return tensor_eigenfunction(TensorGenerator(tuple(coords)), terms, shift=target_mean, label="element")
    raise InvalidParams(f"unknown chaos kind {kind!r}")


def _row(desc: ExperimentDescriptor, k: int) -> ConvergenceRow:
    ts = TargetSpec(desc.target)
    G = build_chaos(desc.chaos, k, ts.m)
    vals = G.sample(desc.seed, desc.mc_n)
    emp = [float(np.mean(vals**p)) for p in range(1, 5)]
    u = u_poly(ts)(vals)
    q2 = q_poly(ts)(vals) ** 2
    U_value, Q2_value = float(np.mean(u)), float(np.mean(q2))
    U_se = float(np.std(u, ddof=1) / math.sqrt(vals.size))
    kol = kolmogorov_distance(vals, desc.target)
    eta = G.grade
    xi = max(eta - ts.eta_tilde, Fraction(0))
    try:
        rep = bound(G, ts, exact_lhs=False)
        U_int, Q2_int, bnd = rep.U_int, rep.Q2_int, rep.distance_bound
    except MomentError:
        U_int = Q2_int = None
        rhs = 2 * (1 - float(ts.b2) - float(eta) / 4) * U_value + float(xi) * (1 - float(ts.b2)) / 2 * Q2_value
        bnd = math.sqrt(max(rhs, 0.0))
    return ConvergenceRow(k, *emp, U_value, Q2_value, eta, xi, kol, bnd, U_int, Q2_int, U_se)


def run_convergence(desc: ExperimentDescriptor, workers: int = 1) -> list[ConvergenceRow]:
    """One row per ``k``; rows come back in grid order regardless of ``workers``."""
    if workers > 1 and len(desc.k_grid) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda k: _row(desc, k), desc.k_grid))
    return [_row(desc, k) for k in desc.k_grid]


def _fmt(v, as_float: bool) -> str:
    if v is None:
        return ""
    if isinstance(v, Fraction):
        if as_float:
            return repr(float(v))
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def rows_to_csv(rows: Sequence[ConvergenceRow], as_float: bool = False) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ROW_COLUMNS)
    for r in rows:
        w.writerow([_fmt(getattr(r, c), as_float) for c in ROW_COLUMNS])
    return buf.getvalue()
