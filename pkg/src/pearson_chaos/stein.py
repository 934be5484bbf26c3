"""Stein machinery for absolutely continuous targets.

For a density ``p`` on ``(l, u)`` with mean ``m`` and speed ``theta``,

    sigma^2(x) = -2 theta int_l^x (y - m) p(y) dy / p(x),   tau = sigma^2 / 2,

and the Stein equation ``tau f' - theta (x - m) f = h - E h(Z)`` has the
solution

    f_h(x) = int_l^x (h - E h) p / (tau(x) p(x))        inside (l, u),
    f_h(x) = -(h(x) - E h) / (theta (x - m))            outside.

For Pearson targets ``tau = theta b`` on the support.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .pearson import PearsonParams, density as pearson_density, max_moment_order
from .streams import SampleBatch

__all__ = [
    "DensityTarget",
    "sigma2_from_density",
    "tau",
    "SteinSolver",
    "stein_solution",
    "stein_statistics",
    "stein_discrepancy",
    "default_degrees",
]

_QUAD = dict(epsabs=1e-13, epsrel=1e-12, limit=400)


def _quad(f, a, b, points=None):
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            if points is not None and math.isfinite(a) and math.isfinite(b):
                pts = [q for q in points if a < q < b]
                return integrate.quad(f, a, b, points=pts or None, **_QUAD)[0]
            if points is not None and not (math.isfinite(a) and math.isfinite(b)):
                # split at the interior points so quad's tail map stays well-behaved
                inner = sorted(q for q in points if a < q < b)
                if inner:
                    cuts = [a, *inner, b]
                    return sum(_quad(f, lo, hi) for lo, hi in zip(cuts, cuts[1:]))
            return integrate.quad(f, a, b, **_QUAD)[0]
        except integrate.IntegrationWarning:
            # accept the estimate but with relaxed tolerances
            warnings.simplefilter("ignore")
            return integrate.quad(f, a, b, epsabs=1e-11, epsrel=1e-9, limit=1000)[0]


@dataclass(frozen=True, eq=False)
class DensityTarget:
    """A target law given by its density.

    ``pearson`` optionally links the target to Pearson parameters, which
    enables closed-form ``tau`` in the discrepancy.
    """

    density: Callable[[float], float]
    support: tuple[float, float]
    m: float
    theta: float = 1.0
    pearson: PearsonParams | None = field(default=None, repr=False)
    check: bool = True

    def __post_init__(self):
        lo, hi = map(float, self.support)
        if not lo < hi:
            raise ValueError("support must be a nonempty open interval")
        object.__setattr__(self, "support", (lo, hi))
        object.__setattr__(self, "m", float(self.m))
        object.__setattr__(self, "theta", float(self.theta))
        if self.theta <= 0:
            raise ValueError("theta must be positive")
        if not lo < self.m < hi:
            raise ValueError("mean must lie inside the support")
        if self.check:
            mass = _quad(self.density, lo, hi, points=[self.m])
            if abs(mass - 1) > 1e-8:
                raise ValueError(f"density integrates to {mass!r}, not 1")
            first = _quad(lambda y: abs(y) * self.density(y), lo, hi, points=[0.0, self.m])
            if not math.isfinite(first):
                raise ValueError("density has no first moment")

    @classmethod
    def from_pearson(cls, params: PearsonParams, check: bool = True) -> "DensityTarget":
        return cls(lambda x: pearson_density(params, x), params.support, float(params.m),
                   float(params.theta), params, check)

    def expect(self, h: Callable[[float], float]) -> float:
        lo, hi = self.support
        return _quad(lambda y: h(y) * self.density(y), lo, hi, points=[self.m])


def _as_target(t) -> DensityTarget:
    if isinstance(t, DensityTarget):
        return t
    if isinstance(t, PearsonParams):
        return DensityTarget.from_pearson(t, check=False)
    raise TypeError("target must be a DensityTarget or PearsonParams")


def _sigma2_scalar(t: DensityTarget, x: float) -> float:
    lo, hi = t.support
    if not lo < x < hi:
        raise ValueError(f"x={x} outside the support")
    px = t.density(x)
    if px <= 0:
        raise ValueError(f"density vanishes at interior point x={x}")
    g = lambda y: (y - t.m) * t.density(y)  # noqa: E731
    if x <= t.m:
        num = -_quad(g, lo, x)
    else:
        num = _quad(g, x, hi)
    return max(2.0 * t.theta * num / px, 0.0)


def sigma2_from_density(target, x):
    """``sigma^2(x)`` by quadrature, choosing the tail on the near side of ``x``."""
    t = _as_target(target)
    if np.ndim(x) == 0:
        return _sigma2_scalar(t, float(x))
    return np.array([_sigma2_scalar(t, float(v)) for v in np.ravel(x)]).reshape(np.shape(x))


def tau(target, x):
    """``sigma^2 / 2`` inside the support and 0 outside."""
    t = _as_target(target)
    lo, hi = t.support

    def one(v):
        return 0.5 * _sigma2_scalar(t, v) if lo < v < hi else 0.0

    if np.ndim(x) == 0:
        return one(float(x))
    return np.array([one(float(v)) for v in np.ravel(x)]).reshape(np.shape(x))


def _pearson_tau(params: PearsonParams, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.where(params.contains(x), float(params.theta) * params.b(x), 0.0)


class SteinSolver:
    """Solution ``f_h`` of the Stein equation for one test function ``h``.

    Parameters
    ----------
    target : DensityTarget or PearsonParams
    h : callable
        Bounded Lipschitz test function of one float.
    """

    def __init__(self, target, h: Callable[[float], float]):
        self.target = _as_target(target)
        self.h = h
        self.Eh = self.target.expect(h)

    def tau(self, x: float) -> float:
        t = self.target
        if t.pearson is not None:
            return float(_pearson_tau(t.pearson, np.array(x)))
        return tau(t, x)

    def __call__(self, x: float) -> float:
        t = self.target
        lo, hi = t.support
        x = float(x)
        if not lo < x < hi:
            if x == t.m:
                raise ValueError("f_h is undefined at x = m outside the support")
            return -(self.h(x) - self.Eh) / (t.theta * (x - t.m))
        g = lambda y: (self.h(y) - self.Eh) * t.density(y)  # noqa: E731
        if x <= t.m:
            integral = _quad(g, lo, x)
        else:
            integral = -_quad(g, x, hi)
        return integral / (self.tau(x) * t.density(x))

    def derivative(self, x: float) -> float:
        """``f_h'`` read off the Stein equation (inside the support)."""
        t = self.target
        x = float(x)
        lo, hi = t.support
        if not lo < x < hi:
            # differentiate the explicit outside form
            d = x - t.m
            eps = 1e-6 * max(1.0, abs(x))
            hp = (self.h(x + eps) - self.h(x - eps)) / (2 * eps)
            return -(hp * d - (self.h(x) - self.Eh)) / (t.theta * d * d)
        return (self.h(x) - self.Eh + t.theta * (x - t.m) * self(x)) / self.tau(x)

    def residual(self, x: float) -> float:
        """``tau f' - theta (x-m) f - (h - E h)`` using a centered difference for ``f'``."""
        t = self.target
        eps = 1e-5 * max(1.0, abs(x))
        fp = (self(x + eps) - self(x - eps)) / (2 * eps)
        return self.tau(x) * fp - t.theta * (x - t.m) * self(x) - (self.h(x) - self.Eh)


def stein_solution(target, h: Callable[[float], float], x) -> float | np.ndarray:
    s = SteinSolver(target, h)
    if np.ndim(x) == 0:
        return s(x)
    return np.array([s(v) for v in np.ravel(x)]).reshape(np.shape(x))


def default_degrees(params: PearsonParams, cap: int = 4) -> list[int]:
    """Monomial degrees ``j`` whose Stein statistic has finite variance.

    ``phi_j = (x - m)^j``; the statistic involves ``(x-m)^(j+1)``, so ``2(j+1)``
    moments are needed.
    """
    top = max_moment_order(params)
    return [j for j in range(cap + 1) if 2 * (j + 1) <= top]


def stein_statistics(samples, target, degrees: Sequence[int] | None = None):
    """Per-test empirical means and standard errors.

    Returns ``(degrees, means, standard_errors)`` for the tests
    ``phi_j(x) = (x - m)^j``.
    """
    x = np.asarray(samples.values if isinstance(samples, SampleBatch) else samples, dtype=float).ravel()
    t = _as_target(target)
    m, th = t.m, t.theta
    if t.pearson is not None:
        tx = _pearson_tau(t.pearson, x)
        degrees = list(default_degrees(t.pearson) if degrees is None else degrees)
    else:
        tx = tau(t, x)
        degrees = list(range(3) if degrees is None else degrees)
    y = x - m
    means, ses = [], []
    for j in degrees:
        dphi = j * y ** (j - 1) if j >= 1 else np.zeros_like(y)
        vals = tx * dphi - th * y * y**j
        means.append(float(np.mean(vals)))
        ses.append(float(np.std(vals, ddof=1) / math.sqrt(vals.size)) if vals.size > 1 else math.inf)
    return degrees, np.array(means), np.array(ses)


def stein_discrepancy(samples, target, degrees: Sequence[int] | None = None) -> float:
    """``max_j |mean(tau(X) phi_j'(X) - theta (X - m) phi_j(X))|``."""
    _, means, _ = stein_statistics(samples, target, degrees)
    return float(np.max(np.abs(means)))
