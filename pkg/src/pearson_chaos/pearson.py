"""Pearson laws: parameters, the six classes, moments, densities and samplers.

A Pearson diffusion is

    dX = -theta (X - m) dt + sqrt(2 theta b(X)) dB,   b(x) = b2 x^2 + b1 x + b0,

and ``PearsonParams`` is the canonical description of it and of its
stationary law.  The named classes (Gaussian, Gamma, Beta, skew-t, inverse
Gamma, F) are recovered from the coefficients by ``classify`` and can be
built from their natural parameters by the helpers at the bottom.
"""

from __future__ import annotations

import dataclasses
import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping

import numpy as np
from scipy import integrate, special

from .errors import InvalidParams, MomentError, Unclassifiable
from .polycalc import Poly, as_rational
from .streams import SampleBatch, rng_stream

__all__ = [
    "PearsonParams",
    "PearsonClass",
    "FAMILIES",
    "classify",
    "max_moment_order",
    "moments",
    "density",
    "logdensity",
    "cdf",
    "sample",
    "linear_transform",
    "params_from_dict",
    "params_to_dict",
    "gaussian",
    "gamma_law",
    "beta_law",
    "student_t",
    "skew_t",
    "inverse_gamma",
    "f_law",
    "exact_sqrt",
]

INF = math.inf
FAMILIES = ("gaussian", "gamma", "beta", "skew_t", "inverse_gamma", "f")


def exact_sqrt(q: Fraction) -> Fraction | None:
    """Rational square root of ``q`` when it exists, else ``None``."""
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    return Fraction(rn, rd) if rn * rn == n and rd * rd == d else None


def _sqrt(q: Fraction) -> Fraction | float:
    r = exact_sqrt(q)
    return r if r is not None else math.sqrt(q)


def _roots(b2: Fraction, b1: Fraction, b0: Fraction) -> list:
    """Real roots of b in increasing order (Fractions when rational)."""
    if b2 == 0:
        return [] if b1 == 0 else [-b0 / b1]
    disc = b1 * b1 - 4 * b2 * b0
    if disc < 0:
        return []
    if disc == 0:
        return [-b1 / (2 * b2)]
    s = _sqrt(disc)
    r = sorted([(-b1 - s) / (2 * b2), (-b1 + s) / (2 * b2)])
    return r


def _parse_endpoint(v) -> float:
    if v is None:
        return None
    if isinstance(v, str):
        s = v.strip().lower()
        if s in ("inf", "+inf", "infinity"):
            return INF
        if s in ("-inf", "-infinity"):
            return -INF
        return float(Fraction(s))
    return float(v)


@dataclass(frozen=True)
class PearsonParams:
    """Coefficients of a Pearson diffusion and its support.

    ``theta, m, b0, b1, b2`` are stored as exact rationals.  The support
    endpoints are floats (they are roots of ``b`` and need not be rational);
    pass ``support=None`` to infer them from ``b`` and ``m``.

    The degenerate case ``b == 0`` is accepted (it describes deterministic
    mean reversion) but has no stationary density.
    """

    theta: Fraction
    m: Fraction
    b0: Fraction
    b1: Fraction
    b2: Fraction
    support: tuple[float, float] | None = None
    _roots: tuple = field(default=(), init=False, repr=False, compare=False)

    def __post_init__(self):
        for name in ("theta", "m", "b0", "b1", "b2"):
            object.__setattr__(self, name, as_rational(getattr(self, name)))
        if self.theta <= 0:
            raise InvalidParams("theta must be positive")
        roots = _roots(self.b2, self.b1, self.b0)
        object.__setattr__(self, "_roots", tuple(roots))
        inferred = self._infer_support(roots)
        if self.support is not None:
            lo, hi = (_parse_endpoint(v) for v in self.support)
            if not self._same_interval((lo, hi), inferred):
                raise Unclassifiable(
                    f"declared support ({lo}, {hi}) does not match the region where b > 0 "
                    f"around m: ({inferred[0]}, {inferred[1]})"
                )
        object.__setattr__(self, "support", inferred)

    @staticmethod
    def _same_interval(a, b) -> bool:
        return all(
            (x == y) or (math.isfinite(x) and math.isfinite(y) and abs(x - y) <= 1e-9 * max(1.0, abs(y)))
            for x, y in zip(a, b)
        )

    def _infer_support(self, roots) -> tuple[float, float]:
        b2, b1, b0, m = self.b2, self.b1, self.b0, self.m
        if self.is_degenerate:
            return (-INF, INF)
        if b2 == 0 and b1 == 0:
            if b0 <= 0:
                raise Unclassifiable("constant b must be positive")
            return (-INF, INF)
        if b2 == 0:
            r = roots[0]
            if m == r:
                raise Unclassifiable("mean sits on the boundary of the support")
            return (float(r), INF) if b1 > 0 else (-INF, float(r))
        if b2 < 0:
            if len(roots) < 2:
                raise Unclassifiable("b is nowhere positive")
            r1, r2 = roots
            if not r1 < m < r2:
                raise Unclassifiable("mean outside the interval where b > 0")
            return (float(r1), float(r2))
        # b2 > 0
        if not roots:
            return (-INF, INF)
        if len(roots) == 1:
            r = roots[0]
            if m == r:
                raise Unclassifiable("mean sits on the double root of b")
            return (float(r), INF) if m > r else (-INF, float(r))
        r1, r2 = roots
        if m > r2:
            return (float(r2), INF)
        if m < r1:
            return (-INF, float(r1))
        raise Unclassifiable("mean lies where b <= 0")

    # derived quantities --------------------------------------------------

    @property
    def is_degenerate(self) -> bool:
        return self.b0 == 0 and self.b1 == 0 and self.b2 == 0

    @property
    def b(self) -> Poly:
        return Poly([self.b0, self.b1, self.b2])

    @property
    def roots(self) -> tuple:
        return self._roots

    @property
    def lower(self) -> float:
        return self.support[0]

    @property
    def upper(self) -> float:
        return self.support[1]

    def with_theta(self, theta) -> "PearsonParams":
        return dataclasses.replace(self, theta=as_rational(theta), support=None)

    def b_value(self, x):
        """Float evaluation of ``b`` (vectorized)."""
        return self.b(x)

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return (x > self.lower) & (x < self.upper)

    def __str__(self):
        return (
            f"PearsonParams(theta={self.theta}, m={self.m}, b2={self.b2}, b1={self.b1}, "
            f"b0={self.b0}, support=({self.lower}, {self.upper}))"
        )


# ---------------------------------------------------------------------------
# JSON form


def _fmt_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _fmt_endpoint(v: float):
    if v == INF:
        return "inf"
    if v == -INF:
        return "-inf"
    return v


def params_to_dict(p: PearsonParams) -> dict[str, Any]:
    return {
        "theta": _fmt_rational(p.theta),
        "m": _fmt_rational(p.m),
        "b0": _fmt_rational(p.b0),
        "b1": _fmt_rational(p.b1),
        "b2": _fmt_rational(p.b2),
        "support_l": _fmt_endpoint(p.lower),
        "support_u": _fmt_endpoint(p.upper),
    }


_CLASS_KEYS = {
    "gaussian": ("mu", "sigma2"),
    "gamma": ("alpha", "beta"),
    "beta": ("alpha", "beta"),
    "student_t": ("tau",),
    "skew_t": ("shape", "nu", "lam", "a"),
    "inverse_gamma": ("alpha", "beta"),
    "f": ("d1", "d2"),
}


def params_from_dict(d: Mapping[str, Any]) -> PearsonParams:
    """Build params from either the coefficient form or a named-class form.

    Coefficient form uses the keys ``theta, m, b0, b1, b2`` and optionally
    ``support_l, support_u``.  Class form uses ``family`` plus the natural
    parameters, e.g. ``{"family": "student_t", "tau": 9}``.
    """
    if not isinstance(d, Mapping):
        raise InvalidParams("params must be a JSON object")
    theta = d.get("theta", 1)
    if "family" in d:
        fam = str(d["family"]).lower()
        if fam not in _CLASS_KEYS:
            raise InvalidParams(f"unknown family {fam!r}; expected one of {sorted(_CLASS_KEYS)}")
        kwargs = {k: d[k] for k in _CLASS_KEYS[fam] if k in d}
        if fam == "gaussian" and "sigma" in d:
            kwargs["sigma2"] = as_rational(d["sigma"]) ** 2
        builder = _BUILDERS[fam]
        try:
            return builder(**kwargs, theta=theta)
        except TypeError as exc:
            raise InvalidParams(f"bad parameters for {fam}: {exc}") from None
    missing = [k for k in ("m", "b0", "b1", "b2") if k not in d]
    if missing:
        raise InvalidParams(f"missing fields: {', '.join(missing)}")
    support = None
    if "support_l" in d or "support_u" in d:
        support = (d.get("support_l", "-inf"), d.get("support_u", "inf"))
    try:
        return PearsonParams(theta, d["m"], d["b0"], d["b1"], d["b2"], support=support)
    except (TypeError, ZeroDivisionError) as exc:
        raise InvalidParams(str(exc)) from None


# ---------------------------------------------------------------------------
# classification


@dataclass(frozen=True)
class PearsonClass:
    """A named class with natural parameters and an affine placement.

    The law of ``X`` is that of ``loc + scale * Y`` where ``Y`` follows the
    standard form of ``family`` with parameters ``natural``.  For the Gaussian
    and skew-t classes the location is carried by the natural parameters and
    ``loc = 0, scale = 1``.
    """

    family: str
    natural: dict
    loc: Fraction | float = 0
    scale: Fraction | float = 1
    theta: Fraction = Fraction(1)

    def to_params(self) -> PearsonParams:
        base = _BUILDERS[self.family](**self.natural, theta=self.theta)
        if self.loc == 0 and self.scale == 1:
            return base
        return linear_transform(base, self.scale, self.loc)

    def to_dict(self) -> dict[str, Any]:
        def conv(v):
            return _fmt_rational(v) if isinstance(v, Fraction) else float(v)

        return {
            "family": self.family,
            **{k: conv(v) for k, v in self.natural.items()},
            "loc": conv(self.loc),
            "scale": conv(self.scale),
            "theta": conv(self.theta),
        }


def classify(params: PearsonParams) -> PearsonClass:
    """Identify the class of ``params`` and recover its natural parameters."""
    p = params
    if p.is_degenerate:
        raise Unclassifiable("b is identically zero; there is no stationary law")
    b2, b1, b0, m = p.b2, p.b1, p.b0, p.m
    if b2 == 0 and b1 == 0:
        return PearsonClass("gaussian", {"mu": m, "sigma2": b0}, theta=p.theta)
    if b2 == 0:
        r = -b0 / b1
        beta = 1 / abs(b1)
        s = 1 if b1 > 0 else -1
        return PearsonClass("gamma", {"alpha": beta * abs(m - r), "beta": beta}, r, s, p.theta)
    roots = p.roots
    if b2 < 0:
        r1, r2 = roots
        tot = -1 / b2
        alpha = tot * (m - r1) / (r2 - r1)
        return PearsonClass("beta", {"alpha": alpha, "beta": tot - alpha}, r1, r2 - r1, p.theta)
    if not roots:
        shape = 1 + 1 / (2 * b2)
        lam = -b1 / (2 * b2)
        a = _sqrt(b0 / b2 - lam * lam)
        nu = (lam - m) / (b2 * a)
        return PearsonClass("skew_t", {"shape": shape, "nu": nu, "lam": lam, "a": a}, theta=p.theta)
    if len(roots) == 1:
        r = roots[0]
        s = 1 if m > r else -1
        alpha = 1 + 1 / b2
        return PearsonClass("inverse_gamma", {"alpha": alpha, "beta": abs(m - r) / b2}, r, s, p.theta)
    r1, r2 = roots
    d2 = 2 + 2 / b2
    if m > r2:
        r, other = r2, r1
    else:
        r, other = r1, r2
    s = (m - r) * (d2 - 2) / d2
    d1 = s * d2 / (r - other)
    return PearsonClass("f", {"d1": d1, "d2": d2}, r, s, p.theta)


def max_moment_order(params: PearsonParams) -> int | float:
    """Largest ``p`` with a finite ``p``-th moment (``math.inf`` if all exist)."""
    b2 = params.b2
    if b2 <= 0:
        return INF
    t = 1 + 1 / b2
    return t.numerator // t.denominator - (1 if t.denominator == 1 else 0)


def moments(params: PearsonParams, pmax: int) -> list[Fraction]:
    """Exact raw moments ``m_0 .. m_pmax`` from the three-term recursion."""
    if pmax < 0:
        raise ValueError("pmax must be nonnegative")
    if pmax > max_moment_order(params):
        raise MomentError(
            f"moment does not exist: order {pmax} exceeds {max_moment_order(params)} for b2={params.b2}"
        )
    return list(_moment_cache(params.m, params.b0, params.b1, params.b2, pmax))


@functools.lru_cache(maxsize=4096)
def _moment_cache(m, b0, b1, b2, pmax):
    out = [Fraction(1), m]
    for p in range(pmax - 1):
        den = 1 - b2 * (p + 1)
        if den == 0:
            raise MomentError("moment does not exist: recursion denominator vanishes")
        out.append(((b1 * (p + 1) + m) * out[p + 1] + (p + 1) * b0 * out[p]) / den)
    return tuple(out[: pmax + 1])


# ---------------------------------------------------------------------------
# densities


def _as_float(v) -> float:
    return float(v)


class _SkewTable:
    """Angular representation of the skew-t law.

    With ``u = tan(phi)`` the standard density ``(1+u^2)^-shape exp(-nu atan u)``
    becomes ``cos(phi)^(2 shape - 2) exp(-nu phi)`` on ``(-pi/2, pi/2)``, a
    smooth bounded integrand.  The cumulative integral is tabulated on panels
    with Gauss-Legendre rules; partial panels reuse the same rule.
    """

    PANELS = 2048
    ORDER = 12

    def __init__(self, shape: float, nu: float):
        self.k = 2.0 * shape - 2.0
        self.nu = nu
        # log of the peak, used to keep everything in range
        phi_star = math.atan(-nu / self.k) if self.k > 0 else math.copysign(math.pi / 2, -nu)
        self.log_peak = self._log_g(np.array(phi_star)).item()
        self.edges = np.linspace(-math.pi / 2, math.pi / 2, self.PANELS + 1)
        self.nodes, self.weights = np.polynomial.legendre.leggauss(self.ORDER)
        h = self.edges[1] - self.edges[0]
        mids = 0.5 * (self.edges[:-1] + self.edges[1:])
        pts = mids[:, None] + 0.5 * h * self.nodes[None, :]
        panel = 0.5 * h * (self._g(pts) @ self.weights)
        self.cum = np.concatenate([[0.0], np.cumsum(panel)])
        self.total = self.cum[-1]
        self.h = h
        quad_total, _ = integrate.quad(self._g, -math.pi / 2, math.pi / 2, epsabs=0, epsrel=1e-13, limit=200)
        self.quad_total = quad_total

    def _log_g(self, phi):
        with np.errstate(divide="ignore"):
            return self.k * np.log(np.cos(phi)) - self.nu * phi

    def _g(self, phi):
        phi = np.asarray(phi, dtype=float)
        return np.exp(self._log_g(phi) - self.log_peak)

    def log_norm(self) -> float:
        """log of the angular normalizing integral (adaptive quadrature)."""
        return math.log(self.quad_total) + self.log_peak

    def angular_cdf(self, phi: np.ndarray) -> np.ndarray:
        phi = np.clip(np.asarray(phi, dtype=float), -math.pi / 2, math.pi / 2)
        j = np.clip(((phi + math.pi / 2) / self.h).astype(int), 0, self.PANELS - 1)
        left = self.edges[j]
        half = 0.5 * (phi - left)
        pts = (left + half)[..., None] + half[..., None] * self.nodes
        partial = half * (self._g(pts) @ self.weights)
        return np.clip((self.cum[j] + partial) / self.total, 0.0, 1.0)

    def angular_ppf(self, q: np.ndarray) -> np.ndarray:
        """Inverse of ``angular_cdf`` by bracketed Newton steps."""
        q = np.asarray(q, dtype=float)
        target = q * self.total
        j = np.clip(np.searchsorted(self.cum, target, side="right") - 1, 0, self.PANELS - 1)
        lo = self.edges[j]
        hi = self.edges[j + 1]
        phi = 0.5 * (lo + hi)
        for _ in range(40):
            f = self.angular_cdf(phi) - q
            lo = np.where(f < 0, phi, lo)
            hi = np.where(f >= 0, phi, hi)
            dens = self._g(phi) / self.total
            step = np.where(dens > 0, f / np.where(dens > 0, dens, 1.0), 0.0)
            cand = phi - step
            bad = (cand <= lo) | (cand >= hi) | ~np.isfinite(cand)
            phi = np.where(bad, 0.5 * (lo + hi), cand)
            if np.max(hi - lo) < 1e-15:
                break
        return phi


@functools.lru_cache(maxsize=256)
def _skew_table(shape: float, nu: float) -> _SkewTable:
    return _SkewTable(shape, nu)


def _standard_logpdf(fam: str, nat: dict, y: np.ndarray) -> np.ndarray:
    f = {k: _as_float(v) for k, v in nat.items()}
    with np.errstate(divide="ignore", invalid="ignore"):
        if fam == "gaussian":
            s2 = f["sigma2"]
            return -((y - f["mu"]) ** 2) / (2 * s2) - 0.5 * math.log(2 * math.pi * s2)
        if fam == "gamma":
            a, b = f["alpha"], f["beta"]
            return a * math.log(b) - special.gammaln(a) + (a - 1) * np.log(y) - b * y
        if fam == "beta":
            a, b = f["alpha"], f["beta"]
            return (a - 1) * np.log(y) + (b - 1) * np.log1p(-y) - special.betaln(a, b)
        if fam == "inverse_gamma":
            a, b = f["alpha"], f["beta"]
            return a * math.log(b) - special.gammaln(a) - (a + 1) * np.log(y) - b / y
        if fam == "f":
            d1, d2 = f["d1"], f["d2"]
            return (
                0.5 * d1 * math.log(d1 / d2)
                + (0.5 * d1 - 1) * np.log(y)
                - 0.5 * (d1 + d2) * np.log1p(d1 * y / d2)
                - special.betaln(0.5 * d1, 0.5 * d2)
            )
        if fam == "skew_t":
            tab = _skew_table(f["shape"], f["nu"])
            u = (y - f["lam"]) / f["a"]
            return (
                -f["shape"] * np.log1p(u * u)
                - f["nu"] * np.arctan(u)
                - math.log(f["a"])
                - tab.log_norm()
            )
    raise ValueError(fam)


def _standard_cdf(fam: str, nat: dict, y: np.ndarray) -> np.ndarray:
    f = {k: _as_float(v) for k, v in nat.items()}
    if fam == "gaussian":
        return special.ndtr((y - f["mu"]) / math.sqrt(f["sigma2"]))
    yp = np.maximum(y, 0.0)
    if fam == "gamma":
        return special.gammainc(f["alpha"], f["beta"] * yp)
    if fam == "beta":
        return special.betainc(f["alpha"], f["beta"], np.clip(y, 0.0, 1.0))
    if fam == "inverse_gamma":
        with np.errstate(divide="ignore"):
            return np.where(y > 0, special.gammaincc(f["alpha"], f["beta"] / np.where(y > 0, y, 1.0)), 0.0)
    if fam == "f":
        d1, d2 = f["d1"], f["d2"]
        return special.betainc(0.5 * d1, 0.5 * d2, d1 * yp / (d1 * yp + d2))
    if fam == "skew_t":
        tab = _skew_table(f["shape"], f["nu"])
        return tab.angular_cdf(np.arctan((y - f["lam"]) / f["a"]))
    raise ValueError(fam)


def _placement(params: PearsonParams):
    cls = classify(params)
    return cls, float(cls.loc), float(cls.scale)


def logdensity(params: PearsonParams, x):
    """Log of the stationary density; ``-inf`` outside the support."""
    cls, loc, scale = _placement(params)
    x = np.asarray(x, dtype=float)
    y = (x - loc) / scale
    inside = params.contains(x)
    with np.errstate(invalid="ignore", divide="ignore"):
        val = _standard_logpdf(cls.family, cls.natural, np.where(inside, y, np.nan)) - math.log(abs(scale))
    out = np.where(inside, val, -INF)
    return out if out.ndim else float(out)


def density(params: PearsonParams, x):
    """Normalized stationary density, zero outside the open support."""
    out = np.exp(logdensity(params, x))
    return out if np.ndim(out) else float(out)


def cdf(params: PearsonParams, x):
    """Distribution function of the stationary law."""
    cls, loc, scale = _placement(params)
    x = np.asarray(x, dtype=float)
    y = (x - loc) / scale
    with np.errstate(invalid="ignore"):
        inner = _standard_cdf(cls.family, cls.natural, y)
    val = inner if scale > 0 else 1.0 - inner
    val = np.where(x <= params.lower, 0.0, np.where(x >= params.upper, 1.0, val))
    val = np.clip(val, 0.0, 1.0)
    return val if val.ndim else float(val)


# ---------------------------------------------------------------------------
# sampling


def _skew_accept_rate(shape: float, nu: float) -> float:
    tab = _skew_table(shape, nu)
    env = _skew_table(shape, 0.0)
    # both tables share the angular form; ratio of masses over the bound exp(|nu| pi/2)
    return math.exp(tab.log_norm() - env.log_norm() - abs(nu) * math.pi / 2)


def _sample_skew_t(rng: np.random.Generator, nat: dict, n: int) -> np.ndarray:
    shape, nu = float(nat["shape"]), float(nat["nu"])
    lam, a = float(nat["lam"]), float(nat["a"])
    if _skew_accept_rate(shape, nu) < 0.05:
        # strongly skewed: invert the angular distribution function instead
        phi = _skew_table(shape, nu).angular_ppf(rng.random(n))
        return lam + a * np.tan(phi)
    df = 2.0 * shape - 1.0
    out = np.empty(0)
    while out.size < n:
        need = n - out.size
        batch = int(need * 1.3 / max(_skew_accept_rate(shape, nu), 1e-3)) + 16
        u = rng.standard_t(df, size=batch) / math.sqrt(df)
        keep = rng.random(batch) < np.exp(-nu * np.arctan(u) - abs(nu) * math.pi / 2)
        out = np.concatenate([out, u[keep]])
    return lam + a * out[:n]


def _draw(cls: PearsonClass, rng: np.random.Generator, n: int) -> np.ndarray:
    nat = {k: float(v) for k, v in cls.natural.items()}
    fam = cls.family
    if fam == "gaussian":
        y = nat["mu"] + math.sqrt(nat["sigma2"]) * rng.standard_normal(n)
    elif fam == "gamma":
        y = rng.gamma(nat["alpha"], 1.0 / nat["beta"], size=n)
    elif fam == "beta":
        y = rng.beta(nat["alpha"], nat["beta"], size=n)
    elif fam == "inverse_gamma":
        y = nat["beta"] / rng.gamma(nat["alpha"], 1.0, size=n)
    elif fam == "f":
        y = rng.f(nat["d1"], nat["d2"], size=n)
    elif fam == "skew_t":
        y = _sample_skew_t(rng, cls.natural, n)
    else:  # pragma: no cover
        raise ValueError(fam)
    return float(cls.loc) + float(cls.scale) * y


def sample(params: PearsonParams, seed: int, n: int, key: tuple[int, ...] = ()) -> SampleBatch:
    """``n`` i.i.d. draws from the stationary law, reproducible from ``(seed, key)``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    cls = classify(params)
    values = _draw(cls, rng_stream(seed, *key), n)
    lo, hi = params.support
    # affine maps can round a draw onto a finite endpoint
    values = np.clip(values, np.nextafter(lo, INF) if math.isfinite(lo) else lo,
                     np.nextafter(hi, -INF) if math.isfinite(hi) else hi)
    return SampleBatch(values, seed, {"kind": "direct", "family": cls.family, "key": list(key), "n": n})


# ---------------------------------------------------------------------------
# closure under affine maps


def linear_transform(params: PearsonParams, gamma, delta) -> PearsonParams:
    """Parameters of the law of ``gamma * X + delta``."""
    g, d = as_rational(gamma), as_rational(delta)
    if g == 0:
        raise InvalidParams("gamma must be nonzero")
    b2, b1, b0 = params.b2, params.b1, params.b0
    return PearsonParams(
        params.theta,
        g * params.m + d,
        b2 * d * d - b1 * g * d + b0 * g * g,
        b1 * g - 2 * b2 * d,
        b2,
    )


# ---------------------------------------------------------------------------
# named classes


def gaussian(mu=0, sigma2=1, theta=1) -> PearsonParams:
    s2 = as_rational(sigma2)
    if s2 <= 0:
        raise InvalidParams("sigma2 must be positive")
    return PearsonParams(theta, mu, s2, 0, 0)


def gamma_law(alpha, beta=1, theta=1) -> PearsonParams:
    """Gamma(alpha, rate beta) on (0, inf)."""
    a, b = as_rational(alpha), as_rational(beta)
    if a <= 0 or b <= 0:
        raise InvalidParams("alpha and beta must be positive")
    return PearsonParams(theta, a / b, 0, 1 / b, 0)


def beta_law(alpha, beta, theta=1) -> PearsonParams:
    a, b = as_rational(alpha), as_rational(beta)
    if a <= 0 or b <= 0:
        raise InvalidParams("alpha and beta must be positive")
    s = a + b
    return PearsonParams(theta, a / s, 0, 1 / s, -1 / s)


def skew_t(shape, nu=0, lam=0, a=1, theta=1) -> PearsonParams:
    """Pearson IV law with density proportional to

    ``(1 + ((x-lam)/a)^2)^(-shape) * exp(-nu * atan((x-lam)/a))``.

    ``a`` may be given as a float when irrational; the coefficients then
    carry the float's decimal value.
    """
    ms, nu, lam = as_rational(shape), as_rational(nu), as_rational(lam)
    a = as_rational(a)
    if ms <= 1 or a <= 0:
        raise InvalidParams("skew-t needs shape > 1 and a > 0")
    c = 1 / (2 * (ms - 1))
    return PearsonParams(theta, lam - a * nu * c, c * (lam * lam + a * a), -2 * lam * c, c)


def student_t(tau, theta=1) -> PearsonParams:
    """Student t with ``tau > 1`` degrees of freedom."""
    t = as_rational(tau)
    if t <= 1:
        raise InvalidParams("tau must exceed 1 for a finite mean")
    return PearsonParams(theta, 0, t / (t - 1), 0, 1 / (t - 1))


def inverse_gamma(alpha, beta=1, theta=1) -> PearsonParams:
    """Inverse Gamma with density proportional to ``x^-(alpha+1) exp(-beta/x)``."""
    a, b = as_rational(alpha), as_rational(beta)
    if a <= 1 or b <= 0:
        raise InvalidParams("inverse Gamma needs alpha > 1 and beta > 0")
    return PearsonParams(theta, b / (a - 1), 0, 0, 1 / (a - 1))


def f_law(d1, d2, theta=1) -> PearsonParams:
    """Fisher F(d1, d2) with ``d2 > 2``."""
    d1, d2 = as_rational(d1), as_rational(d2)
    if d1 <= 0 or d2 <= 2:
        raise InvalidParams("F needs d1 > 0 and d2 > 2")
    return PearsonParams(theta, d2 / (d2 - 2), 0, 2 * d2 / (d1 * (d2 - 2)), 2 / (d2 - 2))


_BUILDERS = {
    "gaussian": gaussian,
    "gamma": gamma_law,
    "beta": beta_law,
    "student_t": student_t,
    "skew_t": skew_t,
    "inverse_gamma": inverse_gamma,
    "f": f_law,
}
