"""Catalog of divergence generators and their convex conjugates.

A generator is a convex, lower semi-continuous ``f`` with ``f(1) = 0``
that is infinite on the negative axis. The conjugate
``f*(t) = sup_{x >= 0} (x*t - f(x))`` is supplied in closed form per
generator; the nonnegativity restriction matters, because it flattens
or shifts the textbook conjugates (for instance the chi-square
conjugate is constant -1 below t = -2, where the unrestricted optimum
would be negative). Two structural facts hold for every catalog entry
and are enforced by :func:`check_generator`:

* ``f*`` is non-decreasing (because ``f`` is infinite left of zero);
* ``sup_t (t - f*(t)) = 0`` (because ``f(1) = 0``).

Closed-form conjugates used here, all derived under ``x >= 0``:

==================  ===========================  ==========================
name                f(x), x >= 0                 f*(t)
==================  ===========================  ==========================
kl                  x ln x                       e^(t-1)
reverse_kl          -ln x                        -1 - ln(-t)   for t < 0
js_gan              x ln x - (x+1) ln((x+1)/2)   -ln(2 - e^t)  for t < ln 2
pearson_chi2        (x - 1)^2                    t + t^2/4 for t >= -2, else -1
squared_hellinger   (sqrt(x) - 1)^2              t / (1 - t)   for t < 1
total_variation     |x - 1| / 2                  max(t, -1/2)  for t <= 1/2
==================  ===========================  ==========================

``js_gan`` is the classic adversarial-game generator
``x ln x - (x+1) ln(x+1)`` normalized by the affine offset
``(x+1) ln 2`` so that ``f(1) = 0``; the induced divergence equals
twice the Jensen-Shannon divergence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import UnknownGenerator
from .extreal import POS_INF, ExtReal, finite
from .optim1d import golden_max, golden_max_batch, ladder_bracket, ladder_bracket_batch

__all__ = [
    "FGenerator",
    "GridSpec",
    "CheckEntry",
    "CheckReport",
    "builtin",
    "builtin_names",
    "check_generator",
]

LN2 = math.log(2.0)

VecEval = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]


@dataclass(frozen=True)
class FGenerator:
    """A divergence generator with evaluable ``f`` and conjugate ``f*``.

    The vectorized callables return a pair ``(values, finite_mask)``;
    entries with a false mask are +infinity (neither ``f`` nor ``f*``
    ever takes the value -infinity). ``fstar_prime`` is a non-decreasing
    subgradient selection of ``f*``, valid wherever ``f*`` is finite,
    and ``f_prime`` likewise for ``f`` on the open positive axis.
    """

    name: str
    f_vec: VecEval
    fstar_vec: VecEval
    fstar_prime_vec: Callable[[np.ndarray], np.ndarray]
    f_prime_vec: Callable[[np.ndarray], np.ndarray]
    fstar_domain_upper: ExtReal
    fstar_domain_closed: bool
    fprime_at_infinity: ExtReal
    f_at_zero: ExtReal
    # False when f* has kinks: stationarity of a subgradient selection
    # then certifies nothing, and first-order solvers need multistart.
    conjugate_smooth: bool = True

    def f(self, x: float) -> ExtReal:
        vals, fin = self.f_vec(np.array([float(x)]))
        return finite(float(vals[0])) if fin[0] else POS_INF

    def fstar(self, t: float) -> ExtReal:
        vals, fin = self.fstar_vec(np.array([float(t)]))
        return finite(float(vals[0])) if fin[0] else POS_INF

    def fstar_prime(self, t: float) -> float:
        return float(self.fstar_prime_vec(np.array([float(t)]))[0])

    def f_prime(self, x: float) -> float:
        return float(self.f_prime_vec(np.array([float(x)]))[0])

    def fstar_box_upper(self, cap: float, margin: float = 1e-9) -> float:
        """Largest abscissa <= cap at which ``f*`` may be evaluated.

        Open domain boundaries are backed off by ``margin`` so that the
        returned point is strictly feasible.
        """
        up = self.fstar_domain_upper
        if not up.is_finite:
            return cap
        b = up.value if self.fstar_domain_closed else up.value - margin
        return min(cap, b)


def _mask_eval(fun):
    """Wrap a raw vector evaluator: non-finite outputs become +inf tags."""

    def wrapped(x: np.ndarray):
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            vals = fun(x)
        fin = np.isfinite(vals)
        return np.where(fin, vals, 0.0), fin

    return wrapped


def _kl() -> FGenerator:
    def f(x):
        out = np.where(x > 0, x * np.log(np.where(x > 0, x, 1.0)), 0.0)
        return np.where(x < 0, np.nan, out)

    def fstar(t):
        return np.exp(t - 1.0)

    return FGenerator(
        name="kl",
        f_vec=_mask_eval(f),
        fstar_vec=_mask_eval(fstar),
        fstar_prime_vec=lambda t: np.exp(np.minimum(t, 700.0) - 1.0),
        f_prime_vec=lambda x: np.log(x) + 1.0,
        fstar_domain_upper=POS_INF,
        fstar_domain_closed=False,
        fprime_at_infinity=POS_INF,
        f_at_zero=finite(0.0),
    )


def _reverse_kl() -> FGenerator:
    def f(x):
        return np.where(x > 0, -np.log(np.where(x > 0, x, 1.0)), np.nan)

    def fstar(t):
        return np.where(t < 0, -1.0 - np.log(np.where(t < 0, -t, 1.0)), np.nan)

    return FGenerator(
        name="reverse_kl",
        f_vec=_mask_eval(f),
        fstar_vec=_mask_eval(fstar),
        fstar_prime_vec=lambda t: -1.0 / np.minimum(t, -1e-300),
        f_prime_vec=lambda x: -1.0 / x,
        fstar_domain_upper=finite(0.0),
        fstar_domain_closed=False,
        fprime_at_infinity=finite(0.0),
        f_at_zero=POS_INF,
    )


def _js_gan() -> FGenerator:
    def f(x):
        xlogx = np.where(x > 0, x * np.log(np.where(x > 0, x, 1.0)), 0.0)
        out = xlogx - (x + 1.0) * np.log((x + 1.0) / 2.0)
        return np.where(x < 0, np.nan, out)

    def fstar(t):
        # -ln(2 - e^t) = -ln 2 - ln(-expm1(t - ln 2)); cancellation-free
        # near the open boundary t -> ln 2.
        u = np.expm1(t - LN2)
        return np.where(t < LN2, -LN2 - np.log(np.where(u < 0, -u, 1.0)), np.nan)

    def fstar_prime(t):
        d = t - LN2
        # Clamp away from zero: right at the open boundary expm1
        # underflows and the ratio would lose its sign.
        u = np.minimum(np.expm1(d), -1e-300)
        return -np.exp(d) / u

    def f_prime(x):
        return np.log(x) - np.log((x + 1.0) / 2.0)

    return FGenerator(
        name="js_gan",
        f_vec=_mask_eval(f),
        fstar_vec=_mask_eval(fstar),
        fstar_prime_vec=fstar_prime,
        f_prime_vec=f_prime,
        fstar_domain_upper=finite(LN2),
        fstar_domain_closed=False,
        fprime_at_infinity=finite(LN2),
        f_at_zero=finite(LN2),
    )


def _pearson_chi2() -> FGenerator:
    def f(x):
        return np.where(x < 0, np.nan, (x - 1.0) ** 2)

    def fstar(t):
        # Unrestricted optimum x = 1 + t/2 is feasible only for t >= -2;
        # below that the supremum sits at x = 0 with value -1.
        return np.where(t >= -2.0, t + 0.25 * t * t, -1.0)

    return FGenerator(
        name="pearson_chi2",
        f_vec=_mask_eval(f),
        fstar_vec=_mask_eval(fstar),
        fstar_prime_vec=lambda t: np.maximum(0.0, 1.0 + 0.5 * t),
        f_prime_vec=lambda x: 2.0 * (x - 1.0),
        fstar_domain_upper=POS_INF,
        fstar_domain_closed=False,
        fprime_at_infinity=POS_INF,
        f_at_zero=finite(1.0),
    )


def _squared_hellinger() -> FGenerator:
    def f(x):
        return np.where(x < 0, np.nan, (np.sqrt(np.where(x < 0, 0.0, x)) - 1.0) ** 2)

    def fstar(t):
        return np.where(t < 1.0, t / (1.0 - t), np.nan)

    return FGenerator(
        name="squared_hellinger",
        f_vec=_mask_eval(f),
        fstar_vec=_mask_eval(fstar),
        fstar_prime_vec=lambda t: 1.0 / np.maximum(1.0 - t, 1e-300) ** 2,
        f_prime_vec=lambda x: 1.0 - 1.0 / np.sqrt(x),
        fstar_domain_upper=finite(1.0),
        fstar_domain_closed=False,
        fprime_at_infinity=finite(1.0),
        f_at_zero=finite(1.0),
    )


def _total_variation() -> FGenerator:
    def f(x):
        return np.where(x < 0, np.nan, 0.5 * np.abs(x - 1.0))

    def fstar(t):
        return np.where(t <= 0.5, np.maximum(t, -0.5), np.nan)

    return FGenerator(
        name="total_variation",
        f_vec=_mask_eval(f),
        fstar_vec=_mask_eval(fstar),
        # Right-derivative selection at the kink t = -1/2.
        fstar_prime_vec=lambda t: np.where(t >= -0.5, 1.0, 0.0),
        f_prime_vec=lambda x: np.where(x > 1.0, 0.5, np.where(x < 1.0, -0.5, 0.0)),
        fstar_domain_upper=finite(0.5),
        fstar_domain_closed=True,
        fprime_at_infinity=finite(0.5),
        f_at_zero=finite(0.5),
        conjugate_smooth=False,
    )


_BUILTINS: dict[str, Callable[[], FGenerator]] = {
    "kl": _kl,
    "reverse_kl": _reverse_kl,
    "js_gan": _js_gan,
    "pearson_chi2": _pearson_chi2,
    "squared_hellinger": _squared_hellinger,
    "total_variation": _total_variation,
}

_CACHE: dict[str, FGenerator] = {}


def builtin_names() -> tuple[str, ...]:
    return tuple(_BUILTINS)


def builtin(name: str) -> FGenerator:
    """Return a catalog generator by name.

    Raises :class:`UnknownGenerator` for names outside the catalog.
    """
    try:
        factory = _BUILTINS[name]
    except KeyError:
        raise UnknownGenerator(
            f"unknown generator {name!r}; available: {', '.join(_BUILTINS)}"
        ) from None
    if name not in _CACHE:
        _CACHE[name] = factory()
    return _CACHE[name]


# ---------------------------------------------------------------------------
# Self-check suite
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    """Evaluation grid for :func:`check_generator`."""

    x_max: float = 10.0
    x_points: int = 201
    t_lo: float = -10.0
    t_hi: float = 3.0
    t_points: int = 201


@dataclass(frozen=True)
class CheckEntry:
    name: str
    passed: bool
    worst: float
    detail: str = ""


@dataclass(frozen=True)
class CheckReport:
    generator: str
    entries: tuple[CheckEntry, ...]
    notes: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return all(e.passed for e in self.entries)

    def entry(self, name: str) -> CheckEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)


def _sup_linear_minus_fstar(g: FGenerator, slope: float, cap: float = 1e3):
    """Numerically maximize t -> slope * t - f*(t) over the conjugate domain."""

    def fun(t):
        vals, fin = g.fstar_vec(np.array([t]))
        return slope * t - float(vals[0]) if fin[0] else -math.inf

    hi = g.fstar_box_upper(cap)
    lo, hi_b = ladder_bracket(fun, -cap, hi)
    t_best, v_best = golden_max(fun, lo, hi_b, tol=1e-10)
    return t_best, v_best


def check_generator(g: FGenerator, grid: GridSpec | None = None) -> CheckReport:
    """Run the structural property battery for a generator.

    Checks, each reported as a pass/fail entry with its worst violation:
    exact normalization ``f(1) = 0``; midpoint convexity of ``f`` on the
    grid; monotonicity of ``f*``; the normalization identity
    ``sup_t (t - f*(t)) = 0`` within 1e-6; the Fenchel-Young inequality
    on the grid product within 1e-9; agreement of the numeric
    biconjugate with ``f`` within 1e-6 at interior grid points; and the
    slope of ``f`` at infinity against the declared limit.
    """
    grid = grid or GridSpec()
    xs = np.linspace(0.0, grid.x_max, grid.x_points)
    t_hi = g.fstar_box_upper(grid.t_hi)
    ts = np.linspace(grid.t_lo, t_hi, grid.t_points)

    entries: list[CheckEntry] = []

    f1 = g.f(1.0)
    ok = f1.is_finite and f1.value == 0.0
    entries.append(CheckEntry("normalization_f1", ok, abs(float(f1)) if f1.is_finite else math.inf))

    # Midpoint convexity over all grid pairs; pairs with an infinite
    # endpoint satisfy the inequality trivially.
    fx, fx_fin = g.f_vec(xs)
    mid = 0.5 * (xs[:, None] + xs[None, :])
    fmid, fmid_fin = g.f_vec(mid.ravel())
    rhs = 0.5 * (fx[:, None] + fx[None, :])
    both_fin = fx_fin[:, None] & fx_fin[None, :]
    viol = np.where(
        both_fin & fmid_fin.reshape(mid.shape),
        fmid.reshape(mid.shape) - rhs,
        -np.inf,
    )
    worst = float(np.max(viol))
    entries.append(CheckEntry("convexity_midpoint", worst <= 1e-9, max(worst, 0.0)))

    fstar_t, fstar_fin = g.fstar_vec(ts)
    if np.all(fstar_fin):
        drops = fstar_t[:-1] - fstar_t[1:]
        worst = float(np.max(drops)) if drops.size else 0.0
    else:
        worst = math.inf
    entries.append(CheckEntry("fstar_nondecreasing", worst <= 1e-12, max(worst, 0.0)))

    _, sup_val = _sup_linear_minus_fstar(g, slope=1.0)
    entries.append(
        CheckEntry("normalization_sup", abs(sup_val) <= 1e-6, abs(sup_val), f"sup={sup_val:.3e}")
    )

    # Fenchel-Young on the grid product, finite pairs only.
    slack = fx[:, None] + fstar_t[None, :] - xs[:, None] * ts[None, :]
    pair_fin = fx_fin[:, None] & fstar_fin[None, :]
    worst = float(np.min(np.where(pair_fin, slack, np.inf)))
    entries.append(CheckEntry("fenchel_young", worst >= -1e-9, max(-worst, 0.0)))

    # Numeric biconjugate at interior grid points where f is finite,
    # batched across slopes (one 1-D concave maximization per point).
    interior = xs[1:-1]
    f_int, f_int_fin = g.f_vec(interior)
    slopes = interior[f_int_fin]
    if slopes.size:

        def bicon(t: np.ndarray) -> np.ndarray:
            vals, fin = g.fstar_vec(t)
            return np.where(fin, slopes * t - vals, -np.inf)

        hi_box = np.full(slopes.shape, g.fstar_box_upper(1e3))
        lo_box = np.full(slopes.shape, -1e3)
        b_lo, b_hi = ladder_bracket_batch(bicon, lo_box, hi_box)
        _, best = golden_max_batch(bicon, b_lo, b_hi, tol=1e-10)
        worst = float(np.max(np.abs(best - f_int[f_int_fin])))
    else:
        worst = 0.0
    entries.append(CheckEntry("biconjugate", worst <= 1e-6, worst))

    x_far = 1e6
    fv = g.f(x_far)
    slope = fv.value / x_far if fv.is_finite else math.inf
    lim = g.fprime_at_infinity
    if lim.is_finite:
        dev = abs(slope - lim.value)
        ok = dev <= 0.05 * max(1.0, abs(lim.value))
        detail = f"grid slope {slope:.6g} vs limit {lim.value:.6g}"
    else:
        dev = 0.0
        ok = slope > 10.0
        detail = f"grid slope {slope:.6g}, limit symbolically infinite"
    entries.append(CheckEntry("slope_at_infinity", ok, dev, detail))

    notes: tuple[str, ...] = ()
    if g.name == "total_variation":
        notes = (
            "piecewise-linear generator: convexity is non-strict, so "
            "gradient-based solvers may stall on flat stretches",
        )
    return CheckReport(generator=g.name, entries=tuple(entries), notes=notes)
