"""Brute-force oracles and seeded verification suites.

The oracles take deliberately different code paths from the production
solvers (dense grids with certified Lipschitz slack instead of gradient
methods), so agreement between the two is evidence rather than
tautology. ``run_suite`` packages the invariant batteries as named,
re-runnable, seed-deterministic checks; the acceptance tests and the
command line both call through it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .discriminator import LinearBall
from .divergence import df_closed, df_variational_full, r_functional, r_functional_numeric
from .dual import duality_gap, moment_projection
from .errors import TooManyFeatures, UnknownSuite, ValidationError
from .estimators import FullSimplex, fit_linear_fgan
from .extreal import POS_INF, finite
from .fgen import builtin, builtin_names, check_generator
from .primal import PrimalConfig, restricted_div_primal
from .space import (
    Dist,
    FeatureMap,
    FunctionOnSpace,
    OutcomeSpace,
    absolutely_continuous,
    feature_means,
    make_dist,
    random_instance,
)

__all__ = [
    "BruteForceResult",
    "SuiteResult",
    "SUITE_NAMES",
    "brute_force_primal",
    "duality_instance",
    "run_suite",
]

SUITE_NAMES = (
    "generators",
    "variational_full",
    "duality",
    "moment_projection",
    "r_functional",
    "gmm_agreement",
    "sandwich",
)

DUALITY_GENERATORS = ("kl", "pearson_chi2", "squared_hellinger", "js_gan")


@dataclass(frozen=True)
class BruteForceResult:
    """Grid maximum plus a certified error interval."""

    value: float
    error_bound: float
    grid_points: int


@dataclass(frozen=True)
class SuiteResult:
    suite: str
    seed: int
    instances: int
    passes: int
    worst_violation: float
    records: tuple[dict, ...]

    @property
    def ok(self) -> bool:
        return self.passes == self.instances


def brute_force_primal(g, P, Q, spec: LinearBall, resolution: float) -> BruteForceResult:
    """Grid-search oracle for the ball-restricted supremum, k <= 2.

    Evaluates the intercept-reduced objective on a grid of coefficient
    vectors covering the ball and returns the maximum. The objective is
    Lipschitz with constant at most twice the largest feature-vector
    norm, so the true supremum exceeds the grid value by at most
    ``L * resolution * sqrt(k) / 2``, reported as the error bound.
    """
    if spec.phi.k > 2:
        raise TooManyFeatures("brute force supports at most two features")
    if not spec.radius.is_finite:
        raise ValidationError("brute force needs a finite radius")
    radius = spec.radius.value
    m_p = feature_means(P, spec.phi)
    axis = np.arange(-radius, radius + resolution / 2, resolution)
    if spec.phi.k == 1:
        grid = axis[:, None]
    else:
        aa, bb = np.meshgrid(axis, axis)
        grid = np.stack([aa.ravel(), bb.ravel()], axis=1)
        if math.isinf(spec.p):
            keep = np.ones(grid.shape[0], dtype=bool)
        elif spec.p == 1.0:
            keep = np.abs(grid).sum(axis=1) <= radius
        else:
            keep = np.linalg.norm(grid, ord=spec.p, axis=1) <= radius
        grid = grid[keep]
    best = -math.inf
    for a in grid:
        h = FunctionOnSpace(P.space, a @ spec.phi.values)
        r_val, _ = r_functional(g, Q, h)
        best = max(best, float(a @ m_p) - r_val)
    lipschitz = 2.0 * float(np.max(np.linalg.norm(spec.phi.values, axis=0)))
    bound = lipschitz * resolution * math.sqrt(spec.phi.k) / 2.0
    return BruteForceResult(value=best, error_bound=bound, grid_points=grid.shape[0])


def duality_instance(seed: int, i: int):
    """Instance i of the seeded duality battery.

    Mixes all four smooth generators, radii {0.1, 1, 10}, k in {1,2,3},
    n in 2..12, and every fifth instance drops the last outcome from
    the support of Q.
    """
    n = 2 + (i % 11)
    k = 1 + (i % 3)
    radius = (0.1, 1.0, 10.0)[i % 3]
    gen_name = DUALITY_GENERATORS[i % 4]
    P, Q, phi = random_instance(seed * 10007 + i, n, k)
    if i % 5 == 4 and n >= 3:
        masses = Q.p.copy()
        masses[-1] = 0.0
        Q = make_dist(Q.space, masses)
    return gen_name, P, Q, phi, radius


def run_suite(name: str, seed: int = 0, count: int = 0) -> SuiteResult:
    """Execute a named invariant battery on seeded random instances.

    ``count = 0`` selects each suite's default size. Failures never
    raise; they lower the pass count and surface in the records.
    """
    try:
        runner, default_count = _SUITES[name]
    except KeyError:
        raise UnknownSuite(
            f"unknown suite {name!r}; available: {', '.join(SUITE_NAMES)}"
        ) from None
    return runner(seed, count if count > 0 else default_count)


def _suite_generators(seed: int, count: int) -> SuiteResult:
    records = []
    passes = 0
    worst = 0.0
    names = builtin_names()
    for name in names:
        rep = check_generator(builtin(name))
        bad = [e for e in rep.entries if not e.passed]
        if not bad:
            passes += 1
        else:
            worst = max(worst, max(e.worst for e in bad))
        records.append(
            {
                "generator": name,
                "ok": rep.ok,
                "checks": {e.name: e.passed for e in rep.entries},
                "worst": max(e.worst for e in rep.entries),
                "notes": list(rep.notes),
            }
        )
    return SuiteResult("generators", seed, len(names), passes, worst, tuple(records))


def _suite_variational(seed: int, count: int) -> SuiteResult:
    records = []
    passes = 0
    worst = 0.0
    for i in range(count):
        n = 2 + (i % 9)
        P, Q, _ = random_instance(seed * 7919 + i, n, 1)
        inst_worst = 0.0
        finite_pairs = 0
        for gname in builtin_names():
            g = builtin(gname)
            closed = df_closed(g, P, Q)
            if not closed.value.is_finite:
                continue
            var = df_variational_full(g, P, Q)
            if not var.value.is_finite:
                inst_worst = math.inf
                continue
            finite_pairs += 1
            inst_worst = max(inst_worst, abs(float(var.value) - float(closed.value)))
        ok = inst_worst <= 1e-6
        passes += ok
        worst = max(worst, inst_worst)
        records.append({"i": i, "n": n, "pairs": finite_pairs, "worst": inst_worst, "ok": ok})
    return SuiteResult("variational_full", seed, count, passes, worst, tuple(records))


def _suite_duality(seed: int, count: int) -> SuiteResult:
    records = []
    passes = 0
    worst = 0.0
    for i in range(count):
        gen_name, P, Q, phi, radius = duality_instance(seed, i)
        gr = duality_gap(builtin(gen_name), P, Q, LinearBall(phi, 2, finite(radius)))
        pair_viol = max(gr.weak_duality_worst, 0.0)
        ok = gr.rel_gap <= 1e-3 and gr.weak_duality_worst <= 1e-6
        passes += ok
        viol = max(gr.rel_gap, pair_viol)
        worst = max(worst, viol)
        records.append(
            {
                "i": i,
                "generator": gen_name,
                "n": P.space.n,
                "k": phi.k,
                "radius": radius,
                "primal": float(gr.primal_value),
                "dual": float(gr.dual_value),
                "rel_gap": gr.rel_gap,
                "pairwise": gr.weak_duality_worst,
                "ok": ok,
            }
        )
    return SuiteResult("duality", seed, count, passes, worst, tuple(records))


def _infeasible_projection_instance(seed: int, i: int):
    """Q supported low, P concentrated high: target mean off the hull."""
    n = 3 + (i % 4)
    space = OutcomeSpace.of_size(n)
    phi = FeatureMap(space, np.linspace(0.0, 1.0, n)[None, :])
    q = np.zeros(n)
    q[: max(n // 2, 1)] = 1.0
    Q = make_dist(space, q)
    p = np.full(n, 1e-3)
    p[-1] = 1.0
    P = make_dist(space, p)
    return P, Q, phi


def _suite_moment_projection(seed: int, count: int) -> SuiteResult:
    records = []
    passes = 0
    worst = 0.0
    kl = builtin("kl")
    for i in range(count):
        infeasible = i % 5 == 4
        if infeasible:
            P, Q, phi = _infeasible_projection_instance(seed, i)
            mp = moment_projection(kl, P, Q, phi)
            pr = restricted_div_primal(kl, P, Q, LinearBall(phi, 2, POS_INF))
            ok = (not mp.value.is_finite) and (not pr.value.is_finite)
            viol = 0.0 if ok else math.inf
            records.append(
                {"i": i, "kind": "infeasible", "mp": float(mp.value), "primal": float(pr.value), "ok": ok}
            )
        else:
            n = 3 + (i % 8)
            k = 1 + (i % 3)
            P, Q, phi = random_instance(seed * 6029 + i, n, k)
            mp = moment_projection(kl, P, Q, phi)
            target = feature_means(P, phi)
            res = float(np.max(np.abs(feature_means(mp.pprime, phi) - target)))
            # Near-degenerate feature covariance makes first-order ascent
            # crawl; the route comparison buys the iterations it needs.
            pr = restricted_div_primal(
                kl, P, Q, LinearBall(phi, 2, POS_INF), PrimalConfig(max_iters=200_000)
            )
            dv = abs(float(mp.value) - float(pr.value))
            ok = res <= 1e-8 and dv <= 1e-5
            viol = max(res, dv)
            records.append(
                {"i": i, "kind": "feasible", "n": n, "k": k, "residual": res, "value_dev": dv, "ok": ok}
            )
        passes += ok
        worst = max(worst, viol)
    return SuiteResult("moment_projection", seed, count, passes, worst, tuple(records))


def _suite_r_functional(seed: int, count: int) -> SuiteResult:
    records = []
    passes = 0
    worst = 0.0
    kl = builtin("kl")
    gens = builtin_names()
    for i in range(count):
        rng = np.random.default_rng(np.random.SeedSequence([seed, 977, i]))
        n = 2 + (i % 9)
        _, Q, _ = random_instance(seed * 3571 + i, n, 1)
        space = Q.space
        g = builtin(gens[i % len(gens)])
        h = FunctionOnSpace(space, rng.uniform(-3.0, 3.0, n))
        h_up = FunctionOnSpace(space, h.values + rng.uniform(0.0, 1.0, n))
        h_alt = FunctionOnSpace(space, rng.uniform(-3.0, 3.0, n))
        c = float(rng.uniform(-2.0, 2.0))

        r_c, _ = r_functional(g, Q, FunctionOnSpace(space, np.full(n, c)))
        const_dev = abs(r_c - c)

        r_h, _ = r_functional(g, Q, h)
        r_up, _ = r_functional(g, Q, h_up)
        mono_viol = max(r_h - r_up, 0.0)

        r_alt, _ = r_functional(g, Q, h_alt)
        r_mid, _ = r_functional(g, Q, FunctionOnSpace(space, 0.5 * (h.values + h_alt.values)))
        conv_viol = max(r_mid - 0.5 * (r_h + r_alt), 0.0)

        v_closed, _ = r_functional(kl, Q, h)
        v_num, _ = r_functional_numeric(kl, Q, h)
        kl_dev = abs(v_closed - v_num)

        ok = (
            const_dev <= 1e-9
            and mono_viol <= 1e-12
            and conv_viol <= 1e-9
            and kl_dev <= 1e-7
        )
        passes += ok
        worst = max(worst, const_dev, mono_viol, conv_viol, kl_dev)
        records.append(
            {
                "i": i,
                "generator": g.name,
                "const_dev": const_dev,
                "monotone_viol": mono_viol,
                "midpoint_viol": conv_viol,
                "kl_dev": kl_dev,
                "ok": ok,
            }
        )
    return SuiteResult("r_functional", seed, count, passes, worst, tuple(records))


def _suite_gmm_agreement(seed: int, count: int) -> SuiteResult:
    records = []
    passes = 0
    worst = 0.0
    kl = builtin("kl")
    for i in range(count):
        n = 3 + (i % 5)
        k = 1 + (i % 2)
        P, _, phi = random_instance(seed * 4391 + i, n, k)
        fam = FullSimplex(P.space)
        rep = fit_linear_fgan(fam, P, kl, phi, POS_INF)
        res = float(np.max(np.abs(feature_means(rep.q_star, phi) - feature_means(P, phi))))
        ok = res <= 1e-4
        passes += ok
        worst = max(worst, res)
        records.append({"i": i, "n": n, "k": k, "residual": res, "objective": rep.objective, "ok": ok})
    return SuiteResult("gmm_agreement", seed, count, passes, worst, tuple(records))


def _suite_sandwich(seed: int, count: int) -> SuiteResult:
    ladder = (0.1, 0.3, 1.0, 3.0, 10.0)
    records = []
    passes = 0
    worst = 0.0
    for i in range(count):
        gen_name, P, Q, phi, _ = duality_instance(seed, i)
        g = builtin(gen_name)
        values = []
        for radius in ladder:
            rep = restricted_div_primal(g, P, Q, LinearBall(phi, 2, finite(radius)))
            values.append(float(rep.value))
        tiny = restricted_div_primal(g, P, Q, LinearBall(phi, 2, finite(1e-9)))
        tiny_dev = abs(float(tiny.value))
        mono_viol = max(
            (values[j] - values[j + 1] for j in range(len(values) - 1)), default=0.0
        )
        mono_viol = max(mono_viol, 0.0)
        gap_norm = float(np.linalg.norm(feature_means(P, phi) - feature_means(Q, phi)))
        closed = df_closed(g, P, Q)
        bound_viol = 0.0
        for radius, v in zip(ladder, values):
            ub = radius * gap_norm
            if closed.value.is_finite and absolutely_continuous(P, Q):
                ub = min(ub, float(closed.value))
            bound_viol = max(bound_viol, v - ub)
        ok = mono_viol <= 1e-8 and tiny_dev <= 1e-8 and bound_viol <= 1e-8
        passes += ok
        worst = max(worst, mono_viol, tiny_dev, bound_viol)
        records.append(
            {
                "i": i,
                "generator": gen_name,
                "values": values,
                "tiny": tiny_dev,
                "monotone_viol": mono_viol,
                "bound_viol": bound_viol,
                "ok": ok,
            }
        )
    return SuiteResult("sandwich", seed, count, passes, worst, tuple(records))


_SUITES = {
    "generators": (_suite_generators, 6),
    "variational_full": (_suite_variational, 100),
    "duality": (_suite_duality, 50),
    "moment_projection": (_suite_moment_projection, 25),
    "r_functional": (_suite_r_functional, 100),
    "gmm_agreement": (_suite_gmm_agreement, 10),
    "sandwich": (_suite_sandwich, 12),
}
