import math

import numpy as np
import pytest

from fdual.discriminator import FullSpace, LinearBall, QuadraticCoefficientPenalty
from fdual.divergence import df_closed, df_variational_full
from fdual.errors import UnsupportedNorm, ValidationError
from fdual.extreal import POS_INF, finite
from fdual.fgen import builtin
from fdual.primal import (
    PrimalConfig,
    _ReducedObjective,
    project_ball,
    regularized_div_primal,
    restricted_div_primal,
)
from fdual.space import FeatureMap, OutcomeSpace, make_dist, random_instance, feature_means

KL = builtin("kl")


def test_tiny_radius_value_zero(two_point):
    _, P, Q, phi = two_point
    rep = restricted_div_primal(KL, P, Q, LinearBall(phi, 2, finite(1e-9)))
    assert abs(float(rep.value)) <= 1e-8


def test_two_point_completeness(two_point):
    # One feature plus intercept spans all functions on two points, so
    # the unconstrained restricted divergence equals the full KL value.
    _, P, Q, phi = two_point
    rep = restricted_div_primal(KL, P, Q, LinearBall(phi, 2, POS_INF))
    expected = 0.5 * math.log(0.5 / 0.75) + 0.5 * math.log(0.5 / 0.25)
    assert float(rep.value) == pytest.approx(expected, abs=1e-9)
    assert float(rep.value) == pytest.approx(0.143841, abs=1e-6)
    assert rep.converged


def test_small_radius_sandwich(two_point):
    _, P, Q, phi = two_point
    rep = restricted_div_primal(KL, P, Q, LinearBall(phi, 2, finite(0.1)))
    v = float(rep.value)
    assert 0.0 < v <= min(0.1 * 0.25, 0.143842) + 1e-10


def test_full_space_delegates(two_point):
    _, P, Q, _ = two_point
    rep = restricted_div_primal(KL, P, Q, FullSpace(P.space))
    dv = df_variational_full(KL, P, Q)
    assert float(rep.value) == pytest.approx(float(dv.value), abs=1e-12)
    assert rep.h_opt is not None


def test_intercept_free_rejected(two_point):
    _, P, Q, phi = two_point
    with pytest.raises(ValidationError):
        restricted_div_primal(KL, P, Q, LinearBall(phi, 2, finite(1.0), intercept=False))


def test_unbounded_detection():
    space = OutcomeSpace.of_size(2)
    P = make_dist(space, [1, 1])
    Q = make_dist(space, [1, 0])
    phi = FeatureMap(space, [[0.0, 1.0]])
    rep = restricted_div_primal(KL, P, Q, LinearBall(phi, 2, POS_INF))
    assert rep.status == "unbounded"
    assert rep.value.is_pos_inf
    assert not rep.attained


def test_unsupported_projection_norm(two_point):
    _, P, Q, phi = two_point
    with pytest.raises(UnsupportedNorm):
        restricted_div_primal(KL, P, Q, LinearBall(phi, 3.0, finite(1.0)))


def test_project_ball_cases():
    a = np.array([3.0, -4.0])
    p2 = project_ball(a, 2.0, 1.0)
    assert np.linalg.norm(p2) == pytest.approx(1.0)
    pinf = project_ball(a, math.inf, 1.0)
    assert np.allclose(pinf, [1.0, -1.0])
    p1 = project_ball(a, 1.0, 1.0)
    assert np.sum(np.abs(p1)) == pytest.approx(1.0)
    assert np.allclose(project_ball(a, 2.0, math.inf), a)


@pytest.mark.parametrize("p", [1.0, 2.0, math.inf])
def test_ball_feasibility_of_solution(p):
    P, Q, phi = random_instance(21, 8, 3)
    radius = 0.8
    rep = restricted_div_primal(KL, P, Q, LinearBall(phi, p, finite(radius)))
    norm = np.sum(np.abs(rep.coefficients)) if p == 1.0 else (
        np.max(np.abs(rep.coefficients)) if math.isinf(p) else np.linalg.norm(rep.coefficients)
    )
    assert norm <= radius * (1 + 1e-9)


def test_monotone_in_radius():
    for seed in (31, 32):
        P, Q, phi = random_instance(seed, 7, 2)
        for name in ("kl", "pearson_chi2"):
            g = builtin(name)
            values = [
                float(restricted_div_primal(g, P, Q, LinearBall(phi, 2, finite(r))).value)
                for r in (0.1, 0.3, 1.0, 3.0, 10.0)
            ]
            for lo, hi in zip(values, values[1:]):
                assert hi >= lo - 1e-8


def test_weak_duality_feasible_points():
    # Any feasible (a, b) evaluates below the reported optimum.
    rng = np.random.default_rng(9)
    P, Q, phi = random_instance(41, 6, 2)
    radius = 1.0
    rep = restricted_div_primal(KL, P, Q, LinearBall(phi, 2, finite(radius)))
    m_p = feature_means(P, phi)
    for _ in range(50):
        a = rng.normal(size=2)
        nrm = float(np.linalg.norm(a))
        if nrm > radius:
            a *= radius / nrm
        b = float(rng.normal(scale=2.0))
        h = a @ phi.values + b
        obj = float(P.p @ h) - float(Q.p @ np.exp(h - 1.0))
        assert obj <= float(rep.value) + 1e-8


def test_gradient_matches_finite_differences():
    P, Q, phi = random_instance(55, 9, 3)
    rng = np.random.default_rng(12)
    for name in ("kl", "pearson_chi2", "squared_hellinger", "js_gan"):
        obj = _ReducedObjective(builtin(name), P, Q, phi)
        for _ in range(10):
            a = rng.uniform(-0.8, 0.8, 3)
            _, grad, _ = obj.value_grad_intercept(a)
            fd = obj.fd_gradient(a)
            denom = max(1.0, float(np.linalg.norm(grad)))
            assert float(np.linalg.norm(fd - grad)) / denom <= 1e-4


def test_reduced_objective_concavity():
    P, Q, phi = random_instance(66, 6, 2)
    rng = np.random.default_rng(13)
    obj = _ReducedObjective(KL, P, Q, phi)
    for _ in range(20):
        a1 = rng.uniform(-1, 1, 2)
        a2 = rng.uniform(-1, 1, 2)
        mid = obj.value(0.5 * (a1 + a2))
        assert mid >= 0.5 * (obj.value(a1) + obj.value(a2)) - 1e-9


def test_solver_fd_check_recorded():
    P, Q, phi = random_instance(77, 10, 3)
    rep = restricted_div_primal(
        builtin("squared_hellinger"), P, Q, LinearBall(phi, 2, finite(0.1))
    )
    assert rep.fd_gradient_worst <= 1e-4


def test_regularized_p_equals_q(two_point):
    _, P, _, phi = two_point
    rep = regularized_div_primal(KL, P, P, QuadraticCoefficientPenalty(phi, 0.5))
    assert abs(float(rep.value)) <= 1e-10
    assert np.max(np.abs(rep.coefficients)) <= 1e-4


def test_regularized_huge_weight(two_point):
    _, P, Q, phi = two_point
    rep = regularized_div_primal(KL, P, Q, QuadraticCoefficientPenalty(phi, 1e8))
    assert 0.0 <= float(rep.value) <= 1e-8


def test_regularized_grid_oracle(two_point):
    # Brute-force oracle: dense grid over the single coefficient with
    # the closed-form KL objective computed inline.
    _, P, Q, phi = two_point
    w = 1.0
    rep = regularized_div_primal(KL, P, Q, QuadraticCoefficientPenalty(phi, w))
    grid = np.arange(-10.0, 10.0, 1e-4)
    lse = np.log(0.75 + 0.25 * np.exp(grid))
    oracle = np.max(grid * 0.5 - lse - w * grid**2)
    assert float(rep.value) == pytest.approx(float(oracle), abs=1e-6)


def test_nonsmooth_conjugate_multistart_and_note():
    # Piecewise-linear conjugates get seeded restarts and a caveat that
    # a stationary-looking subgradient does not certify optimality.
    P, Q, phi = random_instance(8801, 4, 2)
    tv = builtin("total_variation")
    spec = LinearBall(phi, 2, finite(1.0))
    rep = restricted_div_primal(tv, P, Q, spec)
    assert rep.notes and "does not certify" in rep.notes[0]
    single = restricted_div_primal(tv, P, Q, spec, PrimalConfig(seed=1))
    # Multistart keeps exact evaluations only: still a valid lower bound
    # on the dual value at the same instance.
    from fdual.dual import restricted_div_dual

    d_rep = restricted_div_dual(tv, P, Q, spec, primal_value=float(rep.value))
    assert float(rep.value) <= float(d_rep.value) + 1e-9
    assert float(single.value) <= float(d_rep.value) + 1e-9


def test_value_log_monotone_enough():
    # Logged iterate values are exact evaluations and the last is best.
    P, Q, phi = random_instance(88, 8, 2)
    rep = restricted_div_primal(builtin("js_gan"), P, Q, LinearBall(phi, 2, finite(1.0)))
    log = rep.value_log
    assert log[-1] == max(log)
