import json
import math

import numpy as np
import pytest

from fdual.cli import _jsonify
from fdual.discriminator import LinearBall
from fdual.divergence import kl_bar
from fdual.dual import restricted_div_dual
from fdual.errors import ValidationError
from fdual.estimators import (
    CrossContext,
    ExpFamily,
    FitConfig,
    FullSimplex,
    family_dim,
    family_member,
    fit_gmm,
    fit_linear_fgan,
    fit_mle,
)
from fdual.extreal import POS_INF, finite
from fdual.fgen import builtin
from fdual.space import (
    Dist,
    FeatureMap,
    OutcomeSpace,
    feature_means,
    make_dist,
    random_instance,
)

KL = builtin("kl")


@pytest.fixture
def three_point():
    space = OutcomeSpace.of_size(3)
    base = make_dist(space, [1, 1, 1])
    return space, base


def tv_dist(a: Dist, b: Dist) -> float:
    return 0.5 * float(np.sum(np.abs(a.p - b.p)))


def test_family_member_full_simplex():
    fam = FullSimplex(OutcomeSpace.of_size(3))
    assert family_dim(fam) == 3
    member = family_member(fam, np.array([0.0, 0.0, 0.0]))
    assert np.allclose(member.p, 1.0 / 3.0)


def test_family_member_exp_family(three_point):
    space, base = three_point
    psi = FeatureMap(space, [[0.0, 1.0, 2.0]])
    fam = ExpFamily(base, psi)
    assert family_dim(fam) == 1
    member = family_member(fam, np.array([0.0]))
    assert np.allclose(member.p, base.p)


def test_exp_family_needs_full_support(three_point):
    space, _ = three_point
    partial = make_dist(space, [1, 1, 0])
    with pytest.raises(ValidationError):
        ExpFamily(partial, FeatureMap(space, [[0.0, 1.0, 2.0]]))


def test_mle_full_simplex_returns_data(three_point):
    space, _ = three_point
    data = make_dist(space, [2, 5, 3])
    rep = fit_mle(FullSimplex(space), data)
    assert rep.q_star == data
    assert rep.objective == 0.0


def test_mle_saturated_family_recovers_data():
    space = OutcomeSpace.of_size(2)
    fam = ExpFamily(make_dist(space, [3, 1]), FeatureMap(space, [[0.0, 1.0]]))
    data = make_dist(space, [0.3, 0.7])
    rep = fit_mle(fam, data)
    assert tv_dist(rep.q_star, data) <= 1e-9


def test_mle_moment_matching(three_point):
    # Tilted fit matches the data's psi-means; verified directly.
    space, base = three_point
    psi = FeatureMap(space, [[0.0, 1.0, 2.0]])
    fam = ExpFamily(base, psi)
    data = make_dist(space, [0.5, 0.25, 0.25])
    rep = fit_mle(fam, data)
    fitted_mean = float(feature_means(rep.q_star, psi)[0])
    assert fitted_mean == pytest.approx(0.75, abs=1e-8)
    assert rep.objective == pytest.approx(float(kl_bar(data, rep.q_star).value), abs=1e-12)


def test_gmm_feasible_moments_reach_zero(three_point):
    space, base = three_point
    phi = FeatureMap(space, [[0.0, 1.0, 2.0]])
    fam = ExpFamily(base, phi)
    data = make_dist(space, [0.5, 0.25, 0.25])
    rep = fit_gmm(fam, data, phi)
    assert rep.objective <= 1e-6


def test_gmm_two_point_tilt():
    space = OutcomeSpace.of_size(2)
    phi = FeatureMap(space, [[0.0, 1.0]])
    fam = ExpFamily(make_dist(space, [3, 1]), phi)
    data = make_dist(space, [1, 1])
    rep = fit_gmm(fam, data, phi)
    assert np.max(np.abs(rep.q_star.p - 0.5)) <= 1e-7


def test_gmm_full_simplex_maxent_representative(three_point):
    space, _ = three_point
    phi = FeatureMap(space, [[0.0, 1.0, 2.0]])
    data = make_dist(space, [0.2, 0.5, 0.3])
    rep = fit_gmm(FullSimplex(space), data, phi)
    assert rep.objective <= 1e-9
    # Among moment-matched distributions the returned one has maximum
    # entropy, hence at least the data's own entropy.
    ent = lambda p: -float(np.sum(p[p > 0] * np.log(p[p > 0])))
    assert ent(rep.q_star.p) >= ent(data.p) - 1e-9


def test_gmm_mean_outside_family_hull(three_point):
    # The tilt family q ~ (1, e^t, 1) has constant phi-mean 1, so the
    # objective equals the distance from the data mean to that hull.
    # Grid-search oracle over the 1-D parameter verifies the distance.
    space, base = three_point
    psi = FeatureMap(space, [[0.0, 1.0, 0.0]])
    phi = FeatureMap(space, [[0.0, 1.0, 2.0]])
    fam = ExpFamily(base, psi)
    data = make_dist(space, [0.2, 0.5, 0.3])
    rep = fit_gmm(fam, data, phi)
    grid = np.arange(-10.0, 10.0, 1e-3)
    e = np.exp(grid)
    means = (e + 2.0) / (2.0 + e)
    oracle = float(np.min(np.abs(1.1 - means)))
    assert oracle == pytest.approx(0.1, abs=1e-12)
    assert rep.objective == pytest.approx(oracle, abs=1e-9)


def test_fgan_tiny_radius_everything_optimal(three_point):
    space, base = three_point
    phi = FeatureMap(space, [[0.0, 1.0, 2.0]])
    fam = ExpFamily(base, FeatureMap(space, [[0.0, 1.0, 0.0]]))
    data = make_dist(space, [0.2, 0.5, 0.3])
    rep = fit_linear_fgan(fam, data, KL, phi, finite(1e-9), FitConfig(starts=2, max_iters=40))
    assert 0.0 <= rep.objective <= 1e-8


def test_fgan_full_simplex_matches_moments():
    P, _, phi = random_instance(5, 6, 2)
    rep = fit_linear_fgan(FullSimplex(P.space), P, KL, phi, POS_INF)
    residual = float(np.max(np.abs(feature_means(rep.q_star, phi) - feature_means(P, phi))))
    assert residual <= 1e-4


def test_fgan_spanning_features_equal_mle():
    space = OutcomeSpace.of_size(2)
    phi = FeatureMap(space, [[0.0, 1.0]])
    fam = ExpFamily(make_dist(space, [3, 1]), phi)
    data = make_dist(space, [0.3, 0.7])
    rep_f = fit_linear_fgan(fam, data, KL, phi, POS_INF)
    rep_m = fit_mle(fam, data)
    assert tv_dist(rep_f.q_star, rep_m.q_star) <= 1e-6


def test_fgan_mismatch_instance_cross_table(three_point):
    space, base = three_point
    psi = FeatureMap(space, [[0.0, 1.0, 0.0]])
    phi = FeatureMap(space, [[0.0, 1.0, 2.0]])
    fam = ExpFamily(base, psi)
    data = make_dist(space, [0.2, 0.5, 0.3])
    cfg = FitConfig(starts=3, max_iters=60)
    rep = fit_linear_fgan(fam, data, KL, phi, finite(1.0), cfg)
    assert set(rep.cross) == {"mle", "gmm", "fgan"}
    assert rep.cross["fgan"] == pytest.approx(rep.objective, abs=1e-9)
    # Dual-form recomputation of the fitted objective.
    d_rep = restricted_div_dual(
        KL, data, rep.q_star, LinearBall(phi, 2, finite(1.0)), primal_value=rep.objective
    )
    rel = abs(float(d_rep.value) - rep.objective) / max(1.0, abs(float(d_rep.value)))
    assert rel <= 1e-3
    # The adversarial fit sits away from both classical fits.
    rep_m = fit_mle(fam, data)
    rep_g = fit_gmm(fam, data, phi, cfg)
    assert tv_dist(rep.q_star, rep_m.q_star) >= 1e-3
    assert tv_dist(rep.q_star, rep_g.q_star) >= 1e-3


def test_fit_reports_deterministic():
    space = OutcomeSpace.of_size(3)
    base = make_dist(space, [1, 1, 1])
    psi = FeatureMap(space, [[0.0, 1.0, 0.0]])
    phi = FeatureMap(space, [[0.0, 1.0, 2.0]])
    fam = ExpFamily(base, psi)
    data = make_dist(space, [0.2, 0.5, 0.3])
    cfg = FitConfig(seed=11, starts=3, max_iters=40)

    def snapshot():
        rep = fit_gmm(fam, data, phi, cfg)
        payload = {
            "theta": rep.theta,
            "q": rep.q_star.p,
            "objective": rep.objective,
            "cross": rep.cross,
            "trajectory": rep.trajectory,
        }
        return json.dumps(_jsonify(payload), sort_keys=True)

    assert snapshot() == snapshot()


def test_gmm_flat_objective_notes(three_point):
    # phi-means are constant over this family, so every member ties.
    space, base = three_point
    psi = FeatureMap(space, [[0.0, 1.0, 0.0]])
    phi = FeatureMap(space, [[0.0, 1.0, 2.0]])
    fam = ExpFamily(base, psi)
    data = make_dist(space, [0.2, 0.5, 0.3])
    rep = fit_gmm(fam, data, phi)
    assert rep.objective == pytest.approx(0.1, abs=1e-9)
    assert rep.notes
