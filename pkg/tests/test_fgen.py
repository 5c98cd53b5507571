import math

import numpy as np
import pytest

from fdual.errors import UnknownGenerator
from fdual.extreal import NEG_INF, POS_INF, finite, scale_mass
from fdual.fgen import FGenerator, GridSpec, builtin, builtin_names, check_generator


ALL = list(builtin_names())


def test_catalog_names():
    assert set(ALL) == {
        "kl",
        "reverse_kl",
        "js_gan",
        "pearson_chi2",
        "squared_hellinger",
        "total_variation",
    }


def test_unknown_generator():
    with pytest.raises(UnknownGenerator):
        builtin("chisq")


def test_kl_normalization():
    g = builtin("kl")
    assert float(g.f(1.0)) == 0.0


def test_kl_conjugate_at_one():
    g = builtin("kl")
    assert float(g.fstar(1.0)) == pytest.approx(1.0, abs=1e-15)


def test_pearson_conjugate_flattens():
    g = builtin("pearson_chi2")
    # Grid-search oracle: sup_{x>=0} (-4x - (x-1)^2).
    xs = np.arange(0.0, 10.0, 1e-4)
    oracle = float(np.max(-4.0 * xs - (xs - 1.0) ** 2))
    val = float(g.fstar(-4.0))
    assert val == pytest.approx(-1.0, abs=1e-12)
    assert abs(val - oracle) <= 1e-6


@pytest.mark.parametrize("name", ALL)
def test_builtin_passes_checks(name):
    rep = check_generator(builtin(name))
    failing = [e.name for e in rep.entries if not e.passed]
    assert not failing, f"{name} failed {failing}"


def test_corrupted_generator_fails_normalization():
    g = builtin("kl")

    def bad_f(x):
        vals, fin = g.f_vec(x)
        return np.where(fin, vals + 0.1, vals), fin

    bad = FGenerator(
        name="bad",
        f_vec=bad_f,
        fstar_vec=g.fstar_vec,
        fstar_prime_vec=g.fstar_prime_vec,
        f_prime_vec=g.f_prime_vec,
        fstar_domain_upper=g.fstar_domain_upper,
        fstar_domain_closed=g.fstar_domain_closed,
        fprime_at_infinity=g.fprime_at_infinity,
        f_at_zero=g.f_at_zero,
    )
    rep = check_generator(bad)
    assert not rep.entry("normalization_f1").passed


def test_total_variation_domain_and_monotonicity():
    g = builtin("total_variation")
    assert g.fstar_domain_upper.is_finite and g.fstar_domain_upper.value == 0.5
    assert g.fstar_domain_closed
    rep = check_generator(g)
    assert rep.entry("fstar_nondecreasing").passed
    assert rep.notes  # non-strict convexity is flagged


def test_kl_conjugate_slack_strict_off_one():
    g = builtin("kl")
    ts = np.linspace(-10.0, 3.0, 401)
    vals, fin = g.fstar_vec(ts)
    assert np.all(fin)
    slack = vals - ts  # f*(t) - t >= 0 with equality only at t = 1
    assert np.min(slack) >= 0.0
    assert abs(ts[int(np.argmin(slack))] - 1.0) <= 0.05
    assert np.all(slack[np.abs(ts - 1.0) > 0.1] > 0.0)


@pytest.mark.parametrize(
    "name, expected",
    [
        ("total_variation", 0.5),
        ("squared_hellinger", 1.0),
        ("js_gan", math.log(2.0)),
        ("reverse_kl", 0.0),
    ],
)
def test_slope_at_infinity_finite(name, expected):
    g = builtin(name)
    assert g.fprime_at_infinity.is_finite
    assert g.fprime_at_infinity.value == pytest.approx(expected, abs=1e-12)
    f_far = g.f(1e6)
    assert abs(f_far.value / 1e6 - expected) <= 0.05 * max(1.0, abs(expected))


@pytest.mark.parametrize("name", ["kl", "pearson_chi2"])
def test_slope_at_infinity_symbolic(name):
    g = builtin(name)
    assert g.fprime_at_infinity.is_pos_inf
    assert check_generator(g).entry("slope_at_infinity").passed


def test_conjugate_smoothness_flags():
    for name in ALL:
        g = builtin(name)
        assert g.conjugate_smooth is (name != "total_variation")


def test_conjugate_domain_is_slope_at_infinity():
    # sup dom f* coincides with lim f(x)/x for every catalog entry.
    for name in ALL:
        g = builtin(name)
        up, lim = g.fstar_domain_upper, g.fprime_at_infinity
        assert up.sign == lim.sign
        if up.is_finite:
            assert up.value == pytest.approx(lim.value, abs=1e-15)


def test_extreal_arithmetic():
    assert float(finite(2.0) + 3.0) == 5.0
    assert (POS_INF + finite(1.0)).is_pos_inf
    assert (NEG_INF + finite(1.0)).is_neg_inf
    with pytest.raises(ArithmeticError):
        POS_INF + NEG_INF
    assert float(scale_mass(0.0, POS_INF)) == 0.0
    assert scale_mass(0.5, POS_INF).is_pos_inf
    assert float(scale_mass(2.0, finite(3.0))) == 6.0
    assert finite(1.0) < POS_INF
    assert NEG_INF < finite(-1e308)


def test_grid_spec_override():
    rep = check_generator(builtin("kl"), GridSpec(x_max=5.0, x_points=101, t_lo=-8.0, t_hi=2.0, t_points=101))
    assert rep.ok
