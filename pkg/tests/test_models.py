"""Catalog models: exact sampler laws, regime metadata, special values."""

import math

import numpy as np
import pytest
from scipy import stats as scistats

from dsycascade import build_model, model_names, rng
from dsycascade.models import (birth_death_decay_rate, birth_death_kappa,
                               make_mean_field, mean_field_threshold_for_tail)
from dsycascade.numerics import dilog_cdf

PI = math.pi


def _ratio_samples(entry, n, seed):
    out = np.empty((n, 2))
    for rep in range(n):
        stream = rng.StateStream(rng.root_key(seed, rep))
        out[rep] = entry.kernel.joint_ratio_sampler(stream)
    return out


# -- alpha-Riccati ----------------------------------------------------------

def test_riccati_param_validation():
    with pytest.raises(ValueError):
        build_model("alpha_riccati", alpha=0.0)


def test_riccati_regimes_and_bound():
    assert build_model("alpha_riccati", alpha=1.0).verdict == "non-explosive"
    two = build_model("alpha_riccati", alpha=2.0)
    assert two.verdict == "explosive"
    assert two.explosion_kappa == 0.5
    assert two.greedy_mean_bound(1.0) == 2.0
    # alpha < 1: the ratio moment alpha^b drops below 1/2, here at b = 2
    half = build_model("alpha_riccati", alpha=0.5)
    assert half.verdict == "non-explosive"
    assert 0.5 ** 2 < 0.5


def test_riccati_children_double():
    entry = build_model("alpha_riccati", alpha=2.0)
    stream = rng.StateStream(rng.root_key(0))
    assert entry.kernel.child_sampler(4.0, stream) == (8.0, 8.0)


def test_yule_is_unit_rate():
    entry = build_model("yule")
    assert entry.kernel.intensity(1.0) == 1.0
    assert entry.verdict == "non-explosive"


# -- mean field --------------------------------------------------------------

def test_mean_field_threshold_and_rate():
    assert mean_field_threshold_for_tail(0.25) == pytest.approx(math.log(4.0))
    entry = build_model("mean_field")
    assert entry.law_tail(math.log(4.0)) == pytest.approx(0.25)
    # tail 0.4 gives decay rate r = 2.5 with unit weight
    assert 1.0 / entry.law_tail(mean_field_threshold_for_tail(0.4)) == pytest.approx(2.5)


def test_mean_field_degenerate_law_is_yule():
    entry = make_mean_field(law_sampler=lambda stream: 1.0)
    stream = rng.StateStream(rng.root_key(0))
    assert entry.kernel.child_sampler(123.0, stream) == (1.0, 1.0)
    assert entry.kernel.intensity(1.0) == 1.0
    assert entry.kernel.engine_kind is None  # custom laws run on the pure engine


# -- geometric-like ----------------------------------------------------------

def test_geometric_like_support():
    entry = build_model("geometric_like")
    x = 0.4
    for rep in range(2000):
        c1, c2 = entry.kernel.child_sampler(x, rng.StateStream(rng.root_key(1, rep)))
        assert 0.0 < c1 < 0.8 and 0.0 < c2 < 0.8


def test_geometric_like_inverse_cdf_formula():
    entry = build_model("geometric_like")
    x = 1.3
    key = rng.root_key(2)
    stream = rng.StateStream(key)
    c1, _ = entry.kernel.child_sampler(x, stream)
    probe = rng.StateStream(key)
    u = probe.next_u01()
    # log1p/expm1 in the sampler vs the textbook form: equal to rounding
    assert c1 == pytest.approx(-math.log(1.0 - u * (1.0 - math.exp(-2.0 * x))),
                               rel=1e-14)


def test_geometric_like_density_reads_off():
    entry = build_model("geometric_like")
    assert entry.kernel.density(1.0, 0.5) == pytest.approx(
        math.exp(-0.5) / (1 - math.exp(-2.0)))
    assert entry.kernel.density(1.0, 2.5) == 0.0


# -- birth-death -------------------------------------------------------------

def test_birth_death_param_validation():
    with pytest.raises(ValueError):
        build_model("birth_death", delta=1.2, b=1.5)
    with pytest.raises(ValueError):
        build_model("birth_death", delta=0.5, b=0.9)


def test_birth_death_reflects_at_one():
    entry = build_model("birth_death", delta=0.6, b=1.5)
    stream = rng.StateStream(rng.root_key(0))
    assert entry.kernel.child_sampler(1.0, stream) == (2.0, 2.0)
    assert stream.draws == 0


def test_birth_death_inverse_max_intensity_formula():
    # For a >= 2: E[1/max intensity] = d^2 b^{1-a} + (1-d^2) b^{-1-a}.
    delta, b, a = 0.6, 1.5, 3.0
    entry = build_model("birth_death", delta=delta, b=b)
    n = 200_000
    acc = 0.0
    for rep in range(n):
        c1, c2 = entry.kernel.child_sampler(a, rng.StateStream(rng.root_key(3, rep)))
        acc += 1.0 / max(entry.kernel.intensity(c1), entry.kernel.intensity(c2))
    expected = delta**2 * b ** (1 - a) + (1 - delta**2) * b ** (-1 - a)
    assert acc / n == pytest.approx(expected, rel=0.01)


def test_birth_death_kappa_and_rate_values():
    assert birth_death_kappa(0.6, 1.5) == pytest.approx(29.0 / 30.0)
    entry = build_model("birth_death", delta=0.6, b=1.5)
    assert entry.greedy_mean_bound(1.0) == pytest.approx(20.0)
    # non-explosive regime decay rate at delta = 0.95
    assert birth_death_decay_rate(0.95) == pytest.approx(2.294, abs=5e-4)
    assert birth_death_decay_rate(0.95) > 2.0
    assert build_model("birth_death", delta=0.95, b=1.5).verdict == "non-explosive"


def test_birth_death_open_region():
    entry = build_model("birth_death", delta=0.8, b=1.5)
    assert entry.verdict == "open"


# -- KPP ---------------------------------------------------------------------

def test_kpp_children_sum_to_parent():
    entry = build_model("kpp_fourier")
    for rep in range(500):
        c1, c2 = entry.kernel.child_sampler(1.0, rng.StateStream(rng.root_key(5, rep)))
        assert c1 + c2 == 1.0


def test_kpp_intensity():
    entry = build_model("kpp_fourier")
    assert entry.kernel.intensity(2.0) == 5.0
    assert not entry.kernel.independence_flag


# -- Bessel ------------------------------------------------------------------

def test_bessel_density_value_reads_off():
    entry = build_model("bessel_nse3")
    assert entry.kernel.density(1.0, 0.5) == pytest.approx(1.0 - math.exp(-1.0))


def test_bessel_normalization_tight():
    from dsycascade.numerics import integrate
    entry = build_model("bessel_nse3")
    for x in (0.5, 1.0, 3.0):
        total = integrate(lambda y: entry.kernel.density(x, y), 0.0, math.inf,
                          singularities=[x], tol=1e-12)
        assert abs(total.value - 1.0) < 1e-8


def test_bessel_small_state_sampler():
    entry = build_model("bessel_nse3")
    draws = [entry.kernel.child_sampler(1e-4, rng.StateStream(rng.root_key(6, rep)))[0]
             for rep in range(500)]
    assert all(d > 0 for d in draws)


# -- scale-invariant cascade --------------------------------------------------

def test_nse_param_validation():
    with pytest.raises(ValueError):
        build_model("nse_selfsimilar", d=2)


def test_nse_triangle_inequalities():
    # (1, R1, R2) are the sides of a genuine triangle.
    entry = build_model("nse_selfsimilar", d=3)
    ratios = _ratio_samples(entry, 10_000, seed=7)
    r1, r2 = ratios[:, 0], ratios[:, 1]
    assert np.all(r1 + r2 >= 1.0 - 1e-12)
    assert np.all(np.abs(r1 - r2) <= 1.0 + 1e-12)


def test_nse_law_of_cosines_identity():
    # Reconstruct the base angle from the sides; with uniform angles the
    # marginal of the first angle has CDF phi(2 pi - phi)/pi^2 at d = 3.
    entry = build_model("nse_selfsimilar", d=3)
    ratios = _ratio_samples(entry, 20_000, seed=8)
    r1, r2 = ratios[:, 0], ratios[:, 1]
    cos_phi1 = (1.0 + r1**2 - r2**2) / (2.0 * r1)
    assert np.all(np.abs(cos_phi1) <= 1.0 + 1e-9)
    phi1 = np.arccos(np.clip(cos_phi1, -1.0, 1.0))
    cdf = lambda p: p * (2.0 * PI - p) / PI**2
    assert scistats.ks_1samp(phi1, cdf).pvalue > 0.01


def test_nse_d3_ratio_marginal_is_dilogarithmic():
    entry = build_model("nse_selfsimilar", d=3)
    ratios = _ratio_samples(entry, 20_000, seed=9)[:, 0]
    assert scistats.ks_1samp(ratios, np.vectorize(dilog_cdf)).pvalue > 0.01


def test_nse_regimes():
    assert build_model("nse_selfsimilar", d=3).verdict == "explosive"
    assert build_model("nse_selfsimilar", d=3).explosion_kappa == pytest.approx(8 / PI**2)
    assert build_model("nse_selfsimilar", d=12).verdict == "non-explosive"
    assert build_model("nse_selfsimilar", d=7).verdict == "open"


def test_nse_high_dimension_sampler_concentrates():
    # As d grows the angle law concentrates near phi1 + phi2 = pi/2 and the
    # two ratios approach the sides of a right triangle with hypotenuse 1.
    entry = build_model("nse_selfsimilar", d=48)
    ratios = _ratio_samples(entry, 2000, seed=10)
    hyp = ratios[:, 0] ** 2 + ratios[:, 1] ** 2
    assert np.median(np.abs(hyp - 1.0)) < 0.1


# -- complex Burgers ----------------------------------------------------------

def test_burgers_ratio_moment_and_median():
    entry = build_model("complex_burgers")
    ratios = _ratio_samples(entry, 50_000, seed=11)
    second = (ratios[:, 0] ** 2).mean()
    se = (ratios[:, 0] ** 2).std(ddof=1) / math.sqrt(len(ratios))
    assert abs(second - 1.0 / 3.0) <= 3 * se
    assert 1.0 / 3.0 < 0.5
    below = (ratios[:, 0] <= 0.5).mean()
    assert abs(below - 0.5) <= 3 * math.sqrt(0.25 / len(ratios))


def test_burgers_children_independent_uniforms():
    entry = build_model("complex_burgers")
    ratios = _ratio_samples(entry, 20_000, seed=12)
    rho = np.corrcoef(ratios[:, 0], ratios[:, 1])[0, 1]
    assert abs(rho) <= 3.0 / math.sqrt(len(ratios))


# -- catalog -----------------------------------------------------------------

def test_catalog_names_and_build_errors():
    assert "yule" in model_names()
    with pytest.raises(KeyError):
        build_model("nope")
    with pytest.raises(ValueError):
        build_model("yule", alpha=2.0)


def test_every_entry_declares_regimes():
    from dsycascade.cli import _cmd_list_models
    for name in model_names():
        entry = {
            "alpha_riccati": lambda: build_model("alpha_riccati", alpha=2.0),
            "birth_death": lambda: build_model("birth_death", delta=0.6, b=1.5),
            "nse_selfsimilar": lambda: build_model("nse_selfsimilar", d=3),
        }.get(name, lambda n=name: build_model(n))()
        assert entry.known_regimes
        assert entry.verdict in ("explosive", "non-explosive", "open")
