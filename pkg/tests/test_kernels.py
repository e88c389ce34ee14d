"""Kernel contract: marginals, joint laws, avoidance probabilities."""

import math

import numpy as np
import pytest
from scipy import stats as scistats

from dsycascade import build_model, rng
from dsycascade.kernels import (PATH_ALTERNATING, below_threshold, everything,
                                sample_children, verify_E_condition)
from dsycascade.models import mean_field_threshold_for_tail


def draw_first_children(kernel, x, n, seed):
    out = np.empty(n)
    for rep in range(n):
        stream = rng.StateStream(rng.root_key(seed, rep))
        out[rep] = kernel.child_sampler(x, stream)[0]
    return out


def _cdf_from_density(density, x, lo, hi, singularities=()):
    from dsycascade.numerics import integrate

    def cdf(y):
        y = float(y)
        if y <= lo:
            return 0.0
        pts = [s for s in singularities if lo < s < y]
        return integrate(lambda t: density(x, t), lo, min(y, hi),
                         singularities=pts, tol=1e-10).value

    return cdf


@pytest.mark.parametrize("name,x,lo,hi", [
    ("geometric_like", 1.0, 0.0, 2.0),
    ("bessel_nse3", 1.0, 0.0, math.inf),
    ("mean_field", 1.0, 0.0, math.inf),
])
def test_child_marginal_matches_density(name, x, lo, hi):
    entry = build_model(name)
    samples = draw_first_children(entry.kernel, x, 20_000, seed=101)
    cdf = _cdf_from_density(entry.kernel.density, x, lo, hi, singularities=[x])
    result = scistats.ks_1samp(samples, np.vectorize(cdf))
    assert result.pvalue > 0.01


def test_kpp_child_marginal_matches_density():
    entry = build_model("kpp_fourier")
    x = 1.0
    samples = draw_first_children(entry.kernel, x, 20_000, seed=103)
    from dsycascade.numerics import integrate, kpp_transition_density

    def cdf(y):
        return integrate(lambda e: kpp_transition_density(x, e), -math.inf,
                         float(y), singularities=[0.0, x / 2, x], tol=1e-9).value

    grid_cdf = np.vectorize(cdf)
    result = scistats.ks_1samp(samples, grid_cdf)
    assert result.pvalue > 0.01


def test_density_normalization_where_supplied():
    from dsycascade.numerics import integrate
    for name, xs in [("geometric_like", (0.4, 1.0, 2.0)),
                     ("bessel_nse3", (0.5, 1.0, 3.0)),
                     ("mean_field", (1.0,))]:
        entry = build_model(name)
        for x in xs:
            total = integrate(lambda y: entry.kernel.density(x, y), 0.0,
                              math.inf, singularities=[x, 2 * x], tol=1e-9)
            assert abs(total.value - 1.0) < 1e-6


def test_children_exchangeable_for_symmetric_kernels():
    # First-child and second-child empirical laws agree for kernels with a
    # symmetric joint law.
    entry = build_model("bessel_nse3")
    first = np.empty(8000)
    second = np.empty(8000)
    for rep in range(8000):
        stream = rng.StateStream(rng.root_key(11, rep))
        first[rep], second[rep] = entry.kernel.child_sampler(1.0, stream)
    assert scistats.ks_2samp(first, second).pvalue > 0.01


def test_mean_field_children_ignore_parent_state():
    entry = build_model("mean_field")
    a = draw_first_children(entry.kernel, 0.1, 4000, seed=7)
    b = draw_first_children(entry.kernel, 50.0, 4000, seed=7)
    assert np.array_equal(a, b)


def test_alpha_riccati_children_deterministic():
    entry = build_model("alpha_riccati", alpha=3.0)
    stream = rng.StateStream(rng.root_key(1))
    assert sample_children(entry.kernel, 9.0, stream) == (27.0, 27.0)
    assert stream.draws == 0


def test_selfsimilar_ratio_stream_state_independent():
    entry = build_model("nse_selfsimilar", d=3)
    key = rng.root_key(19)
    r_a = entry.kernel.joint_ratio_sampler(rng.StateStream(key))
    r_b = entry.kernel.joint_ratio_sampler(rng.StateStream(key))
    assert r_a == r_b
    c_a = entry.kernel.child_sampler(1.0, rng.StateStream(key))
    c_b = entry.kernel.child_sampler(2.0, rng.StateStream(key))
    assert c_b[0] == 2.0 * c_a[0] and c_b[1] == 2.0 * c_a[1]


def test_selfsimilar_log_ratio_autocorrelation_vanishes():
    # Successive ratios along a fixed path are i.i.d.
    entry = build_model("complex_burgers")
    n = 20_000
    key = rng.root_key(23)
    logs = np.empty(n)
    for j in range(n):
        r1, _ = entry.kernel.joint_ratio_sampler(rng.StateStream(key))
        logs[j] = math.log(r1)
        key = rng.child_key(key, 1)
    centered = logs - logs.mean()
    rho = (centered[:-1] @ centered[1:]) / (centered @ centered)
    assert abs(rho) <= 3.0 / math.sqrt(n)


def test_verify_E_condition_mean_field_exact_decay():
    entry = build_model("mean_field")
    q = 0.4
    c = mean_field_threshold_for_tail(q)
    report = verify_E_condition(entry.kernel, 1.0, below_threshold(c),
                                psi=lambda x: 1.0, r=1.0 / q, n_max=8,
                                replicas=20_000, seed=3)
    assert report.all_consistent
    assert report.checked_states == (1.0,)
    # I_n = q^n exactly here; the estimates should straddle it.
    for row in report.rows:
        assert row.wilson_low <= q ** row.n <= max(row.wilson_high, q ** row.n)


def test_verify_E_condition_rejects_small_r():
    entry = build_model("mean_field")
    with pytest.raises(ValueError):
        verify_E_condition(entry.kernel, 1.0, everything(), lambda x: 1.0,
                           r=2.0, n_max=3, replicas=10)


def test_geometric_like_avoidance_vanishes_below_half():
    # From states at or below 1/2 the chain cannot reach past 1.
    entry = build_model("geometric_like")
    report = verify_E_condition(entry.kernel, 0.5, below_threshold(1.0),
                                psi=lambda x: 1.0, r=math.e, n_max=5,
                                replicas=2000, seed=5)
    assert all(row.estimate == 0.0 for row in report.rows)


def test_geometric_like_avoidance_below_exponential_bound():
    entry = build_model("geometric_like")
    report = verify_E_condition(entry.kernel, 2.0, below_threshold(1.0),
                                psi=lambda x: 1.0, r=math.e, n_max=8,
                                replicas=50_000, seed=6)
    assert report.all_consistent


def test_avoidance_entire_space_is_zero():
    entry = build_model("mean_field")
    report = verify_E_condition(entry.kernel, 1.0, everything(),
                                psi=lambda x: 1.0, r=4.0, n_max=4,
                                replicas=100, seed=0)
    assert all(row.estimate == 0.0 for row in report.rows)


def test_avoidance_path_independent():
    # Conditions on path marginals make I_n the same along any branch
    # pattern; all-ones and alternating paths must agree within joint 3 sigma.
    entry = build_model("bessel_nse3")
    reps = 30_000
    from dsycascade.kernels import estimate_avoidance
    c = 0.8
    ones = estimate_avoidance(entry.kernel, 1.0, below_threshold(c), 6, reps,
                              seed=8)
    alt = estimate_avoidance(entry.kernel, 1.0, below_threshold(c), 6, reps,
                             seed=88, path_pattern=PATH_ALTERNATING)
    for n in range(6):
        p1, p2 = ones[n] / reps, alt[n] / reps
        se = math.sqrt((p1 * (1 - p1) + p2 * (1 - p2)) / reps) or 1e-9
        assert abs(p1 - p2) <= 3.0 * se


def test_selfsimilar_avoidance_scales():
    # I_n(a, c) depends only on a/c for multiplicative chains.
    entry = build_model("complex_burgers")
    reps = 30_000
    from dsycascade.kernels import estimate_avoidance
    small = estimate_avoidance(entry.kernel, 1.0, below_threshold(0.25), 5,
                               reps, seed=9)
    big = estimate_avoidance(entry.kernel, 2.0, below_threshold(0.5), 5,
                             reps, seed=99)
    for n in range(5):
        p1, p2 = small[n] / reps, big[n] / reps
        se = math.sqrt((p1 * (1 - p1) + p2 * (1 - p2)) / reps) or 1e-9
        assert abs(p1 - p2) <= 3.0 * se


def test_state_validation():
    entry = build_model("bessel_nse3")
    with pytest.raises(ValueError):
        sample_children(entry.kernel, -1.0, rng.StateStream(rng.root_key(0)))
    bd = build_model("birth_death", delta=0.6, b=1.5)
    with pytest.raises(ValueError):
        bd.kernel.validate_state(1.5)
