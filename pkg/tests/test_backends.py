"""Compiled engine versus pure-Python reference: bit-identical outputs."""

import os

import pytest

from dsycascade import _pure, backend, build_model, rng

pytestmark = pytest.mark.skipif(not backend.native_available(),
                                reason="compiled engine not built")

CONFIGS = [
    ("yule", {}, 1.0),
    ("alpha_riccati", {"alpha": 2.0}, 1.0),
    ("alpha_riccati", {"alpha": 0.5}, 2.0),
    ("mean_field", {}, 1.0),
    ("geometric_like", {}, 0.7),
    ("birth_death", {"delta": 0.6, "b": 1.5}, 1.0),
    ("birth_death", {"delta": 0.95, "b": 1.5}, 3.0),
    ("kpp_fourier", {}, 1.0),
    ("bessel_nse3", {}, 1.3),
    ("nse_selfsimilar", {"d": 3}, 1.0),
    ("nse_selfsimilar", {"d": 12}, 1.0),
    ("complex_burgers", {}, 1.0),
]


@pytest.fixture(params=CONFIGS, ids=lambda c: c[0] + repr(c[1]))
def model_case(request):
    name, params, a = request.param
    return build_model(name, **params), a


def _native():
    return backend.native_module()


def test_rng_primitives_match(model_case):
    key = rng.root_key(99, 3)
    native = _native().selftest_rng(key)
    stream = rng.StateStream(key)
    pure = (rng.clock_of(key), rng.child_key(key, 1), rng.child_key(key, 2),
            stream.next_u01(), stream.next_u01(), stream.next_u01())
    assert native == pure


def test_horizon_identical(model_case):
    entry, a = model_case
    k = entry.kernel
    for seed, rep, t in [(0, 0, 1.0), (5, 2, 2.5)]:
        key = rng.root_key(seed, rep)
        pure = _pure.horizon(k, a, t, 50_000, key, True, 1024)
        native = _native().horizon(k.engine_kind, k.engine_params, a, t,
                                   50_000, key, True, 1024)
        assert pure == native


def test_zeta_curve_identical(model_case):
    entry, a = model_case
    k = entry.kernel
    key = rng.root_key(21, 1)
    pure = _pure.zeta_curve(k, a, 12, key, 0, 0.0, 10**7)
    native = _native().zeta_curve(k.engine_kind, k.engine_params, a, 12,
                                  0, 0.0, 10**7, key)
    assert pure == native


def test_zeta_stop_rule_identical(model_case):
    entry, a = model_case
    k = entry.kernel
    key = rng.root_key(22, 7)
    pure = _pure.zeta_curve(k, a, 15, key, 5, 0.05, 10**7)
    native = _native().zeta_curve(k.engine_kind, k.engine_params, a, 15,
                                  5, 0.05, 10**7, key)
    assert pure == native


def test_greedy_identical(model_case):
    entry, a = model_case
    k = entry.kernel
    key = rng.root_key(23, 0)
    pure = _pure.greedy(k, a, 500, 1e-8, key)
    native = _native().greedy(k.engine_kind, k.engine_params, a, 500, 1e-8, key)
    assert pure == native


def test_forced_pure_backend(monkeypatch):
    entry, a = build_model("alpha_riccati", alpha=2.0), 1.0
    monkeypatch.setenv("DSYCASCADE_BACKEND", "pure")
    assert backend.engine_for(entry.kernel)[0] == "pure"
    monkeypatch.setenv("DSYCASCADE_BACKEND", "native")
    assert backend.engine_for(entry.kernel)[0] == "native"
    monkeypatch.setenv("DSYCASCADE_BACKEND", "bogus")
    with pytest.raises(ValueError):
        backend.engine_for(entry.kernel)


def test_custom_kernel_always_pure():
    from dsycascade.kernels import KernelSpec

    custom = KernelSpec(state_kind="positive_real", intensity=lambda x: x,
                        child_sampler=lambda x, s: (x, x))
    assert backend.engine_for(custom)[0] == "pure"
