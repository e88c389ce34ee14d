"""Catalog of concrete cascade kernels.

Each builder returns a :class:`ModelCatalogEntry` bundling the kernel, its
parameters, the known explosion/non-explosion regimes, and (when the greedy
explosion criterion applies) the constant kappa < 1 with
E[max-child-intensity^{-1}] <= kappa / parent-intensity, which yields the
mean bound E[zeta*] <= 1/(lambda(a)(1-kappa)).

The sampler bodies below are the reference implementations; the compiled
engine re-implements the same arithmetic in the same order, so both
backends produce bit-identical realizations from equal seeds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

from . import numerics, rng
from .errors import SamplingFailureError
from .kernels import (ENGINE_ALPHA_RICCATI, ENGINE_BESSEL3, ENGINE_BIRTH_DEATH,
                      ENGINE_COMPLEX_BURGERS, ENGINE_GEOMETRIC_LIKE, ENGINE_KPP,
                      ENGINE_MEAN_FIELD_EXP, ENGINE_NSE_SELFSIMILAR, KernelSpec,
                      SelfSimilarKernel, make_selfsimilar)

REJECTION_CAP = 10**6

EXPLOSIVE = "explosive"
NON_EXPLOSIVE = "non-explosive"
OPEN = "open"


@dataclass(frozen=True)
class RegimeNote:
    region: str
    verdict: str
    reason: str


@dataclass(frozen=True)
class ModelCatalogEntry:
    name: str
    kernel: KernelSpec
    parameters: dict
    known_regimes: tuple[RegimeNote, ...]
    default_initial_state: float
    description: str
    verdict: str = OPEN
    explosion_kappa: Optional[float] = None
    law_tail: Optional[Callable[[float], float]] = None

    def greedy_mean_bound(self, a: float) -> float:
        """Mean bound on the greedy path sum, 1/(lambda(a)(1-kappa))."""
        if self.explosion_kappa is None or not self.explosion_kappa < 1.0:
            raise ValueError(f"model {self.name!r} has no greedy explosion bound")
        lam = self.kernel.intensity(a)
        return 1.0 / (lam * (1.0 - self.explosion_kappa))


def _ipow(base: float, expo: int) -> float:
    """Integer power by binary exponentiation (mirrored in the engine)."""
    result = 1.0
    while expo:
        if expo & 1:
            result *= base
        base *= base
        expo >>= 1
    return result


# ---------------------------------------------------------------------------
# alpha-Riccati family (includes the standard Yule cascade at alpha = 1)
# ---------------------------------------------------------------------------

def _riccati_joint(alpha):
    def joint(stream):
        return alpha, alpha
    return joint


def make_alpha_riccati(alpha: float) -> ModelCatalogEntry:
    """Deterministic geometric cascade: intensity x, children both alpha*x."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    kernel = make_selfsimilar(
        intensity=lambda x: x,
        joint_ratio_sampler=_riccati_joint(alpha),
        ratio_density=None,
        engine_kind=ENGINE_ALPHA_RICCATI,
        engine_params=(alpha,),
    )
    if alpha > 1:
        verdict, kappa = EXPLOSIVE, 1.0 / alpha
    else:
        verdict, kappa = NON_EXPLOSIVE, None
    return ModelCatalogEntry(
        name="alpha_riccati",
        kernel=kernel,
        parameters={"alpha": alpha},
        known_regimes=(
            RegimeNote("alpha > 1", EXPLOSIVE,
                       "greedy-path criterion with kappa = 1/alpha"),
            RegimeNote("alpha = 1", NON_EXPLOSIVE, "standard Yule cascade"),
            RegimeNote("alpha < 1", NON_EXPLOSIVE,
                       "ratio moment E[R^b] = alpha^b < 1/2 for large b"),
        ),
        default_initial_state=1.0,
        description="u'(t) = -u(t) + u^2(alpha t) cascade; states alpha^|v|",
        verdict=verdict,
        explosion_kappa=kappa,
    )


def make_yule() -> ModelCatalogEntry:
    """Standard Yule cascade: unit intensity everywhere, state constant 1."""
    entry = make_alpha_riccati(1.0)
    return ModelCatalogEntry(
        name="yule", kernel=entry.kernel, parameters={},
        known_regimes=(RegimeNote("all", NON_EXPLOSIVE,
                                  "classical pure-birth process"),),
        default_initial_state=1.0,
        description="standard Yule cascade (rate-1 binary splitting)",
        verdict=NON_EXPLOSIVE,
    )


# ---------------------------------------------------------------------------
# Mean-field cascade: i.i.d. states along every path
# ---------------------------------------------------------------------------

def _mean_field_exp_children(rate):
    def children(x, stream):
        c1 = -math.log(stream.next_u01()) / rate
        c2 = -math.log(stream.next_u01()) / rate
        return c1, c2
    return children


def make_mean_field(law_sampler=None, law_tail=None, *,
                    rate: float = 1.0) -> ModelCatalogEntry:
    """Cascade whose states are drawn i.i.d. from a fixed law.

    With no arguments the law is Exp(rate) (closed-form tail, compiled
    sampler).  A custom ``law_sampler(stream) -> state`` runs on the pure
    backend; supply ``law_tail(c) = P(X > c)`` for bound reporting.
    """
    if law_sampler is None:
        if not rate > 0:
            raise ValueError("rate must be positive")
        kernel = KernelSpec(
            state_kind="positive_real",
            intensity=lambda x: x,
            child_sampler=_mean_field_exp_children(rate),
            density=lambda x, y: rate * math.exp(-rate * y) if y > 0 else 0.0,
            engine_kind=ENGINE_MEAN_FIELD_EXP,
            engine_params=(rate,),
        )
        tail = lambda c: math.exp(-rate * c)
        params = {"law": "exponential", "rate": rate}
    else:
        def children(x, stream):
            return law_sampler(stream), law_sampler(stream)
        kernel = KernelSpec(
            state_kind="positive_real",
            intensity=lambda x: x,
            child_sampler=children,
        )
        tail = law_tail
        params = {"law": "custom"}
    return ModelCatalogEntry(
        name="mean_field", kernel=kernel, parameters=params,
        known_regimes=(
            RegimeNote("some c with P(X > c) < 1/2", NON_EXPLOSIVE,
                       "avoidance probabilities decay at rate r = 1/P(X > c)"),
        ),
        default_initial_state=1.0,
        description="i.i.d. states along each path; first passage percolation",
        verdict=NON_EXPLOSIVE,
        law_tail=tail,
    )


def mean_field_threshold_for_tail(q: float, rate: float = 1.0) -> float:
    """Threshold c with P(X > c) = q for the exponential mean-field law."""
    if not 0 < q < 1:
        raise ValueError("tail probability must be in (0, 1)")
    return -math.log(q) / rate


# ---------------------------------------------------------------------------
# Geometric-like chain: transition density e^{-y}/(1-e^{-2x}) on 0 < y < 2x
# ---------------------------------------------------------------------------

def _geometric_like_children(x, stream):
    q = -math.expm1(-2.0 * x)
    y1 = -math.log1p(-stream.next_u01() * q)
    y2 = -math.log1p(-stream.next_u01() * q)
    return y1, y2


def geometric_like_density(x: float, y: float) -> float:
    if x <= 0:
        raise ValueError("state must be positive")
    if not 0.0 < y < 2.0 * x:
        return 0.0
    return math.exp(-y) / -math.expm1(-2.0 * x)


def make_geometric_like() -> ModelCatalogEntry:
    """Chain that can at most double per step; children sampled by the exact
    inverse CDF of the truncated exponential on (0, 2x)."""
    kernel = KernelSpec(
        state_kind="positive_real",
        intensity=lambda x: x,
        child_sampler=_geometric_like_children,
        density=geometric_like_density,
        engine_kind=ENGINE_GEOMETRIC_LIKE,
        engine_params=(),
    )
    return ModelCatalogEntry(
        name="geometric_like", kernel=kernel, parameters={},
        known_regimes=(
            RegimeNote("all states", NON_EXPLOSIVE,
                       "avoidance probabilities decay at rate r = e"),
        ),
        default_initial_state=1.0,
        description="truncated-exponential chain supported on (0, 2x)",
        verdict=NON_EXPLOSIVE,
    )


# ---------------------------------------------------------------------------
# Birth-death chain on the positive integers, reflecting at 1
# ---------------------------------------------------------------------------

_SQRT_HALF = 1.0 / math.sqrt(2.0)
_BD_UPPER = (2.0 + math.sqrt(3.0)) / 4.0


def _birth_death_children(delta):
    def children(x, stream):
        if x < 1.5:
            c1 = 2.0
        else:
            c1 = x - 1.0 if stream.next_u01() < delta else x + 1.0
        if x < 1.5:
            c2 = 2.0
        else:
            c2 = x - 1.0 if stream.next_u01() < delta else x + 1.0
        return c1, c2
    return children


def birth_death_kappa(delta: float, b: float) -> float:
    """kappa = max(1/b, b delta^2 + (1-delta^2)/b) for the greedy bound."""
    return max(1.0 / b, b * delta * delta + (1.0 - delta * delta) / b)


def birth_death_decay_rate(delta: float) -> float:
    """Avoidance decay rate r = 1/(2 sqrt(delta(1-delta))) of the
    non-explosive regime."""
    return 1.0 / (2.0 * math.sqrt(delta * (1.0 - delta)))


def make_birth_death(delta: float, b: float = 2.0,
                     intensity: Callable[[float], float] | None = None
                     ) -> ModelCatalogEntry:
    """Reflecting birth-death state chain with intensity b^k (or custom)."""
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    params = {"delta": delta, "b": b}
    if intensity is None:
        if not b > 1.0:
            raise ValueError("b must exceed 1")
        kernel = KernelSpec(
            state_kind="positive_integer",
            intensity=lambda k, _b=b: _b ** k,
            child_sampler=_birth_death_children(delta),
            engine_kind=ENGINE_BIRTH_DEATH,
            engine_params=(delta, b),
        )
    else:
        kernel = KernelSpec(
            state_kind="positive_integer",
            intensity=intensity,
            child_sampler=_birth_death_children(delta),
        )
        params["b"] = None

    verdict, kappa = OPEN, None
    if delta < _SQRT_HALF and intensity is None:
        kappa = birth_death_kappa(delta, b)
        if kappa < 1.0:
            verdict = EXPLOSIVE
        else:
            # b outside (1, delta^-2 - 1): still explosive by comparison
            # with a smaller admissible b, but no direct mean bound.
            verdict = EXPLOSIVE
            kappa = None
    elif delta > _BD_UPPER:
        verdict = NON_EXPLOSIVE

    return ModelCatalogEntry(
        name="birth_death", kernel=kernel, parameters=params,
        known_regimes=(
            RegimeNote("delta in (0, 1/sqrt(2)), intensity b^k", EXPLOSIVE,
                       "greedy-path criterion; kappa = max(1/b, b d^2 + (1-d^2)/b)"),
            RegimeNote("delta in ((2+sqrt(3))/4, 1), any intensity", NON_EXPLOSIVE,
                       "avoidance decay r = 1/(2 sqrt(delta(1-delta))) > 2"),
            RegimeNote("delta in [1/sqrt(2), (2+sqrt(3))/4]", OPEN,
                       "a zero-one event; verdict unknown"),
        ),
        default_initial_state=1.0,
        description="reflecting random walk on {1,2,...} with geometric intensities",
        verdict=verdict,
        explosion_kappa=kappa,
    )


# ---------------------------------------------------------------------------
# KPP cascade in Fourier variables
# ---------------------------------------------------------------------------

def _kpp_h(y: float) -> float:
    t = numerics.PI * abs(y)
    if t < 1e-8:
        return (3.0 / numerics.PI) * (1.0 - t * t / 6.0)
    if t > 700.0:
        return 0.0
    return 3.0 * abs(y) / math.sinh(t)


def _kpp_constants() -> tuple[float, ...]:
    """Envelope constants for the two-stage rejection sampler.

    Proposal magnitude density is proportional to h^{1/4}, itself sampled
    by rejection from a uniform piece on (0, 1) and an exponential tail
    with rate (pi-1)/4; the outer acceptance ratio uses the separable
    envelope with kappa = 3/4.
    """
    pi = numerics.PI
    c1 = (3.0 / pi) ** 0.25
    a_cap = (3.0 / pi) ** 0.25
    beta = (pi - 1.0) / 4.0
    c2s = (6.0 / -math.expm1(-2.0 * pi)) ** 0.25 * math.exp(-0.25) * (1.0 + 1e-12)
    w_low = a_cap
    w_tot = w_low + c2s * math.exp(-beta) / beta
    return (c1, a_cap, beta, c2s, w_low, w_tot)


KPP_PARAMS = _kpp_constants()


def _kpp_children(x, stream):
    c1, a_cap, beta, c2s, w_low, w_tot = KPP_PARAMS
    m_phi = c1 * _kpp_h(0.5 * x) ** 1.5 / ((1.0 + x * x) * _kpp_h(x))
    proposals = 0
    while True:
        proposals += 1
        if proposals > REJECTION_CAP:
            raise SamplingFailureError("KPP rejection sampler exhausted its cap")
        u = stream.next_u01()
        if u * w_tot < w_low:
            y = stream.next_u01()
            env = a_cap
        else:
            y = 1.0 - math.log(stream.next_u01()) / beta
            env = c2s * math.exp(-beta * y)
        g = _kpp_h(y) ** 0.25
        if stream.next_u01() * env >= g:
            continue
        eta = y if stream.next_u01() < 0.5 else -y
        target = _kpp_h(eta) * _kpp_h(x - eta) / ((1.0 + x * x) * _kpp_h(x))
        if stream.next_u01() * (m_phi * g) < target:
            return eta, x - eta


def make_kpp_fourier() -> ModelCatalogEntry:
    """Fourier-side KPP cascade: intensity 1 + xi^2, first child drawn from
    the normalized convolution law, second child xi - first."""
    kernel = KernelSpec(
        state_kind="real",
        intensity=numerics.kpp_intensity,
        child_sampler=_kpp_children,
        density=numerics.kpp_transition_density,
        # The children are the deterministic split (W, xi - W); the joint
        # law is degenerate, so the conditional-independence flag stays off.
        independence_flag=False,
        engine_kind=ENGINE_KPP,
        engine_params=KPP_PARAMS,
    )
    return ModelCatalogEntry(
        name="kpp_fourier", kernel=kernel, parameters={},
        known_regimes=(
            RegimeNote("all states", NON_EXPLOSIVE,
                       "separable envelope criterion with kappa = 3/4"),
        ),
        default_initial_state=1.0,
        description="frequency cascade of the KPP equation; h = 3 xi/sinh(pi xi)",
        verdict=NON_EXPLOSIVE,
    )


# ---------------------------------------------------------------------------
# Bessel cascade (three-dimensional, magnitude chain)
# ---------------------------------------------------------------------------

def _bessel_child(x, stream):
    p_up = -math.expm1(-2.0 * x) / (2.0 * x)
    if stream.next_u01() < p_up:
        return x - 0.5 * math.log(stream.next_u01())
    iterations = 0
    if x <= 1.0:
        while True:
            iterations += 1
            if iterations > REJECTION_CAP:
                raise SamplingFailureError("Bessel rejection sampler exhausted its cap")
            y = x * math.sqrt(stream.next_u01())
            if stream.next_u01() < -math.expm1(-2.0 * y) / (2.0 * y):
                return y
    while True:
        iterations += 1
        if iterations > REJECTION_CAP:
            raise SamplingFailureError("Bessel rejection sampler exhausted its cap")
        y = x * stream.next_u01()
        if stream.next_u01() < -math.expm1(-2.0 * y):
            return y


def _bessel_children(x, stream):
    return _bessel_child(x, stream), _bessel_child(x, stream)


def make_bessel_nse3() -> ModelCatalogEntry:
    """Bessel magnitude cascade: intensity x^2, children conditionally
    independent draws from the closed-form transition density.

    The non-explosion argument only constrains the path marginal; sampling
    the two children independently given the parent is the choice consistent
    with the convolution structure of the frequency split.
    """
    kernel = KernelSpec(
        state_kind="positive_real",
        intensity=lambda x: x * x,
        child_sampler=_bessel_children,
        density=numerics.bessel_transition_density,
        engine_kind=ENGINE_BESSEL3,
        engine_params=(),
    )
    return ModelCatalogEntry(
        name="bessel_nse3", kernel=kernel, parameters={},
        known_regimes=(
            RegimeNote("all states", NON_EXPLOSIVE,
                       "reversible domination criterion, alpha = 5, c1 = c2 = 2"),
        ),
        default_initial_state=1.0,
        description="magnitude chain reversible w.r.t. 4x e^{-2x}",
        verdict=NON_EXPLOSIVE,
    )


# ---------------------------------------------------------------------------
# Scale-invariant cascade in dimension d
# ---------------------------------------------------------------------------

def _nse_joint(d):
    m = d - 3

    def joint(stream):
        proposals = 0
        while True:
            proposals += 1
            if proposals > REJECTION_CAP:
                raise SamplingFailureError(
                    "angular rejection sampler exhausted its cap")
            u = stream.next_u01()
            v = stream.next_u01()
            if u + v > 1.0:
                u = 1.0 - u
                v = 1.0 - v
            ss = math.sin(numerics.PI * (u + v))
            if ss < 1e-14:
                continue
            if m > 0 and stream.next_u01() >= _ipow(ss, m):
                continue
            r1 = math.sin(numerics.PI * v) / ss
            r2 = math.sin(numerics.PI * u) / ss
            return r1, r2
    return joint


def make_nse_selfsimilar(d: int) -> ModelCatalogEntry:
    """Scale-invariant magnitude cascade in dimension d >= 3.

    Child ratios are the sides of the random triangle with unit base and
    base angles drawn from the density proportional to
    sin^{d-3}(phi1 + phi2); at d = 3 the angles are uniform, for d > 3 they
    are sampled by rejection from the uniform proposal (acceptance decays
    with d; intended for d <= 64).
    """
    if d < 3 or d != int(d):
        raise ValueError("dimension must be an integer >= 3")
    d = int(d)
    kernel = make_selfsimilar(
        intensity=lambda x: x * x,
        joint_ratio_sampler=_nse_joint(d),
        ratio_density=(numerics.dilog_density if d == 3 else
                       (lambda r: numerics.ratio_density_d(d, r).value)),
        engine_kind=ENGINE_NSE_SELFSIMILAR,
        engine_params=(float(d),),
    )
    if d == 3:
        verdict, kappa = EXPLOSIVE, numerics.kappa_d(3)
    elif d >= 12:
        verdict, kappa = NON_EXPLOSIVE, None
    else:
        verdict, kappa = OPEN, None
    return ModelCatalogEntry(
        name="nse_selfsimilar", kernel=kernel, parameters={"d": d},
        known_regimes=(
            RegimeNote("d = 3", EXPLOSIVE,
                       "greedy-path criterion with kappa = 8/pi^2"),
            RegimeNote("d >= 12", NON_EXPLOSIVE,
                       "ratio moment alpha_d = E[R^{(d-3)/2}] < 1/2"),
            RegimeNote("4 <= d <= 11", OPEN,
                       "a zero-one event; verdict unknown"),
        ),
        default_initial_state=1.0,
        description="dilogarithmic cascade at d=3; uniform-triangle angles",
        verdict=verdict,
        explosion_kappa=kappa,
    )


# ---------------------------------------------------------------------------
# Complex Burgers cascade
# ---------------------------------------------------------------------------

def _burgers_joint(stream):
    return stream.next_u01(), stream.next_u01()


def make_complex_burgers() -> ModelCatalogEntry:
    """Self-similar cascade with uniform(0,1) ratios and intensity x^2.

    The path marginal pins each child ratio to U(0,1); the joint law is not
    specified by the model, so the two children use independent uniforms.
    """
    kernel = make_selfsimilar(
        intensity=lambda x: x * x,
        joint_ratio_sampler=_burgers_joint,
        ratio_density=lambda r: 1.0 if 0.0 < r < 1.0 else 0.0,
        engine_kind=ENGINE_COMPLEX_BURGERS,
        engine_params=(),
    )
    return ModelCatalogEntry(
        name="complex_burgers", kernel=kernel, parameters={},
        known_regimes=(
            RegimeNote("all states", NON_EXPLOSIVE,
                       "ratio moment E[R^2] = 1/3 < 1/2"),
        ),
        default_initial_state=1.0,
        description="multiplicative uniform cascade of the complex Burgers equation",
        verdict=NON_EXPLOSIVE,
    )


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------

CATALOG: dict[str, Callable[..., ModelCatalogEntry]] = {
    "yule": make_yule,
    "alpha_riccati": make_alpha_riccati,
    "mean_field": make_mean_field,
    "geometric_like": make_geometric_like,
    "birth_death": make_birth_death,
    "kpp_fourier": make_kpp_fourier,
    "bessel_nse3": make_bessel_nse3,
    "nse_selfsimilar": make_nse_selfsimilar,
    "complex_burgers": make_complex_burgers,
}

_BUILDER_PARAMS = {
    "yule": (),
    "alpha_riccati": ("alpha",),
    "mean_field": ("rate",),
    "geometric_like": (),
    "birth_death": ("delta", "b"),
    "kpp_fourier": (),
    "bessel_nse3": (),
    "nse_selfsimilar": ("d",),
    "complex_burgers": (),
}


def build_model(name: str, **params) -> ModelCatalogEntry:
    """Build a catalog model from its name and a parameter map."""
    try:
        builder = CATALOG[name]
    except KeyError:
        raise KeyError(f"unknown model {name!r}; known: {sorted(CATALOG)}") from None
    allowed = _BUILDER_PARAMS[name]
    unknown = set(params) - set(allowed)
    if unknown:
        raise ValueError(f"model {name!r} does not accept parameters {sorted(unknown)}")
    if name == "nse_selfsimilar" and "d" in params:
        params["d"] = int(params["d"])
    return builder(**params)


def model_names() -> list[str]:
    return sorted(CATALOG)
