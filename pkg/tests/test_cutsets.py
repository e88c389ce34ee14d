"""Inspection process, passage cutsets, reduced-tree inspection."""

import math

import numpy as np
import pytest

from dsycascade import build_model, rng
from dsycascade.cutsets import (admissible_epsilon_bound, passage_cutsets,
                                reduced_tree_inspection, run_inspection,
                                uniform_offspring,
                                verify_cutset_cardinality_bound)
from dsycascade.kernels import below_threshold, everything
from dsycascade.models import mean_field_threshold_for_tail
from dsycascade.vertex import Vertex


def test_inspection_entire_space_stops_immediately():
    entry = build_model("mean_field")
    tr = run_inspection(entry.kernel, 1.0, everything(), 10, seed=0)
    assert tr.generations == (1, 0)
    assert tr.stopped and tr.stop_generation == 1


def test_inspection_trace_invariants():
    entry = build_model("mean_field")
    c = mean_field_threshold_for_tail(0.4)
    for rep in range(200):
        tr = run_inspection(entry.kernel, 1.0, below_threshold(c), 12,
                            seed=1, replica=rep)
        z = tr.generations
        assert z[0] == 1
        for a, b in zip(z, z[1:]):
            assert b <= 2 * a
            if a == 0:
                assert b == 0
        assert tr.stopped == (z[-1] == 0)


def test_inspection_mean_matches_survival_rate():
    entry = build_model("mean_field")
    q = 0.4
    c = mean_field_threshold_for_tail(q)
    reps = 20_000
    z3 = np.zeros(reps)
    for rep in range(reps):
        gens = run_inspection(entry.kernel, 1.0, below_threshold(c), 3,
                              seed=2, replica=rep).generations
        if len(gens) >= 4:
            z3[rep] = gens[3]
    mean = z3.mean()
    se = z3.std(ddof=1) / math.sqrt(reps)
    assert abs(mean - (2 * q) ** 3) <= 3 * se


def test_inspection_geometric_like_subcritical_bound():
    # Survivors require states above 1; mean count is at most (2/e)^n.
    entry = build_model("geometric_like")
    reps = 20_000
    vals = np.zeros(reps)
    for rep in range(reps):
        tr = run_inspection(entry.kernel, 2.0, below_threshold(1.0), 4,
                            seed=3, replica=rep)
        if len(tr.generations) >= 5:
            vals[rep] = tr.generations[4]
    mean = vals.mean()
    se = vals.std(ddof=1) / math.sqrt(reps) or 1e-9
    assert mean <= (2.0 / math.e) ** 4 + 3 * se


def test_passage_cutset_entire_space_is_first_generation():
    entry = build_model("mean_field")
    sets = passage_cutsets(entry.kernel, 1.0, everything(), 1, 10**5, seed=0)
    assert sets[0].members == frozenset({Vertex.from_word([1]),
                                         Vertex.from_word([2])})
    assert sets[0].cardinality == 2 and sets[0].complete


def _antichain(members):
    members = list(members)
    for i, u in enumerate(members):
        for v in members[i + 1:]:
            if u.is_prefix_of(v) or v.is_prefix_of(u):
                return False
    return True


def test_passage_cutsets_are_antichains_and_nested():
    entry = build_model("mean_field")
    c = mean_field_threshold_for_tail(0.25)
    A = below_threshold(c)
    for rep in range(100):
        sets = passage_cutsets(entry.kernel, 1.0, A, 3, 10**5, seed=4,
                               replica=rep)
        assert len(sets) == 3
        for s in sets:
            assert s.complete
            assert _antichain(s.members)
            assert s.max_depth >= s.index
        depths = [s.max_depth for s in sets]
        assert depths[0] < depths[1] < depths[2]
        # every deeper member extends exactly one member of the previous set
        for prev, cur in zip(sets, sets[1:]):
            for v in cur.members:
                above = [u for u in prev.members if u.is_prefix_of(v)]
                assert len(above) == 1


def test_cutset_separation_on_explored_tree():
    # Each member's strict prefixes avoid A after their first passage,
    # i.e. the cutset meets every explored path exactly once.
    entry = build_model("mean_field")
    c = mean_field_threshold_for_tail(0.25)
    A = below_threshold(c)
    sets = passage_cutsets(entry.kernel, 1.0, A, 1, 10**5, seed=5)
    root_key = rng.root_key(5, 0)

    def state_of(vertex):
        x = 1.0
        key = root_key
        for j in range(1, vertex.depth + 1):
            pair = entry.kernel.child_sampler(x, rng.StateStream(key))
            branch = vertex.symbol(j)
            x = pair[branch - 1]
            key = rng.child_key(key, branch)
        return x

    for v in sets[0].members:
        assert A(state_of(v))
        for j in range(1, v.depth):
            assert not A(state_of(v.prefix(j)))


def test_cutset_incomplete_flag_small_budget():
    entry = build_model("mean_field")
    # Tail probability ~ 1: nearly supercritical avoidance; tiny budget trips.
    A = below_threshold(1e-9)
    sets = passage_cutsets(entry.kernel, 1.0, A, 2, 50, seed=6)
    assert not sets[-1].complete
    assert len(sets) <= 2


def test_cutset_bound_report_mean_field():
    entry = build_model("mean_field")
    c = mean_field_threshold_for_tail(0.25)
    report = verify_cutset_cardinality_bound(
        entry.kernel, 1.0, below_threshold(c), psi=lambda x: 1.0, r=4.0,
        k=2, replicas=2000, seed=7, M=1.0)
    assert report.mu == pytest.approx(6.0)
    assert report.rows[0].bound == pytest.approx(6.0)
    assert report.rows[1].bound == pytest.approx(36.0)
    assert report.all_satisfied
    assert report.incomplete_replicas == 0


def test_cutset_bound_two_seeds_overlap():
    entry = build_model("mean_field")
    c = mean_field_threshold_for_tail(0.25)
    means = []
    ses = []
    for seed in (11, 12):
        report = verify_cutset_cardinality_bound(
            entry.kernel, 1.0, below_threshold(c), psi=lambda x: 1.0, r=4.0,
            k=1, replicas=4000, seed=seed, M=1.0)
        means.append(report.rows[0].mean_cardinality)
        ses.append(report.rows[0].se)
    assert abs(means[0] - means[1]) <= 3 * math.hypot(*ses)


def test_cutset_bound_validation():
    entry = build_model("mean_field")
    with pytest.raises(ValueError):
        verify_cutset_cardinality_bound(entry.kernel, 1.0, everything(),
                                        psi=lambda x: 1.0, r=2.0, k=1,
                                        replicas=10, seed=0, M=1.0)
    with pytest.raises(ValueError):
        verify_cutset_cardinality_bound(entry.kernel, 1.0, everything(),
                                        psi=lambda x: 5.0, r=4.0, k=1,
                                        replicas=10, seed=0, M=1.0)


# -- reduced tree -------------------------------------------------------------

def test_admissible_epsilon_values():
    assert admissible_epsilon_bound(2.1) == pytest.approx(math.log(2.1 / 1.1))
    assert 0.2 < admissible_epsilon_bound(2.1)
    with pytest.raises(ValueError):
        admissible_epsilon_bound(1.0)


def test_reduced_tree_epsilon_validation_and_default():
    sampler = uniform_offspring(1, 5)
    with pytest.raises(ValueError):
        reduced_tree_inspection(sampler, 6.0, 0.2, 10, seed=0)
    tr = reduced_tree_inspection(sampler, 6.0, None, 10, seed=0)
    assert tr.generations[0] == 1


def test_reduced_tree_tiny_epsilon_stops_at_once():
    sampler = uniform_offspring(1, 5)
    stopped = sum(
        reduced_tree_inspection(sampler, 6.0, 1e-9, 5, seed=1, replica=r).stop_generation == 1
        for r in range(200))
    assert stopped >= 198


def test_reduced_tree_subcritical_decay():
    sampler = uniform_offspring(1, 5)
    nu, eps = 6.0, 0.1
    dn = (1 - math.exp(-eps)) * nu
    reps = 5000
    V = np.zeros((reps, 4))
    for rep in range(reps):
        tr = reduced_tree_inspection(sampler, nu, eps, 3, seed=2, replica=rep)
        vals = tr.generations
        V[rep, :len(vals)] = vals
    for n in range(2):
        num, den = V[:, n + 1], V[:, n]
        ratio = num.mean() / den.mean()
        assert ratio <= dn + 0.05


def test_uniform_offspring_range():
    sampler = uniform_offspring(1, 5)
    draws = [sampler(rng.StateStream(rng.root_key(3, r))) for r in range(5000)]
    assert set(draws) == {1, 2, 3, 4, 5}
    mean = np.mean(draws)
    assert abs(mean - 3.0) < 3 * np.std(draws) / math.sqrt(5000)
