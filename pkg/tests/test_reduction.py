import numpy as np
import pytest

from heavytails.chimera import Subgraph, build_chimera
from heavytails.reduction import (ReductionConfig, ReductionFailed, degree_distribution, reduce_to_degree,
                                  removable_edges)

from oracles import removable_bruteforce


def test_config_validation():
    for d in (3, 4, 5, 6):
        ReductionConfig(d)
    for bad in (2, 7, 0):
        with pytest.raises(ValueError):
            ReductionConfig(bad)
    with pytest.raises(ValueError):
        ReductionConfig(3, max_restarts=0)


def test_pristine_cell_all_removable():
    g = build_chimera(1)
    assert len(removable_edges(Subgraph.full(g), 3)) == 16


def test_already_at_target():
    g = build_chimera(4)
    assert removable_edges(Subgraph.full(g), 6) == set()
    red = reduce_to_degree(g, ReductionConfig(6), np.random.default_rng(0))
    assert red.removed == () and np.array_equal(red.subgraph.edges, g.edges)


def test_matches_bruteforce_on_intermediate_graphs():
    """Replay seeded C2 reductions and compare the rule set at every step."""
    checked = 0
    for seed in range(100):
        d = 3 + seed % 3
        dead = [] if seed % 4 else [int(seed % 32)]
        g = build_chimera(2, dead)
        red = reduce_to_degree(g, ReductionConfig(d), np.random.default_rng(seed))
        active = np.ones(len(g.edges), dtype=bool)
        for e in (None,) + red.removed:
            if e is not None:
                active[e] = False
            sub = Subgraph(g, active.copy())
            edges = {tuple(x) for x in sub.edges.tolist()}
            assert removable_edges(sub, d) == removable_bruteforce(edges, 2, d)
            checked += 1
    assert checked > 1000


@pytest.mark.parametrize("d", [3, 4, 5, 6])
def test_outputs_connected_and_at_degree(d):
    g = build_chimera(4, [45])
    rng = np.random.default_rng(d)
    for _ in range(10):
        sub = reduce_to_degree(g, ReductionConfig(d), rng).subgraph
        deg = sub.degrees()[sub.operable]
        assert deg.max() == d
        assert deg.min() >= 2
        assert sub.is_connected()


def test_deterministic_from_seed():
    g = build_chimera(3)
    a = reduce_to_degree(g, ReductionConfig(3, seed=11))
    b = reduce_to_degree(g, ReductionConfig(3, seed=11))
    assert a.removed == b.removed
    assert np.array_equal(a.subgraph.edges, b.subgraph.edges)


def test_restart_budget_reported(monkeypatch):
    import heavytails.reduction as red

    monkeypatch.setattr(red, "_attempt", lambda start, d, rng: (None, []))
    with pytest.raises(ReductionFailed) as info:
        reduce_to_degree(build_chimera(2), ReductionConfig(3, max_restarts=4), np.random.default_rng(0))
    assert info.value.attempts == 4


def test_degree_distribution_examples():
    assert degree_distribution(build_chimera(1)) == {4: 1.0}
    assert degree_distribution(build_chimera(2, range(32))) == {0: 1.0}
    dist = degree_distribution(build_chimera(3))
    assert abs(sum(dist.values()) - 1) < 1e-12
