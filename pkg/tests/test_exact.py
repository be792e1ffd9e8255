import numpy as np
import pytest

from heavytails.chimera import build_chimera
from heavytails.exact import (SAT, GroundTruth, WidthExceeded, _sat_add, _sat_mul, best_found_ground,
                              column_dp_ground, exhaustive_ground, ground_truth, read_ground_cache,
                              write_ground_cache)
from heavytails.instances import Gauge, from_couplings, sample_uk, spin_reversal
from heavytails.ising import energy_int

import oracles


def _dict(inst):
    return {tuple(e): int(J) for e, J in zip(inst.edges.tolist(), inst.J.tolist())}


def test_small_examples():
    ferro = from_couplings(3, {(0, 1): -1, (1, 2): -1})
    assert (exhaustive_ground(ferro).ground_energy, exhaustive_ground(ferro).degeneracy) == (-2, 2)
    tri = from_couplings(3, {(0, 1): 1, (1, 2): 1, (0, 2): 1})
    assert exhaustive_ground(tri).degeneracy == 6
    free = from_couplings(4, {})
    assert (exhaustive_ground(free).ground_energy, exhaustive_ground(free).degeneracy) == (0, 16)


def test_exhaustive_against_oracle(rng):
    for _ in range(5):
        inst = sample_uk(build_chimera(1, rng.choice(8, 2, replace=False).tolist()), 3, rng)
        gt = exhaustive_ground(inst)
        assert (gt.ground_energy, gt.degeneracy) == oracles.ground(inst.n, _dict(inst))
        assert energy_int(inst, gt.state) == gt.ground_energy


def test_dp_equals_exhaustive(rng):
    for t in range(20):
        dead = rng.choice(32, size=int(rng.integers(8, 14)), replace=False).tolist()
        inst = sample_uk(build_chimera(2, dead), (1, 4)[t % 2], rng)
        a, b = exhaustive_ground(inst), column_dp_ground(inst)
        assert (a.ground_energy, a.degeneracy) == (b.ground_energy, b.degeneracy)
        assert energy_int(inst, b.state) == b.ground_energy


def test_dp_single_column_and_fields(rng):
    inst = sample_uk(build_chimera(1), 2, rng)
    inst = spin_reversal(inst, Gauge.random(inst.n, rng))
    assert column_dp_ground(inst).degeneracy == exhaustive_ground(inst).degeneracy


def test_dp_gauge_invariant_c4(rng):
    inst = sample_uk(build_chimera(4, [45]), 1, rng)
    a = column_dp_ground(inst)
    b = column_dp_ground(spin_reversal(inst, Gauge.random(inst.n, rng)), return_state=False)
    assert (a.ground_energy, a.degeneracy) == (b.ground_energy, b.degeneracy)
    assert energy_int(inst, a.state) == a.ground_energy


def test_zero_couplings_degeneracy_saturates():
    g = build_chimera(2)
    inst = sample_uk(g, 1, np.random.default_rng(0))
    zero = type(inst)(n=inst.n, edges=inst.edges, J=np.zeros_like(inst.J), h=inst.h, L=2, qubits=inst.qubits)
    assert column_dp_ground(zero).degeneracy == 2**32
    big = build_chimera(4)
    zinst = sample_uk(big, 1, np.random.default_rng(0))
    zinst = type(zinst)(n=zinst.n, edges=zinst.edges, J=np.zeros_like(zinst.J), h=zinst.h, L=4, qubits=zinst.qubits)
    assert column_dp_ground(zinst, return_state=False).degeneracy == int(SAT)


def test_saturating_helpers():
    a = np.array([SAT, 5, SAT - 1], dtype=np.int64)
    assert _sat_add(a, np.array([1, 1, 5])).tolist() == [SAT, 6, SAT]
    assert _sat_mul(a, np.array([2, 3, 2])).tolist() == [SAT, 15, SAT]


def test_width_budget(rng):
    inst = sample_uk(build_chimera(3), 1, rng)
    with pytest.raises(WidthExceeded):
        column_dp_ground(inst, max_width=8)
    with pytest.raises(WidthExceeded):
        exhaustive_ground(inst)


def test_ground_truth_method(rng):
    assert ground_truth(sample_uk(build_chimera(3), 1, rng)).method == "column_dp"
    assert ground_truth(from_couplings(3, {(0, 1): 1})).method == "exhaustive"


def test_best_found():
    inst = from_couplings(2, {(0, 1): -1})
    gt = best_found_ground(inst, {"sa": [3, -1, 1], "noisy": [1]})
    assert gt.ground_energy == -1 and gt.degeneracy is None and not gt.exact
    with pytest.raises(ValueError):
        best_found_ground(inst, {"sa": []})


def test_cache_roundtrip(tmp_path):
    truths = {"b": GroundTruth(-10, 4, "column_dp"), "a": GroundTruth(-3, None, "best_found")}
    path = tmp_path / "ground.csv"
    write_ground_cache(path, truths)
    back = read_ground_cache(path)
    assert back == {k: GroundTruth(v.ground_energy, v.degeneracy, v.method) for k, v in truths.items()}
    assert path.read_text().splitlines()[1].startswith("a,")


def test_traceback_state_is_ground_for_every_instance(rng):
    for _ in range(5):
        inst = sample_uk(build_chimera(3, rng.choice(72, 6, replace=False).tolist()), 2, rng)
        gt = column_dp_ground(inst)
        assert energy_int(inst, gt.state) == gt.ground_energy
        assert set(np.unique(gt.state).tolist()) <= {-1, 1}
