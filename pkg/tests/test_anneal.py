import math

import numpy as np
import pytest

from heavytails.anneal import (DEFAULT_SWEEPS, NoiseModel, SASchedule, StopRule, acceptance_table, anneal,
                               noisy_sa, optimize_sweeps, sa_batch, sa_sample, sample_fixed_beta, sample_seeds)
from heavytails.chimera import build_chimera
from heavytails.exact import column_dp_ground
from heavytails.instances import apply_scale, from_couplings, sample_uk
from heavytails.ising import energy_int

import oracles


def test_schedule_validation():
    with pytest.raises(ValueError):
        SASchedule(beta0=1.0, beta_final=1.0)
    with pytest.raises(ValueError):
        SASchedule(beta0=-0.1)
    with pytest.raises(ValueError):
        SASchedule(sweeps=0)
    sch = SASchedule(0.0, 2.0, 5)
    assert sch.betas().tolist() == [0.0, 0.5, 1.0, 1.5, 2.0]
    assert SASchedule(sweeps=1).betas().tolist() == [5.0]


def test_stop_rule_validation():
    with pytest.raises(ValueError):
        StopRule(batch_size=0)
    with pytest.raises(ValueError):
        NoiseModel(-0.1)


def test_two_spin_ferromagnet(rng):
    inst = from_couplings(2, {(0, 1): -1})
    state, e = sa_sample(inst, SASchedule(sweeps=100), rng)
    assert e == -1.0 and state[0] == state[1]


def test_near_uniform_at_infinite_temperature(rng):
    inst = from_couplings(4, {(0, 1): -1, (1, 2): -1, (2, 3): -1})
    states, _ = anneal(inst, SASchedule(0.0, 1e-9, 1), sample_seeds(rng, 16_000))
    codes = ((states < 0) * (1 << np.arange(4))).sum(axis=1)
    counts = np.bincount(codes, minlength=16)
    chi2 = ((counts - 1000) ** 2 / 1000).sum()
    # 0.999 quantile of chi-square with 15 degrees of freedom is 37.7
    assert chi2 < 37.7


def test_acceptance_table_covers_worst_move():
    inst = from_couplings(3, {(0, 1): 2, (1, 2): -3}, {1: 1})
    table = acceptance_table(inst, np.array([0.0, 1.0]))
    assert table.shape == (2, 2 * 6 + 1)
    assert table[0].tolist() == [1.0] * 13
    assert table[1, 4] == pytest.approx(math.exp(-4))


def test_alpha_is_temperature_rescaling():
    inst = from_couplings(2, {(0, 1): -1})
    t1 = acceptance_table(apply_scale(inst, 0.5), np.array([2.0]))
    t2 = acceptance_table(inst, np.array([1.0]))
    np.testing.assert_allclose(t1, t2)


def test_energies_exact(rng):
    inst = sample_uk(build_chimera(2), 3, rng)
    states, energies = anneal(inst, SASchedule(sweeps=16), sample_seeds(rng, 30))
    assert np.array_equal(energies, energy_int(inst, states))


def test_same_seeds_same_output(rng):
    inst = sample_uk(build_chimera(2), 1, rng)
    seeds = sample_seeds(rng, 10)
    a, b = anneal(inst, SASchedule(sweeps=20), seeds), anneal(inst, SASchedule(sweeps=20), seeds)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


def test_boltzmann_total_variation(rng):
    couplings = {(0, 1): -1, (1, 2): 1, (2, 3): -1, (0, 3): -1}
    h = {0: 1}
    inst = from_couplings(4, couplings, h)
    beta = 0.7
    states, _ = sample_fixed_beta(inst, beta, 200, 20_000, rng)
    ref = oracles.boltzmann(4, couplings, h, beta)
    emp = {}
    for s in map(tuple, states.tolist()):
        emp[s] = emp.get(s, 0) + 1 / len(states)
    tv = 0.5 * sum(abs(emp.get(s, 0.0) - p) for s, p in ref.items())
    assert tv <= 0.02


def test_batches_are_atomic(rng):
    inst = sample_uk(build_chimera(1), 1, rng)
    res = sa_batch(inst, SASchedule(sweeps=64), column_dp_ground(inst).ground_energy,
                   StopRule(batch_size=70, target_hits=1, max_samples=1000), rng)
    assert res.n_samples == 70 and res.n_ground_hits >= 1


def test_unreachable_ground_is_censored(rng):
    inst = from_couplings(2, {(0, 1): -1})
    res = sa_batch(inst, SASchedule(sweeps=8), -5, StopRule(50, 10, 200), rng)
    assert res.n_samples == 200 and res.p_hat == 0.0 and math.isinf(res.R)
    best, _, table = optimize_sweeps(inst, -5, (8, 16), stop=StopRule(50, 10, 100), rng=rng)
    assert best is None and set(table) == {8, 16}


def test_optimize_picks_shortest_on_easy_instance(rng):
    inst = from_couplings(2, {(0, 1): -1})
    best, res, table = optimize_sweeps(inst, -1, DEFAULT_SWEEPS, stop=StopRule(100, 100, 1000), rng=rng)
    assert best == 8 and res.p_hat == 1.0
    assert res.time_to_solution_ns == pytest.approx(8 * 2 / 6.65)


def test_record_has_no_timing(rng):
    inst = from_couplings(2, {(0, 1): -1})
    res = sa_batch(inst, SASchedule(sweeps=8), -1, StopRule(10, 10, 10), rng)
    rec = res.to_record()
    assert rec["ground_hits"] == 10 and "wall_s" not in rec


def test_noisy_zero_sigma(rng):
    inst = sample_uk(build_chimera(1), 2, rng)
    e0 = column_dp_ground(inst).ground_energy
    out = noisy_sa(inst, NoiseModel(0.0), SASchedule(sweeps=64), e0, gauges=3, reps=2,
                   stop=StopRule(50, 10**9, 100), rng=rng)
    assert len(out) == 6
    assert [(r.extra["gauge"], r.extra["rep"]) for r in out] == [(g, r) for g in range(3) for r in range(2)]
    for r in out:
        assert r.n_samples == 100
        assert np.array_equal(energy_int(inst, r.states), r.energies)
        assert r.energies.min() >= e0


def test_noisy_states_scored_on_clean_hamiltonian(rng):
    inst = sample_uk(build_chimera(1), 1, rng)
    e0 = column_dp_ground(inst).ground_energy
    out = noisy_sa(inst, NoiseModel(0.3), SASchedule(sweeps=64), e0, gauges=2, reps=2,
                   stop=StopRule(50, 10**9, 50), rng=rng)
    for r in out:
        assert r.energies.dtype == np.int64
        assert np.array_equal(energy_int(inst, r.states), r.energies)


def test_uniform_mean_energy_single_sweep(rng):
    couplings = {(0, 1): -1, (1, 2): -1, (2, 3): -1}
    inst = from_couplings(4, couplings)
    _, energies = anneal(inst, SASchedule(0.0, 1e-9, 1), sample_seeds(rng, 4000))
    levels = oracles.spectrum(4, couplings)
    mu, sd = np.mean(levels), np.std(levels)
    assert abs(energies.mean() - mu) <= 3 * sd / np.sqrt(len(energies))


def test_median_success_grows_with_sweeps(rng):
    suite = [sample_uk(build_chimera(2), 1, rng) for _ in range(20)]
    grounds = [column_dp_ground(inst).ground_energy for inst in suite]
    medians = []
    for sweeps in (8, 32, 128, 512):
        p = [sa_batch(inst, SASchedule(sweeps=sweeps), e0, StopRule(200, 10**9, 200), rng).p_hat
             for inst, e0 in zip(suite, grounds)]
        medians.append(float(np.median(p)))
    assert all(a <= b for a, b in zip(medians, medians[1:]))


def test_gauge_equivariance_statistical(rng):
    from heavytails.instances import Gauge, spin_reversal
    from heavytails.metrics import two_proportion_z

    inst = sample_uk(build_chimera(2), 1, rng)
    e0 = column_dp_ground(inst).ground_energy
    ginst = spin_reversal(inst, Gauge.random(inst.n, rng))
    a = sa_batch(inst, SASchedule(sweeps=32), e0, StopRule(500, 10**9, 2000), rng)
    b = sa_batch(ginst, SASchedule(sweeps=32), e0, StopRule(500, 10**9, 2000), rng)
    z, _ = two_proportion_z(a.n_ground_hits, a.n_samples, b.n_ground_hits, b.n_samples)
    assert abs(z) < 2.576
