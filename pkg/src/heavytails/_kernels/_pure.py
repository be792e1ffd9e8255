"""Pure numpy implementations of the hot kernels.

Both backends consume randomness identically: every sample owns a SplitMix64
stream seeded from ``seeds[s]``, draws ``n`` uniforms for its initial state
and then exactly one uniform per attempted spin update. Integer annealing is
therefore bit-identical across backends.
"""
from __future__ import annotations

import numpy as np

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
MIX1 = np.uint64(0xBF58476D1CE4E5B9)
MIX2 = np.uint64(0x94D049BB133111EB)
SAT_MAX = np.iinfo(np.int64).max
_INV53 = 2.0 ** -53


def _next_uniform(state: np.ndarray) -> np.ndarray:
    """Advance SplitMix64 streams in place; return one uniform in [0, 1) per stream."""
    with np.errstate(over="ignore"):
        state += GOLDEN
        z = state.copy()
        z = (z ^ (z >> np.uint64(30))) * MIX1
        z = (z ^ (z >> np.uint64(27))) * MIX2
        z ^= z >> np.uint64(31)
    return (z >> np.uint64(11)).astype(np.float64) * _INV53


def _initial_states(rng_state: np.ndarray, n: int) -> np.ndarray:
    spins = np.empty((len(rng_state), n), dtype=np.int8)
    for i in range(n):
        spins[:, i] = np.where(_next_uniform(rng_state) < 0.5, 1, -1)
    return spins


def _energies(indptr, indices, J, h, spins):
    s = spins.astype(np.int64)
    e = s @ h
    for i in range(len(indptr) - 1):
        nb = slice(indptr[i], indptr[i + 1])
        upper = indices[nb] > i
        if upper.any():
            e = e + s[:, i] * (s[:, indices[nb][upper]] @ J[nb][upper])
    return e


def anneal_int(indptr, indices, J, h, table, seeds):
    """Metropolis annealing with integer couplings.

    ``table[t, m]`` is the acceptance probability of an uphill move costing
    ``m`` integer energy units during sweep ``t``.
    """
    n = len(indptr) - 1
    rng_state = np.array(seeds, dtype=np.uint64, copy=True)
    spins = _initial_states(rng_state, n)
    energy = _energies(indptr, indices, J, h, spins)
    S = spins.astype(np.int64)
    for t in range(table.shape[0]):
        acc_row = table[t]
        for i in range(n):
            nb = slice(indptr[i], indptr[i + 1])
            heff = S[:, indices[nb]] @ J[nb] + h[i]
            dE = -2 * S[:, i] * heff
            u = _next_uniform(rng_state)
            prob = acc_row[np.clip(dE, 0, len(acc_row) - 1)]
            flip = (dE <= 0) | (u < prob)
            S[flip, i] *= -1
            energy += np.where(flip, dE, 0)
    return S.astype(np.int8), energy


def anneal_float(indptr, indices, J, h, betas, seeds):
    """Metropolis annealing with real couplings; acceptance exp(-beta * dE)."""
    n = len(indptr) - 1
    rng_state = np.array(seeds, dtype=np.uint64, copy=True)
    spins = _initial_states(rng_state, n)
    S = spins.astype(np.float64)
    energy = _energies(indptr, indices, J, h, S)
    for beta in betas:
        for i in range(n):
            nb = slice(indptr[i], indptr[i + 1])
            heff = S[:, indices[nb]] @ J[nb] + h[i]
            dE = -2.0 * S[:, i] * heff
            u = _next_uniform(rng_state)
            with np.errstate(over="ignore"):
                flip = (dE <= 0) | (u < np.exp(-beta * dE))
            S[flip, i] *= -1
            energy += np.where(flip, dE, 0.0)
    return S.astype(np.int8), energy


def enumerate_ground(indptr, indices, J, h, chunk_bits: int = 18):
    """Minimum energy, its (saturating) multiplicity and one minimizing code.

    State code bit ``i`` set means spin ``i`` is -1.
    """
    n = len(indptr) - 1
    best, count, arg = None, 0, 0
    if n == 0:
        return 0, 1, 0
    edges = [(i, int(j), int(J[p])) for i in range(n)
             for p, j in zip(range(indptr[i], indptr[i + 1]), indices[indptr[i]:indptr[i + 1]]) if j > i]
    cb = min(chunk_bits, n)
    low = np.arange(2 ** cb, dtype=np.uint64)
    low_spins = (1 - 2 * ((low[:, None] >> np.arange(cb, dtype=np.uint64)) & np.uint64(1))).astype(np.int64)
    for hi in range(2 ** (n - cb)):
        spins = np.empty((len(low), n), dtype=np.int64)
        spins[:, :cb] = low_spins
        if n > cb:
            hbits = (hi >> np.arange(n - cb)) & 1
            spins[:, cb:] = 1 - 2 * hbits
        e = spins @ np.asarray(h, dtype=np.int64)
        for i, j, c in edges:
            e += c * spins[:, i] * spins[:, j]
        m = int(e.min())
        hits = int(np.count_nonzero(e == m))
        if best is None or m < best:
            best, count = m, hits
            arg = (hi << cb) | int(np.flatnonzero(e == m)[0])
        elif m == best:
            count = min(count + hits, int(SAT_MAX))
    return best, count, arg


def descend(indptr, indices, J, h, eps, delta, thetas, tol, maxiter):
    """Half-step coordinate descent toward the local optimum of each rotor.

    Rotors are tracked as unit vectors (cos, sin); the midpoint of two
    angles in [0, pi] is the normalized sum of their vectors, so no inverse
    trigonometry is needed inside the loop. Updates ``thetas`` (K x n) in
    place. Returns per-candidate pass counts, final residuals
    max_i |theta_i - theta*_i| and the largest single coordinate energy
    increase observed (should never exceed round-off).
    """
    K, n = thetas.shape
    iters = np.zeros(K, dtype=np.int64)
    residual = np.full(K, np.inf)
    worst = np.zeros(K)
    active = np.arange(K)
    cos_t = np.cos(thetas)
    sin_t = np.sin(thetas)
    b = float(delta)
    for _ in range(maxiter):
        if len(active) == 0:
            break
        ct = cos_t[active]
        st = sin_t[active]
        chord = np.zeros(len(active))
        for i in range(n):
            nb = slice(indptr[i], indptr[i + 1])
            a = eps * (ct[:, indices[nb]] @ J[nb] + h[i])
            R = np.hypot(a, b)
            live = R > 0.0
            Rs = np.where(live, R, 1.0)
            tc = np.where(live, -a / Rs, ct[:, i])
            ts = np.where(live, b / Rs, st[:, i])
            np.maximum(chord, np.hypot(ct[:, i] - tc, st[:, i] - ts), out=chord)
            bx, by = ct[:, i] + tc, st[:, i] + ts
            norm = np.hypot(bx, by)
            flipped = norm < 1e-300
            norm = np.where(flipped, 1.0, norm)
            nc = np.where(flipped, 0.0, bx / norm)
            ns = np.where(flipped, 1.0, by / norm)
            dE = 0.5 * (a * (nc - ct[:, i]) - b * (ns - st[:, i]))
            worst[active] = np.maximum(worst[active], dE)
            ct[:, i] = nc
            st[:, i] = ns
        cos_t[active] = ct
        sin_t[active] = st
        res = 2.0 * np.arcsin(np.minimum(chord / 2.0, 1.0))
        iters[active] += 1
        residual[active] = res
        active = active[res >= tol]
    thetas[:] = np.arctan2(sin_t, cos_t)
    return iters, residual, worst
