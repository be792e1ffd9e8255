# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops. Same contracts and random streams as ``_pure``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, atan2, asin, cos, sin, sqrt, fmax
from libc.stdint cimport uint64_t, int64_t, int8_t

cnp.import_array()

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t MIX1 = 0xBF58476D1CE4E5B9ULL
cdef uint64_t MIX2 = 0x94D049BB133111EBULL
cdef double INV53 = 1.0 / 9007199254740992.0
cdef int64_t SAT_MAX = 0x7FFFFFFFFFFFFFFF


cdef inline double next_uniform(uint64_t* state) nogil:
    state[0] += GOLDEN
    cdef uint64_t z = state[0]
    z = (z ^ (z >> 30)) * MIX1
    z = (z ^ (z >> 27)) * MIX2
    z = z ^ (z >> 31)
    return <double>(z >> 11) * INV53


def anneal_int(const int64_t[::1] indptr, const int64_t[::1] indices,
               const int64_t[::1] J, const int64_t[::1] h,
               const double[:, ::1] table, const uint64_t[::1] seeds):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t S = seeds.shape[0]
    cdef Py_ssize_t T = table.shape[0]
    cdef Py_ssize_t M = table.shape[1]
    spins_arr = np.empty((S, n), dtype=np.int8)
    energy_arr = np.empty(S, dtype=np.int64)
    cdef int8_t[:, ::1] spins = spins_arr
    cdef int64_t[::1] energy = energy_arr
    cdef Py_ssize_t s, t, i, p, idx
    cdef uint64_t rng
    cdef int64_t heff, dE, e
    cdef int8_t* x
    with nogil:
        for s in range(S):
            rng = seeds[s]
            x = &spins[s, 0]
            for i in range(n):
                x[i] = 1 if next_uniform(&rng) < 0.5 else -1
            e = 0
            for i in range(n):
                e += h[i] * x[i]
                for p in range(indptr[i], indptr[i + 1]):
                    if indices[p] > i:
                        e += J[p] * x[i] * x[indices[p]]
            for t in range(T):
                for i in range(n):
                    heff = h[i]
                    for p in range(indptr[i], indptr[i + 1]):
                        heff += J[p] * x[indices[p]]
                    dE = -2 * x[i] * heff
                    if dE <= 0:
                        next_uniform(&rng)
                        x[i] = -x[i]
                        e += dE
                    else:
                        idx = dE if dE < M else M - 1
                        if next_uniform(&rng) < table[t, idx]:
                            x[i] = -x[i]
                            e += dE
            energy[s] = e
    return spins_arr, energy_arr


def anneal_float(const int64_t[::1] indptr, const int64_t[::1] indices,
                 const double[::1] J, const double[::1] h,
                 const double[::1] betas, const uint64_t[::1] seeds):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t S = seeds.shape[0]
    cdef Py_ssize_t T = betas.shape[0]
    spins_arr = np.empty((S, n), dtype=np.int8)
    energy_arr = np.empty(S, dtype=np.float64)
    cdef int8_t[:, ::1] spins = spins_arr
    cdef double[::1] energy = energy_arr
    cdef Py_ssize_t s, t, i, p
    cdef uint64_t rng
    cdef double heff, dE, e, beta, u
    cdef int8_t* x
    with nogil:
        for s in range(S):
            rng = seeds[s]
            x = &spins[s, 0]
            for i in range(n):
                x[i] = 1 if next_uniform(&rng) < 0.5 else -1
            e = 0.0
            for i in range(n):
                e += h[i] * x[i]
                for p in range(indptr[i], indptr[i + 1]):
                    if indices[p] > i:
                        e += J[p] * x[i] * x[indices[p]]
            for t in range(T):
                beta = betas[t]
                for i in range(n):
                    heff = h[i]
                    for p in range(indptr[i], indptr[i + 1]):
                        heff += J[p] * x[indices[p]]
                    dE = -2.0 * x[i] * heff
                    u = next_uniform(&rng)
                    if dE <= 0.0 or u < exp(-beta * dE):
                        x[i] = -x[i]
                        e += dE
            energy[s] = e
    return spins_arr, energy_arr


def enumerate_ground(const int64_t[::1] indptr, const int64_t[::1] indices,
                     const int64_t[::1] J, const int64_t[::1] h):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    if n == 0:
        return 0, 1, 0
    if n > 40:
        raise ValueError("too many spins for enumeration")
    cdef int64_t[::1] x = np.ones(n, dtype=np.int64)
    cdef int64_t e = 0, best, count, heff
    cdef uint64_t code = 0, arg = 0, k, total = (<uint64_t>1) << n
    cdef Py_ssize_t i, p, b
    for i in range(n):
        e += h[i]
        for p in range(indptr[i], indptr[i + 1]):
            if indices[p] > i:
                e += J[p]
    best = e
    count = 1
    with nogil:
        k = 1
        while k < total:
            b = 0
            while not ((k >> b) & 1):
                b += 1
            heff = h[b]
            for p in range(indptr[b], indptr[b + 1]):
                heff += J[p] * x[indices[p]]
            e -= 2 * x[b] * heff
            x[b] = -x[b]
            code ^= (<uint64_t>1) << b
            if e < best:
                best = e
                count = 1
                arg = code
            elif e == best:
                if count < SAT_MAX:
                    count += 1
            k += 1
    return best, count, arg


def descend(const int64_t[::1] indptr, const int64_t[::1] indices,
            const double[::1] J, const double[::1] h, double eps, double delta,
            double[:, ::1] thetas, double tol, Py_ssize_t maxiter):
    # Candidates are processed side by side (spin-major layout) so the inner
    # loops are independent across candidates; each candidate still follows
    # exactly the sequential half-step recursion and stops on its own.
    cdef Py_ssize_t K = thetas.shape[0]
    cdef Py_ssize_t n = thetas.shape[1]
    iters_arr = np.zeros(K, dtype=np.int64)
    residual_arr = np.full(K, np.inf)
    worst_arr = np.zeros(K)
    cdef int64_t[::1] iters = iters_arr
    cdef double[::1] residual = residual_arr
    cdef double[::1] worst = worst_arr
    cdef double[:, ::1] ct = np.empty((n, K))
    cdef double[:, ::1] st = np.empty((n, K))
    cdef double[::1] heff = np.empty(K)
    cdef double[::1] chord = np.empty(K)
    cdef double[::1] wst = np.zeros(K)
    cdef int64_t[::1] slot = np.arange(K, dtype=np.int64)
    cdef Py_ssize_t c, it, i, p, j, nact = K, keep
    cdef double a, R, tc, ts, dc, ds, d, bx, by, nb, nc, ns, dE, res, Jp, hi
    with nogil:
        for c in range(K):
            for i in range(n):
                ct[i, c] = cos(thetas[c, i])
                st[i, c] = sin(thetas[c, i])
        for it in range(maxiter):
            if nact == 0:
                break
            for c in range(nact):
                chord[c] = 0.0
            for i in range(n):
                hi = h[i]
                for c in range(nact):
                    heff[c] = hi
                for p in range(indptr[i], indptr[i + 1]):
                    j = indices[p]
                    Jp = J[p]
                    for c in range(nact):
                        heff[c] += Jp * ct[j, c]
                if delta > 0.0:
                    # Branch-free: with a transverse field the target is never
                    # antipodal to the current angle and R is never zero.
                    for c in range(nact):
                        a = eps * heff[c]
                        R = 1.0 / sqrt(a * a + delta * delta)
                        tc = -a * R
                        ts = delta * R
                        dc = ct[i, c] - tc
                        ds = st[i, c] - ts
                        chord[c] = fmax(chord[c], dc * dc + ds * ds)
                        bx = ct[i, c] + tc
                        by = st[i, c] + ts
                        nb = 1.0 / sqrt(bx * bx + by * by)
                        nc = bx * nb
                        ns = by * nb
                        dE = 0.5 * (a * (nc - ct[i, c]) - delta * (ns - st[i, c]))
                        wst[c] = fmax(wst[c], dE)
                        ct[i, c] = nc
                        st[i, c] = ns
                else:
                    for c in range(nact):
                        a = eps * heff[c]
                        if a == 0.0:
                            continue
                        tc = -1.0 if a > 0.0 else 1.0
                        dc = ct[i, c] - tc
                        ds = st[i, c]
                        chord[c] = fmax(chord[c], dc * dc + ds * ds)
                        bx = ct[i, c] + tc
                        by = st[i, c]
                        nb = sqrt(bx * bx + by * by)
                        if nb < 1e-300:
                            nc = 0.0
                            ns = 1.0
                        else:
                            nc = bx / nb
                            ns = by / nb
                        dE = 0.5 * a * (nc - ct[i, c])
                        wst[c] = fmax(wst[c], dE)
                        ct[i, c] = nc
                        st[i, c] = ns
            keep = 0
            for c in range(nact):
                d = sqrt(chord[c])
                res = 2.0 * asin(d * 0.5 if d < 2.0 else 1.0)
                iters[slot[c]] = it + 1
                residual[slot[c]] = res
                if res < tol or it + 1 == maxiter:
                    worst[slot[c]] = wst[c]
                    for i in range(n):
                        thetas[slot[c], i] = atan2(st[i, c], ct[i, c])
                else:
                    if keep != c:
                        slot[keep] = slot[c]
                        wst[keep] = wst[c]
                        for i in range(n):
                            ct[i, keep] = ct[i, c]
                            st[i, keep] = st[i, c]
                    keep += 1
            nact = keep
    return iters_arr, residual_arr, worst_arr
