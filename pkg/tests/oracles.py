"""Independent reference implementations and frozen expected values.

Nothing here imports the package under test. The helpers are deliberately
naive (plain Python loops over dicts and tuples) so that agreement with the
vectorized implementations is meaningful.
"""
from __future__ import annotations

import itertools
import math
from collections import deque

# ---------------------------------------------------------------- constants

# Edge counts of pristine Chimera graphs: 16 L^2 intra-cell plus 8 L (L - 1) inter-cell.
EDGE_COUNTS = {1: 16, 2: 80, 3: 192, 4: 352, 5: 560, 6: 816, 7: 1120, 8: 1472, 9: 1872, 10: 2320}

# Floppy probability C(d, d/2) / 2^d for even d; zero for odd d.
FLOPPY_LAW = {1: 0.0, 2: 0.5, 3: 0.0, 4: 0.375, 5: 0.0, 6: 0.3125}

# Repetitions metric log(0.01) / log(1 - p) at selected p, evaluated by hand.
R_AT = {0.99: 1.0, 0.5: 6.643856189774724, 0.1: 43.708690653565465, 0.9: 2.0}

# SplitMix64 reference stream for state 0 (published test vector).
SPLITMIX64_SEED0 = (0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F)

# Published degree distributions (percent) of reduced C4 subgraphs (127 operable qubits) per target degree.
TABLE_C4 = {
    3: {2: 7, 3: 92},
    4: {3: 4, 4: 95},
    5: {4: 4, 5: 95},
    6: {5: 53, 6: 46},
}

SIDON_VALUES = (8, 13, 19, 28)

MASK64 = (1 << 64) - 1


# ----------------------------------------------------------------- topology

def chimera_edges(L: int) -> set[tuple[int, int]]:
    """Chimera adjacency written from the definition, one qubit at a time."""
    def q(r, c, side, k):
        return 8 * (r * L + c) + 4 * side + k

    edges = set()
    for r in range(L):
        for c in range(L):
            for k in range(4):
                for kk in range(4):
                    edges.add(tuple(sorted((q(r, c, 0, k), q(r, c, 1, kk)))))
                if c + 1 < L:
                    edges.add(tuple(sorted((q(r, c, 0, k), q(r, c + 1, 0, k)))))
                if r + 1 < L:
                    edges.add(tuple(sorted((q(r, c, 1, k), q(r + 1, c, 1, k)))))
    return edges


def degrees_of(edges, n: int) -> list[int]:
    deg = [0] * n
    for a, b in edges:
        deg[a] += 1
        deg[b] += 1
    return deg


def connected(edges, nodes) -> bool:
    nodes = set(nodes)
    if not nodes:
        return True
    adj = {v: set() for v in nodes}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    start = next(iter(nodes))
    seen = {start}
    todo = deque([start])
    while todo:
        x = todo.popleft()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                todo.append(y)
    return seen == nodes


def removable_bruteforce(edges: set[tuple[int, int]], L: int, d: int) -> set[tuple[int, int]]:
    """Evaluate the five edge-removal rules literally, edge by edge."""
    n = 8 * L * L
    deg = degrees_of(edges, n)
    maxdeg = max(deg) if edges else 0
    if maxdeg <= d:
        return set()
    cell = lambda x: x // 8  # noqa: E731
    side = lambda x: (x % 8) // 4  # noqa: E731

    def orient(a, b):
        if deg[a] > deg[b] or (deg[a] == deg[b] and a < b):
            return a, b
        return b, a

    active = {x for e in edges for x in e}
    out = set()
    for e in edges:
        u, v = orient(*e)
        if deg[u] != maxdeg:
            continue
        if any(deg[orient(*f)[0]] >= deg[u] and deg[orient(*f)[1]] > deg[v] for f in edges):
            continue
        if cell(u) != cell(v):
            if deg[u] != deg[v]:
                continue
            if any(cell(a) == cell(b) and side(a) != side(b) and deg[a] == deg[b] == deg[u] for a, b in edges):
                continue
        if not deg[u] >= deg[v] >= 3:
            continue
        if not connected(edges - {e}, active):
            continue
        out.add(e)
    return out


# ----------------------------------------------------------------- energies

def energy(couplings: dict, h: dict, state) -> int:
    e = 0
    for (i, j), J in couplings.items():
        e += J * state[i] * state[j]
    for i, v in h.items():
        e += v * state[i]
    return e


def effective_field(couplings: dict, h: dict, state, i: int) -> int:
    f = h.get(i, 0)
    for (a, b), J in couplings.items():
        if a == i:
            f += J * state[b]
        elif b == i:
            f += J * state[a]
    return f


def ground(n: int, couplings: dict, h: dict | None = None) -> tuple[int, int]:
    """(minimum energy, number of minimizing states) by full enumeration."""
    h = h or {}
    best, count = None, 0
    for s in itertools.product((1, -1), repeat=n):
        e = energy(couplings, h, s)
        if best is None or e < best:
            best, count = e, 1
        elif e == best:
            count += 1
    return best, count


def spectrum(n: int, couplings: dict, h: dict | None = None) -> list[int]:
    h = h or {}
    return sorted(energy(couplings, h, s) for s in itertools.product((1, -1), repeat=n))


def boltzmann(n: int, couplings: dict, h: dict, beta: float) -> dict[tuple, float]:
    w = {s: math.exp(-beta * energy(couplings, h, s)) for s in itertools.product((1, -1), repeat=n)}
    z = sum(w.values())
    return {s: v / z for s, v in w.items()}


def repetitions(p: float) -> float:
    if p == 0:
        return math.inf
    if p == 1:
        return 0.0
    return math.log(0.01) / math.log(1 - p)


# ---------------------------------------------------------------------- rng

def splitmix64(state: int):
    """Generator of (new_state, output) pairs from the reference recurrence."""
    while True:
        state = (state + 0x9E3779B97F4A7C15) & MASK64
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        yield z ^ (z >> 31)


# ---------------------------------------------------------------- rotor model

def sv_energy(couplings: dict, h: dict, thetas, delta: float, eps: float) -> float:
    c = [math.cos(t) for t in thetas]
    ising = sum(J * c[i] * c[j] for (i, j), J in couplings.items()) + sum(v * c[i] for i, v in h.items())
    return 0.5 * eps * ising - 0.5 * delta * sum(math.sin(t) for t in thetas)
