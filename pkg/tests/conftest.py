import itertools

import numpy as np
import pytest

from cflcolor.graphs import ConstraintGraph, SensingGraph

A, B, C, D, E, F, G = range(7)


@pytest.fixture
def fig2():
    """Two sparsely linked sensing components {A,B,C,D} and {E,F,G}.

    {A,B,C,D} contains triangle A,B,C plus D adjacent to C and A (chromatic 3),
    {E,F,G} is a path (chromatic 2), and the only links between them are C->E
    and D->F, from two distinct sources.
    """
    sensed = [
        (A, B), (B, C), (C, A), (C, D), (D, A),
        (E, F), (F, E), (F, G), (G, F),
        (C, E), (D, F),
    ]
    s = SensingGraph(7, sensed)
    return s.symmetric_closure(), s


def random_instance(rng, n, p_edge=0.5, p_both=0.3):
    """Random graph with a sensing graph covering every edge in >= 1 direction."""
    edges = [(u, v) for u, v in itertools.combinations(range(n), 2) if rng.random() < p_edge]
    sensed = []
    for u, v in edges:
        r = rng.random()
        if r < p_both:
            sensed += [(u, v), (v, u)]
        elif r < (1 + p_both) / 2:
            sensed.append((u, v))
        else:
            sensed.append((v, u))
    return ConstraintGraph(n, edges), SensingGraph(n, sensed)


def brute_force_colorable(g: ConstraintGraph, d: int) -> bool:
    """Exhaustive search over all d-colorings (vertex 0 pinned to color 0)."""
    n = g.n_vertices
    if n == 0:
        return True
    if d <= 0:
        return False
    e = g.edge_array
    if len(e) == 0:
        return True
    rest = n - 1
    total = d**rest
    chunk = 1 << 16
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk))
        digits = (idx[:, None] // d ** np.arange(rest)[None, :]) % d
        x = np.concatenate([np.zeros((len(idx), 1), dtype=digits.dtype), digits], axis=1)
        ok = ~np.any(x[:, e[:, 0]] == x[:, e[:, 1]], axis=1)
        if ok.any():
            return True
    return False


def brute_force_chromatic(g: ConstraintGraph) -> int:
    d = 0 if g.n_vertices == 0 else 1
    while not brute_force_colorable(g, d):
        d += 1
    return d


def reachability(n, edges):
    """Transitive closure by repeated boolean squaring (reflexive)."""
    r = np.eye(n, dtype=bool)
    for j, i in edges:
        r[j, i] = True
    while True:
        nxt = r | ((r.astype(np.int64) @ r.astype(np.int64)) > 0)
        if (nxt == r).all():
            return r
        r = nxt


def brute_force_scc(n, edges):
    r = reachability(n, edges)
    mutual = r & r.T
    return {frozenset(np.flatnonzero(mutual[v]).tolist()) for v in range(n)}


def inclusion_exclusion_chromatic(g: ConstraintGraph) -> int:
    """Chromatic number by counting k-covers with independent sets.

    chi <= k iff sum_S (-1)^(n-|S|) i(S)^k > 0, where i(S) counts the
    independent subsets of S (empty set included).
    """
    n = g.n_vertices
    if n == 0:
        return 0
    masks = np.arange(1 << n)
    ind = np.ones(1 << n, dtype=bool)
    for u, v in g.undirected_edges():
        ind &= ~(((masks >> u) & 1).astype(bool) & ((masks >> v) & 1).astype(bool))
    cnt = ind.astype(np.int64)
    for i in range(n):
        bit = ((masks >> i) & 1).astype(bool)
        cnt[bit] += cnt[masks[bit] ^ (1 << i)]
    pop = np.array([bin(m).count("1") for m in range(1 << n)])
    sign = np.where((n - pop) % 2 == 0, 1, -1)
    counts = [int(c) for c in cnt]
    signs = [int(s) for s in sign]
    for k in range(1, n + 1):
        if sum(s * c**k for s, c in zip(signs, counts)) > 0:
            return k
    raise AssertionError("unreachable: n colors always suffice")
