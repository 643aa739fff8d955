"""Structure of the sensing graph: strong components, in-degrees, chromatic numbers.

The component checks decide, per strongly connected component ``V_k`` of the
sensing graph, whether ``chi(V_k) <= D - deg(V_k)``; when every component
passes (and every constraint edge is sensed in some direction) the solver is
guaranteed to converge almost surely.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple

import numpy as np

from .graphs import ConstraintGraph, SensingGraph, check_condition_a, validate_palette

__all__ = [
    "SccDecomposition",
    "ComponentReport",
    "ChromaticResult",
    "DEFAULT_NODE_BUDGET",
    "is_strongly_connected",
    "scc_decompose",
    "component_in_degree",
    "chromatic_number",
    "dsatur_coloring",
    "greedy_clique",
    "check_theorem2",
    "node_eligibility",
    "analyze",
]

DEFAULT_NODE_BUDGET = 10**7


@dataclass(frozen=True)
class SccDecomposition:
    component_of: tuple[int, ...]
    components: tuple[frozenset[int], ...]
    condensation_edges: frozenset[tuple[int, int]]

    def __len__(self) -> int:
        return len(self.components)


@dataclass(frozen=True)
class ComponentReport:
    component: int
    size: int
    in_degree: int
    chromatic: int | None
    chromatic_lower: int
    eligible: bool | None

    def to_dict(self) -> dict:
        return {
            "component": self.component,
            "size": self.size,
            "in_degree": self.in_degree,
            "chromatic": self.chromatic,
            "chromatic_lower": self.chromatic_lower,
            "eligible": self.eligible,
        }


class ChromaticResult(NamedTuple):
    """Exact value, or ``value=None`` with bounds when the search budget ran out."""

    value: int | None
    lower: int
    upper: int
    coloring: tuple[int, ...]
    nodes: int

    @property
    def exact(self) -> bool:
        return self.value is not None


# -- strong components --------------------------------------------------------


def scc_decompose(sensing: SensingGraph) -> SccDecomposition:
    """Maximal strongly connected components (iterative Tarjan).

    Components are numbered in the order Tarjan emits them, which is a
    reverse topological order of the condensation.
    """
    n = sensing.n_vertices
    succ = [sensing.out_neighbors(v) for v in range(n)]
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comp = [-1] * n
    components: list[frozenset[int]] = []
    counter = 0

    for root in range(n):
        if index[root] >= 0:
            continue
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        work = [(root, 0)]
        while work:
            v, pos = work[-1]
            nbrs = succ[v]
            if pos < len(nbrs):
                work[-1] = (v, pos + 1)
                w = nbrs[pos]
                if index[w] < 0:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                if low[v] < low[parent]:
                    low[parent] = low[v]
            if low[v] == index[v]:
                members = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp[w] = len(components)
                    members.append(w)
                    if w == v:
                        break
                components.append(frozenset(members))

    cond = frozenset(
        (comp[j], comp[i]) for j, i in sensing.edges if comp[j] != comp[i]
    )
    return SccDecomposition(tuple(comp), tuple(components), cond)


def is_strongly_connected(sensing: SensingGraph) -> bool:
    if sensing.n_vertices < 1:
        raise ValueError("empty graph")
    return len(scc_decompose(sensing).components) == 1


def component_in_degree(sensing: SensingGraph, decomposition: SccDecomposition, k: int) -> int:
    """Number of distinct outside vertices with a sensed edge into component ``k``."""
    if not 0 <= k < len(decomposition.components):
        raise ValueError(f"no component {k}")
    members = decomposition.components[k]
    sources = {j for i in members for j in sensing.in_neighbors(i) if j not in members}
    return len(sources)


# -- chromatic number ---------------------------------------------------------


class _BudgetExceeded(Exception):
    pass


def greedy_clique(adj: list[set[int]]) -> list[int]:
    """Largest clique found by greedy extension from every start vertex."""
    n = len(adj)
    order = sorted(range(n), key=lambda v: -len(adj[v]))
    best: list[int] = []
    for start in order:
        if len(adj[start]) + 1 <= len(best):
            break
        clique = [start]
        cand = set(adj[start])
        while cand:
            v = max(cand, key=lambda u: (len(adj[u] & cand), -u))
            clique.append(v)
            cand &= adj[v]
        if len(clique) > len(best):
            best = clique
    return best


def dsatur_coloring(adj: list[set[int]]) -> list[int]:
    """Greedy coloring, most-saturated vertex first (ties: higher degree)."""
    n = len(adj)
    colors = [-1] * n
    seen: list[set[int]] = [set() for _ in range(n)]
    for _ in range(n):
        v = max(
            (u for u in range(n) if colors[u] < 0),
            key=lambda u: (len(seen[u]), len(adj[u]), -u),
        )
        c = 0
        while c in seen[v]:
            c += 1
        colors[v] = c
        for w in adj[v]:
            seen[w].add(c)
    return colors


def _peel(adj: list[set[int]], k: int) -> tuple[list[int], list[int]]:
    """Repeatedly drop vertices of degree below ``k``; returns (dropped in order, k-core)."""
    deg = [len(a) for a in adj]
    alive = [True] * len(adj)
    stack = [v for v, dv in enumerate(deg) if dv < k]
    for v in stack:
        alive[v] = False
    dropped = []
    while stack:
        v = stack.pop()
        dropped.append(v)
        for w in adj[v]:
            if alive[w]:
                deg[w] -= 1
                if deg[w] < k:
                    alive[w] = False
                    stack.append(w)
    return dropped, [v for v in range(len(adj)) if alive[v]]


def _exact_chromatic(adj: list[set[int]], budget: int) -> ChromaticResult:
    # with a clique of size L, chi(G) = max(L, chi(L-core)): a vertex of
    # degree < L can always be colored last from any palette of size >= L
    n = len(adj)
    if n == 0:
        return ChromaticResult(0, 0, 0, (), 0)
    floor = max(1, len(greedy_clique(adj)))
    dropped, core = _peel(adj, floor)
    colors = [-1] * n
    if core:
        index = {v: i for i, v in enumerate(core)}
        sub = [{index[w] for w in adj[v] if w in index} for v in core]
        res = _branch_and_bound(sub, budget, floor)
        for v, c in zip(core, res.coloring):
            colors[v] = c
        lower, upper, nodes = max(floor, res.lower), max(floor, res.upper), res.nodes
        value = None if res.value is None else max(floor, res.value)
    else:
        lower = upper = value = floor
        nodes = 0
    for v in reversed(dropped):
        taken = {colors[w] for w in adj[v]}
        c = 0
        while c in taken:
            c += 1
        colors[v] = c
    return ChromaticResult(value, lower, upper, tuple(colors), nodes)


def _branch_and_bound(adj: list[set[int]], budget: int, floor: int) -> ChromaticResult:
    """DSATUR branch and bound; stops early once ``floor`` colors suffice."""
    n = len(adj)
    greedy = dsatur_coloring(adj)
    upper = max(greedy) + 1
    best = list(greedy)
    clique = greedy_clique(adj)
    lower = max(1, len(clique))
    if upper <= max(lower, floor):
        return ChromaticResult(upper, lower, upper, tuple(best), 0)

    colors = [-1] * n
    # counts[v][c]: neighbours of v currently holding color c
    counts = [[0] * upper for _ in range(n)]
    sat = [0] * n
    deg = [len(a) for a in adj]
    nodes = 0

    def assign(v: int, c: int) -> None:
        colors[v] = c
        for w in adj[v]:
            cw = counts[w]
            if cw[c] == 0:
                sat[w] += 1
            cw[c] += 1

    def unassign(v: int) -> None:
        c = colors[v]
        colors[v] = -1
        for w in adj[v]:
            cw = counts[w]
            cw[c] -= 1
            if cw[c] == 0:
                sat[w] -= 1

    # any clique may be precolored 0..q-1 without loss of generality
    for c, v in enumerate(clique):
        assign(v, c)

    state = {"upper": upper}

    def search(n_colored: int, used: int) -> bool:
        nonlocal nodes, best
        nodes += 1
        if nodes > budget:
            raise _BudgetExceeded
        if used >= state["upper"]:
            return False
        if n_colored == n:
            state["upper"] = used
            best = list(colors)
            return used <= max(lower, floor)
        v = -1
        key = (-1, -1)
        for u in range(n):
            if colors[u] < 0:
                k = (sat[u], deg[u])
                if k > key:
                    key, v = k, u
        cv = counts[v]
        c = 0
        while c < min(used + 1, state["upper"] - 1):
            if not cv[c]:
                assign(v, c)
                done = search(n_colored + 1, max(used, c + 1))
                unassign(v)
                if done:
                    return True
            c += 1
        return False

    try:
        search(len(clique), len(clique))
    except _BudgetExceeded:
        return ChromaticResult(None, lower, state["upper"], tuple(best), nodes)
    return ChromaticResult(state["upper"], lower, state["upper"], tuple(best), nodes)


def chromatic_number(
    graph: ConstraintGraph,
    vertices: Iterable[int] | None = None,
    budget: int = DEFAULT_NODE_BUDGET,
) -> ChromaticResult:
    """Exact chromatic number of the subgraph induced by ``vertices``.

    Branch and bound (most-saturated vertex first) between a greedy coloring
    and a greedy clique.  If more than ``budget`` search nodes are needed the
    result carries ``value=None`` and the proven bounds instead.  The
    returned coloring is indexed like the sorted vertex subset.
    """
    if vertices is not None:
        vertices = list(vertices)
        if not vertices:
            raise ValueError("vertex subset must be nonempty")
        graph, _ = graph.subgraph(vertices)
    return _exact_chromatic(graph.adjacency_sets(), budget)


# -- convergence conditions ---------------------------------------------------


def check_theorem2(
    graph: ConstraintGraph,
    sensing: SensingGraph,
    n_colors: int,
    budget: int = DEFAULT_NODE_BUDGET,
    decomposition: SccDecomposition | None = None,
    known: Mapping[frozenset, ChromaticResult] | None = None,
) -> tuple[list[ComponentReport], bool | None]:
    """Per-component check of ``chi(V_k) <= D - deg(V_k)``.

    The overall verdict also requires every constraint edge to be sensed in
    at least one direction.  It is ``None`` (inconclusive) when a chromatic
    search ran out of budget and that made the difference.  ``known`` maps
    vertex sets to chromatic results already computed, which are reused.
    """
    d = validate_palette(n_colors)
    cond_a, _ = check_condition_a(graph, sensing)
    dec = decomposition or scc_decompose(sensing)
    reports = []
    for k, members in enumerate(dec.components):
        indeg = component_in_degree(sensing, dec, k)
        room = d - indeg
        chi = (known or {}).get(members) or chromatic_number(graph, members, budget)
        if chi.exact:
            eligible: bool | None = chi.value <= room
        elif chi.lower > room:
            eligible = False
        elif chi.upper <= room:
            eligible = True
        else:
            eligible = None
        reports.append(ComponentReport(k, len(members), indeg, chi.value, chi.lower, eligible))
    verdicts = [r.eligible for r in reports]
    if not cond_a or False in verdicts:
        overall: bool | None = False
    elif None in verdicts:
        overall = None
    else:
        overall = True
    return reports, overall


def node_eligibility(
    graph: ConstraintGraph,
    sensing: SensingGraph,
    n_colors: int,
    budget: int = DEFAULT_NODE_BUDGET,
    reports: list[ComponentReport] | None = None,
    decomposition: SccDecomposition | None = None,
    known: Mapping[frozenset, ChromaticResult] | None = None,
) -> np.ndarray:
    """Per-vertex 0/1: the vertex's component passes its colour-room check
    and every constraint edge touching that component is sensed somehow.

    Components whose check is inconclusive count as ineligible.
    """
    dec = decomposition or scc_decompose(sensing)
    if reports is None:
        reports, _ = check_theorem2(graph, sensing, n_colors, budget, dec, known)
    _, missing = check_condition_a(graph, sensing)
    bad_comp = {dec.component_of[u] for u, v in missing} | {dec.component_of[v] for u, v in missing}
    out = np.zeros(graph.n_vertices, dtype=np.int8)
    for r in reports:
        if r.eligible and r.component not in bad_comp:
            out[list(dec.components[r.component])] = 1
    return out


def analyze(
    graph: ConstraintGraph,
    sensing: SensingGraph,
    n_colors: int,
    budget: int = DEFAULT_NODE_BUDGET,
) -> dict:
    """JSON-ready summary of the convergence conditions for one instance."""
    cond_a, missing = check_condition_a(graph, sensing)
    dec = scc_decompose(sensing)
    chi = chromatic_number(graph, budget=budget) if graph.n_vertices else None
    known = {frozenset(range(graph.n_vertices)): chi} if chi is not None else None
    reports, overall = check_theorem2(graph, sensing, n_colors, budget, dec, known)
    elig = node_eligibility(graph, sensing, n_colors, budget, reports, dec)
    for r in reports:
        # subgraph monotonicity; a violation means the chromatic search is wrong
        if chi is not None and chi.exact and r.chromatic is not None:
            assert r.chromatic <= chi.value
    return {
        "n_vertices": graph.n_vertices,
        "n_colors": n_colors,
        "chromatic": None if chi is None else chi.value,
        "condition_a": cond_a,
        "uncovered_edges": [list(e) for e in missing],
        "strongly_connected": len(dec.components) == 1,
        "components": [r.to_dict() for r in reports],
        "theorem2": overall,
        "node_eligibility": float(elig.mean()) if graph.n_vertices else 1.0,
    }
