"""Constraint graphs, sensing graphs and satisfaction predicates.

Vertices are dense integers ``0..N-1`` and colors are ``0..D-1``.  Both graph
types store ordered pairs ``(j, i)``; for a :class:`ConstraintGraph` the pair
set is always symmetric, for a :class:`SensingGraph` the pair ``(j, i)`` means
vertex ``i`` observes the clause it shares with ``j``.
"""

from __future__ import annotations

import os
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "ConstraintGraph",
    "SensingGraph",
    "GraphFormatError",
    "StructureError",
    "validate_palette",
    "as_assignment",
    "clause",
    "is_proper_coloring",
    "unsatisfied_set",
    "unsatisfied_mask",
    "check_condition_a",
    "restricted_equals_full",
    "parse_graph",
    "read_graph",
    "write_graph",
    "format_graph",
]

Edge = tuple[int, int]


class StructureError(ValueError):
    """A sensing graph does not fit the constraint graph it is paired with."""


class GraphFormatError(ValueError):
    """Malformed graph file."""


def _check_vertex(v: int, n: int) -> int:
    v = int(v)
    if not 0 <= v < n:
        raise IndexError(f"vertex {v} out of range for N={n}")
    return v


def _edge_array(pairs: Iterable[Edge]) -> np.ndarray:
    arr = np.array(sorted(pairs), dtype=np.intp)
    return arr.reshape(-1, 2)


class _DirectedPairs:
    n_vertices: int

    def __init__(self, n_vertices: int, edges: Iterable[Sequence[int]] = ()):
        n = int(n_vertices)
        if n < 0:
            raise ValueError("n_vertices must be non-negative")
        self.n_vertices = n
        pairs = set()
        for e in edges:
            j, i = (_check_vertex(v, n) for v in e)
            if i == j:
                raise ValueError(f"self-loop at vertex {i}")
            pairs.update(self._expand(j, i))
        self._pairs = frozenset(pairs)
        self._arr = _edge_array(self._pairs)
        self._arr.setflags(write=False)
        ins: list[list[int]] = [[] for _ in range(n)]
        outs: list[list[int]] = [[] for _ in range(n)]
        for j, i in self._arr:
            ins[i].append(int(j))
            outs[j].append(int(i))
        self._in = tuple(tuple(sorted(x)) for x in ins)
        self._out = tuple(tuple(sorted(x)) for x in outs)

    @staticmethod
    def _expand(j: int, i: int) -> Iterable[Edge]:
        return ((j, i),)

    @property
    def edges(self) -> frozenset[Edge]:
        """All ordered pairs ``(j, i)``."""
        return self._pairs

    @property
    def edge_array(self) -> np.ndarray:
        """Read-only ``(E, 2)`` array of ordered pairs, sorted."""
        return self._arr

    def __len__(self) -> int:
        return self.n_vertices

    def __contains__(self, edge: object) -> bool:
        return edge in self._pairs

    def __eq__(self, other: object) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        return self.n_vertices == other.n_vertices and self._pairs == other._pairs

    def __hash__(self) -> int:
        return hash((type(self).__name__, self.n_vertices, self._pairs))

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n_vertices={self.n_vertices}, n_edges={len(self._pairs)})"

    def in_neighbors(self, i: int) -> tuple[int, ...]:
        return self._in[i]

    def out_neighbors(self, j: int) -> tuple[int, ...]:
        return self._out[j]


class ConstraintGraph(_DirectedPairs):
    """Undirected constraint graph stored as a symmetric set of ordered pairs.

    Inserting ``(i, j)`` also inserts ``(j, i)``; repeated insertions are
    harmless.
    """

    @staticmethod
    def _expand(j: int, i: int) -> Iterable[Edge]:
        return ((j, i), (i, j))

    def neighbors(self, i: int) -> tuple[int, ...]:
        return self._in[i]

    def degree(self, i: int) -> int:
        return len(self._in[i])

    def undirected_edges(self) -> list[Edge]:
        return [(int(u), int(v)) for u, v in self._arr if u < v]

    def adjacency_sets(self) -> list[set[int]]:
        return [set(nb) for nb in self._in]

    def subgraph(self, vertices: Iterable[int]) -> tuple["ConstraintGraph", list[int]]:
        """Induced subgraph relabelled to ``0..k-1``; returns it with the label map."""
        keep = sorted({_check_vertex(v, self.n_vertices) for v in vertices})
        index = {v: k for k, v in enumerate(keep)}
        edges = [(index[u], index[v]) for u, v in self._pairs if u in index and v in index]
        return ConstraintGraph(len(keep), edges), keep


class SensingGraph(_DirectedPairs):
    """Oriented graph of information sets.

    ``(j, i)`` in the edge set means ``(j, i)`` belongs to the information set
    of vertex ``i``: vertex ``i`` notices when it shares a color with ``j``.
    """

    def information_set(self, i: int) -> frozenset[Edge]:
        return frozenset((j, i) for j in self._in[i])

    def validate_subset(self, graph: ConstraintGraph) -> None:
        """Raise :class:`StructureError` unless every sensed pair is an edge of ``graph``."""
        if graph.n_vertices != self.n_vertices:
            raise StructureError(
                f"vertex count mismatch: sensing {self.n_vertices}, constraint {graph.n_vertices}"
            )
        extra = self._pairs - graph.edges
        if extra:
            raise StructureError(f"sensed pairs not in constraint graph: {sorted(extra)[:5]}")

    def symmetric_closure(self) -> ConstraintGraph:
        return ConstraintGraph(self.n_vertices, self._pairs)

    @classmethod
    def full(cls, graph: ConstraintGraph) -> "SensingGraph":
        """Unrestricted sensing: every vertex observes all of its clauses."""
        return cls(graph.n_vertices, graph.edges)


def validate_palette(n_colors: int) -> int:
    d = int(n_colors)
    if d < 1:
        raise ValueError(f"palette needs at least one color, got {n_colors}")
    return d


def as_assignment(x: Sequence[int] | np.ndarray, n_vertices: int, n_colors: int | None = None) -> np.ndarray:
    """Validate ``x`` as a color vector for ``n_vertices`` vertices."""
    arr = np.asarray(x)
    if arr.ndim != 1 or arr.shape[0] != n_vertices:
        raise ValueError(f"assignment of length {arr.shape[0] if arr.ndim else 0} does not match N={n_vertices}")
    if arr.size and not np.issubdtype(arr.dtype, np.integer):
        raise ValueError("assignment entries must be integers")
    arr = arr.astype(np.intp, copy=False)
    if n_colors is not None and arr.size and (arr.min() < 0 or arr.max() >= n_colors):
        raise ValueError(f"assignment has colors outside palette of size {n_colors}")
    return arr


def clause(x: Sequence[int] | np.ndarray, edge: Edge) -> int:
    """1 if the endpoints of ``edge`` have different colors, else 0."""
    i, j = edge
    n = len(x)
    i, j = _check_vertex(i, n), _check_vertex(j, n)
    return int(x[i] != x[j])


def is_proper_coloring(graph: ConstraintGraph, x: Sequence[int] | np.ndarray) -> bool:
    x = as_assignment(x, graph.n_vertices)
    e = graph.edge_array
    return not bool(np.any(x[e[:, 0]] == x[e[:, 1]]))


def unsatisfied_mask(sensing: SensingGraph, x: np.ndarray) -> np.ndarray:
    """Boolean mask of vertices that sense a conflict.

    ``x`` may be a single assignment of shape ``(N,)`` or a batch of shape
    ``(K, N)``; the result has the same shape.
    """
    x = np.asarray(x)
    if x.shape[-1] != sensing.n_vertices:
        raise ValueError(f"assignment length {x.shape[-1]} does not match N={sensing.n_vertices}")
    e = sensing.edge_array
    out = np.zeros(x.shape, dtype=bool)
    if len(e) == 0:
        return out
    src, dst = e[:, 0], e[:, 1]
    conflict = x[..., src] == x[..., dst]
    if x.ndim == 1:
        out[dst[conflict]] = True
    else:
        rows, cols = np.nonzero(conflict)
        out[rows, dst[cols]] = True
    return out


def unsatisfied_set(sensing: SensingGraph, x: Sequence[int] | np.ndarray) -> set[int]:
    """Vertices ``i`` having some sensed ``(j, i)`` with ``x[j] == x[i]``."""
    x = as_assignment(x, sensing.n_vertices)
    return {int(i) for i in np.flatnonzero(unsatisfied_mask(sensing, x))}


def check_condition_a(graph: ConstraintGraph, sensing: SensingGraph) -> tuple[bool, list[Edge]]:
    """Check that every undirected edge is sensed in at least one direction.

    Returns the verdict and the uncovered edges as ``(u, v)`` with ``u < v``.
    """
    sensing.validate_subset(graph)
    sensed = sensing.edges
    missing = [(u, v) for u, v in graph.undirected_edges() if (u, v) not in sensed and (v, u) not in sensed]
    return not missing, missing


def restricted_equals_full(graph: ConstraintGraph, sensing: SensingGraph, x: Sequence[int] | np.ndarray) -> bool:
    """Restricted satisfaction of ``x``, cross-checked against proper coloring.

    Requires every edge of ``graph`` to be sensed in some direction; under
    that condition the two predicates must agree and an ``AssertionError``
    signals a bug.
    """
    ok, missing = check_condition_a(graph, sensing)
    if not ok:
        raise ValueError(f"sensing leaves edges unobserved: {missing[:5]}")
    restricted = not unsatisfied_set(sensing, x)
    full = is_proper_coloring(graph, x)
    assert restricted == full, "restricted and unrestricted satisfaction disagree"
    return restricted


# -- text format ------------------------------------------------------------


def format_graph(graph: ConstraintGraph, sensing: SensingGraph, n_colors: int) -> str:
    lines = [f"graph {graph.n_vertices} {int(n_colors)}"]
    lines += [f"edge {u} {v}" for u, v in graph.undirected_edges()]
    lines += [f"sense {j} {i}" for j, i in sensing.edge_array]
    return "\n".join(lines) + "\n"


def write_graph(path: str | os.PathLike, graph: ConstraintGraph, sensing: SensingGraph, n_colors: int) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(format_graph(graph, sensing, n_colors))


def parse_graph(text: str) -> tuple[ConstraintGraph, SensingGraph, int]:
    header = None
    m_edges: list[Edge] = []
    c_edges: list[Edge] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        try:
            if tok[0] == "graph" and len(tok) == 3:
                if header is not None:
                    raise GraphFormatError(f"line {lineno}: duplicate header")
                header = (int(tok[1]), int(tok[2]))
            elif tok[0] in ("edge", "sense") and len(tok) == 3:
                if header is None:
                    raise GraphFormatError(f"line {lineno}: '{tok[0]}' before 'graph' header")
                pair = (int(tok[1]), int(tok[2]))
                (m_edges if tok[0] == "edge" else c_edges).append(pair)
            else:
                raise GraphFormatError(f"line {lineno}: cannot parse {raw!r}")
        except ValueError as exc:
            if isinstance(exc, GraphFormatError):
                raise
            raise GraphFormatError(f"line {lineno}: {exc}") from exc
    if header is None:
        raise GraphFormatError("missing 'graph <N> <D>' header")
    n, d = header
    try:
        graph = ConstraintGraph(n, m_edges)
        sensing = SensingGraph(n, c_edges)
        validate_palette(d)
    except (IndexError, ValueError) as exc:
        raise GraphFormatError(str(exc)) from exc
    return graph, sensing, d


def read_graph(path: str | os.PathLike) -> tuple[ConstraintGraph, SensingGraph, int]:
    """Read ``graph``/``edge``/``sense`` lines; returns ``(G, G', D)``."""
    with open(path, encoding="ascii") as fh:
        return parse_graph(fh.read())
