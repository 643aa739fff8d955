"""Communication-free learning solver for coloring under sensing restrictions.

Every vertex keeps a probability row over the palette.  One round: all
vertices sample a color, each vertex checks its information set against the
completed assignment, then satisfied vertices lock onto their color while
unsatisfied ones shift mass towards the other colors.

Sampling is counter based: the uniform used by vertex ``i`` in round ``t``
is a hash of ``(seed key, i, t)``, so a run does not depend on the order in
which vertices are visited.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graphs import ConstraintGraph, SensingGraph, unsatisfied_mask

__all__ = [
    "SolverParams",
    "SolverState",
    "RunOutcome",
    "gamma",
    "init",
    "step",
    "run",
    "absorption_check",
    "unsatisfied_update",
    "vertex_uniforms",
    "RENORMALIZE_EVERY",
]

RENORMALIZE_EVERY = 1024

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_ROUND_STRIDE = np.uint64(0xD1B54A32D192ED03)
_S30, _S27, _S31, _S11 = (np.uint64(k) for k in (30, 27, 31, 11))
_TO_UNIT = 1.0 / 9007199254740992.0


@dataclass(frozen=True)
class SolverParams:
    """Learning rates ``a`` (reward on the failed color) and ``b`` (decay)."""

    n_colors: int
    a: float = 1.0
    b: float = 0.1

    def __post_init__(self):
        if not 0.0 < self.a <= 1.0:
            raise ValueError(f"a must lie in (0, 1], got {self.a}")
        if not 0.0 < self.b <= 1.0:
            raise ValueError(f"b must lie in (0, 1], got {self.b}")
        if int(self.n_colors) != self.n_colors or self.n_colors < 1:
            raise ValueError(f"n_colors must be a positive integer, got {self.n_colors}")

    @property
    def denominator(self) -> float:
        return self.n_colors - 1 + self.a / self.b


@dataclass
class SolverState:
    probs: np.ndarray
    assignment: np.ndarray
    round: int = 0
    key: int = 0
    unsatisfied: np.ndarray | None = field(default=None, repr=False)

    def copy(self) -> "SolverState":
        return SolverState(
            self.probs.copy(),
            self.assignment.copy(),
            self.round,
            self.key,
            None if self.unsatisfied is None else self.unsatisfied.copy(),
        )


@dataclass(frozen=True)
class RunOutcome:
    converged: bool
    rounds_used: int
    final_assignment: np.ndarray
    per_vertex_full_satisfaction: np.ndarray | None = None

    def to_dict(self) -> dict:
        sat = self.per_vertex_full_satisfaction
        return {
            "converged": self.converged,
            "rounds_used": self.rounds_used,
            "final_assignment": [int(c) for c in self.final_assignment],
            "per_vertex_full_satisfaction": None if sat is None else [int(s) for s in sat],
        }


def gamma(params: SolverParams) -> float:
    """Smallest probability an unsatisfied vertex can put on any color after an update."""
    return min(params.a, params.b) / params.denominator


def _seed_key(seed: int | np.random.SeedSequence | None) -> int:
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _finalize(z: np.ndarray) -> np.ndarray:
    # splitmix64 output function: a bijection on 64-bit words
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    return z ^ (z >> _S31)


def _vertex_offsets(vertices) -> np.ndarray:
    return np.asarray(vertices, dtype=np.uint64) * _GOLDEN


def _uniforms(key: int, round_: int, offsets: np.ndarray) -> np.ndarray:
    base = np.uint64(key) + np.uint64(round_) * _ROUND_STRIDE
    return (_finalize(offsets + base) >> _S11) * _TO_UNIT


def vertex_uniforms(key: int, round_: int, vertices: np.ndarray | int) -> np.ndarray:
    """Uniforms in ``[0, 1)`` for the given vertices in round ``round_``.

    ``vertices`` is an index array or a count ``n`` (meaning ``0..n-1``).
    The value for a vertex depends only on ``(key, round_, vertex)``.
    """
    if np.isscalar(vertices):
        vertices = np.arange(int(vertices))
    with np.errstate(over="ignore"):
        return _uniforms(key, round_, _vertex_offsets(vertices))


def init(n: int, params: SolverParams, seed: int | np.random.SeedSequence | None = None) -> SolverState:
    """Uniform rows; the first assignment is drawn by the first :func:`step`."""
    if n < 1:
        raise ValueError("need at least one vertex")
    d = params.n_colors
    probs = np.full((n, d), 1.0 / d)
    return SolverState(probs=probs, assignment=np.full(n, -1, dtype=np.intp), round=0, key=_seed_key(seed))


def unsatisfied_update(rows: np.ndarray, chosen: np.ndarray, params: SolverParams) -> np.ndarray:
    """Apply the unsatisfied-vertex update in place to ``rows`` (shape ``(K, D)``).

    ``chosen[k]`` is the color row ``k`` just played.  Returns ``rows``.
    """
    onehot = np.arange(params.n_colors) == np.asarray(chosen)[:, None]
    rows[...] = _shift(rows, onehot, *_update_constants(params))
    return rows


def _update_constants(params: SolverParams) -> tuple[float, float, float]:
    denom = params.denominator
    return 1.0 - params.b, params.b / denom, (params.a - params.b) / denom


def _shift(probs: np.ndarray, onehot: np.ndarray, decay: float, floor: float, bonus: float) -> np.ndarray:
    # chosen color: (1-b)p + a/den; others: (1-b)p + b/den
    moved = probs * decay
    moved += floor
    moved += bonus * onehot
    return moved


def _sample(probs: np.ndarray, u: np.ndarray) -> np.ndarray:
    cdf = np.cumsum(probs, axis=1)
    x = np.count_nonzero(cdf <= u[:, None], axis=1)
    np.minimum(x, probs.shape[1] - 1, out=x)
    return x


class _Round:
    """Per-run constants for the inner loop."""

    def __init__(self, sensing: SensingGraph, params: SolverParams):
        n, d = sensing.n_vertices, params.n_colors
        e = sensing.edge_array
        self.src, self.dst = e[:, 0].copy(), e[:, 1].copy()
        self.offsets = _vertex_offsets(np.arange(n))
        self.palette = np.arange(d)
        self.consts = _update_constants(params)
        self.n = n

    def __call__(self, state: SolverState) -> None:
        t = state.round + 1
        with np.errstate(over="ignore"):
            u = _uniforms(state.key, t, self.offsets)
        x = _sample(state.probs, u)
        unsat = np.zeros(self.n, dtype=bool)
        unsat[self.dst[x[self.src] == x[self.dst]]] = True
        onehot = (self.palette == x[:, None]).astype(float)
        if unsat.any():
            state.probs = np.where(unsat[:, None], _shift(state.probs, onehot, *self.consts), onehot)
        else:
            state.probs = onehot
        if t % RENORMALIZE_EVERY == 0:
            state.probs /= state.probs.sum(axis=1, keepdims=True)
        state.assignment = x
        state.unsatisfied = unsat
        state.round = t


def _check_dims(state: SolverState, sensing: SensingGraph, params: SolverParams) -> None:
    n, d = state.probs.shape
    if n != sensing.n_vertices:
        raise ValueError(f"state has {n} vertices, sensing graph has {sensing.n_vertices}")
    if d != params.n_colors:
        raise ValueError(f"state has {d} colors, params say {params.n_colors}")


def step(state: SolverState, sensing: SensingGraph, params: SolverParams) -> SolverState:
    """One synchronous round; returns a new state and leaves ``state`` untouched."""
    _check_dims(state, sensing, params)
    new = state.copy()
    _Round(sensing, params)(new)
    return new


def absorption_check(state: SolverState) -> bool:
    """True iff every row is a point mass, so the next assignment is fixed."""
    p = state.probs
    return bool(np.all(np.count_nonzero(p, axis=1) == 1) and np.all(p.max(axis=1) == 1.0))


def run(
    sensing: SensingGraph,
    params: SolverParams,
    seed: int | np.random.SeedSequence | None = None,
    max_rounds: int = 100_000,
    graph: ConstraintGraph | None = None,
    state: SolverState | None = None,
) -> RunOutcome:
    """Iterate until no vertex senses a conflict or ``max_rounds`` is reached.

    When ``graph`` is given, per-vertex satisfaction of the final assignment
    is evaluated against all of its edges rather than the sensed ones.
    Pass ``state`` to continue from an existing state (it is advanced in
    place); ``max_rounds`` then counts additional rounds.
    """
    if max_rounds < 1:
        raise ValueError("max_rounds must be at least 1")
    if state is None:
        state = init(sensing.n_vertices, params, seed)
    _check_dims(state, sensing, params)
    advance = _Round(sensing, params)
    converged = False
    for _ in range(max_rounds):
        advance(state)
        if not state.unsatisfied.any():
            converged = True
            break
    full = None
    if graph is not None:
        full = ~unsatisfied_mask(SensingGraph.full(graph), state.assignment)
    return RunOutcome(converged, state.round, state.assignment.copy(), full)
