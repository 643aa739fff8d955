"""Radio propagation models and interference-graph construction.

Distances are in meters, powers in dBm, losses in dB.  A transmitter at
power ``P`` is heard by a receiver with threshold ``Q`` when
``P - path_loss_db(d) >= Q``.
"""

from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .graphs import ConstraintGraph, SensingGraph

__all__ = [
    "ThreeGppIndoor",
    "ExponentPathLoss",
    "PathLossModel",
    "Node",
    "DbmConfig",
    "XyzFormatError",
    "DEFAULT_POWERS",
    "path_loss_db",
    "coverage_radius",
    "generate_dbm",
    "build_interference_graph",
    "ingest_xyz",
    "parse_xyz",
    "write_xyz",
    "assign_powers",
    "synthetic_ap_layout",
]

DEFAULT_POWERS = (12.0, 14.0, 16.0, 18.0, 20.0)


@dataclass(frozen=True)
class ThreeGppIndoor:
    """Indoor log-distance loss ``43.3 log10(d) + 11.5 + 20 log10(f)``, f in GHz."""

    frequency_ghz: float = 2.412

    def __post_init__(self):
        if not self.frequency_ghz > 0:
            raise ValueError("frequency must be positive")

    @property
    def slope(self) -> float:
        return 43.3

    @property
    def intercept(self) -> float:
        return 11.5 + 20.0 * math.log10(self.frequency_ghz)


@dataclass(frozen=True)
class ExponentPathLoss:
    """Power-law attenuation ``d**alpha``, i.e. ``10 alpha log10(d)`` dB."""

    alpha: float = 4.3

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")

    @property
    def slope(self) -> float:
        return 10.0 * self.alpha

    @property
    def intercept(self) -> float:
        return 0.0


PathLossModel = Union[ThreeGppIndoor, ExponentPathLoss]


def path_loss_db(model: PathLossModel, d):
    """Loss in dB at distance ``d`` (scalar or array, must be positive)."""
    d_arr = np.asarray(d, dtype=float)
    if np.any(~(d_arr > 0)):
        raise ValueError("distance must be positive")
    out = model.slope * np.log10(d_arr) + model.intercept
    return float(out) if out.ndim == 0 else out


def coverage_radius(model: PathLossModel, p_tx: float, r_threshold: float) -> float:
    """Largest distance at which ``p_tx - path_loss_db(d) >= r_threshold``.

    The loss is increasing in ``d``, so this is the root of
    ``path_loss_db(d) = p_tx - r_threshold``.  Returns 0.0 when the budget is
    not a finite number.
    """
    budget = p_tx - r_threshold
    if not math.isfinite(budget):
        return 0.0
    return 10.0 ** ((budget - model.intercept) / model.slope)


@dataclass(frozen=True)
class Node:
    x: float
    y: float
    tx_power: float
    threshold: float
    z: float = 0.0


@dataclass(frozen=True)
class DbmConfig:
    """Directed Boolean Model: Poisson points in a square, ball radii from random powers."""

    intensity: float = 0.5
    area_side: float = 10.0
    power_set: tuple[float, ...] = DEFAULT_POWERS
    detection_threshold: float = -25.0
    frequency_ghz: float = 2.412
    seed: int | None = None

    def __post_init__(self):
        if not self.intensity > 0:
            raise ValueError("intensity must be positive")
        if not self.area_side > 0:
            raise ValueError("area_side must be positive")
        if len(self.power_set) == 0:
            raise ValueError("power_set must be nonempty")
        object.__setattr__(self, "power_set", tuple(float(p) for p in self.power_set))

    @property
    def area(self) -> float:
        return self.area_side**2

    @property
    def model(self) -> ThreeGppIndoor:
        return ThreeGppIndoor(self.frequency_ghz)


def _positions(nodes: Sequence[Node]) -> np.ndarray:
    return np.array([(nd.x, nd.y) for nd in nodes], dtype=float).reshape(-1, 2)


def _distances(pos: np.ndarray) -> np.ndarray:
    diff = pos[:, None, :] - pos[None, :, :]
    return np.hypot(diff[..., 0], diff[..., 1])


def _graphs_from_reach(reach: np.ndarray) -> tuple[ConstraintGraph, SensingGraph]:
    n = reach.shape[0]
    reach = reach & ~np.eye(n, dtype=bool)
    src, dst = np.nonzero(reach)
    sensed = list(zip(src.tolist(), dst.tolist()))
    return ConstraintGraph(n, sensed), SensingGraph(n, sensed)


def generate_dbm(cfg: DbmConfig, rng: np.random.Generator | None = None):
    """Sample one instance; returns ``(ConstraintGraph, SensingGraph, nodes)``.

    ``y -> z`` is sensed when ``z`` lies in the coverage ball of ``y``; the
    constraint graph is the symmetric closure.
    """
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    n = int(rng.poisson(cfg.intensity * cfg.area))
    pos = rng.uniform(0.0, cfg.area_side, size=(n, 2))
    powers = rng.choice(np.asarray(cfg.power_set), size=n)
    model = cfg.model
    radius = np.array([coverage_radius(model, p, cfg.detection_threshold) for p in powers])
    reach = _distances(pos) <= radius[:, None]
    nodes = [Node(float(x), float(y), float(p), cfg.detection_threshold) for (x, y), p in zip(pos, powers)]
    g, s = _graphs_from_reach(reach)
    return g, s, nodes


def build_interference_graph(
    nodes: Sequence[Node], model: PathLossModel, mode: str = "channel"
) -> tuple[ConstraintGraph, SensingGraph]:
    """Constraint and sensing graphs from node positions, powers and thresholds.

    ``j`` affects ``i`` when ``P_j - PL(d_ji) >= Q_i``.  In ``channel`` mode
    the affected receiver senses the conflict, giving ``(j, i)``; in ``tdma``
    mode the orientation is reversed.  The constraint graph is the same in
    both modes.  Coincident nodes always affect each other.
    """
    if mode not in ("channel", "tdma"):
        raise ValueError(f"unknown mode {mode!r}")
    n = len(nodes)
    if n == 0:
        return ConstraintGraph(0), SensingGraph(0)
    pos = _positions(nodes)
    dist = _distances(pos)
    np.fill_diagonal(dist, np.inf)
    coincident = dist == 0
    if coincident.any():
        pairs = np.argwhere(np.triu(coincident))
        warnings.warn(f"{len(pairs)} coincident node pair(s); edges forced", RuntimeWarning, stacklevel=2)
    p_tx = np.array([nd.tx_power for nd in nodes], dtype=float)
    q = np.array([nd.threshold for nd in nodes], dtype=float)
    safe = np.where(coincident, 1.0, dist)
    received = p_tx[:, None] - path_loss_db(model, safe)
    reach = (received >= q[None, :]) | coincident
    np.fill_diagonal(reach, False)
    if mode == "tdma":
        reach = reach.T
    return _graphs_from_reach(reach)


class XyzFormatError(ValueError):
    pass


def assign_powers(coords: Sequence[tuple[float, float, float]], powers, threshold: float, rng) -> list[Node]:
    p = rng.choice(np.asarray(powers, dtype=float), size=len(coords))
    return [Node(float(x), float(y), float(pw), float(threshold), float(z)) for (x, y, z), pw in zip(coords, p)]


def parse_xyz(text: str) -> list[tuple[float, float, float]]:
    coords = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.replace(",", " ").split()
        if len(tok) != 3:
            raise XyzFormatError(f"line {lineno}: expected 'x y z', got {raw!r}")
        try:
            coords.append(tuple(float(t) for t in tok))
        except ValueError:
            raise XyzFormatError(f"line {lineno}: non-numeric field in {raw!r}") from None
    return coords


def ingest_xyz(
    path: str | os.PathLike,
    powers: Sequence[float] = DEFAULT_POWERS,
    threshold: float = -45.0,
    rng: np.random.Generator | int | None = None,
) -> list[Node]:
    """Read ``x y z`` rows (meters) and draw a transmit power per node."""
    with open(path, encoding="utf-8") as fh:
        coords = parse_xyz(fh.read())
    return assign_powers(coords, powers, threshold, np.random.default_rng(rng))


def write_xyz(path: str | os.PathLike, coords) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for x, y, *z in coords:
            fh.write(f"{float(x)!r} {float(y)!r} {float(z[0]) if z else 0.0!r}\n")


def synthetic_ap_layout(n: int = 81, side: float = 150.0, rng: np.random.Generator | None = None) -> np.ndarray:
    """Uniform ``(n, 3)`` coordinates in a ``side x side`` square, z = 0."""
    rng = np.random.default_rng(rng)
    xy = rng.uniform(0.0, side, size=(n, 2))
    return np.column_stack([xy, np.zeros(n)])
