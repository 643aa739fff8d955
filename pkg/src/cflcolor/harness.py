"""Batch experiments, convergence-time bounds and result files.

Every trial derives its own seed from ``(master seed, trial index)`` with
:class:`numpy.random.SeedSequence`; instance generation and solver sampling
use separate child streams, so adding trials never changes earlier ones.
"""

from __future__ import annotations

import csv
import dataclasses
import decimal
import io
import json
import math
import os
import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Sequence

import numpy as np

from .connectivity import DEFAULT_NODE_BUDGET, ChromaticResult, chromatic_number, node_eligibility
from .graphs import ConstraintGraph, SensingGraph, read_graph
from .solver import SolverParams, gamma, run
from .wireless import (
    DEFAULT_POWERS,
    DbmConfig,
    ExponentPathLoss,
    assign_powers,
    build_interference_graph,
    generate_dbm,
    parse_xyz,
    synthetic_ap_layout,
)

__all__ = [
    "BoundInputs",
    "BoundValue",
    "ExperimentConfig",
    "TrialRecord",
    "ExperimentResult",
    "DEFAULT_EPSILON",
    "SECONDS_PER_ROUND",
    "theorem1_bound",
    "corollary2_bound",
    "parse_palette",
    "resolve_palette",
    "trial_seed",
    "load_instance",
    "run_trial",
    "run_experiment",
    "summarize",
    "connectivity_sweep",
    "emit",
    "records_to_csv",
    "result_to_json",
    "load_schema",
    "CSV_COLUMNS",
]

DEFAULT_EPSILON = 0.01
SECONDS_PER_ROUND = 10.0
CSV_COLUMNS = ("instance_id", "seed", "n", "d", "chi", "converged", "rounds", "frac_satisfied", "frac_eligible")

# -- bounds -----------------------------------------------------------------


@dataclass(frozen=True)
class BoundInputs:
    n: int
    gamma: float
    epsilon: float = DEFAULT_EPSILON

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n}")
        if not 0.0 < self.gamma < 1.0:
            raise ValueError(f"gamma must lie in (0, 1), got {self.gamma}")
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")


@dataclass(frozen=True)
class BoundValue:
    """Natural log of an iteration bound, plus the bound itself when it fits in a float."""

    log_value: float
    value: float | None

    @property
    def overflow(self) -> bool:
        return self.value is None

    def to_dict(self) -> dict:
        return {"log_value": self.log_value, "value": self.value, "overflow": self.overflow}


_CTX = decimal.Context(prec=50)


def _log_bound(n_factor: int, exponent: int, inputs: BoundInputs) -> BoundValue:
    # ln(n_factor) + exponent * ln(1/gamma) + ln(ln(1/eps)), evaluated in 50-digit decimal
    ctx = _CTX
    g = decimal.Decimal(inputs.gamma)
    eps = decimal.Decimal(inputs.epsilon)
    total = ctx.add(
        ctx.add(ctx.ln(decimal.Decimal(n_factor)), ctx.multiply(decimal.Decimal(exponent), -ctx.ln(g))),
        ctx.ln(-ctx.ln(eps)),
    )
    log_value = float(total)
    try:
        value = float(ctx.exp(total))
    except decimal.Overflow:
        value = None
    if value is not None and math.isinf(value):
        value = None
    return BoundValue(log_value, value)


def theorem1_bound(inputs: BoundInputs) -> BoundValue:
    """``N^3 exp(N^4 log(1/gamma)) log(1/eps)``: iterations needed with sensing restrictions."""
    n = int(inputs.n)
    return _log_bound(n**3, n**4, inputs)


def corollary2_bound(inputs: BoundInputs) -> BoundValue:
    """``N exp(N(N+1)/2 log(1/gamma)) log(1/eps)``: the same with full sensing."""
    n = int(inputs.n)
    return _log_bound(n, n * (n + 1) // 2, inputs)


# -- experiment configuration -------------------------------------------------

_PALETTE_RE = re.compile(r"^\s*(chi)\s*(?:\+\s*(\d+))?\s*$|^\s*(\d+)\s*$", re.IGNORECASE)


def parse_palette(rule: str | int) -> tuple[str, int]:
    """``"chi"`` -> ``("chi", 0)``, ``"chi+2"`` -> ``("chi", 2)``, ``"7"`` -> ``("fixed", 7)``."""
    if isinstance(rule, (int, np.integer)):
        rule = str(int(rule))
    m = _PALETTE_RE.match(rule)
    if not m:
        raise ValueError(f"palette rule must be 'chi', 'chi+K' or an integer, got {rule!r}")
    if m.group(1):
        return "chi", int(m.group(2) or 0)
    d = int(m.group(3))
    if d < 1:
        raise ValueError("fixed palette needs at least one color")
    return "fixed", d


def resolve_palette(rule: str | int, chi: int | None) -> int | None:
    kind, k = parse_palette(rule)
    if kind == "fixed":
        return k
    if chi is None:
        return None
    return max(chi, 1) + k


@dataclass(frozen=True)
class ExperimentConfig:
    """One batch of solver trials.

    ``source`` selects how each trial's instance is produced:

    ``dbm``     fresh Directed Boolean Model sample per trial (``dbm``)
    ``file``    the same graph file every trial (``path``)
    ``xyz``     fixed coordinates from ``path``, fresh power draw per trial
    ``layout``  fresh uniform layout of ``n_aps`` points in a ``layout_side`` square
    """

    source: str = "dbm"
    dbm: DbmConfig = field(default_factory=DbmConfig)
    path: str | None = None
    alpha: float = 4.3
    threshold: float = -45.0
    powers: tuple[float, ...] = DEFAULT_POWERS
    mode: str = "channel"
    n_aps: int = 81
    layout_side: float = 150.0
    trials: int = 100
    max_rounds: int = 100_000
    palette: str = "chi"
    a: float = 1.0
    b: float = 0.1
    seed: int = 0
    full_sensing: bool = False
    chromatic_budget: int = DEFAULT_NODE_BUDGET
    quantiles: tuple[float, ...] = (0.1, 0.25, 0.5, 0.75, 0.9, 0.99)
    cdf_rounds: tuple[int, ...] = (10, 100, 1000, 10_000, 100_000)

    def __post_init__(self):
        if self.source not in ("dbm", "file", "xyz", "layout"):
            raise ValueError(f"unknown source {self.source!r}")
        if self.source in ("file", "xyz") and not self.path:
            raise ValueError(f"source {self.source!r} needs a path")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be at least 1")
        parse_palette(self.palette)
        SolverParams(2, self.a, self.b)
        object.__setattr__(self, "powers", tuple(float(p) for p in self.powers))

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["dbm"].pop("seed", None)
        d["powers"] = list(self.powers)
        d["dbm"]["power_set"] = list(self.dbm.power_set)
        d["quantiles"] = list(self.quantiles)
        d["cdf_rounds"] = list(self.cdf_rounds)
        return d


@dataclass(frozen=True)
class TrialRecord:
    instance_id: int
    seed: int
    n: int
    d: int
    chi: int | None
    converged: bool | None
    rounds: int | None
    frac_satisfied: float | None
    frac_eligible: float

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    records: list[TrialRecord]
    skipped: list[int]
    summary: dict

    def to_dict(self) -> dict:
        return result_to_json_obj(self)


def trial_seed(master: int, index: int) -> int:
    ss = np.random.SeedSequence(master, spawn_key=(index,))
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def _streams(seed: int) -> tuple[np.random.Generator, np.random.SeedSequence]:
    return (
        np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0,))),
        np.random.SeedSequence(seed, spawn_key=(1,)),
    )


_file_cache: dict[str, tuple] = {}


def load_instance(cfg: ExperimentConfig, rng: np.random.Generator) -> tuple[ConstraintGraph, SensingGraph]:
    """Build the instance for one trial from ``rng``."""
    if cfg.source == "dbm":
        g, s, _ = generate_dbm(cfg.dbm, rng)
        return g, s
    if cfg.source == "file":
        key = os.path.abspath(cfg.path)
        if key not in _file_cache:
            _file_cache[key] = read_graph(cfg.path)
        g, s, _ = _file_cache[key]
        return g, s
    model = ExponentPathLoss(cfg.alpha)
    if cfg.source == "xyz":
        key = "xyz:" + os.path.abspath(cfg.path)
        if key not in _file_cache:
            with open(cfg.path, encoding="utf-8") as fh:
                _file_cache[key] = (parse_xyz(fh.read()),)
        coords = _file_cache[key][0]
    else:
        coords = [tuple(c) for c in synthetic_ap_layout(cfg.n_aps, cfg.layout_side, rng)]
    nodes = assign_powers(coords, cfg.powers, cfg.threshold, rng)
    return build_interference_graph(nodes, model, cfg.mode)


def run_trial(cfg: ExperimentConfig, index: int, solve: bool = True) -> TrialRecord | None:
    """One trial; ``None`` when the palette needs a chromatic number the search could not settle."""
    seed = trial_seed(cfg.seed, index)
    inst_rng, solver_seed = _streams(seed)
    g, s = load_instance(cfg, inst_rng)
    if cfg.full_sensing:
        s = SensingGraph.full(g)
    n = g.n_vertices
    chi_res: ChromaticResult | None = None
    kind, _ = parse_palette(cfg.palette)
    if n and (kind == "chi" or solve):
        chi_res = chromatic_number(g, budget=cfg.chromatic_budget)
    chi = 0 if n == 0 else (chi_res.value if chi_res is not None else None)
    d = resolve_palette(cfg.palette, chi)
    if d is None:
        return None
    known = {frozenset(range(n)): chi_res} if chi_res is not None else None
    elig = node_eligibility(g, s, d, cfg.chromatic_budget, known=known) if n else np.ones(0)
    frac_elig = float(elig.mean()) if n else 1.0
    if not solve:
        return TrialRecord(index, seed, n, d, chi, None, None, None, frac_elig)
    if n == 0:
        return TrialRecord(index, seed, 0, d, chi, True, 0, 1.0, frac_elig)
    outcome = run(s, SolverParams(d, cfg.a, cfg.b), solver_seed, cfg.max_rounds, graph=g)
    frac_sat = float(outcome.per_vertex_full_satisfaction.mean())
    return TrialRecord(index, seed, n, d, chi, outcome.converged, outcome.rounds_used, frac_sat, frac_elig)


def _weighted(records: Sequence[TrialRecord], attr: str) -> float | None:
    vals = [(getattr(r, attr), r.n) for r in records if getattr(r, attr) is not None]
    total = sum(n for _, n in vals)
    if not vals or total == 0:
        return None
    return sum(v * n for v, n in vals) / total


def summarize(records: Sequence[TrialRecord], cfg: ExperimentConfig, skipped: Sequence[int] = ()) -> dict:
    solved = [r for r in records if r.converged is not None]
    conv = [r.rounds for r in solved if r.converged]
    mean = float(np.mean(conv)) if conv else None
    quant = {repr(float(q)): float(np.quantile(conv, q)) for q in cfg.quantiles} if conv else {}
    cdf = [
        {"rounds": int(t), "fraction": (sum(1 for x in conv if x <= t) / len(solved)) if solved else None}
        for t in cfg.cdf_rounds
    ]
    params = SolverParams(2, cfg.a, cfg.b)
    return {
        "requested_trials": cfg.trials,
        "trials": len(solved),
        "chromatic_timeouts": len(skipped),
        "converged": len(conv),
        "convergence_fraction": (len(conv) / len(solved)) if solved else None,
        "mean_rounds": mean,
        "mean_rounds_note": "mean over converged trials only; non-converged trials are counted separately",
        "mean_seconds_at_10s_per_round": None if mean is None else mean * SECONDS_PER_ROUND,
        "rounds_quantiles": quant,
        "cdf": cdf,
        "eligible_fraction": _weighted(records, "frac_eligible"),
        "colored_fraction": _weighted(solved, "frac_satisfied"),
        "fractions_note": "node-weighted over all instances",
        "gamma_at_d2": gamma(params),
    }


def _run_indexed(args):
    cfg, i, solve = args
    return run_trial(cfg, i, solve)


def run_experiment(cfg: ExperimentConfig, solve: bool = True, workers: int | None = None) -> ExperimentResult:
    """Run ``cfg.trials`` independent trials, optionally across processes.

    Records come back ordered by trial index whatever the worker count.
    """
    jobs = [(cfg, i, solve) for i in range(cfg.trials)]
    if workers and workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(workers) as pool:
            out = list(pool.map(_run_indexed, jobs))
    else:
        out = [_run_indexed(j) for j in jobs]
    records = [r for r in out if r is not None]
    skipped = [i for i, r in enumerate(out) if r is None]
    return ExperimentResult(cfg, records, skipped, summarize(records, cfg, skipped))


def connectivity_sweep(
    cfg: ExperimentConfig,
    thresholds: Sequence[float],
    lambdas: Sequence[float] = tuple(round(0.1 * k, 1) for k in range(1, 11)),
    colored_threshold: float | None = None,
    instances: int = 200,
) -> list[dict]:
    """Eligible-node fraction per ``(lambda, threshold)`` for DBM instances.

    At ``colored_threshold`` the solver is also run and the colored-node
    fraction reported; elsewhere that column is ``None``.
    """
    if not thresholds or not lambdas:
        raise ValueError("thresholds and lambdas must be nonempty")
    rows = []
    for lam in lambdas:
        for thr in thresholds:
            dbm = dataclasses.replace(cfg.dbm, intensity=float(lam), detection_threshold=float(thr))
            sub = dataclasses.replace(cfg, source="dbm", dbm=dbm, trials=instances)
            solve = colored_threshold is not None and float(thr) == float(colored_threshold)
            res = run_experiment(sub, solve=solve)
            rows.append(
                {
                    "lambda": float(lam),
                    "threshold_dbm": float(thr),
                    "instances": len(res.records),
                    "eligible_fraction": res.summary["eligible_fraction"],
                    "colored_fraction": res.summary["colored_fraction"] if solve else None,
                }
            )
    return rows


# -- output -------------------------------------------------------------------


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def records_to_csv(records: Sequence[TrialRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow([_fmt(getattr(r, c)) for c in CSV_COLUMNS])
    return buf.getvalue()


def result_to_json_obj(result: ExperimentResult) -> dict:
    return {
        "config": result.config.to_dict(),
        "records": [r.to_dict() for r in result.records],
        "skipped_trials": list(result.skipped),
        "summary": result.summary,
    }


def result_to_json(result: ExperimentResult) -> str:
    return json.dumps(result_to_json_obj(result), indent=2, allow_nan=False) + "\n"


def emit(result: ExperimentResult | Sequence[TrialRecord], fmt: str, path: str | os.PathLike) -> None:
    """Write records as CSV, or the full result as JSON, to ``path``."""
    if fmt == "csv":
        records = result.records if isinstance(result, ExperimentResult) else result
        text = records_to_csv(records)
    elif fmt == "json":
        if not isinstance(result, ExperimentResult):
            raise TypeError("JSON output needs an ExperimentResult")
        text = result_to_json(result)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write {path}: {exc.strerror}") from exc


def load_schema() -> dict:
    """JSON schema for :func:`result_to_json` output."""
    with resources.files("cflcolor").joinpath("data/experiment.schema.json").open(encoding="utf-8") as fh:
        return json.load(fh)
