"""Decentralized graph coloring by communication-free learning under sensing restrictions."""

from .connectivity import (
    ChromaticResult,
    ComponentReport,
    SccDecomposition,
    analyze,
    check_theorem2,
    chromatic_number,
    component_in_degree,
    is_strongly_connected,
    node_eligibility,
    scc_decompose,
)
from .graphs import (
    ConstraintGraph,
    SensingGraph,
    check_condition_a,
    clause,
    is_proper_coloring,
    read_graph,
    restricted_equals_full,
    unsatisfied_set,
    write_graph,
)
from .harness import (
    BoundInputs,
    ExperimentConfig,
    TrialRecord,
    connectivity_sweep,
    corollary2_bound,
    emit,
    run_experiment,
    theorem1_bound,
)
from .solver import RunOutcome, SolverParams, SolverState, absorption_check, gamma, init, run, step
from .wireless import (
    DbmConfig,
    ExponentPathLoss,
    Node,
    ThreeGppIndoor,
    build_interference_graph,
    coverage_radius,
    generate_dbm,
    ingest_xyz,
    path_loss_db,
)

__version__ = "0.1.0"
