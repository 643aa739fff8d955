r"""
Learning a coloring without messages
====================================

Each vertex keeps a probability row over the palette.  A vertex that sees no
conflict locks onto its color; one that does spreads its mass over the
alternatives.  No vertex ever learns what color a neighbor picked.
"""

import numpy as np

from cflcolor import ConstraintGraph, SensingGraph, is_proper_coloring
from cflcolor.solver import SolverParams, gamma, init, run, step

# A 5-cycle needs three colors.
g = ConstraintGraph(5, [(i, (i + 1) % 5) for i in range(5)])
s = SensingGraph.full(g)
params = SolverParams(n_colors=3, a=1.0, b=0.1)
print("gamma =", gamma(params))

out = run(s, params, seed=1, max_rounds=10_000, graph=g)
print(out.converged, out.rounds_used, out.final_assignment, is_proper_coloring(g, out.final_assignment))

###############################################################################
# Watching the first few rounds by hand.
state = init(5, params, seed=1)
for _ in range(4):
    state = step(state, s, params)
    print(state.round, state.assignment, np.round(state.probs.max(axis=1), 3))

###############################################################################
# Runs are reproducible from the seed alone.
again = run(s, params, seed=1, max_rounds=10_000, graph=g)
print(np.array_equal(again.final_assignment, out.final_assignment))
