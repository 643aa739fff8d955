r"""
When does the solver provably finish?
=====================================

Split the sensing graph into strongly connected components.  A component fed
by ``k`` outside vertices is safe when its own chromatic number still fits
in ``D - k`` colors.
"""

from cflcolor import SensingGraph, analyze, check_theorem2, node_eligibility, scc_decompose

# Triangle-with-tail {0,1,2,3} feeds the path {4,5,6} through two distinct vertices.
sensed = [(0, 1), (1, 2), (2, 0), (2, 3), (3, 0), (4, 5), (5, 4), (5, 6), (6, 5), (2, 4), (3, 5)]
s = SensingGraph(7, sensed)
g = s.symmetric_closure()

dec = scc_decompose(s)
print([sorted(c) for c in dec.components])

for d in (3, 4):
    reports, verdict = check_theorem2(g, s, d)
    print(d, verdict, [(r.size, r.chromatic, r.in_degree, r.eligible) for r in reports])
    print("  per-vertex:", node_eligibility(g, s, d).tolist())

###############################################################################
# The same report as a JSON-ready dictionary.
doc = analyze(g, s, 4)
print({k: doc[k] for k in ("chromatic", "condition_a", "strongly_connected", "theorem2")})
