r"""
Constraints and what each vertex can see
========================================

A constraint graph says which vertex pairs must differ.  A sensing graph
says which of those conflicts a vertex actually notices.  An edge ``(j, i)``
in the sensing graph means ``i`` hears about clashes with ``j``.
"""

import numpy as np

from cflcolor import ConstraintGraph, SensingGraph, check_condition_a, is_proper_coloring, unsatisfied_set

# A path 0 - 1 - 2 where vertex 1 is deaf to vertex 2.
g = ConstraintGraph(3, [(0, 1), (1, 2)])
s = SensingGraph(3, [(0, 1), (1, 0), (1, 2)])
print(check_condition_a(g, s))

# Every clash is noticed by at least one of its two endpoints, so
# "nobody complains" and "the coloring is proper" coincide.
for x in [(0, 1, 0), (0, 1, 1), (1, 1, 0)]:
    print(x, is_proper_coloring(g, x), sorted(unsatisfied_set(s, x)))

###############################################################################
# Drop the only direction that covers edge (1, 2) and the two notions split:
# vertex 2 is happy even though it clashes with vertex 1.
s_blind = SensingGraph(3, [(0, 1), (1, 0)])
ok, missing = check_condition_a(g, s_blind)
print(ok, missing)
x = np.array([0, 1, 1])
print(is_proper_coloring(g, x), sorted(unsatisfied_set(s_blind, x)))
