r"""
From radio geometry to interference graphs
==========================================

Transmit power, path loss and a detection threshold decide who hears whom.
Unequal powers make hearing one-sided, which is where sensing asymmetry
comes from.
"""

import numpy as np

from cflcolor.wireless import (
    DbmConfig,
    ExponentPathLoss,
    Node,
    ThreeGppIndoor,
    build_interference_graph,
    coverage_radius,
    generate_dbm,
    path_loss_db,
)

indoor = ThreeGppIndoor(2.412)
print(path_loss_db(indoor, [1.0, 10.0]))
for p in (12, 16, 20):
    print(p, "dBm reaches", round(coverage_radius(indoor, p, -25.0), 3), "m")

###############################################################################
# A loud and a quiet transmitter 20 m apart: only the loud one is heard.
nodes = [Node(0, 0, 20, -45), Node(20, 0, 5, -45)]
g, s = build_interference_graph(nodes, ExponentPathLoss(4.3))
print(sorted(s.edges), sorted(g.edges))

###############################################################################
# Random instances: Poisson many points in a 10 m square.
g, s, nodes = generate_dbm(DbmConfig(intensity=0.5, detection_threshold=-25.0, seed=3))
one_sided = len(s.edges) - len(s.edges & {(i, j) for j, i in s.edges})
print(len(nodes), "nodes,", len(g.undirected_edges()), "constraints,", one_sided, "heard one way only")
print("mean degree", np.mean([g.degree(v) for v in range(g.n_vertices)]))
