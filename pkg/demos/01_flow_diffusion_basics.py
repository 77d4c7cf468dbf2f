"""
Flow diffusion on toy graphs
============================

Mass is dropped on a seed node; every node can absorb one unit and passes
the rest to its neighbours. The dual variable x is positive exactly on the
nodes that ended up full, so its support is the recovered cluster.
"""
import numpy as np

from labeldiffusion import DiffusionProblem, build_graph, solve_flow_diffusion
from labeldiffusion.flow import kkt_violation, net_mass, qp_oracle

# Two nodes joined by one edge. Node 0 starts with 2 units, keeps 1 and
# sends 1 across, so x = (1, 0).
G = build_graph(2, [(0, 1)])
x = solve_flow_diffusion(DiffusionProblem(G, {0: 2.0}, tolerance=1e-10))
print("two nodes:", x.as_dict())

# A path 0-1-2 with 3 units in the middle. Each endpoint receives exactly
# one unit, which fills it without making it send anything on.
G = build_graph(3, [(0, 1), (1, 2)])
P = DiffusionProblem(G, {1: 3.0}, tolerance=1e-10)
x = solve_flow_diffusion(P)
print("path:", x.as_dict(), "net mass:", net_mass(G, {1: 3.0}, x).round(6))

# A barbell: two 6-cliques joined by one edge. 8 units from node 0 fill its
# own clique; the leftover crosses the bridge and fills node 6, and only a
# trickle reaches the rest of the far clique.
edges = [(i, j) for i in range(6) for j in range(i + 1, 6)]
edges += [(i + 6, j + 6) for i, j in edges] + [(5, 6)]
G = build_graph(12, edges)
P = DiffusionProblem(G, {0: 8.0}, tolerance=1e-10)
x = solve_flow_diffusion(P)
print("barbell support:", x.nodes.tolist())
print("touched:", len(x.touched), "of", G.n, "nodes,", x.pushes, "pushes")

# The push solver and the dense reference agree, and the optimality
# conditions hold to the requested tolerance.
ref = qp_oracle(P)
print("max |push - dense| =", np.abs(x.dense(G.n) - ref.dense(G.n)).max())
print("KKT residual =", kkt_violation(P, x))

# With unit sinks the support can never hold more nodes than there is mass.
print("support size", len(x), "<= total mass", 8)
