"""Circulation antiderivatives on a genus-one graph.

A circulation function is an antiderivative of the per-arc density:
its jumps across the graph must balance at every node (Kirchhoff) and
its 1-valent limits vanish.  On a graph with one independent cycle the
solution space is a line; pinning one value on a cycle arc selects the
unique representative.
"""

import numpy as np

from casimirkit.circulation import (AbstractDensity, antiderivative_space,
                                    pin_circulations)
from casimirkit.errors import NoSolution
from casimirkit.reeb import abstract_graph

# min -> saddle -> (double arc) -> saddle -> max
graph = abstract_graph([0.0, 1.0, 2.0, 3.0],
                       [(0, 1), (1, 2), (1, 2), (2, 3)])
a = np.array([0.6, 0.3, -0.2, -0.7])         # arc densities, zero sum
density = AbstractDensity(graph, a)

space = antiderivative_space(graph, density)
print(f"solution space: dimension {space.dimension} (betti1 = {graph.betti1})")
print(f"root residual {space.residual:.2e}")
print("particular solution limits (tail, head) per arc:")
for arc, lim in zip(graph.arcs, space.particular.limits()):
    print(f"  arc {arc.id} ({arc.tail}->{arc.head}): "
          f"({lim[0]:+.4f}, {lim[1]:+.4f})")

z = 0.17
lam = pin_circulations(graph, density, {(1, graph.arcs[1].f_lo): z})
print(f"\npinned at arc 1 tail = {z}:")
for arc, lim in zip(graph.arcs, lam.limits()):
    print(f"  arc {arc.id}: ({lim[0]:+.4f}, {lim[1]:+.4f})")
print(f"max Kirchhoff residual {lam.max_node_residual():.2e}")

bad = AbstractDensity(graph, a + 0.05)
try:
    antiderivative_space(graph, bad)
except NoSolution as exc:
    print(f"\nnonzero total density correctly rejected: {exc}")
