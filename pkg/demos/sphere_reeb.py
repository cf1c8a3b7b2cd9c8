"""Height field on the round sphere: the simplest measured Reeb graph.

The pushforward of the area 2-form under z is uniform on [-1, 1]
(Archimedes' hat-box theorem), so the graph density should come out
flat at 2 pi and the first moments should match 4 pi, 0, 4 pi / 3.
"""

import numpy as np

from casimirkit.builders import sphere_octahedron
from casimirkit.measure import arc_cumulative, build_measure, edge_moments
from casimirkit.reeb import build_reeb, check_compatibility
from casimirkit.surface import KIND_NAMES, classify_vertices

surf = sphere_octahedron(6)
print(f"sphere mesh: {surf.n_vertices} vertices, {len(surf.triangles)} triangles")

field = classify_vertices(surf, surf.vertices[:, 2])
graph, qmap = build_reeb(surf, field)
print(f"Reeb graph: {len(graph.nodes)} nodes, {len(graph.arcs)} arcs, "
      f"betti1 = {graph.betti1}")
for node in graph.nodes:
    print(f"  node {node.id}: {KIND_NAMES[node.kind]} at f = {node.f:+.4f}")
print(check_compatibility(graph, surf))

data = build_measure(surf, field.values, graph, qmap)
m = edge_moments(data, n=3).sum(axis=0)
print(f"moments  m0 = {m[0]:.6f}  (4 pi   = {4 * np.pi:.6f})")
print(f"         m1 = {m[1]:+.2e} (target 0)")
print(f"         m2 = {m[2]:.6f}  (4 pi/3 = {4 * np.pi / 3:.6f})")

arc = graph.arcs[0]
ts = np.linspace(arc.f_lo, arc.f_hi, 11)[1:-1]
d = 1e-4
dens = (arc_cumulative(data, arc.id, ts + d)
        - arc_cumulative(data, arc.id, ts - d)) / (2 * d)
print("graph density along the single arc (expect 2 pi everywhere):")
for t, w in zip(ts, dens):
    print(f"  f = {t:+.2f}   d mu / d f = {w:.5f}")
