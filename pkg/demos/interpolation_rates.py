"""
The tangential interpolant
==========================

Edge means of the lifted conormal and tangential components define an
interpolant into the discrete space.  Its errors decay at rate 1 in the
broken H1 seminorm, rate 2 in L2 and rate 3/2 on the mesh skeleton.
"""
import numpy as np

from surfcr import build_sphere_mesh, eoc, interpolation_errors, refine, sphere_spec
from surfcr.analysis import coefficient_defect
from surfcr.cr import edge_jump_means, interpolate_tan

spec = sphere_spec()
meshes = [build_sphere_mesh(2, spec.surface)]
for _ in range(3):
    meshes.append(refine(meshes[-1]))
h = np.array([m.h for m in meshes])

rows = [interpolation_errors(spec, m) for m in meshes]
for key in rows[0]:
    e = np.array([r[key] for r in rows])
    print(f"{key:11s} {e.round(6)}  orders {eoc(e, h).round(3)}")

# The interpolant lives in the discrete space, so its conormal and
# tangential jumps have zero mean on every edge.
print("max edge-mean jump:", np.abs(edge_jump_means(interpolate_tan(spec, meshes[1]))).max())

# Difference between the componentwise and the tangential coefficients,
# projected to the element plane
d = [coefficient_defect(spec, m) for m in meshes]
print("coefficient defect orders:", eoc(d, h).round(3))
