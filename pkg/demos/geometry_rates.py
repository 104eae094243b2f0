"""
How well does the flat mesh see the surface?
============================================

Four geometric quantities compare the flat triangles with the sphere:
the projector defect |P - P_h|, and three versions of the conormal
defect using the lifted edge conormal n_El.  The first two decay like h,
the last two like h^2.
"""
from surfcr import Sphere, build_sphere_mesh, measure_geometry_rates, refine

sphere = Sphere()
meshes = [build_sphere_mesh(2, sphere)]
for _ in range(3):
    meshes.append(refine(meshes[-1]))

rates = measure_geometry_rates(sphere, meshes)
print("h:", rates.h.round(4))
for name, errors in rates.errors.items():
    print(f"{name:9s} errors {errors.round(6)}  orders {rates.orders[name].round(3)}")
