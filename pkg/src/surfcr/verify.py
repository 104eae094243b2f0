"""Property suites behind ``surfcr --verify``.

Each suite returns a list of :class:`Check` results; a suite passes when
all of its checks do.
"""
from dataclasses import dataclass

import numpy as np

from .analysis import interpolation_errors
from .cr import DiscreteField, build_dof_map, edge_jump_means
from .eoc import eoc
from .geometry import measure_geometry_rates
from .level_surface import Sphere, Torus
from .mesh import build_sphere_mesh, build_torus_mesh, refine, torus_resolution
from .quadrature import triangle_rule
from .tangential import sphere_spec

JUMP_TOL = 1e-12
TANGENTIAL_TOL = 1e-13


@dataclass
class Check:
    name: str
    passed: bool
    detail: str

    def line(self):
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


def sphere_sequence(lo=2, hi=5, surface=None):
    mesh = build_sphere_mesh(lo, surface)
    meshes = [mesh]
    for _ in range(lo, hi):
        mesh = refine(mesh)
        meshes.append(mesh)
    return meshes


def _rate_check(name, orders, lo, hi):
    orders = np.asarray(orders)
    ok = bool(np.all((orders >= lo) & (orders <= hi)))
    shown = ", ".join(f"{o:.3f}" for o in orders)
    return Check(name, ok, f"EOC [{shown}] in [{lo}, {hi}]")


GEOMETRY_GATES = {"P-Ph": (0.85, 1.15), "nEl-nE": (0.85, 1.15),
                  "nEl-PnE": (1.8, 2.2), "PhnEl-nE": (1.8, 2.2)}

INTERPOLATION_GATES = {"H1est": (0.85, 1.15), "L2est": (1.8, 2.2), "L2estPur": (1.3, 1.7),
                       "L2estPh": (1.8, 2.2), "L2estPurPh": (1.3, 1.7), "int_vec": (0.85, 1.15)}


def verify_geometry(meshes=None):
    """Geometry approximation rates over sphere levels 2-5."""
    meshes = meshes or sphere_sequence()
    rates = measure_geometry_rates(meshes[0].surface, meshes)
    orders = rates.orders
    return [_rate_check(f"geometry {k}", orders[k], *GEOMETRY_GATES[k]) for k in GEOMETRY_GATES]


def verify_interpolation(meshes=None, spec=None):
    """Interpolation error rates of the tangential interpolant over sphere levels 2-5."""
    meshes = meshes or sphere_sequence()
    spec = spec or sphere_spec(surface=meshes[0].surface)
    h = np.array([m.h for m in meshes])
    rows = [interpolation_errors(spec, m) for m in meshes]
    return [_rate_check(f"interpolation {k}", eoc([r[k] for r in rows], h), *gate)
            for k, gate in INTERPOLATION_GATES.items()]


def random_fields(mesh, n, rng):
    dofmap = build_dof_map(mesh)
    for _ in range(n):
        yield DiscreteField(mesh, rng.standard_normal(dofmap.n_dofs), dofmap)


def max_jump(mesh, n_fields=100, seed=0):
    rng = np.random.default_rng(seed)
    return max(float(np.max(np.abs(edge_jump_means(v)))) for v in random_fields(mesh, n_fields, rng))


def max_normal_component(mesh, n_fields=100, seed=0):
    """max |v_h . n_h| at the 7 degree-5 quadrature points of every element."""
    rng = np.random.default_rng(seed)
    bary = triangle_rule(5).points
    n = mesh.frames.normal
    return max(float(np.max(np.abs(np.einsum("fqd,fd->fq", v.values(bary), n))))
               for v in random_fields(mesh, n_fields, rng))


def verify_jumps(meshes=None, n_fields=100, seed=0):
    """Edge-mean jumps and tangentiality of random V_h members."""
    if meshes is None:
        meshes = [build_sphere_mesh(3, Sphere()), build_torus_mesh(*torus_resolution(1), Torus())]
    checks = []
    for m in meshes:
        label = f"{type(m.surface).__name__.lower()} ({m.n_triangles} triangles)"
        j = max_jump(m, n_fields, seed)
        checks.append(Check(f"jumps {label}", j < JUMP_TOL, f"max |int_E [v]| = {j:.2e} < {JUMP_TOL}"))
        t = max_normal_component(m, n_fields, seed)
        checks.append(Check(f"tangentiality {label}", t < TANGENTIAL_TOL,
                            f"max |v.n_h| = {t:.2e} < {TANGENTIAL_TOL}"))
    return checks


SUITES = {"geometry": verify_geometry, "interpolation": verify_interpolation, "jumps": verify_jumps}


def run_verification(suite="all"):
    if suite == "all":
        meshes = sphere_sequence()
        return (verify_geometry(meshes) + verify_interpolation(meshes) + verify_jumps())
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}")
    return SUITES[suite]()
