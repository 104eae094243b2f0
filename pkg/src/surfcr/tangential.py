"""Tangential calculus and manufactured solutions on level surfaces.

An exact solution is described by an ambient vector expression ``w`` and
taken to be ``u = P w``.  The smooth extension ``U(x) = P(x) w(x)``, with
``P`` built from the surface's closed-form normal field, is pushed through
second-order jets, which gives the covariant derivative and the Bochner
Laplacian

    grad_G u = P (DU) P,        lap_G u = P div_G(grad_G u),

with ``div_G`` applied row by row, to machine precision.
"""
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import jets
from .level_surface import LevelSurface, Sphere, Torus

CHUNK = 20000


@dataclass(frozen=True)
class TangentialFieldSpec:
    surface: LevelSurface
    ambient: Callable
    mass_coefficient: float = 0.1
    name: str = ""

    def __post_init__(self):
        if not self.mass_coefficient > 0:
            raise ValueError("mass coefficient must be positive")


def _chunked(fn, y, *out_tail):
    y = np.asarray(y, dtype=float)
    shape = y.shape[:-1]
    flat = y.reshape(-1, 3)
    parts = [fn(flat[i:i + CHUNK]) for i in range(0, len(flat), CHUNK)]
    if not parts:
        return tuple(np.zeros(shape + t) for t in out_tail)
    return tuple(np.concatenate(p, axis=0).reshape(shape + t)
                 for p, t in zip(zip(*parts), out_tail))


def _jets_of_extension(spec, y):
    """Value/derivative arrays of P and U = P w at points y (N, 3)."""
    X = jets.coordinates(y)
    n = spec.surface.normal_field(*X)
    w = spec.ambient(*X)
    w = [c if isinstance(c, jets.Jet2) else jets.Jet2.constant(c, y.shape[:-1]) for c in w]
    P = [[(1.0 if i == j else 0.0) - n[i] * n[j] for j in range(3)] for i in range(3)]
    U = [P[i][0] * w[0] + P[i][1] * w[1] + P[i][2] * w[2] for i in range(3)]
    p_val = np.stack([jets.stack_values(row) for row in P], axis=-2)
    p_grad = np.stack([jets.stack_gradients(row) for row in P], axis=-3)
    return p_val, p_grad, U


def _solution_parts(spec, y):
    _, _, U = _jets_of_extension(spec, y)
    return jets.stack_values(U), jets.stack_gradients(U)


def exact_solution(spec, y):
    """u(y) = P(y) w(y) at surface points."""
    spec.surface.check_on_surface(y)
    y = np.asarray(y, dtype=float)
    X = [y[..., i] for i in range(3)]
    n = np.stack(spec.surface.normal_field(*X), axis=-1)
    w = np.stack([np.broadcast_to(c, y.shape[:-1]) for c in spec.ambient(*X)], axis=-1)
    return w - n * np.sum(n * w, axis=-1, keepdims=True)


def exact_with_jacobian(spec, y):
    """u(y) and the ambient Jacobian DU(y) of the extension U = P w."""
    spec.surface.check_on_surface(y)
    return _chunked(lambda z: _solution_parts(spec, z), y, (3,), (3, 3))


def tangential_gradient(spec, y):
    """Covariant derivative P DU P at surface points, shape (..., 3, 3)."""
    spec.surface.check_on_surface(y)

    def kernel(z):
        p, _, U = _jets_of_extension(spec, z)
        return (p @ jets.stack_gradients(U) @ p,)

    return _chunked(kernel, y, (3, 3))[0]


def _laplacian_kernel(spec, z):
    p, dp, U = _jets_of_extension(spec, z)
    u = jets.stack_values(U)
    J = jets.stack_gradients(U)          # J[a, b] = d_b U_a
    dJ = jets.stack_hessians(U)          # dJ[a, b, k] = d_k d_b U_a
    # d_k (P J P)_ij
    dA = (np.einsum("niak,nab,nbj->nijk", dp, J, p)
          + np.einsum("nia,nabk,nbj->nijk", p, dJ, p)
          + np.einsum("nia,nab,nbjk->nijk", p, J, dp))
    # row-wise surface divergence: tr(grad(A_i) P)
    div = np.einsum("nijk,nkj->ni", dA, p)
    lap = np.einsum("nij,nj->ni", p, div)
    return u, lap


def bochner_laplacian(spec, y):
    """Bochner Laplacian of the exact field at surface points, shape (..., 3)."""
    spec.surface.check_on_surface(y)
    return _chunked(lambda z: _laplacian_kernel(spec, z)[1:], y, (3,))[0]


def manufactured_rhs(spec, y):
    """f = -lap_G u + c u at surface points."""
    spec.surface.check_on_surface(y)

    def kernel(z):
        u, lap = _laplacian_kernel(spec, z)
        return (-lap + spec.mass_coefficient * u,)

    return _chunked(kernel, y, (3,))[0]


# reference solutions

def _sphere_field(x1, x2, x3):
    return jets.sin(x2 * x3), -jets.sin(x1 * x3), jets.cos(x3 * x3)


def _torus_field(x1, x2, x3):
    return x2 + x3 * x1, -x1 * x3, x3 * x3


def _rotation_field(x1, x2, x3):
    return -x2, x1, 0.0 * x3


def sphere_spec(mass_coefficient=0.1, surface=None):
    """P (sin(x2 x3), -sin(x1 x3), cos(x3^2)) on the unit sphere."""
    return TangentialFieldSpec(surface or Sphere(), _sphere_field, mass_coefficient, "sphere_eq")


def torus_spec(mass_coefficient=0.1, surface=None):
    """P (x2 + x3 x1, -x1 x3, x3^2) on the torus R = 1, r = 1/2."""
    return TangentialFieldSpec(surface or Torus(), _torus_field, mass_coefficient, "torus_eq")


def rotation_spec(mass_coefficient=1.0, surface=None):
    """Rotation (Killing) field about the x3-axis; on the unit sphere lap_G u = -u."""
    return TangentialFieldSpec(surface or Sphere(), _rotation_field, mass_coefficient, "rotation")


def zero_spec(surface, mass_coefficient=0.1):
    return TangentialFieldSpec(surface, lambda x1, x2, x3: (0.0 * x1, 0.0 * x1, 0.0 * x1),
                               mass_coefficient, "zero")


SPECS = {"sphere_eq": sphere_spec, "torus_eq": torus_spec}
