"""Lifted edge frames and the geometric approximation errors of a triangulation."""
from dataclasses import dataclass, field

import numpy as np

from .eoc import eoc
from .errors import InsufficientMeshes
from .level_surface import projector
from .quadrature import edge_rule, triangle_rule


def lifted_edge_frame(surface, x, tau):
    """Unit tangent and conormal of the lifted edge p(E) at points ``x`` of E.

    ``tau`` is the (broadcastable) unit tangent of the flat edge.  Returns
    ``(tau_l, n_l, n)`` with ``tau_l = J_p tau / |J_p tau|``,
    ``n_l = tau_l x n`` and ``n`` the surface normal at ``p(x)``.
    """
    jp = surface.closest_point_jacobian(x)
    n = surface.closest_point(x).normal
    t = np.einsum("...ij,...j->...i", jp, np.broadcast_to(tau, x.shape))
    t /= np.linalg.norm(t, axis=-1, keepdims=True)
    return t, np.cross(t, n), n


def edge_points(frames, n_gauss=5):
    """Gauss points on every local edge: (F, 3, G, 3) points and the weights (G,)."""
    t, w = edge_rule(n_gauss)
    x = frames.vertices
    start, end = x, np.roll(x, -1, axis=1)
    pts = start[:, :, None, :] + t[None, None, :, None] * (end - start)[:, :, None, :]
    return pts, w


@dataclass
class GeometryRates:
    h: np.ndarray
    errors: dict = field(default_factory=dict)

    @property
    def orders(self):
        return {k: eoc(v, self.h) for k, v in self.errors.items()}


GEOMETRY_QUANTITIES = ("P-Ph", "nEl-nE", "nEl-PnE", "PhnEl-nE")


def geometry_errors(mesh, n_gauss=5):
    """Sampled L-infinity norms of the four geometric approximation errors."""
    surf = mesh.surface
    fr = mesh.frames
    x = fr.points(triangle_rule(5).points)            # 7 points per element
    p = projector(surf.closest_point(x).normal)
    diff = p - fr.projector[:, None]
    p_err = np.max(np.linalg.norm(diff, ord=2, axis=(-2, -1)))

    pts, _ = edge_points(fr, n_gauss)
    tau = np.broadcast_to(fr.tangents[:, :, None, :], pts.shape)
    nE = np.broadcast_to(fr.conormals[:, :, None, :], pts.shape)
    _, n_l, n = lifted_edge_frame(surf, pts, tau)
    P = projector(n)
    Ph = fr.projector[:, None, None]
    norm = lambda v: float(np.max(np.linalg.norm(v, axis=-1)))
    return {
        "P-Ph": float(p_err),
        "nEl-nE": norm(n_l - nE),
        "nEl-PnE": norm(n_l - np.einsum("...ij,...j->...i", P, nE)),
        "PhnEl-nE": norm(np.einsum("...ij,...j->...i", Ph, n_l) - nE),
    }


def measure_geometry_rates(surface, meshes, n_gauss=5):
    meshes = list(meshes)
    if len(meshes) < 3:
        raise InsufficientMeshes(f"need at least 3 meshes, got {len(meshes)}")
    for m in meshes:
        if m.surface is not surface:
            raise ValueError("all meshes must triangulate the given surface")
    hs = np.array([m.h for m in meshes])
    if np.any(np.diff(hs) >= 0):
        raise InsufficientMeshes("mesh sizes must be strictly decreasing")
    rows = [geometry_errors(m, n_gauss) for m in meshes]
    return GeometryRates(hs, {k: np.array([r[k] for r in rows]) for k in GEOMETRY_QUANTITIES})
