"""Tangential vector-valued Crouzeix-Raviart space on a surface triangulation.

On each flat triangle K a field is written in the conormal frames of its
edges,

    v|_K = sum_i (v_i^n n_{E_i} + v_i^t tau_{E_i}) phi_i,

with the scalar CR basis ``phi_i = 1 - 2 lambda_{opp(i)}``.  Each edge
carries two global unknowns.  The lower-numbered neighbour sees them with
sign +1 and the other one with sign -1, which realises the midpoint
conditions v+ . n+ = -v- . n- and v+ . tau+ = -v- . tau-.
"""
from dataclasses import dataclass

import numpy as np

from .errors import QuadratureFailure
from .geometry import edge_points, lifted_edge_frame
from .mesh import OPPOSITE
from .tangential import exact_solution


def cr_basis(bary):
    """CR basis values at barycentric points (Q, 3) -> (Q, 3), column i = edge i."""
    bary = np.atleast_2d(bary)
    return 1.0 - 2.0 * bary[:, OPPOSITE]


def reference_gradients():
    """Gradients of the CR basis on the unit-edge reference triangle, (3, 2)."""
    ref = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, np.sqrt(3) / 2]])
    tmat = np.column_stack([ref[1] - ref[0], ref[2] - ref[0]])
    # lambda_1, lambda_2 have gradients inv(T)^T e_1, e_2; lambda_0 the negative sum
    g12 = np.linalg.inv(tmat).T
    glam = np.vstack([-(g12[:, 0] + g12[:, 1]), g12[:, 0], g12[:, 1]])
    return -2.0 * glam[OPPOSITE]


@dataclass(frozen=True)
class DofMap:
    global_dofs: np.ndarray   # (F, 3, 2): [element, local edge, (normal, tangential)]
    signs: np.ndarray         # (F, 3)
    n_dofs: int

    @property
    def flat_global(self):
        """(F, 6) global indices in local order 2*i + a."""
        return self.global_dofs.reshape(len(self.signs), 6)

    @property
    def flat_signs(self):
        return np.repeat(self.signs, 2, axis=1)


def build_dof_map(mesh):
    ee = mesh.element_edges
    master = mesh.edge_elements[:, 0]
    signs = np.where(master[ee] == np.arange(mesh.n_triangles)[:, None], 1.0, -1.0)
    gdofs = 2 * ee[..., None] + np.arange(2)
    return DofMap(gdofs, signs, 2 * mesh.n_edges)


class ElementwiseField:
    """Piecewise linear field given by one coefficient vector per local edge.

    ``vectors[k, i]`` is the value at the midpoint of local edge ``i`` of
    element ``k``; no inter-element coupling is implied.
    """

    def __init__(self, mesh, vectors):
        self.mesh = mesh
        self.vectors = np.asarray(vectors, dtype=float)

    def values(self, bary):
        """Field values at barycentric points (Q, 3) on every element -> (F, Q, 3)."""
        return np.einsum("qi,fid->fqd", cr_basis(bary), self.vectors)

    def gradient(self):
        """Elementwise constant ambient gradient D v, (F, 3, 3) [component, direction]."""
        return np.einsum("fid,fie->fde", self.vectors, self.mesh.frames.grad_phi)

    def surface_gradient(self):
        ph = self.mesh.frames.projector
        return ph @ self.gradient() @ ph


class DiscreteField(ElementwiseField):
    """Member of V_h described by its global coefficient vector."""

    def __init__(self, mesh, coefficients, dofmap=None):
        self.dofmap = dofmap if dofmap is not None else build_dof_map(mesh)
        self.coefficients = np.asarray(coefficients, dtype=float)
        if self.coefficients.shape != (self.dofmap.n_dofs,):
            raise ValueError(f"expected {self.dofmap.n_dofs} coefficients, "
                             f"got shape {self.coefficients.shape}")
        self.local = self.dofmap.signs[..., None] * self.coefficients[self.dofmap.global_dofs]
        fr = mesh.frames
        vectors = self.local[..., 0:1] * fr.conormals + self.local[..., 1:2] * fr.tangents
        super().__init__(mesh, vectors)

    def evaluate(self, element, bary):
        """Value and constant surface gradient on one element."""
        if not 0 <= element < self.mesh.n_triangles:
            raise IndexError(f"element {element} out of range 0..{self.mesh.n_triangles - 1}")
        bary = np.asarray(bary, dtype=float)
        val = cr_basis(bary)[0] @ self.vectors[element]
        grad = np.einsum("id,ie->de", self.vectors[element], self.mesh.frames.grad_phi[element])
        return val, grad


def _edge_samples(spec, mesh, n_gauss):
    fr = mesh.frames
    pts, w = edge_points(fr, n_gauss)
    proj = spec.surface.closest_point(pts)
    u = exact_solution(spec, proj.position)
    if not np.all(np.isfinite(u)):
        raise QuadratureFailure("non-finite field values at edge quadrature points")
    return fr, pts, w, u


def interpolate_tan(spec, mesh, n_gauss=5, dofmap=None):
    """Edge-mean interpolant onto V_h of the exact field of ``spec``.

    Components along the lifted conormal and tangent are averaged over each
    flat edge and attached to the flat conormal and tangent.
    """
    fr, pts, w, u = _edge_samples(spec, mesh, n_gauss)
    tau = np.broadcast_to(fr.tangents[:, :, None, :], pts.shape)
    tau_l, n_l, _ = lifted_edge_frame(spec.surface, pts, tau)
    vn = np.einsum("g,fig->fi", w, np.sum(u * n_l, axis=-1))
    vt = np.einsum("g,fig->fi", w, np.sum(u * tau_l, axis=-1))
    dofmap = dofmap if dofmap is not None else build_dof_map(mesh)
    coef = np.empty(dofmap.n_dofs)
    master = dofmap.signs > 0
    coef[dofmap.global_dofs[master, 0]] = vn[master]
    coef[dofmap.global_dofs[master, 1]] = vt[master]
    return DiscreteField(mesh, coef, dofmap)


def interpolate_componentwise(spec, mesh, n_gauss=5):
    """Componentwise scalar CR interpolant (edge means of u~); not in V_h."""
    _, _, w, u = _edge_samples(spec, mesh, n_gauss)
    return ElementwiseField(mesh, np.einsum("g,figd->fid", w, u))


def edge_jump_means(field, n_gauss=2):
    """Per edge, the integrals of [v.n_E] and [v.tau_E] over the edge.

    The bracket is taken in the frame of the master element K+:
    ``v+ . n+ - (-v- . n-)`` and likewise for tau, evaluated from both
    one-sided traces at Gauss points along the edge.
    """
    mesh = field.mesh
    fr = mesh.frames
    t, w = np.polynomial.legendre.leggauss(n_gauss)
    t, w = 0.5 * (t + 1), 0.5 * w
    kp, km = mesh.edge_elements.T
    ee = mesh.element_edges
    e_idx = np.arange(mesh.n_edges)
    # local edge index of e in K+ and K-
    ip = np.argmax(ee[kp] == e_idx[:, None], axis=1)
    im = np.argmax(ee[km] == e_idx[:, None], axis=1)

    def trace(k, i, s):
        # point = (1-s) x_i + s x_{i+1}, s of shape (E, G)
        bary = np.zeros(s.shape + (3,))
        np.put_along_axis(bary, np.broadcast_to(i[:, None, None], s.shape + (1,)),
                          (1.0 - s)[..., None], axis=2)
        np.put_along_axis(bary, np.broadcast_to(((i + 1) % 3)[:, None, None], s.shape + (1,)),
                          s[..., None], axis=2)
        phi = 1.0 - 2.0 * bary[..., OPPOSITE]
        return phi @ field.vectors[k]

    tri = mesh.triangles
    s = np.broadcast_to(t, (mesh.n_edges, len(t)))
    same_start = (tri[km, im] == tri[kp, ip])[:, None]
    vp = trace(kp, ip, s)
    vm = trace(km, im, np.where(same_start, s, 1.0 - s))
    n_p, n_m = fr.conormals[kp, ip], fr.conormals[km, im]
    t_p, t_m = fr.tangents[kp, ip], fr.tangents[km, im]
    length = fr.edge_lengths[kp, ip]
    dot = lambda v, c: (v @ c[:, :, None])[..., 0]
    jn = dot(vp, n_p) + dot(vm, n_m)
    jt = dot(vp, t_p) + dot(vm, t_m)
    return np.stack([length * (jn @ w), length * (jt @ w)], axis=1)
