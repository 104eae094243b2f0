"""Assembly of the discrete Bochner-Laplace system and its CG solution."""
from dataclasses import dataclass

import numpy as np
import scipy.io
import scipy.sparse as sp

from .cr import build_dof_map, cr_basis
from .errors import MaxIterations, NotSymmetric
from .mesh import frames_from_vertices
from .quadrature import triangle_rule
from .tangential import manufactured_rhs

SYMMETRY_TOL = 1e-12


def local_directions(frames):
    """(F, 6, 3): direction vector of local basis function 2*i + a (a=0: n_E, a=1: tau_E)."""
    return np.stack([frames.conormals, frames.tangents], axis=2).reshape(len(frames), 6, 3)


def local_matrices(frames):
    """Elementwise 6x6 stiffness and mass matrices, each of shape (F, 6, 6).

    Local basis function ``2*i + a`` is ``c_a^i phi_i``; its surface gradient
    is ``c_a^i (grad phi_i)^T``, so stiffness entries are
    ``|K| (c.c')(grad phi_i . grad phi_j)``.  The mass uses the edge-midpoint
    rule, exact for the quadratic products.
    """
    if not hasattr(frames, "grad_lambda"):
        frames = frames_from_vertices(frames)
    c = local_directions(frames)
    g = np.repeat(frames.grad_phi, 2, axis=1)
    area = frames.area[:, None, None]
    cc = c @ np.swapaxes(c, 1, 2)
    stiffness = area * cc * (g @ np.swapaxes(g, 1, 2))
    same_edge = np.kron(np.eye(3), np.ones((2, 2)))
    mass = area / 3.0 * cc * same_edge
    return stiffness, mass


@dataclass
class SparseSystem:
    matrix: sp.csr_matrix
    rhs: np.ndarray
    mass_coefficient: float
    stiffness: sp.csr_matrix
    mass: sp.csr_matrix

    @property
    def n_dofs(self):
        return len(self.rhs)

    def energy(self, x):
        return float(x @ (self.matrix @ x))


def _scatter(dofmap, local):
    gi = dofmap.flat_global
    s = dofmap.flat_signs
    data = (s[:, :, None] * s[:, None, :]) * local
    rows = np.broadcast_to(gi[:, :, None], data.shape).ravel()
    cols = np.broadcast_to(gi[:, None, :], data.shape).ravel()
    n = dofmap.n_dofs
    return sp.coo_matrix((data.ravel(), (rows, cols)), shape=(n, n)).tocsr()


def load_vector(mesh, dofmap, spec, quad_degree=4):
    """Entries sigma * int_K f(p(x)) . c phi_i over all elements."""
    rule = triangle_rule(quad_degree)
    fr = mesh.frames
    x = fr.points(rule.points)
    f = manufactured_rhs(spec, spec.surface.closest_point(x).position)   # (F, Q, 3)
    phi = cr_basis(rule.points)                                           # (Q, 3)
    c = local_directions(fr).reshape(-1, 3, 2, 3)
    # int_K f . c_a^i phi_i = |K| sum_q w_q phi_i(q) f(q) . c_a^i
    fphi = np.einsum("q,qi,fqd->fid", rule.weights, phi, f)
    loc = fr.area[:, None, None] * np.einsum("fid,fiad->fia", fphi, c)
    vals = (dofmap.flat_signs * loc.reshape(-1, 6)).ravel()
    return np.bincount(dofmap.flat_global.ravel(), weights=vals, minlength=dofmap.n_dofs)


def assemble(mesh, spec, dofmap=None, quad_degree=4, mass_coefficient=None):
    dofmap = dofmap if dofmap is not None else build_dof_map(mesh)
    c = spec.mass_coefficient if mass_coefficient is None else mass_coefficient
    s_loc, m_loc = local_matrices(mesh.frames)
    stiffness = _scatter(dofmap, s_loc)
    mass = _scatter(dofmap, m_loc)
    matrix = (stiffness + c * mass).tocsr()
    matrix.sort_indices()
    rhs = load_vector(mesh, dofmap, spec, quad_degree)
    return SparseSystem(matrix, rhs, c, stiffness, mass)


def symmetry_error(matrix):
    """max |A - A^T| relative to max |A|."""
    d = abs(matrix - matrix.T)
    scale = abs(matrix).max()
    return float(d.max() / scale) if scale > 0 else 0.0


def residual_extended(matrix, rhs, x):
    """b - A x evaluated in extended precision (np.longdouble)."""
    A = sp.csr_matrix(matrix)
    ld = np.longdouble
    prod = A.data.astype(ld) * np.asarray(x, dtype=ld)[A.indices]
    ax = np.zeros(A.shape[0], dtype=ld)
    nonempty = np.diff(A.indptr) > 0
    if prod.size:
        ax[nonempty] = np.add.reduceat(prod, A.indptr[:-1][nonempty])
    return np.asarray(rhs, dtype=ld) - ax


def _pcg(A, inv_diag, r0, target, maxiter, callback=None):
    """Jacobi PCG for A d = r0 from d = 0 until |r| <= target; returns (d, iterations)."""
    d = np.zeros_like(r0)
    r = r0.copy()
    z = inv_diag * r
    p = z.copy()
    rz = r @ z
    it = 0
    while it < maxiter and np.linalg.norm(r) > target:
        q = A @ p
        alpha = rz / (p @ q)
        d += alpha * p
        r -= alpha * q
        z = inv_diag * r
        rz_new = r @ z
        p = z + (rz_new / rz) * p
        rz = rz_new
        it += 1
        if callback is not None:
            callback(d)
    return d, it


def solve_cg(system, tol=1e-12, maxiter=None, x0=None, return_info=False, callback=None):
    """Jacobi-preconditioned conjugate gradients.

    Stops once the true relative residual ``|b - Ax| / |b|`` is below ``tol``.
    On fine meshes the correctly rounded float64 solution itself can have a
    relative residual above 1e-12, so the iterate is accumulated in
    ``np.longdouble`` and the true residual is evaluated in that precision;
    each correction is a double-precision PCG solve.  The returned vector is
    the extended-precision iterate.  ``system`` is a :class:`SparseSystem` or
    a ``(matrix, rhs)`` pair; ``callback(x)`` sees the float64 iterate after
    every CG step.
    """
    A, b = (system.matrix, system.rhs) if isinstance(system, SparseSystem) else system
    A = sp.csr_matrix(A)
    b = np.asarray(b, dtype=float)
    n = len(b)
    if symmetry_error(A) > SYMMETRY_TOL:
        raise NotSymmetric(f"matrix asymmetry {symmetry_error(A):.3e} exceeds {SYMMETRY_TOL}")
    if maxiter is None:
        maxiter = int(20 * np.sqrt(n)) + 200
    bnorm = np.linalg.norm(b)
    x = np.zeros(n, dtype=np.longdouble)
    if x0 is not None:
        x[:] = np.asarray(x0, dtype=np.longdouble)
    if bnorm == 0.0:
        x[:] = 0.0
        info = {"iterations": 0, "residual": 0.0}
        return (x, info) if return_info else x

    inv_diag = 1.0 / A.diagonal()
    it = 0
    while True:
        r = residual_extended(A, b, x).astype(float)
        res = float(np.linalg.norm(r) / bnorm)
        if res <= tol:
            break
        if it >= maxiter:
            raise MaxIterations(it, res)
        # a double-precision sweep gains at most ~10 digits on its own residual
        target = max(0.5 * tol * bnorm, 1e-10 * res * bnorm)
        cb = None if callback is None else (lambda d, x=x: callback((x + d).astype(float)))
        d, k = _pcg(A, inv_diag, r, target, maxiter - it, cb)
        it += k
        x += d
    info = {"iterations": it, "residual": res}
    return (x, info) if return_info else x


def write_matrix_market(matrix, path):
    scipy.io.mmwrite(str(path), sp.coo_matrix(matrix), symmetry="symmetric")
