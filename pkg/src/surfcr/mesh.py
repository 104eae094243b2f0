"""Triangulations of closed level surfaces with all vertices on the surface.

Local edge ``i`` of triangle ``(v0, v1, v2)`` joins ``v[i]`` and ``v[i+1]``
(cyclically), so edge 0 is opposite vertex 2, edge 1 opposite vertex 0 and
edge 2 opposite vertex 1.
"""
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DegenerateTriangle, InvalidResolution
from .level_surface import LevelSurface, Sphere, Torus, projector, torus_point

# local edge i is opposite to vertex OPPOSITE[i]
OPPOSITE = np.array([2, 0, 1])


@dataclass(eq=False)
class SurfaceMesh:
    surface: LevelSurface
    vertices: np.ndarray   # (V, 3)
    triangles: np.ndarray  # (F, 3), counterclockwise seen from outside

    def __post_init__(self):
        self.vertices = np.ascontiguousarray(self.vertices, dtype=float)
        self.triangles = np.ascontiguousarray(self.triangles, dtype=np.int64)

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_triangles(self):
        return len(self.triangles)

    @property
    def n_edges(self):
        return len(self.edges)

    @cached_property
    def _connectivity(self):
        tri = self.triangles
        half = np.stack([tri, np.roll(tri, -1, axis=1)], axis=-1).reshape(-1, 2)
        key = np.sort(half, axis=1)
        edges, first, inverse, counts = np.unique(
            key, axis=0, return_index=True, return_inverse=True, return_counts=True)
        if np.any(counts != 2):
            raise ValueError("mesh is not a closed 2-manifold: "
                             f"{np.sum(counts != 2)} edges without exactly two triangles")
        inverse = inverse.reshape(-1)
        element_edges = inverse.reshape(-1, 3)
        owner = np.repeat(np.arange(len(tri)), 3)
        order = np.argsort(inverse, kind="stable")
        edge_elements = owner[order].reshape(-1, 2)  # lower element index first
        return edges, element_edges, edge_elements

    @property
    def edges(self):
        """(E, 2) sorted vertex pairs."""
        return self._connectivity[0]

    @property
    def element_edges(self):
        """(F, 3) global edge index of each local edge."""
        return self._connectivity[1]

    @property
    def edge_elements(self):
        """(E, 2) the two adjacent triangles, lower index first."""
        return self._connectivity[2]

    @cached_property
    def edge_lengths(self):
        v = self.vertices[self.edges]
        return np.linalg.norm(v[:, 1] - v[:, 0], axis=-1)

    @property
    def h(self):
        return float(self.edge_lengths.max())

    def euler_characteristic(self):
        return self.n_vertices - self.n_edges + self.n_triangles

    def min_angle(self):
        """Smallest interior angle over all triangles, in degrees."""
        x = self.vertices[self.triangles]
        angles = []
        for k in range(3):
            a = x[:, (k + 1) % 3] - x[:, k]
            b = x[:, (k + 2) % 3] - x[:, k]
            cos = np.sum(a * b, -1) / (np.linalg.norm(a, axis=-1) * np.linalg.norm(b, axis=-1))
            angles.append(np.degrees(np.arccos(np.clip(cos, -1, 1))))
        return float(np.min(angles))

    def total_area(self):
        return float(compute_frames(self).area.sum())

    @cached_property
    def frames(self):
        return compute_frames(self)


# generators

_ICO_T = (1.0 + np.sqrt(5.0)) / 2.0
_ICO_VERTICES = np.array([
    [-1, _ICO_T, 0], [1, _ICO_T, 0], [-1, -_ICO_T, 0], [1, -_ICO_T, 0],
    [0, -1, _ICO_T], [0, 1, _ICO_T], [0, -1, -_ICO_T], [0, 1, -_ICO_T],
    [_ICO_T, 0, -1], [_ICO_T, 0, 1], [-_ICO_T, 0, -1], [-_ICO_T, 0, 1],
], dtype=float)
_ICO_FACES = np.array([
    [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
    [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
    [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
    [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
])


def refine(mesh):
    """Uniform 1-to-4 split; new edge midpoints are projected onto the surface."""
    edges = mesh.edges
    mid = 0.5 * (mesh.vertices[edges[:, 0]] + mesh.vertices[edges[:, 1]])
    mid = mesh.surface.closest_point(mid).position
    nv = mesh.n_vertices
    t = mesh.triangles
    m = nv + mesh.element_edges     # m[:, i] sits on local edge i = (t[i], t[i+1])
    tris = np.concatenate([
        np.stack([t[:, 0], m[:, 0], m[:, 2]], axis=1),
        np.stack([m[:, 0], t[:, 1], m[:, 1]], axis=1),
        np.stack([m[:, 2], m[:, 1], t[:, 2]], axis=1),
        np.stack([m[:, 0], m[:, 1], m[:, 2]], axis=1),
    ])
    return SurfaceMesh(mesh.surface, np.vstack([mesh.vertices, mid]), tris)


def build_sphere_mesh(level, surface=None):
    """Icosahedron projected to the sphere and refined ``level`` times."""
    if not 0 <= level <= 8:
        raise InvalidResolution(f"sphere level must be in 0..8, got {level}")
    surface = surface or Sphere()
    v = surface.radius * _ICO_VERTICES / np.linalg.norm(_ICO_VERTICES, axis=1, keepdims=True)
    faces = _ICO_FACES.copy()
    # orient outward
    c = v[faces].mean(axis=1)
    nrm = np.cross(v[faces[:, 1]] - v[faces[:, 0]], v[faces[:, 2]] - v[faces[:, 0]])
    flip = np.sum(nrm * c, axis=1) < 0
    faces[flip] = faces[flip][:, ::-1]
    mesh = SurfaceMesh(surface, v, faces)
    for _ in range(level):
        mesh = refine(mesh)
    return mesh


def build_torus_mesh(n_major, n_minor, surface=None):
    """Structured (theta, psi) grid on the torus, quads split along the shorter diagonal."""
    if n_major < 8 or n_minor < 4:
        raise InvalidResolution(f"need n_major >= 8 and n_minor >= 4, got ({n_major}, {n_minor})")
    surface = surface or Torus()
    R, r = surface.major_radius, surface.minor_radius
    theta = 2 * np.pi * np.arange(n_major) / n_major
    psi = 2 * np.pi * np.arange(n_minor) / n_minor
    T, S = np.meshgrid(theta, psi, indexing="ij")
    vertices = torus_point(T, S, R, r).reshape(-1, 3)

    i, j = np.meshgrid(np.arange(n_major), np.arange(n_minor), indexing="ij")
    i, j = i.ravel(), j.ravel()
    ip, jp = (i + 1) % n_major, (j + 1) % n_minor
    v00, v10 = i * n_minor + j, ip * n_minor + j
    v01, v11 = i * n_minor + jp, ip * n_minor + jp
    d_main = np.linalg.norm(vertices[v11] - vertices[v00], axis=1)
    d_anti = np.linalg.norm(vertices[v01] - vertices[v10], axis=1)
    main = d_main <= d_anti
    tris = np.concatenate([
        np.where(main[:, None], np.stack([v00, v10, v11], 1), np.stack([v00, v10, v01], 1)),
        np.where(main[:, None], np.stack([v00, v11, v01], 1), np.stack([v10, v11, v01], 1)),
    ])
    return SurfaceMesh(surface, vertices, tris)


def torus_resolution(k):
    """Grid counts of the k-th torus mesh in the convergence sequence."""
    return 16 * 2 ** k, 8 * 2 ** k


# element frames

@dataclass(frozen=True)
class ElementFrame:
    normal: np.ndarray       # (3,)
    projector: np.ndarray    # (3, 3)
    tangents: np.ndarray     # (3, 3), row i: unit tangent of local edge i
    conormals: np.ndarray    # (3, 3), row i: outward unit conormal of local edge i
    midpoints: np.ndarray    # (3, 3)
    edge_lengths: np.ndarray  # (3,)
    area: float


@dataclass(frozen=True)
class ElementFrames:
    """Per-element frames stored as arrays over all F elements."""
    vertices: np.ndarray      # (F, 3, 3)
    normal: np.ndarray        # (F, 3)
    projector: np.ndarray     # (F, 3, 3)
    tangents: np.ndarray      # (F, 3, 3)
    conormals: np.ndarray     # (F, 3, 3)
    midpoints: np.ndarray     # (F, 3, 3)
    edge_lengths: np.ndarray  # (F, 3)
    area: np.ndarray          # (F,)
    grad_lambda: np.ndarray   # (F, 3, 3), row a: gradient of barycentric coordinate a

    def __len__(self):
        return len(self.area)

    def __getitem__(self, k):
        return ElementFrame(self.normal[k], self.projector[k], self.tangents[k],
                            self.conormals[k], self.midpoints[k], self.edge_lengths[k],
                            float(self.area[k]))

    @property
    def grad_phi(self):
        """(F, 3, 3), row i: gradient of the CR basis function of local edge i."""
        return -2.0 * self.grad_lambda[:, OPPOSITE]

    def points(self, bary):
        return np.einsum("qa,fai->fqi", bary, self.vertices)


def frames_from_vertices(x):
    """Frames of triangles with vertex coordinates ``x`` (F, 3, 3)."""
    x = np.asarray(x, dtype=float)
    e = np.roll(x, -1, axis=1) - x            # e[:, i] = x[i+1] - x[i]
    cross = np.cross(e[:, 0], -e[:, 2])
    twice_area = np.linalg.norm(cross, axis=1)
    if np.any(twice_area < 2e-14):
        bad = int(np.argmin(twice_area))
        raise DegenerateTriangle(f"triangle {bad} has area {twice_area[bad] / 2:.3e}")
    n = cross / twice_area[:, None]
    lengths = np.linalg.norm(e, axis=2)
    tau = e / lengths[..., None]
    conormal = np.cross(tau, n[:, None, :])
    mid = 0.5 * (x + np.roll(x, -1, axis=1))
    # grad lambda_a = n x (x_{a+2} - x_{a+1}) / 2|K| = n x e[a+1] / 2|K|
    grad_lambda = np.cross(n[:, None, :], np.roll(e, -1, axis=1)) / twice_area[:, None, None]
    return ElementFrames(x, n, projector(n), tau, conormal, mid, lengths,
                         0.5 * twice_area, grad_lambda)


def compute_frames(mesh):
    return frames_from_vertices(mesh.vertices[mesh.triangles])


# OFF import / export

def write_off(mesh, path):
    with open(path, "w") as fh:
        fh.write("OFF\n")
        fh.write(f"{mesh.n_vertices} {mesh.n_triangles} {mesh.n_edges}\n")
        for v in mesh.vertices:
            fh.write(f"{v[0]:.17g} {v[1]:.17g} {v[2]:.17g}\n")
        for t in mesh.triangles:
            fh.write(f"3 {t[0]} {t[1]} {t[2]}\n")


def read_off(path, surface):
    """Read an OFF triangle mesh; vertices are snapped onto ``surface``."""
    with open(path) as fh:
        tokens = [ln.split("#", 1)[0].split() for ln in fh]
    tokens = [t for t in tokens if t]
    if tokens[0][0] != "OFF":
        raise ValueError(f"{path}: missing OFF header")
    header = tokens[0][1:] or tokens[1]
    start = 1 if tokens[0][1:] else 2
    nv, nf = int(header[0]), int(header[1])
    verts = np.array([[float(c) for c in t[:3]] for t in tokens[start:start + nv]])
    faces = []
    for t in tokens[start + nv:start + nv + nf]:
        if int(t[0]) != 3:
            raise ValueError(f"{path}: only triangles are supported")
        faces.append([int(c) for c in t[1:4]])
    verts = surface.closest_point(verts).position
    return SurfaceMesh(surface, verts, np.array(faces))
