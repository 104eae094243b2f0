"""Implicitly defined closed surfaces and their closest-point geometry.

Every surface exposes the signed distance ``d``, the unit normal
``n = grad d`` (constant along normal rays), the closest-point map
``p(x) = x - d(x) n(p(x))`` with its Jacobian, and the normal extension
``u~(x) = u(p(x))`` of surface fields.  All methods take points of shape
``(3,)`` or ``(..., 3)`` and vectorise over the leading axes.
"""
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import jets
from .errors import (DegenerateGradient, NewtonDivergence, NotOnSurface,
                     OutOfTube)


@dataclass(frozen=True)
class SurfacePoint:
    position: np.ndarray
    normal: np.ndarray
    projector: np.ndarray


def projector(n):
    """Tangential projector I - n n^T for unit normals of shape (..., 3)."""
    n = np.asarray(n, dtype=float)
    return np.eye(3) - n[..., :, None] * n[..., None, :]


def _unit(v):
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


class LevelSurface:
    """Common interface; subclasses provide ``level_set``, ``_distance``,
    ``_closest`` and ``_closest_jacobian``."""

    delta: float
    # surfaces with a closed-form normal extension override this
    has_normal_field = True

    def level_set(self, x1, x2, x3):
        raise NotImplementedError

    def normal_field(self, x1, x2, x3):
        """Closed-form normal extension, usable with jets or plain arrays."""
        raise NotImplementedError(
            f"{type(self).__name__} has no closed-form normal field")

    def phi(self, x):
        x = np.asarray(x, dtype=float)
        return np.asarray(self.level_set(x[..., 0], x[..., 1], x[..., 2]))

    # tube handling

    def _check_tube(self, d):
        if np.any(np.abs(d) > self.delta):
            worst = float(np.max(np.abs(d)))
            raise OutOfTube(f"|d(x)| = {worst:.6g} exceeds tube half-width {self.delta}")

    def check_on_surface(self, y, tol=1e-10):
        if np.any(np.abs(self.phi(y)) >= tol):
            raise NotOnSurface(f"max |phi(y)| = {np.max(np.abs(self.phi(y))):.3e} >= {tol}")

    # public operations

    def signed_distance(self, x):
        d = self._distance(np.asarray(x, dtype=float))
        self._check_tube(d)
        return d

    def closest_point(self, x):
        x = np.asarray(x, dtype=float)
        self._check_tube(self._distance(x))
        p, n = self._closest(x)
        return SurfacePoint(p, n, projector(n))

    def unit_normal(self, x):
        return self.closest_point(x).normal

    def closest_point_jacobian(self, x):
        x = np.asarray(x, dtype=float)
        self._check_tube(self._distance(x))
        return self._closest_jacobian(x)

    def extend(self, u, x):
        """Normal extension ``u(p(x))`` of a field given on the surface.

        ``u`` maps surface points (..., 3) to scalars (...) or vectors (..., k).
        """
        return u(self.closest_point(x).position)

    extend_scalar = extend
    extend_vector = extend

    def sample(self, n, rng):
        """``n`` pseudo-random points on the surface."""
        raise NotImplementedError


@dataclass(frozen=True)
class Sphere(LevelSurface):
    radius: float = 1.0
    delta: Optional[float] = None

    def __post_init__(self):
        if self.delta is None:
            object.__setattr__(self, "delta", 0.5 * self.radius)

    @property
    def area(self):
        return 4.0 * np.pi * self.radius ** 2

    def level_set(self, x1, x2, x3):
        return x1 * x1 + x2 * x2 + x3 * x3 - self.radius ** 2

    def normal_field(self, x1, x2, x3):
        r = jets.sqrt(x1 * x1 + x2 * x2 + x3 * x3)
        return x1 / r, x2 / r, x3 / r

    def _distance(self, x):
        return np.linalg.norm(x, axis=-1) - self.radius

    def _closest(self, x):
        r = np.linalg.norm(x, axis=-1, keepdims=True)
        if np.any(r < 1e-12):
            raise DegenerateGradient("closest point undefined at the sphere centre")
        n = x / r
        return self.radius * n, n

    def _closest_jacobian(self, x):
        r = np.linalg.norm(x, axis=-1)
        n = x / r[..., None]
        return (self.radius / r)[..., None, None] * projector(n)

    def sample(self, n, rng):
        return self.radius * _unit(rng.standard_normal((n, 3)))


@dataclass(frozen=True)
class Torus(LevelSurface):
    """Torus of revolution about the x3-axis."""
    major_radius: float = 1.0
    minor_radius: float = 0.5
    delta: Optional[float] = None

    def __post_init__(self):
        if self.delta is None:
            object.__setattr__(self, "delta", 0.4 * self.minor_radius)

    @property
    def area(self):
        return 4.0 * np.pi ** 2 * self.major_radius * self.minor_radius

    def level_set(self, x1, x2, x3):
        rho = jets.sqrt(x1 * x1 + x2 * x2)
        return -(self.minor_radius ** 2 - x3 * x3 - (rho - self.major_radius) ** 2)

    def normal_field(self, x1, x2, x3):
        rho = jets.sqrt(x1 * x1 + x2 * x2)
        s = self.major_radius / rho
        q1, q2 = x1 - s * x1, x2 - s * x2
        qn = jets.sqrt(q1 * q1 + q2 * q2 + x3 * x3)
        return q1 / qn, q2 / qn, x3 / qn

    def _distance(self, x):
        rho = np.hypot(x[..., 0], x[..., 1])
        return np.hypot(rho - self.major_radius, x[..., 2]) - self.minor_radius

    def _centerline(self, x):
        # nearest point on the centre circle, by radial projection in the x1x2-plane
        rho = np.hypot(x[..., 0], x[..., 1])
        if np.any(rho < 1e-12):
            raise OutOfTube("closest point undefined on the torus axis")
        e = np.zeros_like(x)
        e[..., 0] = x[..., 0] / rho
        e[..., 1] = x[..., 1] / rho
        return rho, e

    def _closest(self, x):
        rho, e = self._centerline(x)
        q = x - self.major_radius * e
        qn = np.linalg.norm(q, axis=-1, keepdims=True)
        if np.any(qn < 1e-12):
            raise DegenerateGradient("closest point undefined on the centre circle")
        n = q / qn
        return self.major_radius * e + self.minor_radius * n, n

    def _closest_jacobian(self, x):
        rho, e = self._centerline(x)
        flat = np.diag([1.0, 1.0, 0.0])
        jc = (self.major_radius / rho)[..., None, None] * (flat - e[..., :, None] * e[..., None, :])
        q = x - self.major_radius * e
        qn = np.linalg.norm(q, axis=-1)
        n = q / qn[..., None]
        jq = np.eye(3) - jc
        return jc + (self.minor_radius / qn)[..., None, None] * projector(n) @ jq

    def sample(self, n, rng):
        theta = rng.uniform(0.0, 2 * np.pi, n)
        psi = rng.uniform(0.0, 2 * np.pi, n)
        return torus_point(theta, psi, self.major_radius, self.minor_radius)


def torus_point(theta, psi, major=1.0, minor=0.5):
    ring = major + minor * np.cos(psi)
    return np.stack([ring * np.cos(theta), ring * np.sin(theta), minor * np.sin(psi)], axis=-1)


@dataclass(frozen=True)
class GenericLevelSet(LevelSurface):
    """Surface ``{phi = 0}`` for a jet-compatible expression ``phi(x1, x2, x3)``.

    The closest point is found by Newton's method on the Lagrange system
    ``y - x + lam grad phi(y) = 0, phi(y) = 0``.  A closed-form normal
    extension may be supplied for use with the tangential operators.
    """
    expr: Callable = None
    delta: float = 0.2
    normal_expr: Optional[Callable] = None
    tol: float = 1e-13
    max_iter: int = 50

    @property
    def has_normal_field(self):
        return self.normal_expr is not None

    def level_set(self, x1, x2, x3):
        return self.expr(x1, x2, x3)

    def normal_field(self, x1, x2, x3):
        if self.normal_expr is None:
            return super().normal_field(x1, x2, x3)
        return self.normal_expr(x1, x2, x3)

    def _jet(self, y):
        return jets.eval_jet(self.expr, y)

    def _newton(self, x):
        x = np.atleast_2d(x)
        y = x.copy()
        # a few gradient-projection steps give the starting guess
        for _ in range(3):
            j = self._jet(y)
            g2 = np.sum(j.gradient ** 2, axis=-1)
            if np.any(g2 < 1e-24):
                raise DegenerateGradient("|grad phi| vanishes")
            y = y - (j.value / g2)[:, None] * j.gradient
        j = self._jet(y)
        lam = np.einsum("ni,ni->n", x - y, j.gradient) / np.sum(j.gradient ** 2, axis=-1)
        for _ in range(self.max_iter):
            j = self._jet(y)
            res = np.concatenate([y - x + lam[:, None] * j.gradient, j.value[:, None]], axis=1)
            if np.max(np.abs(res)) < self.tol:
                return y, lam, j
            jac = self._kkt(j, lam)
            step = np.linalg.solve(jac, -res[..., None])[..., 0]
            y = y + step[:, :3]
            lam = lam + step[:, 3]
        raise NewtonDivergence(f"closest point not found in {self.max_iter} iterations")

    @staticmethod
    def _kkt(j, lam):
        n = len(lam)
        jac = np.zeros((n, 4, 4))
        jac[:, :3, :3] = np.eye(3) + lam[:, None, None] * j.hessian
        jac[:, :3, 3] = j.gradient
        jac[:, 3, :3] = j.gradient
        return jac

    def _distance(self, x):
        shape = x.shape[:-1]
        x2 = x.reshape(-1, 3)
        y, _, _ = self._newton(x2)
        d = np.sign(self.phi(x2)) * np.linalg.norm(x2 - y, axis=-1)
        return d.reshape(shape)

    def _closest(self, x):
        shape = x.shape
        y, _, j = self._newton(x.reshape(-1, 3))
        n = _unit(j.gradient)
        return y.reshape(shape), n.reshape(shape)

    def _closest_jacobian(self, x):
        shape = x.shape[:-1] + (3, 3)
        x2 = x.reshape(-1, 3)
        _, lam, j = self._newton(x2)
        rhs = np.zeros((len(x2), 4, 3))
        rhs[:, :3, :] = np.eye(3)
        dy = np.linalg.solve(self._kkt(j, lam), rhs)[:, :3, :]
        return dy.reshape(shape)
