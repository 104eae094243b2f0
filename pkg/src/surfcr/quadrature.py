"""Quadrature rules on triangles (barycentric, area-normalised) and edges."""
import itertools
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class QuadratureRule:
    """Triangle rule with barycentric ``points`` (Q, 3) and ``weights`` summing to 1.

    Integrate over a triangle K as ``area(K) * sum(weights * g(points))``.
    """
    points: np.ndarray
    weights: np.ndarray
    degree: int

    def __len__(self):
        return len(self.weights)


def _orbit3(a):
    return [(a, a, 1 - 2 * a), (a, 1 - 2 * a, a), (1 - 2 * a, a, a)]


def _orbit6(a, b):
    return sorted(set(itertools.permutations((a, b, 1 - a - b))))


def _build(groups, degree):
    pts, wts = [], []
    for w, orbit in groups:
        pts.extend(orbit)
        wts.extend([w] * len(orbit))
    return QuadratureRule(np.array(pts, dtype=float), np.array(wts, dtype=float), degree)


_S15 = np.sqrt(15.0)

_RULES = {
    1: _build([(1.0, [(1 / 3, 1 / 3, 1 / 3)])], 1),
    # edge-midpoint rule
    2: _build([(1 / 3, [(0.5, 0.5, 0.0), (0.0, 0.5, 0.5), (0.5, 0.0, 0.5)])], 2),
    # Dunavant, 6 points
    4: _build([
        (0.223381589678011, _orbit3(0.445948490915965)),
        (0.109951743655322, _orbit3(0.091576213509771)),
    ], 4),
    # Radon, 7 points
    5: _build([
        (9 / 40, [(1 / 3, 1 / 3, 1 / 3)]),
        ((155 + _S15) / 1200, _orbit3((6 + _S15) / 21)),
        ((155 - _S15) / 1200, _orbit3((6 - _S15) / 21)),
    ], 5),
    # Dunavant, 12 points
    6: _build([
        (0.116786275726379, _orbit3(0.249286745170910)),
        (0.050844906370207, _orbit3(0.063089014491502)),
        (0.082851075618374, _orbit6(0.053145049844817, 0.310352451033784)),
    ], 6),
}


def triangle_rule(degree):
    """Smallest tabulated rule exact for polynomials of total ``degree``."""
    for d in sorted(_RULES):
        if d >= degree:
            return _RULES[d]
    raise ValueError(f"no triangle rule of degree {degree} (max {max(_RULES)})")


def edge_rule(n=5):
    """Gauss-Legendre rule on [0, 1]: (parameters t, weights summing to 1)."""
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def map_points(vertices, bary):
    """Physical points for barycentric ``bary`` (Q, 3) on triangles (F, 3, 3) -> (F, Q, 3)."""
    return np.einsum("qa,fai->fqi", bary, vertices)
