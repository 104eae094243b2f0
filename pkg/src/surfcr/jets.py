"""Second-order forward-mode automatic differentiation in three variables.

A :class:`Jet2` carries the value, gradient and Hessian of a scalar
expression with respect to the ambient coordinates ``(x1, x2, x3)``.
All three parts are batched over a leading shape, so a single jet holds
derivative data for many points at once::

    >>> x1, x2, x3 = coordinates(np.array([3.0, 0.0, 0.0]))
    >>> (x1 * x1).gradient
    array([6., 0., 0.])

The elementary functions :func:`sin`, :func:`cos`, :func:`sqrt`, :func:`exp`
accept jets as well as plain floats/arrays, so one expression written
against them can be evaluated either way.
"""
import numpy as np

from .errors import DomainError

# denominators below this magnitude are treated as a division by zero
DIVISION_EPS = 1e-14


def _outer(a, b):
    return a[..., :, None] * b[..., None, :]


def _sym(h):
    return 0.5 * (h + np.swapaxes(h, -1, -2))


class Jet2:
    """Value, 3-gradient and symmetric 3x3 Hessian of a scalar field."""

    __slots__ = ("value", "gradient", "hessian")
    __array_priority__ = 100  # make ndarray <op> Jet2 defer to Jet2

    def __init__(self, value, gradient, hessian):
        self.value = np.asarray(value, dtype=float)
        self.gradient = np.asarray(gradient, dtype=float)
        self.hessian = np.asarray(hessian, dtype=float)

    @classmethod
    def constant(cls, c, shape=()):
        c = np.broadcast_to(np.asarray(c, dtype=float), shape)
        return cls(c.copy(), np.zeros(shape + (3,)), np.zeros(shape + (3, 3)))

    @property
    def shape(self):
        return self.value.shape

    def __repr__(self):
        return f"Jet2(value={self.value!r}, gradient={self.gradient!r})"

    def _chain(self, f0, f1, f2):
        # g = F(self) with F' = f1, F'' = f2 evaluated at self.value
        f1 = np.asarray(f1)[..., None]
        f2 = np.asarray(f2)[..., None, None]
        return Jet2(
            f0,
            f1 * self.gradient,
            _sym(f1[..., None] * self.hessian + f2 * _outer(self.gradient, self.gradient)),
        )

    # arithmetic

    def __neg__(self):
        return Jet2(-self.value, -self.gradient, -self.hessian)

    def __pos__(self):
        return self

    def __add__(self, other):
        if isinstance(other, Jet2):
            return Jet2(self.value + other.value, self.gradient + other.gradient,
                        self.hessian + other.hessian)
        other = np.asarray(other, dtype=float)
        shape = np.broadcast_shapes(self.shape, other.shape)
        return Jet2(self.value + other,
                    np.broadcast_to(self.gradient, shape + (3,)),
                    np.broadcast_to(self.hessian, shape + (3, 3)))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet2):
            a, b = self, other
            av = a.value[..., None]
            bv = b.value[..., None]
            cross = _outer(a.gradient, b.gradient)
            return Jet2(
                a.value * b.value,
                av * b.gradient + bv * a.gradient,
                _sym(av[..., None] * b.hessian + bv[..., None] * a.hessian
                     + cross + np.swapaxes(cross, -1, -2)),
            )
        other = np.asarray(other, dtype=float)
        return Jet2(self.value * other, self.gradient * other[..., None],
                    self.hessian * other[..., None, None])

    __rmul__ = __mul__

    def reciprocal(self):
        v = self.value
        if np.any(np.abs(v) < DIVISION_EPS):
            raise DomainError("division by a jet with (near) zero value")
        inv = 1.0 / v
        return self._chain(inv, -inv * inv, 2.0 * inv * inv * inv)

    def __truediv__(self, other):
        if isinstance(other, Jet2):
            return self * other.reciprocal()
        other = np.asarray(other, dtype=float)
        if np.any(np.abs(other) < DIVISION_EPS):
            raise DomainError("division by (near) zero")
        return self * (1.0 / other)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, p):
        if isinstance(p, Jet2):
            return exp(log(self) * p)
        p = float(p)
        if p == 0.0:
            return Jet2.constant(1.0, self.shape)
        if p == 1.0:
            return self
        if p == 2.0:
            return self * self
        v = self.value
        if not p.is_integer():
            if np.any(v < 0.0):
                raise DomainError("fractional power of a negative jet")
            if p < 2.0 and np.any(v == 0.0):
                raise DomainError("fractional power not twice differentiable at 0")
        elif p < 0 and np.any(np.abs(v) < DIVISION_EPS):
            raise DomainError("negative power of a (near) zero jet")
        return self._chain(v ** p, p * v ** (p - 1.0), p * (p - 1.0) * v ** (p - 2.0))


def coordinates(x):
    """Seed jets for the three coordinates at points ``x`` of shape (..., 3)."""
    x = np.asarray(x, dtype=float)
    shape = x.shape[:-1]
    eye = np.eye(3)
    zeros = np.zeros(shape + (3, 3))
    return tuple(Jet2(x[..., i], np.broadcast_to(eye[i], shape + (3,)), zeros)
                 for i in range(3))


def eval_jet(expr, x):
    """Evaluate ``expr(x1, x2, x3)`` as a :class:`Jet2` at points ``x``."""
    out = expr(*coordinates(x))
    if not isinstance(out, Jet2):  # constant expression
        out = Jet2.constant(out, np.shape(x)[:-1])
    return out


# elementary functions (work on Jet2 and on plain numbers/arrays)

def sin(u):
    if isinstance(u, Jet2):
        s, c = np.sin(u.value), np.cos(u.value)
        return u._chain(s, c, -s)
    return np.sin(u)


def cos(u):
    if isinstance(u, Jet2):
        s, c = np.sin(u.value), np.cos(u.value)
        return u._chain(c, -s, -c)
    return np.cos(u)


def exp(u):
    if isinstance(u, Jet2):
        e = np.exp(u.value)
        return u._chain(e, e, e)
    return np.exp(u)


def log(u):
    if isinstance(u, Jet2):
        if np.any(u.value <= 0.0):
            raise DomainError("log of a non-positive jet")
        inv = 1.0 / u.value
        return u._chain(np.log(u.value), inv, -inv * inv)
    return np.log(u)


def sqrt(u):
    if isinstance(u, Jet2):
        v = u.value
        if np.any(v < 0.0):
            raise DomainError("sqrt of a negative jet")
        if np.any(v < DIVISION_EPS):
            raise DomainError("sqrt is not differentiable at 0")
        s = np.sqrt(v)
        return u._chain(s, 0.5 / s, -0.25 / (s * v))
    return np.sqrt(u)


def stack_values(jets):
    """(…, n) array of values of a sequence of jets."""
    return np.stack([j.value for j in jets], axis=-1)


def stack_gradients(jets):
    """(…, n, 3) Jacobian rows of a sequence of jets."""
    return np.stack([j.gradient for j in jets], axis=-2)


def stack_hessians(jets):
    """(…, n, 3, 3) Hessians of a sequence of jets."""
    return np.stack([j.hessian for j in jets], axis=-3)
