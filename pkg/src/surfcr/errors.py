"""Exception types raised by the toolkit."""


class SurfcrError(Exception):
    """Base class for all errors raised by surfcr."""


class OutOfTube(SurfcrError, ValueError):
    """A point lies outside the tubular neighbourhood of the surface."""


class DegenerateGradient(SurfcrError, ValueError):
    pass


class NewtonDivergence(SurfcrError, RuntimeError):
    pass


class NotOnSurface(SurfcrError, ValueError):
    pass


class DomainError(SurfcrError, ValueError):
    """Jet evaluation left the domain of an elementary function."""


class InvalidResolution(SurfcrError, ValueError):
    pass


class DegenerateTriangle(SurfcrError, ValueError):
    pass


class InsufficientMeshes(SurfcrError, ValueError):
    pass


class QuadratureFailure(SurfcrError, ValueError):
    pass


class NotSymmetric(SurfcrError, ValueError):
    pass


class MaxIterations(SurfcrError, RuntimeError):
    """CG hit its iteration cap; ``residual`` holds the relative residual reached."""

    def __init__(self, iterations, residual):
        super().__init__(
            f"CG did not converge in {iterations} iterations "
            f"(relative residual {residual:.3e})")
        self.iterations = iterations
        self.residual = residual
