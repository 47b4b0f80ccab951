"""Exception types shared across the package."""


class AdmissibilityError(ValueError):
    """A curvature vector lies outside the open cone where f is defined."""


class DegenerateHeightError(ValueError):
    """Graph height u <= 0; the hyperbolic shape operator is undefined."""


class NonConvergenceError(RuntimeError):
    """Newton iteration (or continuation bisection) failed to converge."""


class SingularJacobianError(RuntimeError):
    """The linearized system could not be factored."""


class AdmissibilityLostError(RuntimeError):
    """Residual evaluation hit inadmissible curvatures at one or more nodes."""

    def __init__(self, nodes, message=None):
        self.nodes = list(nodes)
        super().__init__(message or f"curvature left the cone at nodes {self.nodes[:8]}"
                         + ("..." if len(self.nodes) > 8 else ""))


class UnsupportedSolutionError(ValueError):
    """Operation requires a solution layout (e.g. radial) that was not supplied."""


class ConfigError(ValueError):
    """Invalid run configuration; carries every violation found."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid configuration:\n  - " + "\n  - ".join(self.violations))
