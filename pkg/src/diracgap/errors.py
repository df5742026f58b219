"""Exception hierarchy shared across the toolkit.

DomainError covers invalid or rejected geometry; SolverError covers numerical
failures downstream of a valid domain. The CLI maps these onto exit codes.
"""


class DiracgapError(Exception):
    pass


class DomainError(DiracgapError):
    """Invalid domain description or failed geometric validation."""


class NonPositiveRadius(DomainError):
    """Radial boundary function r(theta) is not strictly positive."""


class UnivalenceViolation(DomainError):
    """Conformal coefficients fail |c1| > sum(n*|cn|, n>=2)."""


class GridTooCoarse(DomainError):
    """Interior grid spacing leaves fewer than 50 points inside."""


class GenerationFailure(DomainError):
    """Random domain generation exhausted its redraw budget."""


class SolverError(DiracgapError):
    """Numerical solver failed to produce an accepted result."""


class RepelFailure(SolverError):
    """Node repulsion did not reach the minimum-spacing target."""


class NoEigenvalueFound(SolverError):
    """No singular-value minimum passed the acceptance tolerance."""


class MassDegenerate(SolverError):
    """Mass-matrix truncation left fewer than 10 usable modes."""


class BadBracket(SolverError):
    """Root bracket does not straddle a sign change."""
