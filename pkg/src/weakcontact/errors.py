"""Exception hierarchy.

Structural failures (degenerate charts, frames, hypotheses of the Killing
construction) are raised; identity failures are never raised, they are
reported as residuals.
"""


class WeakContactError(Exception):
    """Base class for all package errors."""


class JetDomainError(WeakContactError, ArithmeticError):
    """Division by a zero value part, sqrt/log of a nonpositive value part."""


class JetOrderError(WeakContactError, ValueError):
    """A derivative was requested beyond the available jet order."""


class DegenerateChart(WeakContactError):
    """Rank-deficient embedding Jacobian or singular metric."""


class DegenerateFrame(WeakContactError):
    """Too few independent vectors to span the contact distribution."""


class DegeneratePlane(WeakContactError):
    """Sectional curvature requested on linearly dependent vectors."""


class InternalInconsistency(WeakContactError):
    """Two independent computation routes disagree (engine bug trap)."""


class DegenerateStructure(WeakContactError):
    """A hypothesis of the unit-Killing construction is violated."""

    reason = "DegenerateStructure"

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class NotUnit(DegenerateStructure):
    reason = "NotUnit"


class NotKilling(DegenerateStructure):
    reason = "NotKilling"


class DegenerateQ(DegenerateStructure):
    reason = "DegenerateQ"


class UnknownManifold(WeakContactError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown manifold"


class InvalidConfig(WeakContactError, ValueError):
    pass
