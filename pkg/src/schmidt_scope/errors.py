"""Exception types shared across the package."""

from dataclasses import dataclass


class SchmidtScopeError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(SchmidtScopeError, ValueError):
    """Shapes or declared local dimensions are inconsistent."""


class NumericError(SchmidtScopeError, ArithmeticError):
    """A decomposition failed to converge or produced non-finite values."""


@dataclass(frozen=True)
class Violation:
    """One violated density-operator invariant.

    ``kind`` is one of ``"NotHermitian"``, ``"TraceNotOne"``, ``"NotPositive"``.
    ``magnitude`` is the measured size of the violation and ``tol`` the threshold
    it exceeded.
    """

    kind: str
    magnitude: float
    tol: float

    def __str__(self) -> str:
        return f"{self.kind} (magnitude {self.magnitude:.3e} > tol {self.tol:.1e})"


class InvalidDensityError(SchmidtScopeError, ValueError):
    """Raised by density validation; carries every violated invariant."""

    def __init__(self, violations):
        self.violations = tuple(violations)
        super().__init__("invalid density operator: " + "; ".join(str(v) for v in self.violations))

    @property
    def kinds(self):
        return tuple(v.kind for v in self.violations)


class NotTracePreservingError(SchmidtScopeError, ValueError):
    """Kraus operators do not satisfy sum_i K_i^dag K_i = I."""

    def __init__(self, deviation: float, tol: float):
        self.deviation = deviation
        self.tol = tol
        super().__init__(f"Kraus completeness violated: max|sum K^dag K - I| = {deviation:.3e} > {tol:.1e}")


class NegativeRadicandError(SchmidtScopeError, ValueError):
    """The transform-criterion bound has a negative radicand.

    This only happens when the supplied epsilon values are too small for the
    chosen superoperators, i.e. the hypotheses of the bound do not hold.
    """

    def __init__(self, side: str, value: float):
        self.side = side
        self.value = value
        super().__init__(f"negative radicand {value:.3e} on subsystem {side}; eps too small for the supplied superoperators")


class FilterNotContractiveError(SchmidtScopeError, ValueError):
    """A local filter has operator norm above one."""

    def __init__(self, which: str, norm: float):
        self.which = which
        self.norm = norm
        super().__init__(f"filter {which} has operator norm {norm:.6g} > 1")
