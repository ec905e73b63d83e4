"""Exception and warning types raised across the package."""


class CloakError(Exception):
    """Base class for all errors raised by cloaklab."""


class RangeError(CloakError, ValueError):
    """Order or argument outside the supported range of a cylinder function."""


class DomainError(CloakError, ValueError):
    """Point outside the domain of a map or of a field expansion."""


class SingularPoint(DomainError):
    """The blow-up map is undefined at the origin."""


class SingularSurface(DomainError):
    """Ideal material parameters are singular on the cloaking surface |x| = 1."""


class DegenerateJacobian(CloakError, ValueError):
    """Push-forward requested through a map with vanishing Jacobian determinant."""


class OriginSingular(DomainError):
    """Field evaluated at (or too close to) the point source at the origin."""


class DegenerateDenominator(CloakError, ArithmeticError):
    """The common denominator D_n of the mode formulas underflowed."""


class TransmissionEigenvalue(CloakError, ArithmeticError):
    """omega**2 is (numerically) an eigenvalue of the truncated transmission problem."""

    def __init__(self, message, n=None):
        super().__init__(message)
        self.n = n


class SingularSystem(CloakError, ArithmeticError):
    """The 3x3 mode system is exactly singular."""


class ResonanceSingular(CloakError, ArithmeticError):
    """B_n underflowed, so the interior gain A_n / B_n is undefined."""


class ResonantFrequency(CloakError, ArithmeticError):
    """The ideal-limit coefficient is requested at a resonance of the non-local problem."""

    def __init__(self, message, n=None):
        super().__init__(message)
        self.n = n


class VacuumDirichletEigenvalue(CloakError, ArithmeticError):
    """J_|n|(3 omega) vanishes, so the vacuum DN map is undefined for mode n."""


class OracleSingular(CloakError, ArithmeticError):
    """The finite-difference oracle system is singular (near resonance)."""


class IllConditioned(RuntimeWarning):
    """The direct mode system is badly conditioned; the solution is still returned."""


class ScanWarning(RuntimeWarning):
    """Resonance scan step may be too coarse to separate neighbouring roots."""
