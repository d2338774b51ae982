"""Exception types shared across the library."""


class S1FCError(Exception):
    """Base class for library-specific failures."""


class SingularLimit(S1FCError):
    """A limit that must be finite has a nonvanishing singular part."""


class SingularExtraction(S1FCError):
    """Mode extraction hit a pole with no regular part at the origin."""


class NonTerminating(S1FCError):
    """Normal ordering exceeded the admissible rewrite depth.

    Firing signals a rule-table transcription bug, not a usage error.
    """


class CalibrationFailure(S1FCError):
    """A structural identity used to pin a free constant failed exactly."""


class DegenerateDominantEigenvalue(S1FCError):
    """Top two transfer-matrix eigenvalues coincide in modulus."""


class SingularSystem(S1FCError):
    """Linear fit system is rank deficient for the requested basis."""


class NotADensityMatrix(S1FCError):
    """Entropy input failed symmetry, positivity or unit-trace checks."""


class ZeroDenominator(S1FCError):
    """Attempted to build a rational function with zero denominator."""


class ResidualOmega(S1FCError):
    """A two-point function atom survived a cancellation that must be exact."""


class PoleAtZ(S1FCError):
    """Numeric evaluation requested exactly at a pole of the function."""


class UncalibratedSign(S1FCError):
    """No calibrated sign convention exists for the requested monomial class."""


class DirectionDependence(S1FCError):
    """A homogeneous-limit constant term varies with the direction tuple."""


class DimensionMismatch(S1FCError):
    """Operator or state dimensions are incompatible."""


class ZeroEigenvalue(S1FCError):
    """A transfer-matrix eigenvalue needed in a denominator vanishes."""


class ConfigError(S1FCError):
    """Invalid command-line or file configuration."""
