"""Exception hierarchy shared across the package."""


class AdqecError(Exception):
    """Base class for all errors raised by this package."""


class OutOfRange(AdqecError):
    """A numeric parameter lies outside its admissible range."""


class ShapeMismatch(AdqecError):
    """Operator/state dimensions are incompatible."""


class DimensionCap(AdqecError):
    """A requested Hilbert-space dimension exceeds the configured cap."""


class NotPSD(AdqecError):
    """A matrix expected to be positive semidefinite has a negative eigenvalue."""


class NotContraction(AdqecError):
    """An operator expected to satisfy R†R ⪯ I has a singular value above one."""


class ChiZero(AdqecError):
    """A group-overlap scalar χ is numerically zero, so the recovery weighting 1/χ is undefined."""


class ConditionsNotMet(AdqecError):
    """The grouped error-correction conditions fail for the given code/channel/grouping."""


class SingularSupport(AdqecError):
    """The channel output of the reference state has (numerically) empty support."""


class SchemaError(AdqecError):
    """A JSON document does not match the expected schema."""


class NotOrthonormal(AdqecError):
    """Codeword vectors are not orthonormal within tolerance."""


class LevelOverflow(AdqecError):
    """A single-mode encoding needs a level at or above the available dimension."""


class UnsupportedK(AdqecError):
    """Operation only defined for codes with a single logical qubit."""


class InsufficientSamples(AdqecError):
    """Too few curve samples for the requested polynomial fit."""
